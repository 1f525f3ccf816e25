#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "qecml/costmodel.h"
#include "qecml/io.h"

using namespace qecml;
using namespace qecml::io;

namespace {

trainer::TrainingTrace sample_trace() {
  trainer::TrainingTrace trace;
  trace.seed = 1234567890123456789ull;
  trace.config_hash = 0xdeadbeefcafef00dull;
  trace.final_params = {0.1 + 0.2, -1.0 / 3.0, 1e-300};
  trace.records.push_back({0.75, 1.0 / 7.0, 2.5e-5, 0.015625});
  trace.records.push_back({1.0, 0.0, 3.0e-17, 0.0});
  trace.records.push_back({0.25, 123.456, 9.9e99, 0.5});
  return trace;
}

bool traces_equal(const trainer::TrainingTrace& a, const trainer::TrainingTrace& b) {
  if (a.seed != b.seed || a.config_hash != b.config_hash ||
      a.final_params != b.final_params || a.records.size() != b.records.size())
    return false;
  for (size_t i = 0; i < a.records.size(); ++i) {
    if (a.records[i].accuracy != b.records[i].accuracy ||
        a.records[i].loss != b.records[i].loss ||
        a.records[i].avg_sq_gradient != b.records[i].avg_sq_gradient ||
        a.records[i].discard_rate != b.records[i].discard_rate)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("trace json round trip is bit exact") {
  const trainer::TrainingTrace trace = sample_trace();
  const std::string text = trace_to_json(trace);
  CHECK(text.find("\"schema_version\"") != std::string::npos);
  CHECK(traces_equal(trace_from_json(text), trace));

  trainer::TrainingTrace empty;
  empty.seed = 1;
  CHECK(traces_equal(trace_from_json(trace_to_json(empty)), empty));
}

TEST_CASE("trace json rejects malformed documents") {
  CHECK_THROWS_AS(trace_from_json("not json at all"), std::invalid_argument);
  CHECK_THROWS_AS(trace_from_json("{}"), std::invalid_argument);
  CHECK_THROWS_AS(
      trace_from_json(R"({"schema_version": 99, "seed": 0, "config_hash": 0,
                          "final_params": [], "records": []})"),
      std::invalid_argument);
  CHECK_THROWS_AS(
      trace_from_json(R"({"schema_version": 1, "config_hash": 0,
                          "final_params": [], "records": []})"),
      std::invalid_argument);
  CHECK_THROWS_AS(
      trace_from_json(R"({"schema_version": 1, "seed": 0, "config_hash": 0,
                          "final_params": [], "records": 5})"),
      std::invalid_argument);
  CHECK_THROWS_AS(
      trace_from_json(R"({"schema_version": 1, "seed": "zero", "config_hash": 0,
                          "final_params": [], "records": []})"),
      std::invalid_argument);
}

TEST_CASE("trace csv round trip is bit exact") {
  const trainer::TrainingTrace trace = sample_trace();
  const std::string text = trace_to_csv(trace);
  CHECK(text.rfind("# schema_version = 1\n", 0) == 0);
  CHECK(text.find("# seed = 1234567890123456789\n") != std::string::npos);
  CHECK(text.find("iteration,accuracy,loss,avg_sq_gradient,discard_rate\n") !=
        std::string::npos);
  CHECK(traces_equal(trace_from_csv(text), trace));

  trainer::TrainingTrace empty;
  empty.seed = 7;
  empty.config_hash = 9;
  CHECK(traces_equal(trace_from_csv(trace_to_csv(empty)), empty));
}

TEST_CASE("trace csv rejects structural damage") {
  const std::string good = trace_to_csv(sample_trace());

  CHECK_THROWS_AS(trace_from_csv(""), std::invalid_argument);
  CHECK_THROWS_AS(trace_from_csv("# schema_version = 2\n" +
                                 good.substr(good.find("# seed"))),
                  std::invalid_argument);
  CHECK_THROWS_AS(trace_from_csv("# nonsense metadata line without equals\n" + good),
                  std::invalid_argument);
  CHECK_THROWS_AS(trace_from_csv("# unknown_key = 5\n" + good),
                  std::invalid_argument);

  std::string bad_header = good;
  const size_t head = bad_header.find("iteration,accuracy");
  bad_header.replace(head, 9, "iterazion");
  CHECK_THROWS_AS(trace_from_csv(bad_header), std::invalid_argument);

  std::string bad_columns = good;
  bad_columns.replace(bad_columns.find("\n0,"), 4, "\n0,1.5,");
  CHECK_THROWS_AS(trace_from_csv(bad_columns), std::invalid_argument);

  std::string bad_numbering = good;
  bad_numbering.replace(bad_numbering.find("\n1,"), 3, "\n5,");
  CHECK_THROWS_AS(trace_from_csv(bad_numbering), std::invalid_argument);
}

TEST_CASE("resource estimate json round trip") {
  EstimateRequest request;
  request.eps_total = 1e-4;
  request.shape.layers = 100;
  const ResourceEstimate original = estimate(request);
  const std::string text = resource_estimate_to_json(original);
  const ResourceEstimate back = resource_estimate_from_json(text);

  CHECK(back.code_distance == original.code_distance);
  CHECK(back.epsilon_l == original.epsilon_l);
  CHECK(back.epsilon_t == original.epsilon_t);
  CHECK(back.distillation_name == original.distillation_name);
  CHECK(back.data_qubits == original.data_qubits);
  CHECK(back.factory_qubits == original.factory_qubits);
  CHECK(back.n_rotations == original.n_rotations);
  CHECK(back.t_per_rotation == original.t_per_rotation);
  CHECK(back.n_t_gates == original.n_t_gates);
  CHECK(back.n_logical_cycles == original.n_logical_cycles);
  CHECK(back.n_patch_cycles == original.n_patch_cycles);
  CHECK(back.cycle_time_us == original.cycle_time_us);
  CHECK(back.runtime_ms == original.runtime_ms);
  CHECK(back.total_failure_probability == original.total_failure_probability);
  CHECK(back.budget.total == original.budget.total);
  CHECK(back.budget.logical == original.budget.logical);
  CHECK(back.budget.distillation == original.budget.distillation);
  CHECK(back.budget.synthesis == original.budget.synthesis);

  CHECK_THROWS_AS(resource_estimate_from_json("{\"schema_version\": 1}"),
                  std::invalid_argument);
}

TEST_CASE("sweep summary json round trip with and without traces") {
  trainer::SweepSummary summary;
  summary.seeds = {1, 2};
  trainer::CellSummary cell;
  cell.cell = {NoiseModel::kEnvironmental, 0.0025, 2, 1.0};
  cell.mean_final_accuracy = 0.9875;
  cell.std_final_accuracy = 0.03125;
  cell.final_accuracies = {1.0, 0.975};
  summary.cells.push_back(cell);

  const trainer::SweepSummary lean = sweep_summary_from_json(sweep_summary_to_json(summary));
  REQUIRE(lean.cells.size() == 1);
  CHECK(lean.seeds == summary.seeds);
  CHECK(lean.cells[0].cell.model == NoiseModel::kEnvironmental);
  CHECK(lean.cells[0].cell.p == 0.0025);
  CHECK(lean.cells[0].cell.rounds == 2);
  CHECK(lean.cells[0].cell.f_anc == 1.0);
  CHECK(lean.cells[0].mean_final_accuracy == 0.9875);
  CHECK(lean.cells[0].std_final_accuracy == 0.03125);
  CHECK(lean.cells[0].final_accuracies == cell.final_accuracies);
  CHECK(lean.traces.empty());

  summary.traces.push_back({sample_trace(), sample_trace()});
  const trainer::SweepSummary full = sweep_summary_from_json(sweep_summary_to_json(summary));
  REQUIRE(full.traces.size() == 1);
  REQUIRE(full.traces[0].size() == 2);
  CHECK(traces_equal(full.traces[0][0], sample_trace()));

  CHECK_THROWS_AS(sweep_summary_from_json("[1, 2]"), std::invalid_argument);
}

TEST_CASE("shot outcome json lines round trip") {
  qed422::ShotOutcome outcome;
  outcome.discarded = true;
  outcome.logical_state = -1;
  outcome.flags.push_back({true, false});
  outcome.flags.push_back({false, true});
  outcome.injections.push_back({3, 1, 2});
  outcome.injections.push_back({7, 0, 3});

  const std::string line = shot_outcome_to_json_line(outcome);
  CHECK(line.find('\n') == std::string::npos);
  const qed422::ShotOutcome back = shot_outcome_from_json_line(line);
  CHECK(back.discarded == outcome.discarded);
  CHECK(back.logical_state == outcome.logical_state);
  REQUIRE(back.flags.size() == 2);
  CHECK(back.flags[0].x_stabilizer);
  CHECK_FALSE(back.flags[0].z_stabilizer);
  CHECK(back.flags[1].z_stabilizer);
  REQUIRE(back.injections.size() == 2);
  CHECK(back.injections[0].position == 3);
  CHECK(back.injections[0].qubit == 1);
  CHECK(back.injections[0].pauli == 2);

  qed422::ShotOutcome kept;
  kept.logical_state = 2;
  const qed422::ShotOutcome lean = shot_outcome_from_json_line(shot_outcome_to_json_line(kept));
  CHECK_FALSE(lean.discarded);
  CHECK(lean.logical_state == 2);
  CHECK(lean.flags.empty());
  CHECK(lean.injections.empty());

  CHECK_THROWS_AS(shot_outcome_from_json_line("{broken"), std::invalid_argument);
}

TEST_CASE("error documents carry kind and message") {
  const std::string text = error_to_json("bad-input", "p must be in [0, 1]");
  CHECK(text.find("\"schema_version\"") != std::string::npos);
  CHECK(text.find("\"kind\":\"bad-input\"") != std::string::npos);
  CHECK(text.find("\"message\":\"p must be in [0, 1]\"") != std::string::npos);
  CHECK(text.find('\n') == std::string::npos);
}

TEST_CASE("config parsing handles sections comments and whitespace") {
  const std::string text =
      "top_key = 1     # trailing comment\n"
      "\n"
      "; full-line comment\n"
      "[train-parity]\n"
      "  p = 0.01\n"
      "rounds=2\n"
      "name = hello world\n"
      "[empty-section]\n";
  const ConfigFile config = parse_config(text);
  CHECK(config.has("", "top_key"));
  CHECK(config.at("", "top_key") == "1");
  CHECK(config.at("train-parity", "p") == "0.01");
  CHECK(config.at("train-parity", "rounds") == "2");
  CHECK(config.at("train-parity", "name") == "hello world");
  CHECK(config.sections.count("empty-section") == 1);
  CHECK_FALSE(config.has("train-parity", "missing"));
  CHECK_THROWS_AS(config.at("train-parity", "missing"), std::out_of_range);
}

TEST_CASE("config parsing errors name the offending line") {
  CHECK_THROWS_WITH_AS(parse_config("a = 1\na = 2\n"),
                       "config line 2: duplicate key 'a' in section []",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config("[s]\nx = 1\nx = 3\n"),
                       "config line 3: duplicate key 'x' in section [s]",
                       std::invalid_argument);
  CHECK_THROWS_AS(parse_config("[unterminated\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("[]\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("just a bare token\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("= naked value\n"), std::invalid_argument);
}

TEST_CASE("config serialization round trips") {
  ConfigFile config;
  config.sections[""]["alpha"] = "1";
  config.sections["b-section"]["key"] = "value with spaces";
  config.sections["b-section"]["num"] = "42";
  config.sections["a-section"]["z"] = "0.5";

  const std::string text = serialize_config(config);
  const ConfigFile back = parse_config(text);
  CHECK(back.sections == config.sections);
  CHECK(text.rfind("alpha = 1\n", 0) == 0);  // section-less keys lead
}

TEST_CASE("unknown keys and sections are rejected by name") {
  const ConfigFile config = parse_config("[train]\np = 0.1\nq = 2\n");
  const std::map<std::string, std::set<std::string>> allowed{
      {"train", {"p", "rounds"}}};
  CHECK_THROWS_WITH_AS(reject_unknown_keys(config, allowed),
                       "config: unknown key 'q' in section [train]",
                       std::invalid_argument);

  const ConfigFile stray = parse_config("[mystery]\nx = 1\n");
  CHECK_THROWS_WITH_AS(reject_unknown_keys(stray, allowed),
                       "config: unknown section [mystery]", std::invalid_argument);

  const ConfigFile fine = parse_config("[train]\np = 0.1\nrounds = 2\n");
  CHECK_NOTHROW(reject_unknown_keys(fine, allowed));
}

TEST_CASE("typed config getters parse and diagnose") {
  const ConfigFile config = parse_config(
      "[v]\n"
      "d = 2.5e-3\n"
      "i = -17\n"
      "u = 18446744073709551615\n"
      "neg = -5\n"
      "b1 = YES\n"
      "b2 = off\n"
      "b3 = 1\n"
      "bad = maybe\n"
      "s = text value\n"
      "dl = 0.5, 1e-2 0.25\n"
      "il = 1,2 3\n"
      "ul = 10 20,30\n"
      "huge = 99999999999999\n"
      "notnum = abc\n");

  CHECK(config_double(config, "v", "d", 0.0) == 2.5e-3);
  CHECK(config_double(config, "v", "missing", 1.5) == 1.5);
  CHECK(config_int(config, "v", "i", 0) == -17);
  CHECK(config_int(config, "v", "missing", 3) == 3);
  CHECK(config_u64(config, "v", "u", 0) == 18446744073709551615ull);
  CHECK(config_bool(config, "v", "b1", false));
  CHECK_FALSE(config_bool(config, "v", "b2", true));
  CHECK(config_bool(config, "v", "b3", false));
  CHECK(config_bool(config, "v", "missing", true));
  CHECK(config_string(config, "v", "s", "") == "text value");
  CHECK(config_string(config, "v", "missing", "fb") == "fb");
  CHECK(config_double_list(config, "v", "dl", {}) ==
        std::vector<double>{0.5, 1e-2, 0.25});
  CHECK(config_double_list(config, "v", "missing", {9.0}) ==
        std::vector<double>{9.0});
  CHECK(config_int_list(config, "v", "il", {}) == std::vector<int>{1, 2, 3});
  CHECK(config_u64_list(config, "v", "ul", {}) ==
        std::vector<uint64_t>{10, 20, 30});

  CHECK_THROWS_WITH_AS(config_double(config, "v", "notnum", 0.0),
                       "config value [v] notnum: expected a number, got 'abc'",
                       std::invalid_argument);
  CHECK_THROWS_AS(config_int(config, "v", "huge", 0), std::invalid_argument);
  CHECK_THROWS_AS(config_u64(config, "v", "neg", 0), std::invalid_argument);
  CHECK_THROWS_AS(config_bool(config, "v", "bad", false), std::invalid_argument);
  CHECK_THROWS_AS(config_int_list(config, "v", "dl", {}), std::invalid_argument);
}

TEST_CASE("text files write and read back") {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "qecml_io_test";
  const std::filesystem::path path = dir / "nested" / "roundtrip.txt";
  const std::string content = "line one\nline two\n# not a comment here\n";
  write_text_file(path, content);
  CHECK(read_text_file(path) == content);
  std::filesystem::remove_all(dir);

  CHECK_THROWS_AS(read_text_file(dir / "missing.txt"), std::runtime_error);
}
