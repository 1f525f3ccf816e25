#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qecml/costmodel.h"
#include "qecml/io.h"
#include "qecml/qed422.h"
#include "qecml/rng.h"
#include "qecml/trainer.h"
#include "qecml/validate.h"

namespace {

namespace fs = std::filesystem;
using namespace qecml;

// Allowed config-file schema; anything else is rejected at parse time.
const std::map<std::string, std::set<std::string>> kConfigSchema = {
    {"", {"master_seed", "output_dir", "jobs"}},
    {"estimate",
     {"budget", "layers", "qubits", "p_phys", "rotations_per_qubit_per_layer",
      "scaling", "distill", "patches", "cycles_per_layer"}},
    {"train-parity",
     {"noise", "p", "f_anc", "rounds", "seed", "shots", "iterations", "batch_size",
      "learning_rate", "init_low", "init_high"}},
    {"train-qvc",
     {"p_depol", "seed", "shots", "iterations", "batch_size", "learning_rate",
      "qubits", "layers", "per_class", "data_seed"}},
    {"sweep", {"model", "p_grid", "rounds_grid", "f_anc_grid", "seeds", "keep_traces"}},
};

struct CliState {
  io::ConfigFile config;
  std::string config_path;
  std::string output_dir_flag;
  int jobs_flag = 0;  // 0 = not set
  uint64_t master_seed_flag = 0;
  bool master_seed_set = false;
};

fs::path resolve_output_dir(const CliState& state) {
  if (!state.output_dir_flag.empty()) return state.output_dir_flag;
  if (state.config.has("", "output_dir")) return state.config.at("", "output_dir");
  if (const char* env = std::getenv("QECML_OUTPUT_DIR"); env && *env) return env;
  return ".";
}

int resolve_jobs(const CliState& state) {
  const int jobs =
      state.jobs_flag > 0 ? state.jobs_flag : io::config_int(state.config, "", "jobs", 1);
  if (jobs < 1) throw std::invalid_argument("--jobs must be >= 1");
  return jobs;
}

uint64_t resolve_master_seed(const CliState& state) {
  if (state.master_seed_set) return state.master_seed_flag;
  return io::config_u64(state.config, "", "master_seed", 1);
}

double layered_double(const CLI::App* sub, const char* flag, const CliState& state,
                      const std::string& section, const std::string& key,
                      double value) {
  if (sub->count(flag)) return value;
  return io::config_double(state.config, section, key, value);
}

int layered_int(const CLI::App* sub, const char* flag, const CliState& state,
                const std::string& section, const std::string& key, int value) {
  if (sub->count(flag)) return value;
  return io::config_int(state.config, section, key, value);
}

std::string layered_string(const CLI::App* sub, const char* flag,
                           const CliState& state, const std::string& section,
                           const std::string& key, const std::string& value) {
  if (sub->count(flag)) return value;
  return io::config_string(state.config, section, key, value);
}

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::string token;
  for (const char c : text) {
    if (c == ',' || c == ' ') {
      if (!token.empty()) out.push_back(token);
      token.clear();
    } else {
      token.push_back(c);
    }
  }
  if (!token.empty()) out.push_back(token);
  return out;
}

std::vector<double> parse_double_csv(const std::string& text, const char* what) {
  std::vector<double> out;
  for (const std::string& token : split_csv(text)) {
    char* end = nullptr;
    const double value = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size())
      throw std::invalid_argument(std::string(what) + ": bad number '" + token + "'");
    out.push_back(value);
  }
  return out;
}

std::vector<int> parse_int_csv(const std::string& text, const char* what) {
  std::vector<int> out;
  for (const double v : parse_double_csv(text, what)) {
    if (v != static_cast<int>(v))
      throw std::invalid_argument(std::string(what) + ": expected integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<uint64_t> parse_u64_csv(const std::string& text, const char* what) {
  std::vector<uint64_t> out;
  for (const std::string& token : split_csv(text)) {
    char* end = nullptr;
    const uint64_t value = std::strtoull(token.c_str(), &end, 10);
    if (end != token.c_str() + token.size() || token.empty() || token[0] == '-')
      throw std::invalid_argument(std::string(what) + ": bad seed '" + token + "'");
    out.push_back(value);
  }
  return out;
}

NoiseModel parse_model(const std::string& name) {
  if (name == "gate") return NoiseModel::kGate;
  if (name == "environmental") return NoiseModel::kEnvironmental;
  throw std::invalid_argument("noise model must be 'gate' or 'environmental'");
}

TScaling parse_scaling(const std::string& name) {
  if (name == "classic") return TScaling::kClassic;
  if (name == "improved") return TScaling::kImproved;
  throw std::invalid_argument("scaling must be 'classic' or 'improved'");
}

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------

struct EstimateArgs {
  double budget = 1e-3;
  int layers = 50;
  int qubits = 10;
  double p_phys = 1e-3;
  int rotations = 3;
  std::string scaling = "classic";
  bool no_distill = false;
  double patches = 0.0;
  double cycles_per_layer = 0.0;
  std::string output;
};

void print_estimate_table(const ResourceEstimate& e, std::ostream& out) {
  out << "surface-code estimate\n";
  const auto row = [&](const char* label, const std::string& value) {
    char line[160];
    std::snprintf(line, sizeof(line), "  %-28s %s\n", label, value.c_str());
    out << line;
  };
  const auto num = [](const char* format, auto value) {
    char v[64];
    std::snprintf(v, sizeof(v), format, value);
    return std::string(v);
  };
  row("code distance", num("%d", e.code_distance));
  row("logical error / cycle", num("%.3e", e.epsilon_l));
  row("distilled T error", num("%.3e", e.epsilon_t));
  row("distillation", e.distillation_name);
  row("data qubits", num("%.0f", e.data_qubits));
  row("factory qubits", num("%.0f", e.factory_qubits));
  row("rotations", num("%.0f", e.n_rotations));
  row("T per rotation", num("%d", e.t_per_rotation));
  row("T gates", num("%.3e", e.n_t_gates));
  row("logical cycles", num("%.0f", e.n_logical_cycles));
  row("patch cycles", num("%.3e", e.n_patch_cycles));
  row("cycle time (us)", num("%.2f", e.cycle_time_us));
  row("runtime (ms)", num("%.3f", e.runtime_ms));
  row("total failure probability", num("%.3e", e.total_failure_probability));
}

int run_estimate(const CLI::App* sub, const CliState& state, const EstimateArgs& args) {
  EstimateRequest request;
  request.eps_total =
      layered_double(sub, "--budget", state, "estimate", "budget", args.budget);
  request.shape.layers =
      layered_int(sub, "--layers", state, "estimate", "layers", args.layers);
  request.shape.q_alg =
      layered_int(sub, "--qubits", state, "estimate", "qubits", args.qubits);
  request.shape.rotations_per_qubit_per_layer =
      layered_int(sub, "--rotations-per-layer", state, "estimate",
                  "rotations_per_qubit_per_layer", args.rotations);
  request.code.p_phys =
      layered_double(sub, "--p-phys", state, "estimate", "p_phys", args.p_phys);
  request.scaling = parse_scaling(
      layered_string(sub, "--scaling", state, "estimate", "scaling", args.scaling));
  request.distill = !args.no_distill;
  if (!sub->count("--no-distill") && state.config.has("estimate", "distill"))
    request.distill = io::config_bool(state.config, "estimate", "distill", true);
  if (sub->count("--patches"))
    request.shape.patches = args.patches;
  else if (state.config.has("estimate", "patches"))
    request.shape.patches = io::config_double(state.config, "estimate", "patches", 0.0);
  if (sub->count("--cycles-per-layer"))
    request.shape.cycles_per_layer = args.cycles_per_layer;
  else if (state.config.has("estimate", "cycles_per_layer"))
    request.shape.cycles_per_layer =
        io::config_double(state.config, "estimate", "cycles_per_layer", 0.0);

  const ResourceEstimate result = estimate(request);
  const std::string json = io::resource_estimate_to_json(result);
  std::cout << json << "\n";
  print_estimate_table(result, std::cerr);
  if (!args.output.empty()) {
    io::write_text_file(resolve_output_dir(state) / fs::path(args.output), json + "\n");
  }
  return 0;
}

// ---------------------------------------------------------------------------
// train-parity
// ---------------------------------------------------------------------------

struct TrainParityArgs {
  std::string noise = "gate";
  double p = 0.0;
  double f_anc = 1.0;
  int rounds = 0;
  uint64_t seed = 0;
  bool seed_set = false;
  int shots = 1000;
  int iterations = 100;
  int batch_size = 8;
  double learning_rate = 0.05;
  std::string trace_name;
  std::string debug_log;
  int debug_shots = 200;
};

int run_train_parity(const CLI::App* sub, const CliState& state,
                     const TrainParityArgs& args) {
  trainer::ParityTrainConfig config;
  config.noise_model = parse_model(
      layered_string(sub, "--noise", state, "train-parity", "noise", args.noise));
  config.p = layered_double(sub, "--p", state, "train-parity", "p", args.p);
  config.f_anc =
      layered_double(sub, "--f-anc", state, "train-parity", "f_anc", args.f_anc);
  config.rounds =
      layered_int(sub, "--rounds", state, "train-parity", "rounds", args.rounds);
  config.shots = layered_int(sub, "--shots", state, "train-parity", "shots", args.shots);
  config.iterations = layered_int(sub, "--iterations", state, "train-parity",
                                  "iterations", args.iterations);
  config.batch_size = layered_int(sub, "--batch-size", state, "train-parity",
                                  "batch_size", args.batch_size);
  config.learning_rate = layered_double(sub, "--learning-rate", state, "train-parity",
                                        "learning_rate", args.learning_rate);
  config.init_low =
      io::config_double(state.config, "train-parity", "init_low", config.init_low);
  config.init_high =
      io::config_double(state.config, "train-parity", "init_high", config.init_high);
  uint64_t seed = resolve_master_seed(state);
  if (args.seed_set)
    seed = args.seed;
  else if (state.config.has("train-parity", "seed"))
    seed = io::config_u64(state.config, "train-parity", "seed", seed);

  const trainer::TrainingTrace trace = trainer::train_parity(config, seed);

  const fs::path out_dir = resolve_output_dir(state);
  const std::string trace_name = args.trace_name.empty()
                                     ? "parity_trace_seed" + std::to_string(seed) + ".csv"
                                     : args.trace_name;
  const fs::path trace_path = out_dir / trace_name;
  io::write_text_file(trace_path, io::trace_to_csv(trace));

  if (!args.debug_log.empty()) {
    PauliInjectionSpec spec;
    spec.model = config.noise_model;
    spec.rate = config.p;
    spec.f_anc = config.f_anc;
    Rng rng(Rng::derive(seed, 0x6c6f67));
    std::ostringstream lines;
    for (int shot = 0; shot < args.debug_shots; ++shot) {
      const int input = shot % 4;
      const qed422::ShotOutcome outcome = qed422::run_shot(
          trace.final_params.at(0), input >> 1, input & 1, config.rounds, spec, rng);
      lines << io::shot_outcome_to_json_line(outcome) << "\n";
    }
    io::write_text_file(out_dir / fs::path(args.debug_log), lines.str());
  }

  std::ostringstream summary;
  summary << "{\"schema_version\": " << io::kSchemaVersion
          << ", \"task\": \"train-parity\", \"seed\": " << seed
          << ", \"final_accuracy\": " << trace.final_accuracy()
          << ", \"last_loss\": " << trace.records.back().loss
          << ", \"final_theta\": " << trace.final_params.at(0)
          << ", \"trace_csv\": \"" << trace_path.generic_string() << "\"}";
  std::cout << summary.str() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train-qvc
// ---------------------------------------------------------------------------

struct TrainQvcArgs {
  double p_depol = 0.0;
  uint64_t seed = 0;
  bool seed_set = false;
  int shots = 10000;
  int iterations = 25;
  int batch_size = 50;
  double learning_rate = 0.005;
  int qubits = 4;
  int layers = 5;
  int per_class = 50;
  std::string trace_name;
};

int run_train_qvc(const CLI::App* sub, const CliState& state, const TrainQvcArgs& args) {
  trainer::QvcTrainConfig config;
  config.arch.n_qubits =
      layered_int(sub, "--qubits", state, "train-qvc", "qubits", args.qubits);
  config.arch.n_layers =
      layered_int(sub, "--layers", state, "train-qvc", "layers", args.layers);
  config.p_depol =
      layered_double(sub, "--p-depol", state, "train-qvc", "p_depol", args.p_depol);
  config.shots = layered_int(sub, "--shots", state, "train-qvc", "shots", args.shots);
  config.iterations = layered_int(sub, "--iterations", state, "train-qvc", "iterations",
                                  args.iterations);
  config.batch_size = layered_int(sub, "--batch-size", state, "train-qvc", "batch_size",
                                  args.batch_size);
  config.learning_rate = layered_double(sub, "--learning-rate", state, "train-qvc",
                                        "learning_rate", args.learning_rate);
  config.per_class =
      layered_int(sub, "--per-class", state, "train-qvc", "per_class", args.per_class);
  config.data_seed =
      io::config_u64(state.config, "train-qvc", "data_seed", config.data_seed);
  uint64_t seed = resolve_master_seed(state);
  if (args.seed_set)
    seed = args.seed;
  else if (state.config.has("train-qvc", "seed"))
    seed = io::config_u64(state.config, "train-qvc", "seed", seed);

  const trainer::TrainingTrace trace = trainer::train_qvc(config, seed);

  const fs::path out_dir = resolve_output_dir(state);
  const std::string trace_name = args.trace_name.empty()
                                     ? "qvc_trace_seed" + std::to_string(seed) + ".csv"
                                     : args.trace_name;
  const fs::path trace_path = out_dir / trace_name;
  io::write_text_file(trace_path, io::trace_to_csv(trace));

  std::ostringstream summary;
  summary << "{\"schema_version\": " << io::kSchemaVersion
          << ", \"task\": \"train-qvc\", \"seed\": " << seed
          << ", \"final_accuracy\": " << trace.final_accuracy()
          << ", \"last_loss\": " << trace.records.back().loss
          << ", \"avg_sq_gradient_last\": " << trace.records.back().avg_sq_gradient
          << ", \"trace_csv\": \"" << trace_path.generic_string() << "\"}";
  std::cout << summary.str() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepArgs {
  std::string model = "gate";
  std::string p_grid = "0.001,0.0025,0.005,0.01";
  std::string rounds_grid = "0,1,2,5";
  std::string f_anc_grid = "1.0";
  std::string seeds;
  bool keep_traces = false;
  std::string output = "sweep.json";
  int shots = 1000;
  int iterations = 100;
};

int run_sweep(const CLI::App* sub, const CliState& state, const SweepArgs& args) {
  trainer::SweepConfig config;
  config.model = parse_model(
      layered_string(sub, "--model", state, "sweep", "model", args.model));
  config.p_grid = parse_double_csv(
      layered_string(sub, "--p-grid", state, "sweep", "p_grid", args.p_grid), "p_grid");
  config.rounds_grid = parse_int_csv(
      layered_string(sub, "--rounds-grid", state, "sweep", "rounds_grid",
                     args.rounds_grid),
      "rounds_grid");
  config.f_anc_grid = parse_double_csv(
      layered_string(sub, "--f-anc-grid", state, "sweep", "f_anc_grid", args.f_anc_grid),
      "f_anc_grid");
  if (sub->count("--seeds"))
    config.seeds = parse_u64_csv(args.seeds, "seeds");
  else if (state.config.has("sweep", "seeds"))
    config.seeds = parse_u64_csv(state.config.at("sweep", "seeds"), "seeds");
  config.keep_traces = args.keep_traces ||
                       io::config_bool(state.config, "sweep", "keep_traces", false);

  config.base.shots =
      layered_int(sub, "--shots", state, "train-parity", "shots", args.shots);
  config.base.iterations = layered_int(sub, "--iterations", state, "train-parity",
                                       "iterations", args.iterations);
  config.base.batch_size = io::config_int(state.config, "train-parity", "batch_size",
                                          config.base.batch_size);
  config.base.learning_rate = io::config_double(
      state.config, "train-parity", "learning_rate", config.base.learning_rate);

  const int jobs = resolve_jobs(state);
  const auto progress = [](int done, int total) {
    std::cerr << "\rsweep " << done << "/" << total << std::flush;
    if (done == total) std::cerr << "\n";
  };
  const trainer::SweepSummary summary = trainer::sweep(config, jobs, progress);

  const std::string json = io::sweep_summary_to_json(summary);
  const fs::path out_path = resolve_output_dir(state) / fs::path(args.output);
  io::write_text_file(out_path, json + "\n");
  std::cout << json << "\n";
  std::cerr << "wrote " << out_path.generic_string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

int run_validate(const std::string& filter, bool list_only) {
  if (list_only) {
    for (const std::string& name : validate::check_names()) std::cout << name << "\n";
    return 0;
  }
  const std::vector<validate::CheckResult> results = validate::run_all(filter);
  if (results.empty()) throw std::invalid_argument("no check matches '" + filter + "'");
  bool all_passed = true;
  for (const auto& result : results) {
    char line[512];
    std::snprintf(line, sizeof(line), "%s %-24s %s (%.2fs)\n",
                  result.passed ? "PASS" : "FAIL", result.name.c_str(),
                  result.detail.c_str(), result.seconds);
    std::cout << line;
    all_passed = all_passed && result.passed;
  }
  if (!all_passed) throw std::runtime_error("validation checks failed");
  return 0;
}

// ---------------------------------------------------------------------------
// emit-fixtures
// ---------------------------------------------------------------------------

int run_emit_fixtures(const CliState& state) {
  struct Row {
    double budget;
    int layers;
  };
  const Row rows[] = {{1e-3, 50}, {1e-3, 100}, {1e-4, 50}, {1e-4, 100}};
  const fs::path out_dir = resolve_output_dir(state) / "fixtures";
  std::ostringstream written;
  written << "{\"schema_version\": " << io::kSchemaVersion << ", \"written\": [";
  bool first = true;
  for (const Row& row : rows) {
    EstimateRequest request;
    request.eps_total = row.budget;
    request.shape.layers = row.layers;
    const ResourceEstimate result = estimate(request);
    char name[64];
    std::snprintf(name, sizeof(name), "table1_budget%.0e_layers%d.json", row.budget,
                  row.layers);
    const fs::path path = out_dir / name;
    io::write_text_file(path, io::resource_estimate_to_json(result) + "\n");
    written << (first ? "" : ", ") << "\"" << path.generic_string() << "\"";
    first = false;
  }
  written << "]}";
  std::cout << written.str() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "qecml: surface-code resource estimation and error-detected variational "
      "training"};
  app.require_subcommand(1);

  CliState state;
  app.add_option("--config", state.config_path, "experiment config file");
  app.add_option("--output-dir", state.output_dir_flag,
                 "output directory (overrides QECML_OUTPUT_DIR)");
  app.add_option("--jobs", state.jobs_flag, "worker threads for sweeps");
  const auto master_seed_opt =
      app.add_option("--master-seed", state.master_seed_flag, "default RNG seed");

  EstimateArgs est;
  CLI::App* estimate_cmd =
      app.add_subcommand("estimate", "surface-code resource estimate");
  estimate_cmd->add_option("--budget", est.budget, "total failure budget");
  estimate_cmd->add_option("--layers", est.layers, "circuit layers");
  estimate_cmd->add_option("--qubits", est.qubits, "algorithmic qubits");
  estimate_cmd->add_option("--p-phys", est.p_phys, "physical error rate");
  estimate_cmd->add_option("--rotations-per-layer", est.rotations,
                           "rotations per qubit per layer");
  estimate_cmd->add_option("--scaling", est.scaling, "T synthesis: classic|improved");
  estimate_cmd->add_flag("--no-distill", est.no_distill, "use raw injected T states");
  estimate_cmd->add_option("--patches", est.patches, "exposed logical patches");
  estimate_cmd->add_option("--cycles-per-layer", est.cycles_per_layer,
                           "logical cycles per layer");
  estimate_cmd->add_option("--output", est.output, "also write the JSON here");

  TrainParityArgs par;
  CLI::App* parity_cmd =
      app.add_subcommand("train-parity", "train the [[4,2,2]] parity classifier");
  parity_cmd->add_option("--noise", par.noise, "noise model: gate|environmental");
  parity_cmd->add_option("--p", par.p, "physical Pauli rate");
  parity_cmd->add_option("--f-anc", par.f_anc, "ancilla rate ratio");
  parity_cmd->add_option("--rounds", par.rounds, "syndrome rounds");
  const auto par_seed_opt = parity_cmd->add_option("--seed", par.seed, "RNG seed");
  parity_cmd->add_option("--shots", par.shots, "shots per expectation (0 = exact)");
  parity_cmd->add_option("--iterations", par.iterations, "training iterations");
  parity_cmd->add_option("--batch-size", par.batch_size, "samples per batch");
  parity_cmd->add_option("--learning-rate", par.learning_rate, "SGD step size");
  parity_cmd->add_option("--trace", par.trace_name, "trace CSV filename");
  parity_cmd->add_option("--debug-log", par.debug_log,
                         "write a JSONL trajectory log at the trained angle");
  parity_cmd->add_option("--debug-shots", par.debug_shots, "trajectories to log");

  TrainQvcArgs qvc;
  CLI::App* qvc_cmd =
      app.add_subcommand("train-qvc", "train the desk-scale variational classifier");
  qvc_cmd->add_option("--p-depol", qvc.p_depol, "depolarizing rate after noisy gates");
  const auto qvc_seed_opt = qvc_cmd->add_option("--seed", qvc.seed, "RNG seed");
  qvc_cmd->add_option("--shots", qvc.shots, "shots per expectation (0 = exact)");
  qvc_cmd->add_option("--iterations", qvc.iterations, "training iterations");
  qvc_cmd->add_option("--batch-size", qvc.batch_size, "samples per batch");
  qvc_cmd->add_option("--learning-rate", qvc.learning_rate, "SGD step size");
  qvc_cmd->add_option("--qubits", qvc.qubits, "circuit qubits");
  qvc_cmd->add_option("--layers", qvc.layers, "variational layers");
  qvc_cmd->add_option("--per-class", qvc.per_class, "dataset rows per class");
  qvc_cmd->add_option("--trace", qvc.trace_name, "trace CSV filename");

  SweepArgs swp;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "grid sweep of the parity task over (p, rounds)");
  sweep_cmd->add_option("--model", swp.model, "noise model: gate|environmental");
  sweep_cmd->add_option("--p-grid", swp.p_grid, "comma-separated physical rates");
  sweep_cmd->add_option("--rounds-grid", swp.rounds_grid, "comma-separated rounds");
  sweep_cmd->add_option("--f-anc-grid", swp.f_anc_grid, "comma-separated ratios");
  sweep_cmd->add_option("--seeds", swp.seeds, "comma-separated seeds");
  sweep_cmd->add_flag("--keep-traces", swp.keep_traces, "embed full traces");
  sweep_cmd->add_option("--output", swp.output, "summary JSON filename");
  sweep_cmd->add_option("--shots", swp.shots, "shots per expectation");
  sweep_cmd->add_option("--iterations", swp.iterations, "iterations per run");

  std::string validate_filter;
  bool validate_list = false;
  CLI::App* validate_cmd =
      app.add_subcommand("validate", "run the invariant and oracle self-checks");
  validate_cmd->add_option("--filter", validate_filter, "substring check filter");
  validate_cmd->add_flag("--list", validate_list, "list check names and exit");

  CLI::App* fixtures_cmd =
      app.add_subcommand("emit-fixtures", "write the calibration fixture JSON files");

  // Let --config / --output-dir / --jobs / --master-seed appear after the
  // subcommand name as well.
  for (CLI::App* sub : app.get_subcommands(nullptr)) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << io::error_to_json("parse", e.what()) << "\n";
    return 2;
  }
  state.master_seed_set = master_seed_opt->count() > 0;
  par.seed_set = par_seed_opt->count() > 0;
  qvc.seed_set = qvc_seed_opt->count() > 0;

  try {
    if (!state.config_path.empty()) {
      state.config = io::parse_config(io::read_text_file(state.config_path));
      io::reject_unknown_keys(state.config, kConfigSchema);
    }
    if (estimate_cmd->parsed()) return run_estimate(estimate_cmd, state, est);
    if (parity_cmd->parsed()) return run_train_parity(parity_cmd, state, par);
    if (qvc_cmd->parsed()) return run_train_qvc(qvc_cmd, state, qvc);
    if (sweep_cmd->parsed()) return run_sweep(sweep_cmd, state, swp);
    if (validate_cmd->parsed()) return run_validate(validate_filter, validate_list);
    if (fixtures_cmd->parsed()) return run_emit_fixtures(state);
    throw std::invalid_argument("no subcommand selected");
  } catch (const std::invalid_argument& e) {
    std::cerr << io::error_to_json("parse", e.what()) << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << io::error_to_json("runtime", e.what()) << "\n";
    return 1;
  }
}
