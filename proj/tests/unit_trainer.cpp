#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "qecml/dataset.h"
#include "qecml/stats.h"
#include "qecml/trainer.h"

using namespace qecml;
using namespace qecml::trainer;

namespace {

bool traces_identical(const TrainingTrace& a, const TrainingTrace& b) {
  if (a.records.size() != b.records.size()) return false;
  for (size_t i = 0; i < a.records.size(); ++i) {
    const IterationRecord& ra = a.records[i];
    const IterationRecord& rb = b.records[i];
    if (ra.accuracy != rb.accuracy || ra.loss != rb.loss ||
        ra.avg_sq_gradient != rb.avg_sq_gradient ||
        ra.discard_rate != rb.discard_rate)
      return false;
  }
  return a.final_params == b.final_params && a.seed == b.seed &&
         a.config_hash == b.config_hash;
}

CellSummary make_cell(NoiseModel model, double p, int rounds, double f_anc,
                      const std::vector<double>& accuracies) {
  CellSummary cell;
  cell.cell = {model, p, rounds, f_anc};
  cell.final_accuracies = accuracies;
  cell.mean_final_accuracy = stats::mean(accuracies);
  cell.std_final_accuracy =
      accuracies.size() > 1 ? stats::std_dev(accuracies) : 0.0;
  return cell;
}

}  // namespace

TEST_CASE("default seed list is one through ten") {
  REQUIRE(kDefaultSeeds.size() == 10);
  for (size_t i = 0; i < kDefaultSeeds.size(); ++i)
    CHECK(kDefaultSeeds[i] == i + 1);
}

TEST_CASE("parity config validation rejects bad fields") {
  ParityTrainConfig config;
  CHECK_NOTHROW(config.check_valid());

  auto broken = [&](auto mutate) {
    ParityTrainConfig c = config;
    mutate(c);
    CHECK_THROWS_AS(c.check_valid(), std::invalid_argument);
  };
  broken([](auto& c) { c.learning_rate = 0.0; });
  broken([](auto& c) { c.learning_rate = -1.0; });
  broken([](auto& c) { c.batch_size = 0; });
  broken([](auto& c) { c.iterations = 0; });
  broken([](auto& c) { c.shots = -1; });
  broken([](auto& c) { c.shots = 0; c.p = 0.001; });  // exact mode needs p = 0
  broken([](auto& c) { c.rounds = -1; });
  broken([](auto& c) { c.rounds = 12; });
  broken([](auto& c) { c.init_low = 1.0; c.init_high = -1.0; });
  broken([](auto& c) { c.p = -0.1; });
  broken([](auto& c) { c.p = 1.5; });
  broken([](auto& c) { c.f_anc = -0.5; });
}

TEST_CASE("parity config hash separates every field") {
  ParityTrainConfig base;
  const uint64_t h0 = config_hash(base);
  CHECK(h0 == config_hash(base));

  auto differs = [&](auto mutate) {
    ParityTrainConfig c = base;
    mutate(c);
    CHECK(config_hash(c) != h0);
  };
  differs([](auto& c) { c.learning_rate = 0.06; });
  differs([](auto& c) { c.batch_size = 9; });
  differs([](auto& c) { c.iterations = 99; });
  differs([](auto& c) { c.shots = 999; });
  differs([](auto& c) { c.noise_model = NoiseModel::kEnvironmental; });
  differs([](auto& c) { c.p = 0.001; });
  differs([](auto& c) { c.f_anc = 0.5; });
  differs([](auto& c) { c.rounds = 1; });
  differs([](auto& c) { c.init_low = -0.4; });
  differs([](auto& c) { c.init_high = 0.4; });
}

TEST_CASE("final accuracy averages the last forty records") {
  TrainingTrace trace;
  CHECK_THROWS_AS(trace.final_accuracy(), std::logic_error);

  for (int i = 0; i < 60; ++i) trace.records.push_back({0.0, 0.0, 0.0, 0.0});
  for (int i = 0; i < 40; ++i) trace.records.push_back({1.0, 0.0, 0.0, 0.0});
  CHECK(trace.final_accuracy() == doctest::Approx(1.0));

  TrainingTrace small;
  for (int i = 0; i < 10; ++i)
    small.records.push_back({i / 10.0, 0.0, 0.0, 0.0});
  CHECK(small.final_accuracy() == doctest::Approx(0.45));

  TrainingTrace tail;
  for (int i = 0; i < 41; ++i)
    tail.records.push_back({i == 0 ? 0.0 : 1.0, 0.0, 0.0, 0.0});
  CHECK(tail.final_accuracy() == doctest::Approx(1.0));
}

TEST_CASE("parity training is reproducible and seed sensitive") {
  ParityTrainConfig config;
  config.iterations = 4;
  config.shots = 100;
  config.p = 0.002;
  config.rounds = 1;

  const TrainingTrace a = train_parity(config, 11);
  const TrainingTrace b = train_parity(config, 11);
  CHECK(traces_identical(a, b));
  CHECK(a.records.size() == 4);
  CHECK(a.seed == 11);
  CHECK(a.config_hash == config_hash(config));
  REQUIRE(a.final_params.size() == 1);

  const TrainingTrace c = train_parity(config, 12);
  CHECK_FALSE(traces_identical(a, c));
}

TEST_CASE("exact-mode parity training converges without noise") {
  ParityTrainConfig config;
  config.shots = 0;
  config.p = 0.0;

  const TrainingTrace trace = train_parity(config, 3);
  REQUIRE(trace.records.size() == 100);
  bool hit = false;
  for (const IterationRecord& record : trace.records) {
    CHECK(record.discard_rate == 0.0);
    if (record.accuracy == 1.0) hit = true;
  }
  CHECK(hit);
  CHECK(trace.final_accuracy() >= 0.975);
}

TEST_CASE("shift-rule gradient is exact for single-frequency expectations") {
  const ExpectationFn fn = [](std::span<const double> p) {
    return std::cos(p[0]) * std::sin(p[1]) - 0.25 * std::cos(p[1]);
  };
  const std::vector<double> params{0.7, -0.4};
  const std::vector<double> grad = parameter_shift_gradient(fn, params);
  REQUIRE(grad.size() == 2);
  CHECK(grad[0] ==
        doctest::Approx(-std::sin(0.7) * std::sin(-0.4)).epsilon(1e-12));
  CHECK(grad[1] ==
        doctest::Approx(std::cos(0.7) * std::cos(-0.4) + 0.25 * std::sin(-0.4))
            .epsilon(1e-12));

  const ExpectationFn constant = [](std::span<const double>) { return 2.5; };
  for (const double g : parameter_shift_gradient(constant, params))
    CHECK(g == doctest::Approx(0.0));

  // General shift s yields sin(s) times the derivative of cos.
  const ExpectationFn cosine = [](std::span<const double> p) {
    return std::cos(p[0]);
  };
  const std::vector<double> theta{1.1};
  const std::vector<double> scaled = parameter_shift_gradient(cosine, theta, 0.3);
  CHECK(scaled[0] == doctest::Approx(-std::sin(1.1) * std::sin(0.3)).epsilon(1e-12));

  CHECK(parameter_shift_gradient(cosine, {}).empty());
  CHECK_THROWS_AS(parameter_shift_gradient(ExpectationFn{}, params),
                  std::invalid_argument);
  CHECK_THROWS_AS(parameter_shift_gradient(cosine, theta, 0.0),
                  std::invalid_argument);
}

TEST_CASE("qvc config validation and hashing") {
  QvcTrainConfig config;
  CHECK_NOTHROW(config.check_valid());

  QvcTrainConfig bad = config;
  bad.per_class = 0;
  CHECK_THROWS_AS(bad.check_valid(), std::invalid_argument);
  bad = config;
  bad.p_depol = 1.5;
  CHECK_THROWS_AS(bad.check_valid(), std::invalid_argument);
  bad = config;
  bad.arch.n_qubits = 0;
  CHECK_THROWS_AS(bad.check_valid(), std::invalid_argument);

  const uint64_t h0 = config_hash(config);
  QvcTrainConfig other = config;
  other.arch.n_layers = 4;
  CHECK(config_hash(other) != h0);
  other = config;
  other.p_depol = 0.001;
  CHECK(config_hash(other) != h0);
  other = config;
  other.data_seed = 7;
  CHECK(config_hash(other) != h0);
}

TEST_CASE("qvc training runs deterministically at desk scale") {
  QvcTrainConfig config;
  config.arch.n_qubits = 2;
  config.arch.n_layers = 1;
  config.per_class = 4;
  config.batch_size = 4;
  config.iterations = 3;
  config.shots = 0;

  const TrainingTrace a = train_qvc(config, 21);
  REQUIRE(a.records.size() == 3);
  CHECK(a.final_params.size() == 6);
  CHECK(a.config_hash == config_hash(config));
  for (const IterationRecord& record : a.records) {
    CHECK(std::isfinite(record.loss));
    CHECK(record.accuracy >= 0.0);
    CHECK(record.accuracy <= 1.0);
    CHECK(record.avg_sq_gradient >= 0.0);
    CHECK(record.discard_rate == 0.0);
  }

  const TrainingTrace b = train_qvc(config, 21);
  CHECK(traces_identical(a, b));
  const TrainingTrace c = train_qvc(config, 22);
  CHECK_FALSE(traces_identical(a, c));
}

TEST_CASE("probe gradient is deterministic and shrinks under depolarizing") {
  QvcTrainConfig config;
  config.per_class = 3;

  CHECK_THROWS_AS(average_squared_gradient(config, 1, 0), std::invalid_argument);

  const double g0 = average_squared_gradient(config, 1, 4);
  CHECK(g0 == average_squared_gradient(config, 1, 4));
  CHECK(g0 > 0.0);

  for (const uint64_t seed : {uint64_t{1}, uint64_t{2}}) {
    double previous = -1.0;
    bool first = true;
    for (const double p : {0.0, 0.05, 0.2}) {
      QvcTrainConfig noisy = config;
      noisy.p_depol = p;
      const double g = average_squared_gradient(noisy, seed, 4);
      if (!first) CHECK(g < previous);
      previous = g;
      first = false;
    }
  }
}

TEST_CASE("sweep validation rejects empty grids") {
  SweepConfig config;
  config.p_grid = {0.001};
  config.rounds_grid = {0};
  CHECK_NOTHROW(config.check_valid());

  SweepConfig bad = config;
  bad.p_grid.clear();
  CHECK_THROWS_AS(bad.check_valid(), std::invalid_argument);
  bad = config;
  bad.rounds_grid.clear();
  CHECK_THROWS_AS(bad.check_valid(), std::invalid_argument);
  bad = config;
  bad.f_anc_grid.clear();
  CHECK_THROWS_AS(bad.check_valid(), std::invalid_argument);
  bad = config;
  bad.seeds.clear();
  CHECK_THROWS_AS(bad.check_valid(), std::invalid_argument);
  bad = config;
  bad.rounds_grid = {12};
  CHECK_THROWS_AS(bad.check_valid(), std::invalid_argument);
  bad = config;
  bad.p_grid = {1.5};
  CHECK_THROWS_AS(bad.check_valid(), std::invalid_argument);
}

TEST_CASE("a one-cell sweep reproduces direct training runs") {
  SweepConfig config;
  config.base.iterations = 6;
  config.base.shots = 100;
  config.model = NoiseModel::kGate;
  config.p_grid = {0.002};
  config.rounds_grid = {1};
  config.seeds = {5, 9};
  config.keep_traces = true;

  const SweepSummary summary = sweep(config);
  REQUIRE(summary.cells.size() == 1);
  REQUIRE(summary.traces.size() == 1);
  REQUIRE(summary.traces[0].size() == 2);
  CHECK(summary.seeds == config.seeds);
  const CellSummary& cell = summary.cells[0];
  CHECK(cell.cell.p == 0.002);
  CHECK(cell.cell.rounds == 1);
  CHECK(cell.cell.f_anc == 1.0);

  ParityTrainConfig direct = config.base;
  direct.noise_model = NoiseModel::kGate;
  direct.p = 0.002;
  direct.rounds = 1;
  direct.f_anc = 1.0;
  const TrainingTrace five = train_parity(direct, 5);
  const TrainingTrace nine = train_parity(direct, 9);
  CHECK(cell.final_accuracies[0] == five.final_accuracy());
  CHECK(cell.final_accuracies[1] == nine.final_accuracy());
  CHECK(traces_identical(summary.traces[0][0], five));
  CHECK(traces_identical(summary.traces[0][1], nine));
  CHECK(cell.mean_final_accuracy ==
        doctest::Approx((five.final_accuracy() + nine.final_accuracy()) / 2.0));
}

TEST_CASE("sweep results do not depend on the worker count") {
  SweepConfig config;
  config.base.iterations = 4;
  config.base.shots = 80;
  config.p_grid = {0.001, 0.005};
  config.rounds_grid = {0, 1};
  config.seeds = {1, 2};

  const SweepSummary serial = sweep(config, 1);
  const SweepSummary parallel = sweep(config, 4);
  REQUIRE(serial.cells.size() == 4);
  REQUIRE(parallel.cells.size() == 4);
  for (size_t c = 0; c < serial.cells.size(); ++c) {
    CHECK(serial.cells[c].cell.p == parallel.cells[c].cell.p);
    CHECK(serial.cells[c].cell.rounds == parallel.cells[c].cell.rounds);
    CHECK(serial.cells[c].final_accuracies == parallel.cells[c].final_accuracies);
  }

  // Grid order: p outer, rounds inner.
  CHECK(serial.cells[0].cell.p == 0.001);
  CHECK(serial.cells[0].cell.rounds == 0);
  CHECK(serial.cells[1].cell.rounds == 1);
  CHECK(serial.cells[2].cell.p == 0.005);
}

TEST_CASE("threshold extraction walks the grid until a cell fails") {
  const std::vector<double> perfect(10, 1.0);
  const std::vector<double> weak(10, 0.5);

  auto grid = [&](const std::vector<double>& at_001_r2,
                  const std::vector<double>& at_005_r0,
                  const std::vector<double>& at_005_r2,
                  const std::vector<double>& at_010_r2) {
    SweepSummary summary;
    summary.cells.push_back(make_cell(NoiseModel::kGate, 0.001, 0, 1.0, perfect));
    summary.cells.push_back(make_cell(NoiseModel::kGate, 0.001, 2, 1.0, at_001_r2));
    summary.cells.push_back(make_cell(NoiseModel::kGate, 0.005, 0, 1.0, at_005_r0));
    summary.cells.push_back(make_cell(NoiseModel::kGate, 0.005, 2, 1.0, at_005_r2));
    summary.cells.push_back(make_cell(NoiseModel::kGate, 0.01, 0, 1.0, perfect));
    summary.cells.push_back(make_cell(NoiseModel::kGate, 0.01, 2, 1.0, at_010_r2));
    return summary;
  };

  // Every plateau holds: the threshold is the largest grid p.
  CHECK(extract_threshold(grid(perfect, perfect, perfect, perfect)) == 0.01);

  // The deepest-rounds plateau collapses at p = 0.01.
  CHECK(extract_threshold(grid(perfect, perfect, perfect, weak)) == 0.005);

  // A significant accuracy drop with rounds disqualifies p = 0.005.
  const std::vector<double> high(10, 0.99);
  const std::vector<double> dropped(10, 0.92);
  CHECK(extract_threshold(grid(perfect, high, dropped, perfect)) == 0.001);

  // The same means with sampling spread stay within the slack.
  std::vector<double> high_noisy, dropped_noisy;
  for (int i = 0; i < 10; ++i) {
    high_noisy.push_back(i % 2 == 0 ? 0.94 : 1.04);
    dropped_noisy.push_back(i % 2 == 0 ? 0.90 : 1.00);
  }
  CHECK(extract_threshold(grid(perfect, high_noisy, dropped_noisy, perfect)) ==
        0.01);

  // Nothing qualifies.
  CHECK_THROWS_AS(extract_threshold(grid(weak, weak, weak, weak), 0.90),
                  std::runtime_error);

  // No cells at the requested ancilla fraction.
  SweepSummary off;
  off.cells.push_back(make_cell(NoiseModel::kGate, 0.001, 0, 0.0, perfect));
  CHECK_THROWS_AS(extract_threshold(off, 0.90, 1.0), std::invalid_argument);

  CHECK_THROWS_AS(extract_threshold(grid(perfect, perfect, perfect, perfect), 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(extract_threshold(grid(perfect, perfect, perfect, perfect), 1.5),
                  std::invalid_argument);
}

TEST_CASE("mean comparison matches hand-computed fixtures") {
  const std::vector<double> a{10.0, 12.0, 14.0};
  const std::vector<double> b{1.0, 2.0, 3.0};
  const stats::MeanComparison cmp = stats::compare_means(a, b);
  CHECK(cmp.mean_a == doctest::Approx(12.0));
  CHECK(cmp.mean_b == doctest::Approx(2.0));
  CHECK(cmp.difference == doctest::Approx(10.0));
  CHECK(cmp.se_difference == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-12));
  CHECK(cmp.z == doctest::Approx(10.0 / std::sqrt(5.0 / 3.0)).epsilon(1e-12));
  CHECK(cmp.significant);

  const std::vector<double> same{2.0, 2.0, 2.0};
  const stats::MeanComparison flat = stats::compare_means(same, same);
  CHECK(flat.z == 0.0);
  CHECK_FALSE(flat.significant);

  const std::vector<double> other{3.0, 3.0, 3.0};
  const stats::MeanComparison split = stats::compare_means(other, same);
  CHECK(std::isinf(split.z));
  CHECK(split.z > 0.0);
  CHECK(split.significant);

  CHECK_THROWS_AS(stats::compare_means(a, b, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(stats::compare_means({}, b), std::invalid_argument);
}

TEST_CASE("wilcoxon signed-rank fixtures") {
  const std::vector<double> zeros5(5, 0.0);
  const std::vector<double> up5{1.0, 2.0, 3.0, 4.0, 5.0};
  const stats::WilcoxonResult five = stats::wilcoxon_signed_rank(up5, zeros5);
  CHECK(five.statistic == doctest::Approx(0.0));
  CHECK(five.p_value == doctest::Approx(0.0625).epsilon(1e-12));
  CHECK(five.n_nonzero == 5);
  CHECK(five.exact);

  std::vector<double> up10, zeros10(10, 0.0);
  for (int i = 1; i <= 10; ++i) up10.push_back(i);
  CHECK(stats::wilcoxon_signed_rank(up10, zeros10).p_value ==
        doctest::Approx(2.0 / 1024.0).epsilon(1e-12));

  // Mixed signs: diffs {+1, -2, +3} give W = 2 and p = 0.75.
  const std::vector<double> mixed{1.0, -2.0, 3.0};
  const std::vector<double> zeros3(3, 0.0);
  const stats::WilcoxonResult mix = stats::wilcoxon_signed_rank(mixed, zeros3);
  CHECK(mix.statistic == doctest::Approx(2.0));
  CHECK(mix.p_value == doctest::Approx(0.75).epsilon(1e-12));

  // Tied magnitudes use midranks: diffs {+1, -1, +2}.
  const std::vector<double> tied{1.0, -1.0, 2.0};
  const stats::WilcoxonResult tie = stats::wilcoxon_signed_rank(tied, zeros3);
  CHECK(tie.statistic == doctest::Approx(1.5));
  CHECK(tie.p_value == doctest::Approx(0.75).epsilon(1e-12));

  // Identical samples are indistinguishable.
  const stats::WilcoxonResult none = stats::wilcoxon_signed_rank(zeros5, zeros5);
  CHECK(none.p_value == doctest::Approx(1.0));
  CHECK(none.n_nonzero == 0);

  // Past 25 non-zero pairs the p-value comes from the normal tail.
  std::vector<double> big, zeros26(26, 0.0);
  for (int i = 1; i <= 26; ++i) big.push_back(i);
  const stats::WilcoxonResult approx = stats::wilcoxon_signed_rank(big, zeros26);
  CHECK_FALSE(approx.exact);
  CHECK(approx.statistic == doctest::Approx(0.0));
  CHECK(approx.p_value < 1e-4);

  CHECK_THROWS_AS(stats::wilcoxon_signed_rank(up5, zeros3), std::invalid_argument);
  CHECK_THROWS_AS(stats::wilcoxon_signed_rank({}, {}), std::invalid_argument);
}

TEST_CASE("trace flatness separates plateaus from ramps") {
  std::vector<double> constant(40, 0.8);
  const stats::FlatnessResult flat = stats::trace_flatness(constant, 20);
  CHECK(flat.flat);
  CHECK(flat.comparison.z == 0.0);

  std::vector<double> ramp;
  for (int i = 0; i < 80; ++i) ramp.push_back(i * 0.01);
  const stats::FlatnessResult climbing = stats::trace_flatness(ramp, 20);
  CHECK_FALSE(climbing.flat);
  CHECK(climbing.comparison.z > 0.0);
  CHECK(climbing.comparison.mean_a > climbing.comparison.mean_b);

  std::vector<double> descending(ramp.rbegin(), ramp.rend());
  CHECK_FALSE(stats::trace_flatness(descending, 20).flat);
  CHECK(stats::trace_flatness(descending, 20).comparison.z < 0.0);

  CHECK_THROWS_AS(stats::trace_flatness(constant, 1), std::invalid_argument);
  std::vector<double> tiny(39, 0.5);
  CHECK_THROWS_AS(stats::trace_flatness(tiny, 20), std::invalid_argument);
}

TEST_CASE("basic sample statistics") {
  const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  CHECK(stats::mean(xs) == doctest::Approx(2.5));
  CHECK(stats::variance(xs) == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
  CHECK(stats::std_dev(xs) == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-12));
  CHECK(stats::standard_error(xs) ==
        doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0).epsilon(1e-12));
  CHECK_THROWS_AS(stats::mean({}), std::invalid_argument);
  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(stats::variance(one), std::invalid_argument);
}

TEST_CASE("parity dataset holds the duplicated truth table") {
  const Dataset data = parity_dataset();
  CHECK(data.n_features == 2);
  CHECK(data.n_classes == 2);
  CHECK(data.samples.size() == 24);
  int per_row[4] = {0, 0, 0, 0};
  for (const Sample& sample : data.samples) {
    REQUIRE(sample.features.size() == 2);
    const int b1 = static_cast<int>(sample.features[0]);
    const int b2 = static_cast<int>(sample.features[1]);
    CHECK(sample.label == (b1 ^ b2));
    ++per_row[(b1 << 1) | b2];
  }
  for (int row = 0; row < 4; ++row) CHECK(per_row[row] == 6);
}
