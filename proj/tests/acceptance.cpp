// Acceptance gate: one checkable criterion per invocation, selected with
// --criterion N (1..11). Each run prints supporting numbers on indented lines
// and finishes with exactly one verdict line "criterion N: PASS|FAIL".
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <numbers>
#include <string>
#include <vector>

#include "qecml/channel.h"
#include "qecml/costmodel.h"
#include "qecml/io.h"
#include "qecml/noise.h"
#include "qecml/qed422.h"
#include "qecml/qvc.h"
#include "qecml/stats.h"
#include "qecml/threadpool.h"
#include "qecml/trainer.h"
#include "test_support.h"

namespace {

using namespace qecml;

double rel_err(double x, double target) {
  return std::abs(x - target) / std::abs(target);
}

bool check(bool ok, const char* what) {
  if (!ok) std::printf("  FAILED: %s\n", what);
  return ok;
}

// --------------------------------------------------------------------------
// 1. Calibration table: distances, logical error rates, qubit counts, cycle
//    times, and runtimes for the four reference workloads.
// --------------------------------------------------------------------------

bool criterion1() {
  struct Row {
    double budget;
    int layers;
    int distance;
    double eps_l;
    double data_qubits;
    double cycle_us;
    double runtime_ms;  // table value; computed runtime must sit within 5%
  };
  const Row rows[] = {
      {1e-3, 50, 15, 3.0e-10, 13500.0, 6.0, 24.0},
      {1e-3, 100, 15, 3.0e-10, 13500.0, 6.0, 50.0},
      {1e-4, 50, 17, 3.0e-11, 17340.0, 6.8, 30.0},
      {1e-4, 100, 17, 3.0e-11, 17340.0, 6.8, 59.0},
  };
  bool pass = true;
  for (const Row& row : rows) {
    EstimateRequest request;
    request.eps_total = row.budget;
    request.shape.layers = row.layers;
    const ResourceEstimate est = estimate(request);
    std::printf(
        "  budget=%.0e layers=%-3d -> d=%d eps_l=%.3e data=%.0f cycle=%.2fus "
        "runtime=%.3fms (table %.0fms, off %.2f%%)\n",
        row.budget, row.layers, est.code_distance, est.epsilon_l, est.data_qubits,
        est.cycle_time_us, est.runtime_ms, row.runtime_ms,
        100.0 * rel_err(est.runtime_ms, row.runtime_ms));
    pass &= check(est.code_distance == row.distance, "code distance");
    pass &= check(rel_err(est.epsilon_l, row.eps_l) < 1e-12, "logical error rate");
    pass &= check(rel_err(est.data_qubits, row.data_qubits) < 1e-12, "data qubits");
    pass &= check(rel_err(est.cycle_time_us, row.cycle_us) < 1e-12, "cycle time");
    pass &= check(rel_err(est.runtime_ms, row.runtime_ms) <= 0.05, "runtime within 5%");
    pass &= check(est.total_failure_probability <= row.budget * (1.0 + 1e-9),
                  "failure within budget");
  }
  return pass;
}

// --------------------------------------------------------------------------
// 2. Error-rate bridges between depolarizing strength, average gate error,
//    and synthesized-rotation error.
// --------------------------------------------------------------------------

bool criterion2() {
  bool pass = true;
  const double r1 = effective_gate_error(2.99e-3);
  const double r2 = effective_gate_error(1.99e-3);
  std::printf("  effective_gate_error(2.99e-3) = %.6e (target 1.99e-3, off %.3f%%)\n",
              r1, 100.0 * rel_err(r1, 1.99e-3));
  std::printf("  effective_gate_error(1.99e-3) = %.6e (target 1.33e-3, off %.3f%%)\n",
              r2, 100.0 * rel_err(r2, 1.33e-3));
  pass &= check(rel_err(r1, 1.99e-3) <= 0.005, "bridge at 2.99e-3 within 0.5%");
  pass &= check(rel_err(r2, 1.33e-3) <= 0.005, "bridge at 1.99e-3 within 0.5%");

  const double classic = gate_error_from_t_error(1e-4, 1e-4, TScaling::kClassic);
  const double improved = gate_error_from_t_error(1e-4, 1e-4, TScaling::kImproved);
  std::printf("  gate_error_from_t_error(1e-4, 1e-4) classic  = %.6e (target 1.99e-3)\n",
              classic);
  std::printf("  gate_error_from_t_error(1e-4, 1e-4) improved = %.6e (target 1.33e-3)\n",
              improved);
  pass &= check(rel_err(classic, 1.99e-3) <= 0.01, "classic scaling within 1%");
  pass &= check(rel_err(improved, 1.33e-3) <= 0.01, "improved scaling within 1%");
  return pass;
}

// --------------------------------------------------------------------------
// 3. Channel algebra: depolarizing-unitary commutation, Kraus vs
//    superoperator agreement, and generator exp/log round trips.
// --------------------------------------------------------------------------

bool criterion3() {
  Rng rng(0x616c6765);
  int cases = 0;
  double worst_commute = 0.0, worst_kraus = 0.0, worst_roundtrip = 0.0;
  for (int i = 0; i < 60; ++i) {
    const double p = rng.uniform(0.01, 0.74);
    const SuperOperatorMatrix depol =
        channel_to_superoperator(depolarizing_channel(p));
    const SuperOperatorMatrix rotation =
        channel_to_superoperator(unitary_channel(testsupport::random_unitary(rng, 2)));
    worst_commute = std::max(
        worst_commute,
        testsupport::max_abs_diff(depol.m * rotation.m, rotation.m * depol.m));

    // Random CPTP channel from a Haar-ish isometry split into two Kraus ops.
    Mat g(4, 2);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 2; ++c) g(r, c) = cplx(rng.normal(), rng.normal());
    Eigen::HouseholderQR<Mat> qr(g);
    const Mat q = qr.householderQ();
    const Mat isometry = q.leftCols(2);
    KrausChannel channel;
    channel.n_qubits = 1;
    channel.ops = {Mat(isometry.topRows(2)), Mat(isometry.bottomRows(2))};
    channel.check_valid();
    const Mat rho = testsupport::random_density(rng, 2);
    Mat direct = Mat::Zero(2, 2);
    for (const Mat& k : channel.ops) direct += k * rho * k.adjoint();
    worst_kraus = std::max(
        worst_kraus,
        testsupport::max_abs_diff(
            direct, apply_superoperator(channel_to_superoperator(channel), rho)));

    const SuperOperatorMatrix s =
        channel_to_superoperator(depolarizing_channel(rng.uniform(0.01, 0.7)));
    const SuperOperatorMatrix generator = log_superoperator(s);
    worst_roundtrip = std::max(
        worst_roundtrip,
        testsupport::max_abs_diff(exp_lindbladian(generator, 1.0).m, s.m));
    // Half-time split of the same generator composes back to the channel.
    const Mat half = exp_lindbladian(generator, 0.5).m;
    worst_roundtrip =
        std::max(worst_roundtrip, testsupport::max_abs_diff(half * half, s.m));
    cases += 3;
  }
  std::printf("  %d randomized cases\n", cases);
  std::printf("  max |[D,U]| deviation        = %.3e\n", worst_commute);
  std::printf("  max Kraus-vs-superop defect  = %.3e\n", worst_kraus);
  std::printf("  max exp/log round-trip defect = %.3e\n", worst_roundtrip);
  bool pass = check(cases >= 50, "at least 50 cases");
  pass &= check(worst_commute < 1e-10, "depolarizing commutes with unitaries");
  pass &= check(worst_kraus < 1e-10, "Kraus matches superoperator");
  pass &= check(worst_roundtrip < 1e-9, "generator exp/log round trips");
  return pass;
}

// --------------------------------------------------------------------------
// 4. Noiseless logical parity circuit equals the bare two-qubit classifier.
// --------------------------------------------------------------------------

bool criterion4() {
  const PauliInjectionSpec quiet;
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const double theta = -std::numbers::pi + 2.0 * std::numbers::pi * t / 19.0;
    qed422::LogicalParityEvaluator evaluator(theta, 0, quiet);
    for (int input = 0; input < 4; ++input) {
      const int b1 = input >> 1, b2 = input & 1;
      const double logical = evaluator.evaluate_exact(b1, b2).z1_expectation;
      const double bare = parity_z_expectation(theta, b1, b2);
      worst = std::max(worst, std::abs(logical - bare));
    }
  }
  std::printf("  20 angles x 4 inputs, max |encoded - bare| = %.3e\n", worst);
  return check(worst < 1e-10, "logical readout matches the bare circuit");
}

// --------------------------------------------------------------------------
// 5. Detection: every single-qubit Pauli error is flagged with certainty,
//    while a weight-2 logical error passes every check undetected.
// --------------------------------------------------------------------------

bool criterion5() {
  Rng rng(0x64657431);
  bool pass = true;
  int flagged = 0;
  for (int input = 0; input < 4; ++input) {
    const int b1 = input >> 1, b2 = input & 1;
    for (int qubit = 0; qubit < 4; ++qubit) {
      for (int pauli = 1; pauli <= 3; ++pauli) {
        PureState state = qed422::codeword(b1, b2);
        if (pauli == 1) state.apply_x(qubit);
        if (pauli == 2) state.apply_y(qubit);
        if (pauli == 3) state.apply_z(qubit);
        const auto probs = qed422::syndrome_flag_probabilities(state);
        const double expect_z = pauli != 3 ? 1.0 : 0.0;  // ZZZZ sees X and Y
        const double expect_x = pauli != 1 ? 1.0 : 0.0;  // XXXX sees Z and Y
        const bool certain = std::abs(probs.z_stabilizer - expect_z) < 1e-12 &&
                             std::abs(probs.x_stabilizer - expect_x) < 1e-12;
        const auto flags = qed422::syndrome_round(state, rng);
        if (certain && flags.any()) ++flagged;
        pass &= check(certain && flags.any(), "single error flagged with certainty");
      }
    }
  }
  std::printf("  %d/48 single-qubit Pauli errors flagged deterministically\n", flagged);

  int undetected = 0;
  for (int input = 0; input < 4; ++input) {
    const int b1 = input >> 1, b2 = input & 1;
    PureState state = qed422::codeword(b1, b2);
    state.apply_x(1);
    state.apply_x(3);  // weight-2 logical X on the first encoded qubit
    const auto probs = qed422::syndrome_flag_probabilities(state);
    const auto readout = qed422::logical_measure_z1_exact(state);
    const int flipped = ((b1 ^ 1) << 1) | b2;
    const bool silent = probs.x_stabilizer < 1e-12 && probs.z_stabilizer < 1e-12 &&
                        readout.discard_rate < 1e-12 &&
                        std::abs(readout.distribution[flipped] - 1.0) < 1e-12;
    if (silent) ++undetected;
    pass &= check(silent, "X(q1)X(q3) evades stabilizers and readout parity");
  }
  std::printf("  weight-2 X(q1)X(q3) flips the logical bit silently on %d/4 codewords\n",
              undetected);
  return pass;
}

// --------------------------------------------------------------------------
// Shared sweep helpers for the training criteria.
// --------------------------------------------------------------------------

struct CellRun {
  std::vector<trainer::TrainingTrace> traces;  // one per default seed
  std::vector<double> finals;

  double mean_final() const { return stats::mean(finals); }
};

CellRun run_cell(const trainer::ParityTrainConfig& config) {
  CellRun run;
  const auto& seeds = trainer::kDefaultSeeds;
  run.traces.resize(seeds.size());
  parallel_for(static_cast<int>(seeds.size()), default_jobs(), [&](int i) {
    run.traces[static_cast<size_t>(i)] =
        trainer::train_parity(config, seeds[static_cast<size_t>(i)]);
  });
  for (const auto& trace : run.traces) run.finals.push_back(trace.final_accuracy());
  return run;
}

std::vector<double> seed_mean_accuracy(const CellRun& run) {
  const size_t n = run.traces.front().records.size();
  std::vector<double> mean(n, 0.0);
  for (const auto& trace : run.traces)
    for (size_t i = 0; i < n; ++i) mean[i] += trace.records[i].accuracy;
  for (double& m : mean) m /= static_cast<double>(run.traces.size());
  return mean;
}

// --------------------------------------------------------------------------
// 6. Noiseless logical parity training reaches accuracy 1.0 within the
//    100-iteration budget for every default seed.
// --------------------------------------------------------------------------

bool criterion6() {
  const trainer::ParityTrainConfig config;  // p = 0, shots = 1000, 100 iters
  const CellRun run = run_cell(config);
  bool pass = true;
  for (size_t s = 0; s < run.traces.size(); ++s) {
    int first_hit = -1;
    const auto& records = run.traces[s].records;
    for (size_t i = 0; i < records.size(); ++i) {
      if (records[i].accuracy == 1.0) {
        first_hit = static_cast<int>(i);
        break;
      }
    }
    std::printf("  seed %llu: first accuracy-1.0 iteration = %d\n",
                static_cast<unsigned long long>(trainer::kDefaultSeeds[s]), first_hit);
    pass &= check(first_hit >= 0, "accuracy 1.0 reached within 100 iterations");
  }
  return pass;
}

// --------------------------------------------------------------------------
// 7. Uncorrected training degrades with noise: accuracy at p = 0.01 is
//    significantly below p = 0.001, and traces at p >= 0.005 are flat.
// --------------------------------------------------------------------------

bool criterion7() {
  trainer::ParityTrainConfig config;
  config.rounds = 0;

  auto at = [&](double p) {
    trainer::ParityTrainConfig c = config;
    c.p = p;
    return run_cell(c);
  };
  const CellRun low = at(0.001);
  const CellRun mid = at(0.005);
  const CellRun high = at(0.01);
  std::printf("  mean final accuracy: p=0.001 %.4f | p=0.005 %.4f | p=0.01 %.4f\n",
              low.mean_final(), mid.mean_final(), high.mean_final());

  const auto drop = stats::compare_means(high.finals, low.finals);
  std::printf("  p=0.01 vs p=0.001: diff=%+.4f z=%+.2f (needs z <= -2)\n",
              drop.difference, drop.z);
  bool pass = check(drop.z <= -2.0, "accuracy at p=0.01 below p=0.001 at 2 sigma");

  for (const auto* cell : {&mid, &high}) {
    const std::vector<double> trace = seed_mean_accuracy(*cell);
    const auto flat = stats::trace_flatness(trace, 20, 2.0);
    std::printf("  flatness at p=%.3f: window z=%+.2f -> %s (needs flat)\n",
                cell == &mid ? 0.005 : 0.01, flat.comparison.z,
                flat.flat ? "flat" : "still moving");
    pass &= check(flat.flat, "trace statistically flat at p >= 0.005");
  }
  return pass;
}

// --------------------------------------------------------------------------
// 8. At p = 0.0025 with full ancilla noise, two syndrome rounds beat zero
//    rounds significantly, while deepening 2 -> 5 adds nothing significant.
// --------------------------------------------------------------------------

bool criterion8() {
  trainer::ParityTrainConfig config;
  config.p = 0.0025;
  config.f_anc = 1.0;

  auto at = [&](int rounds) {
    trainer::ParityTrainConfig c = config;
    c.rounds = rounds;
    return run_cell(c);
  };
  const CellRun r0 = at(0);
  const CellRun r2 = at(2);
  const CellRun r5 = at(5);
  std::printf("  mean final accuracy: rounds=0 %.4f | rounds=2 %.4f | rounds=5 %.4f\n",
              r0.mean_final(), r2.mean_final(), r5.mean_final());

  const auto gain = stats::compare_means(r2.finals, r0.finals);
  std::printf("  rounds 2 vs 0: diff=%+.4f z=%+.2f (needs z >= +2)\n", gain.difference,
              gain.z);
  bool pass = check(gain.z >= 2.0, "rounds=2 beats rounds=0 at 2 sigma");

  const auto deeper = stats::compare_means(r5.finals, r2.finals);
  std::printf("  rounds 5 vs 2: diff=%+.4f z=%+.2f (needs |z| < 2)\n",
              deeper.difference, deeper.z);
  pass &= check(std::abs(deeper.z) < 2.0, "rounds 2 -> 5 gain not significant");
  return pass;
}

// --------------------------------------------------------------------------
// 9. Noise-free rotation ancillas rescue training: at f_anc = 0, p = 0.01,
//    five syndrome rounds reach final accuracy 1.0 for at least 9/10 seeds.
// --------------------------------------------------------------------------

bool criterion9() {
  trainer::ParityTrainConfig config;
  config.p = 0.01;
  config.f_anc = 0.0;
  config.rounds = 5;

  const CellRun run = run_cell(config);
  int perfect = 0;
  for (size_t s = 0; s < run.finals.size(); ++s) {
    if (run.finals[s] == 1.0) ++perfect;
    std::printf("  seed %llu: final accuracy %.4f\n",
                static_cast<unsigned long long>(trainer::kDefaultSeeds[s]),
                run.finals[s]);
  }
  std::printf("  %d/10 seeds at final accuracy 1.0 (needs >= 9)\n", perfect);
  return check(perfect >= 9, "at least 9/10 seeds reach final accuracy 1.0");
}

// --------------------------------------------------------------------------
// 10. Desk-scale classifier gradients shrink strictly with depolarizing
//     strength (barren-plateau onset).
// --------------------------------------------------------------------------

bool criterion10() {
  const double levels[] = {0.0, 1.99e-3, 5.11e-3};
  const auto& seeds = trainer::kDefaultSeeds;
  double means[3] = {0.0, 0.0, 0.0};
  std::vector<double> grads(3 * seeds.size(), 0.0);
  parallel_for(static_cast<int>(3 * seeds.size()), default_jobs(), [&](int i) {
    const int level = i / static_cast<int>(seeds.size());
    const int seed_index = i % static_cast<int>(seeds.size());
    trainer::QvcTrainConfig config;
    config.p_depol = levels[level];
    grads[static_cast<size_t>(i)] = trainer::average_squared_gradient(
        config, seeds[static_cast<size_t>(seed_index)]);
  });
  for (int level = 0; level < 3; ++level) {
    double sum = 0.0;
    for (size_t s = 0; s < seeds.size(); ++s)
      sum += grads[static_cast<size_t>(level) * seeds.size() + s];
    means[level] = sum / static_cast<double>(seeds.size());
    std::printf("  p_depol=%.5f: seed-mean avg squared gradient = %.6e\n",
                levels[level], means[level]);
  }
  bool pass = check(means[0] > means[1], "gradient shrinks from p=0 to p=1.99e-3");
  pass &= check(means[1] > means[2], "gradient shrinks from p=1.99e-3 to p=5.11e-3");
  return pass;
}

// --------------------------------------------------------------------------
// 11. Extracted noise thresholds: sweep both models over the default grid and
//     require the gate threshold in [0.002, 0.005] and the environmental
//     threshold in [0.003, 0.006].
// --------------------------------------------------------------------------

bool criterion11() {
  bool pass = true;
  for (const NoiseModel model : {NoiseModel::kGate, NoiseModel::kEnvironmental}) {
    trainer::SweepConfig config;
    config.model = model;
    config.p_grid = {0.001, 0.002, 0.0025, 0.003, 0.004, 0.005, 0.01};
    config.rounds_grid = {0, 1, 2, 5};
    const char* name = model == NoiseModel::kGate ? "gate" : "environmental";

    std::atomic<int> last_tenth{0};
    const trainer::SweepSummary summary =
        trainer::sweep(config, default_jobs(), [&](int done, int total) {
          const int tenth = 10 * done / total;
          if (tenth > last_tenth.exchange(tenth)) {
            std::printf("  [%s] sweep %d%%\n", name, 10 * tenth);
            std::fflush(stdout);
          }
        });

    for (const auto& cell : summary.cells)
      if (cell.cell.rounds == 5)
        std::printf("  [%s] p=%.4f rounds=5: plateau %.4f +- %.4f\n", name,
                    cell.cell.p, cell.mean_final_accuracy, cell.std_final_accuracy);

    double threshold = 0.0;
    try {
      threshold = trainer::extract_threshold(summary, 0.90, 1.0, 2.0);
    } catch (const std::exception& e) {
      std::printf("  [%s] threshold extraction failed: %s\n", name, e.what());
      pass = false;
      continue;
    }
    const double lo = model == NoiseModel::kGate ? 0.002 : 0.003;
    const double hi = model == NoiseModel::kGate ? 0.005 : 0.006;
    std::printf("  [%s] extracted threshold p = %.4f (window [%.3f, %.3f])\n", name,
                threshold, lo, hi);
    pass &= check(threshold >= lo && threshold <= hi, "threshold inside the window");
  }
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  int criterion = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      criterion = std::atoi(argv[i + 1]);
      ++i;
    }
  }
  if (criterion < 1 || criterion > 11) {
    std::fprintf(stderr, "usage: acceptance --criterion N   (N in 1..11)\n");
    return 2;
  }

  bool pass = false;
  try {
    switch (criterion) {
      case 1: pass = criterion1(); break;
      case 2: pass = criterion2(); break;
      case 3: pass = criterion3(); break;
      case 4: pass = criterion4(); break;
      case 5: pass = criterion5(); break;
      case 6: pass = criterion6(); break;
      case 7: pass = criterion7(); break;
      case 8: pass = criterion8(); break;
      case 9: pass = criterion9(); break;
      case 10: pass = criterion10(); break;
      case 11: pass = criterion11(); break;
    }
  } catch (const std::exception& e) {
    std::printf("  unexpected exception: %s\n", e.what());
    pass = false;
  }
  std::printf("criterion %d: %s\n", criterion, pass ? "PASS" : "FAIL");
  return pass ? 0 : 1;
}
