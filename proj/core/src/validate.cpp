#include "qecml/validate.h"

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "qecml/channel.h"
#include "qecml/costmodel.h"
#include "qecml/gates.h"
#include "qecml/io.h"
#include "qecml/noise.h"
#include "qecml/qed422.h"
#include "qecml/qvc.h"
#include "qecml/rng.h"
#include "qecml/stats.h"

namespace qecml::validate {

namespace {

void expect(bool condition, const std::string& message) {
  if (!condition) throw std::runtime_error(message);
}

void expect_close(double actual, double wanted, double rel_tol,
                  const std::string& what) {
  const double scale = std::max(std::abs(wanted), 1e-300);
  if (std::abs(actual - wanted) > rel_tol * scale) {
    std::ostringstream msg;
    msg << what << ": got " << actual << ", wanted " << wanted << " (rel tol "
        << rel_tol << ")";
    throw std::runtime_error(msg.str());
  }
}

// Random CPTP channel: Ginibre Kraus blocks whitened by the inverse square
// root of their completeness sum.
KrausChannel random_channel(int n_qubits, int n_kraus, Rng& rng) {
  const int dim = 1 << n_qubits;
  std::vector<Mat> blocks;
  Mat sum = Mat::Zero(dim, dim);
  for (int k = 0; k < n_kraus; ++k) {
    Mat g(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) g(i, j) = cplx(rng.normal(), rng.normal());
    sum += g.adjoint() * g;
    blocks.push_back(std::move(g));
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(sum);
  const Mat inv_sqrt = eig.operatorInverseSqrt();
  KrausChannel channel;
  channel.n_qubits = n_qubits;
  for (const Mat& g : blocks) channel.ops.push_back(g * inv_sqrt);
  channel.check_valid();
  return channel;
}

std::string check_rng_determinism() {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 1000; ++i)
    expect(a.next_u64() == b.next_u64(), "same seed diverged");
  Rng c(42);
  Rng d(43);
  bool differ = false;
  for (int i = 0; i < 4 && !differ; ++i) differ = c.next_u64() != d.next_u64();
  expect(differ, "distinct seeds produced identical output");
  expect(Rng::derive(1, 2, 3) != Rng::derive(1, 3, 2),
         "stream derivation ignores argument order");
  return "1000 draws reproducible; streams separated";
}

std::string check_channel_roundtrip() {
  Rng rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const KrausChannel channel = random_channel(1, 3, rng);
    const SuperOperatorMatrix s = channel_to_superoperator(channel);
    const KrausChannel back = superoperator_to_channel(s);
    const SuperOperatorMatrix s2 = channel_to_superoperator(back);
    worst = std::max(worst, (s.m - s2.m).cwiseAbs().maxCoeff());
  }
  expect(worst < 1e-9, "Kraus/superoperator round trip drifted");

  const SuperOperatorMatrix depol =
      channel_to_superoperator(depolarizing_channel(0.1));
  const SuperOperatorMatrix relog = exp_lindbladian(log_superoperator(depol), 1.0);
  const double drift = (depol.m - relog.m).cwiseAbs().maxCoeff();
  expect(drift < 1e-9, "matrix log/exp round trip drifted");
  std::ostringstream out;
  out << "max round-trip drift " << std::max(worst, drift);
  return out.str();
}

std::string check_bridge_inverses() {
  double worst = 0.0;
  for (double p = 1e-5; p < 0.75; p *= 1.9) {
    const double back = depol_from_gate_error(effective_gate_error(p));
    worst = std::max(worst, std::abs(back - p) / p);
  }
  expect(worst < 1e-12, "gate-error bridge inverse drifted");
  std::ostringstream out;
  out << "worst relative drift " << worst;
  return out.str();
}

std::string check_bridge_anchors() {
  const double classic = gate_error_from_t_error(1e-4, 1e-4, TScaling::kClassic);
  const double improved = gate_error_from_t_error(1e-4, 1e-4, TScaling::kImproved);
  expect_close(classic, 1.99e-3, 0.01, "classic synthesis anchor");
  expect_close(improved, 1.33e-3, 0.01, "improved synthesis anchor");
  expect_close(depol_from_gate_error(classic), 2.99e-3, 0.01,
               "depolarizing rate at the classic anchor");
  std::ostringstream out;
  out << "classic " << classic << ", improved " << improved;
  return out.str();
}

std::string check_budget_split() {
  const BudgetSplit equal = split_budget(3e-3);
  expect_close(equal.logical, 1e-3, 1e-12, "equal-thirds logical share");
  expect_close(equal.logical + equal.distillation + equal.synthesis, equal.total,
               1e-12, "split recomposition");
  BudgetWeights weights;
  weights.logical = 0.5;
  weights.distillation = 0.3;
  weights.synthesis = 0.2;
  const BudgetSplit skew = split_budget(1e-2, weights);
  expect_close(skew.distillation, 3e-3, 1e-12, "weighted distillation share");
  return "splits recompose exactly";
}

std::string check_table1_fixtures() {
  EstimateRequest request;
  request.eps_total = 1e-3;
  request.shape.layers = 50;
  const ResourceEstimate row1 = estimate(request);
  expect(row1.code_distance == 15, "row 1 distance != 15");
  expect_close(row1.data_qubits, 13500.0, 1e-12, "row 1 data qubits");
  expect_close(row1.runtime_ms, 24.36, 0.05, "row 1 runtime");

  request.eps_total = 1e-4;
  const ResourceEstimate row3 = estimate(request);
  expect(row3.code_distance == 17, "row 3 distance != 17");
  expect_close(row3.data_qubits, 17340.0, 1e-12, "row 3 data qubits");
  expect_close(row3.runtime_ms, 29.648, 0.05, "row 3 runtime");
  std::ostringstream out;
  out << "d=" << row1.code_distance << "/" << row3.code_distance << ", data "
      << row1.data_qubits << "/" << row3.data_qubits;
  return out.str();
}

std::string check_codeword_stabilizers() {
  for (int b1 = 0; b1 < 2; ++b1) {
    for (int b2 = 0; b2 < 2; ++b2) {
      const PureState psi = qed422::codeword(b1, b2);
      const auto probs = qed422::syndrome_flag_probabilities(psi);
      expect(probs.x_stabilizer < 1e-12 && probs.z_stabilizer < 1e-12,
             "codeword triggered a stabilizer flag");
      const auto readout = qed422::logical_measure_z1_exact(psi);
      expect_close(readout.z1_expectation, 1.0 - 2.0 * b1, 1e-12,
                   "logical Z1 on a codeword");
      expect(readout.discard_rate < 1e-12, "codeword has odd-weight support");
    }
  }
  return "4 codewords stabilized; Z1 readout exact";
}

std::string check_gadget_oracle() {
  double worst = 0.0;
  for (const double theta : {0.0, 0.7, 2.1, 4.0}) {
    qed422::LogicalParityEvaluator eval(theta, 0, PauliInjectionSpec{});
    for (int input = 0; input < 4; ++input) {
      const int b1 = input >> 1;
      const int b2 = input & 1;
      const double logical = eval.evaluate_exact(b1, b2).z1_expectation;
      const double bare = parity_z_expectation(theta, b1, b2);
      worst = std::max(worst, std::abs(logical - bare));
    }
  }
  expect(worst < 1e-10, "logical gadget diverged from the bare-circuit oracle");
  std::ostringstream out;
  out << "max |logical - bare| " << worst;
  return out.str();
}

std::string check_detection_completeness() {
  int flagged = 0;
  for (int q = 0; q < 4; ++q) {
    for (int pauli = 1; pauli <= 3; ++pauli) {
      PureState psi = qed422::codeword(1, 0);
      if (pauli == 1) psi.apply_x(q);
      if (pauli == 2) psi.apply_y(q);
      if (pauli == 3) psi.apply_z(q);
      const auto probs = qed422::syndrome_flag_probabilities(psi);
      expect(std::max(probs.x_stabilizer, probs.z_stabilizer) > 1.0 - 1e-12,
             "single-qubit fault escaped both stabilizers");
      ++flagged;
    }
  }
  PureState psi = qed422::codeword(0, 1);
  psi.apply_x(1);
  psi.apply_x(3);
  const auto probs = qed422::syndrome_flag_probabilities(psi);
  expect(probs.x_stabilizer < 1e-12 && probs.z_stabilizer < 1e-12,
         "logical X1 should commute with both stabilizers");
  const auto readout = qed422::logical_measure_z1_exact(psi);
  expect_close(readout.z1_expectation, -1.0, 1e-12,
               "logical X1 must flip the first logical bit");
  std::ostringstream out;
  out << flagged << "/12 faults flagged; logical X1 silent as required";
  return out.str();
}

std::string check_trace_roundtrip() {
  trainer::TrainingTrace trace;
  trace.seed = 7;
  trace.config_hash = 0x8899aabbccddeeffull;
  trace.final_params = {4.71238898038469, -0.125};
  for (int i = 0; i < 3; ++i) {
    trainer::IterationRecord r;
    r.accuracy = 0.25 * (i + 1);
    r.loss = 1.0 / (i + 1.0);
    r.avg_sq_gradient = 1e-3 * i + 1e-7;
    r.discard_rate = 0.01 * i;
    trace.records.push_back(r);
  }
  const auto same = [](const trainer::TrainingTrace& a,
                       const trainer::TrainingTrace& b) {
    if (a.seed != b.seed || a.config_hash != b.config_hash) return false;
    if (a.final_params != b.final_params) return false;
    if (a.records.size() != b.records.size()) return false;
    for (size_t i = 0; i < a.records.size(); ++i) {
      if (a.records[i].accuracy != b.records[i].accuracy) return false;
      if (a.records[i].loss != b.records[i].loss) return false;
      if (a.records[i].avg_sq_gradient != b.records[i].avg_sq_gradient) return false;
      if (a.records[i].discard_rate != b.records[i].discard_rate) return false;
    }
    return true;
  };
  expect(same(trace, io::trace_from_csv(io::trace_to_csv(trace))),
         "CSV round trip changed the trace");
  expect(same(trace, io::trace_from_json(io::trace_to_json(trace))),
         "JSON round trip changed the trace");
  return "CSV and JSON traces bit-exact through their parsers";
}

std::string check_config_roundtrip() {
  io::ConfigFile config;
  config.sections[""]["master_seed"] = "99";
  config.sections["train-parity"]["p"] = "0.0025";
  config.sections["train-parity"]["rounds"] = "2";
  config.sections["sweep"]["p_grid"] = "0.001, 0.0025, 0.005";
  const io::ConfigFile back = io::parse_config(io::serialize_config(config));
  expect(back.sections == config.sections, "config round trip changed content");
  expect_close(io::config_double(back, "train-parity", "p", -1.0), 0.0025, 1e-15,
               "typed double accessor");
  const auto grid =
      io::config_double_list(back, "sweep", "p_grid", {});
  expect(grid.size() == 3 && grid[1] == 0.0025, "typed list accessor");
  bool rejected = false;
  try {
    io::reject_unknown_keys(back, {{"", {"master_seed"}},
                                   {"train-parity", {"p"}},
                                   {"sweep", {"p_grid"}}});
  } catch (const std::invalid_argument&) {
    rejected = true;
  }
  expect(rejected, "unknown key 'rounds' was not rejected");
  return "round trip exact; unknown keys rejected";
}

std::string check_wilcoxon_sanity() {
  const std::vector<double> zeros(10, 0.0);
  const auto flat = stats::wilcoxon_signed_rank(zeros, zeros);
  expect(flat.p_value == 1.0, "identical samples must give p = 1");
  std::vector<double> shifted;
  for (int i = 1; i <= 10; ++i) shifted.push_back(i);
  const auto skew = stats::wilcoxon_signed_rank(shifted, zeros);
  expect(skew.p_value < 0.05, "strongly one-sided differences must reject");
  std::ostringstream out;
  out << "one-sided p " << skew.p_value;
  return out.str();
}

struct Check {
  const char* name;
  std::function<std::string()> run;
};

const std::vector<Check>& registry() {
  static const std::vector<Check> checks = {
      {"rng-determinism", check_rng_determinism},
      {"channel-roundtrip", check_channel_roundtrip},
      {"bridge-inverses", check_bridge_inverses},
      {"bridge-anchors", check_bridge_anchors},
      {"budget-split", check_budget_split},
      {"table1-fixtures", check_table1_fixtures},
      {"codeword-stabilizers", check_codeword_stabilizers},
      {"gadget-oracle", check_gadget_oracle},
      {"detection-completeness", check_detection_completeness},
      {"trace-roundtrip", check_trace_roundtrip},
      {"config-roundtrip", check_config_roundtrip},
      {"wilcoxon-sanity", check_wilcoxon_sanity},
  };
  return checks;
}

CheckResult run_one(const Check& check) {
  CheckResult result;
  result.name = check.name;
  const auto start = std::chrono::steady_clock::now();
  try {
    result.detail = check.run();
    result.passed = true;
  } catch (const std::exception& error) {
    result.detail = error.what();
    result.passed = false;
  }
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace

std::vector<std::string> check_names() {
  std::vector<std::string> names;
  for (const Check& check : registry()) names.emplace_back(check.name);
  return names;
}

CheckResult run_check(const std::string& name) {
  for (const Check& check : registry())
    if (name == check.name) return run_one(check);
  throw std::invalid_argument("unknown check '" + name + "'");
}

std::vector<CheckResult> run_all(const std::string& filter) {
  std::vector<CheckResult> results;
  for (const Check& check : registry())
    if (filter.empty() || std::string(check.name).find(filter) != std::string::npos)
      results.push_back(run_one(check));
  return results;
}

}  // namespace qecml::validate
