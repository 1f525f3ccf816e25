#include "qecml/costmodel.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

namespace qecml {

namespace {

double repeated_failure(double eps, double n) {
  if (eps <= 0.0) return 0.0;
  if (eps >= 1.0) return 1.0;
  return -std::expm1(n * std::log1p(-eps));
}

}  // namespace

BudgetSplit split_budget(double eps_total, const BudgetWeights& weights) {
  if (!(eps_total > 0.0) || !(eps_total < 1.0)) {
    throw std::invalid_argument("split_budget: eps_total must lie in (0, 1)");
  }
  if (weights.logical < 0.0 || weights.distillation < 0.0 || weights.synthesis < 0.0) {
    throw std::invalid_argument("split_budget: negative weight");
  }
  const double sum = weights.logical + weights.distillation + weights.synthesis;
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("split_budget: weights must sum to 1");
  }
  BudgetSplit split;
  split.total = eps_total;
  split.logical = eps_total * weights.logical;
  split.distillation = eps_total * weights.distillation;
  split.synthesis = eps_total * weights.synthesis;
  return split;
}

void CodeParams::check_valid() const {
  if (!(p_phys > 0.0) || !(p_phys < p_star)) {
    throw std::invalid_argument("CodeParams: requires 0 < p_phys < p_star");
  }
  if (!(coeff > 0.0) || !(cycle_time_per_distance > 0.0)) {
    throw std::invalid_argument("CodeParams: coeff and cycle time must be positive");
  }
}

double logical_error_rate(int distance, const CodeParams& code) {
  code.check_valid();
  if (distance <= 0 || distance % 2 == 0) {
    throw std::invalid_argument("logical_error_rate: distance must be odd and positive");
  }
  const double exponent = (distance + 1) / 2;
  return code.coeff * std::pow(code.p_phys / code.p_star, exponent);
}

int choose_distance(double eps_log, double n_patch_cycles, const CodeParams& code,
                    int max_distance) {
  if (!(n_patch_cycles >= 1.0)) {
    throw std::invalid_argument("choose_distance: need at least one patch-cycle");
  }
  for (int d = 3; d <= max_distance; d += 2) {
    const double eps_l = logical_error_rate(d, code);
    if (repeated_failure(eps_l, n_patch_cycles) <= eps_log) return d;
  }
  char message[160];
  std::snprintf(message, sizeof(message),
                "choose_distance: no odd distance up to %d meets the logical budget "
                "%.3e at p_phys %.3e; the budget is infeasible at this error rate",
                max_distance, eps_log, code.p_phys);
  throw std::runtime_error(message);
}

std::vector<CycleAnchor> default_cycle_calibration() {
  return {
      {1e-3, 50.0, 4060.0},
      {1e-3, 100.0, 8410.0},
      {1e-4, 50.0, 4360.0},
      {1e-4, 100.0, 8710.0},
  };
}

double calibrated_cycles(const std::vector<CycleAnchor>& calibration, double budget,
                         double layers) {
  if (calibration.empty()) {
    throw std::invalid_argument("calibrated_cycles: empty calibration");
  }
  if (!(budget > 0.0) || !(layers > 0.0)) {
    throw std::invalid_argument("calibrated_cycles: budget and layers must be positive");
  }
  const double log_budget = std::log10(budget);
  double best_gap = std::numeric_limits<double>::infinity();
  double tier = 0.0;
  for (const CycleAnchor& anchor : calibration) {
    const double gap = std::abs(std::log10(anchor.budget) - log_budget);
    if (gap < best_gap) {
      best_gap = gap;
      tier = anchor.budget;
    }
  }

  const CycleAnchor* lo = nullptr;
  const CycleAnchor* hi = nullptr;
  for (const CycleAnchor& anchor : calibration) {
    if (anchor.budget != tier) continue;
    if (anchor.layers <= layers && (!lo || anchor.layers > lo->layers)) lo = &anchor;
    if (anchor.layers >= layers && (!hi || anchor.layers < hi->layers)) hi = &anchor;
  }
  if (!lo && !hi) {
    throw std::logic_error("calibrated_cycles: tier lookup failed");
  }
  if (!lo || !hi) {
    // One-sided: extrapolate along the tier's two extreme anchors, or scale
    // proportionally when the tier has a single anchor.
    const CycleAnchor* first = nullptr;
    const CycleAnchor* last = nullptr;
    for (const CycleAnchor& anchor : calibration) {
      if (anchor.budget != tier) continue;
      if (!first || anchor.layers < first->layers) first = &anchor;
      if (!last || anchor.layers > last->layers) last = &anchor;
    }
    if (first == last) {
      return std::max(1.0, first->cycles * layers / first->layers);
    }
    lo = first;
    hi = last;
  }
  if (lo->layers == hi->layers) return lo->cycles;
  const double t = (layers - lo->layers) / (hi->layers - lo->layers);
  return std::max(1.0, lo->cycles + t * (hi->cycles - lo->cycles));
}

CircuitShape with_calibrated_cycles(CircuitShape shape, double budget,
                                    const std::vector<CycleAnchor>& calibration) {
  const double cycles = calibrated_cycles(calibration, budget, shape.layers);
  shape.cycles_per_layer = cycles / shape.layers;
  return shape;
}

CircuitCount count_circuit(const CircuitShape& shape, double eps_syn, TScaling scaling) {
  if (shape.q_alg <= 0 || shape.layers <= 0 || shape.rotations_per_qubit_per_layer <= 0) {
    throw std::invalid_argument("count_circuit: shape fields must be positive");
  }
  if (!shape.cycles_per_layer) {
    throw std::invalid_argument("count_circuit: cycles_per_layer unresolved");
  }
  if (!(eps_syn > 0.0)) {
    throw std::invalid_argument("count_circuit: synthesis budget must be positive");
  }
  CircuitCount count;
  count.n_rotations = static_cast<double>(shape.q_alg) * shape.layers *
                      shape.rotations_per_qubit_per_layer;
  const double eps_angle = eps_syn / count.n_rotations;
  count.t_per_rotation =
      static_cast<int>(std::ceil(t_count_per_rotation(eps_angle, scaling)));
  count.n_t = count.n_rotations * count.t_per_rotation;
  count.n_logical_cycles = *shape.cycles_per_layer * shape.layers;
  count.n_patch_cycles = shape.effective_patches() * count.n_logical_cycles;
  return count;
}

double factory_qubits(const DistillationEntry& entry, int distance, int q_alg) {
  if (entry.footprint_tracks_data) {
    return 6.0 * q_alg * static_cast<double>(distance) * distance;
  }
  return entry.factory_qubits;
}

const DistillationEntry& DistillationCatalog::raw_entry() const {
  for (const DistillationEntry& entry : entries) {
    if (entry.is_raw) return entry;
  }
  throw std::logic_error("DistillationCatalog: no raw entry");
}

void DistillationCatalog::check_valid() const {
  if (entries.empty()) {
    throw std::invalid_argument("DistillationCatalog: empty");
  }
  for (size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].output_t_error > entries[i - 1].output_t_error) {
      throw std::invalid_argument(
          "DistillationCatalog: entries must be sorted by descending output error");
    }
  }
}

DistillationCatalog default_distillation_catalog(double p_phys) {
  // Raw injection carries the physical-scale T error. The single-level and
  // cascade entries follow the 15-to-1 output law 35 * eps_in^3; the two
  // two-level entries are pinned to published estimator outputs, which land
  // well above the idealized cascade because they include the factory's own
  // Clifford error floor.
  const double raw = p_phys;
  const double one_level = 35.0 * raw * raw * raw;
  const double cascade = 35.0 * one_level * one_level * one_level;
  DistillationCatalog catalog;
  catalog.entries = {
      {"raw injection", raw, 0.0, true, true},
      {"15-to-1", one_level, 1.5e4, false, false},
      {"15-to-1 two-level", 2.47e-9, 1.746e6, false, false},
      {"15-to-1 two-level tight", 5.51e-10, 1.764e6, false, false},
      {"15-to-1 cascade", cascade, 1.9e6, false, false},
  };
  catalog.check_valid();
  return catalog;
}

DistillationEntry select_distillation(const DistillationCatalog& catalog, double n_t,
                                      double eps_dis) {
  catalog.check_valid();
  if (!(n_t >= 1.0)) {
    throw std::invalid_argument("select_distillation: need at least one T gate");
  }
  for (const DistillationEntry& entry : catalog.entries) {
    if (repeated_failure(entry.output_t_error, n_t) <= eps_dis) return entry;
  }
  throw std::runtime_error(
      "select_distillation: no catalog entry meets the distillation budget " +
      std::to_string(eps_dis) + " over " + std::to_string(n_t) + " T gates");
}

Interval t_error_bounds(double p_two_qubit) {
  if (p_two_qubit < 0.0 || p_two_qubit >= 1.0) {
    throw std::invalid_argument("t_error_bounds: p2 must lie in [0, 1)");
  }
  return {2.0 / 3.0 * p_two_qubit, p_two_qubit};
}

ResourceEstimate estimate(const EstimateRequest& request) {
  request.code.check_valid();
  const BudgetSplit split = split_budget(request.eps_total, request.weights);
  const std::vector<CycleAnchor> calibration =
      request.calibration ? *request.calibration : default_cycle_calibration();
  CircuitShape shape = request.shape;
  if (!shape.cycles_per_layer) {
    shape = with_calibrated_cycles(shape, request.eps_total, calibration);
  }
  const CircuitCount count = count_circuit(shape, split.synthesis, request.scaling);

  ResourceEstimate result;
  result.budget = split;
  result.n_rotations = count.n_rotations;
  result.t_per_rotation = count.t_per_rotation;
  result.n_t_gates = count.n_t;
  result.n_logical_cycles = count.n_logical_cycles;
  result.n_patch_cycles = count.n_patch_cycles;

  result.code_distance =
      choose_distance(split.logical, count.n_patch_cycles, request.code);
  result.epsilon_l = logical_error_rate(result.code_distance, request.code);

  const DistillationCatalog catalog =
      request.catalog ? *request.catalog : default_distillation_catalog(request.code.p_phys);
  const DistillationEntry entry = request.distill
                                      ? select_distillation(catalog, count.n_t, split.distillation)
                                      : catalog.raw_entry();
  result.epsilon_t = entry.output_t_error;
  result.distillation_name = entry.name;

  result.data_qubits = 6.0 * shape.q_alg * static_cast<double>(result.code_distance) *
                       result.code_distance;
  result.factory_qubits = factory_qubits(entry, result.code_distance, shape.q_alg);
  result.cycle_time_us = request.code.cycle_time_per_distance * result.code_distance;
  result.runtime_ms = count.n_logical_cycles * result.cycle_time_us * 1e-3;

  const double p_log = repeated_failure(result.epsilon_l, count.n_patch_cycles);
  const double p_dis = repeated_failure(result.epsilon_t, count.n_t);
  result.total_failure_probability = std::min(1.0, p_log + p_dis + split.synthesis);
  return result;
}

}  // namespace qecml
