#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qecml/noise.h"

namespace qecml {

// ---------------------------------------------------------------------------
// Surface-code resource model. Repeated-exposure failure probabilities use
// 1 - (1 - eps)^N throughout.
// ---------------------------------------------------------------------------

struct BudgetSplit {
  double total = 0.0;
  double logical = 0.0;       // uncorrected logical (memory/Clifford) errors
  double distillation = 0.0;  // residual distilled-T infidelity
  double synthesis = 0.0;     // rotation-synthesis truncation
};

struct BudgetWeights {
  double logical = 1.0 / 3.0;
  double distillation = 1.0 / 3.0;
  double synthesis = 1.0 / 3.0;
};

// Splits the total failure budget; equal thirds by default. Weights must be
// nonnegative and sum to 1.
BudgetSplit split_budget(double eps_total, const BudgetWeights& weights = {});

struct CodeParams {
  double p_phys = 1e-3;  // physical error rate per syndrome round
  double p_star = 1e-2;  // threshold-like fit constant
  double coeff = 0.03;   // fit prefactor
  double cycle_time_per_distance = 0.4;  // microseconds per unit distance

  void check_valid() const;  // requires 0 < p_phys < p_star, coeff > 0
};

// Logical error rate per patch per syndrome cycle for odd distance d:
//   eps_L(d) = coeff * (p_phys / p_star)^((d+1)/2)
double logical_error_rate(int distance, const CodeParams& code);

// Smallest odd distance (from 3) with 1 - (1 - eps_L(d))^{n_patch_cycles}
// <= eps_log. Throws std::runtime_error when none exists up to max_distance.
int choose_distance(double eps_log, double n_patch_cycles,
                    const CodeParams& code, int max_distance = 99);

// Logical-cycle calibration anchors: total cycle counts pinned at specific
// (failure budget, layer count) points. Lookup picks the anchor tier whose
// budget is nearest in log space, then interpolates/extrapolates the total
// cycle count linearly in the layer count.
struct CycleAnchor {
  double budget = 0.0;
  double layers = 0.0;
  double cycles = 0.0;
};

std::vector<CycleAnchor> default_cycle_calibration();

double calibrated_cycles(const std::vector<CycleAnchor>& calibration,
                         double budget, double layers);

struct CircuitShape {
  int q_alg = 10;
  int layers = 50;
  int rotations_per_qubit_per_layer = 3;  // Euler decomposition
  // Logical cycles per layer; resolved from the calibration table when unset.
  std::optional<double> cycles_per_layer;
  // Logical patches exposed per cycle; defaults to the 6 d x d footprints
  // per algorithmic qubit of the data layout.
  std::optional<double> patches;

  double effective_patches() const { return patches.value_or(6.0 * q_alg); }
};

// Copy of `shape` with cycles_per_layer resolved against the calibration.
CircuitShape with_calibrated_cycles(CircuitShape shape, double budget,
                                    const std::vector<CycleAnchor>& calibration);

struct CircuitCount {
  double n_rotations = 0.0;
  int t_per_rotation = 0;  // ceil of the synthesis count at eps_angle
  double n_t = 0.0;
  double n_logical_cycles = 0.0;
  double n_patch_cycles = 0.0;  // N_L = patches * cycles
};

// Rotation, T-gate, and patch-cycle counts. The synthesis budget eps_syn is
// divided equally over the rotations (eps_angle = eps_syn / rotations).
// Requires shape.cycles_per_layer to be resolved.
CircuitCount count_circuit(const CircuitShape& shape, double eps_syn,
                           TScaling scaling = TScaling::kClassic);

struct DistillationEntry {
  std::string name;
  double output_t_error = 0.0;
  // Factory footprint; entries whose footprint tracks the data block use
  // 6 * q_alg * d^2 instead of this constant.
  double factory_qubits = 0.0;
  bool footprint_tracks_data = false;
  bool is_raw = false;  // undistilled injection
};

double factory_qubits(const DistillationEntry& entry, int distance, int q_alg);

// Entries sorted by descending output_t_error, i.e. ascending cost; the raw
// (no distillation) entry comes first.
struct DistillationCatalog {
  std::vector<DistillationEntry> entries;

  const DistillationEntry& raw_entry() const;
  void check_valid() const;
};

DistillationCatalog default_distillation_catalog(double p_phys = 1e-3);

// Cheapest entry with 1 - (1 - output_t_error)^{n_t} <= eps_dis. The raw
// entry is eligible like any other. Throws std::runtime_error when nothing
// qualifies.
DistillationEntry select_distillation(const DistillationCatalog& catalog,
                                      double n_t, double eps_dis);

// Distilled-T infidelity interval implied by a two-qubit physical error rate
// p2: [2/3 * p2, p2]. The upper bound is the default working estimate.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};
Interval t_error_bounds(double p_two_qubit);

struct ResourceEstimate {
  int code_distance = 0;
  double epsilon_l = 0.0;  // per patch per cycle at the chosen distance
  double epsilon_t = 0.0;  // selected distilled (or raw) T error
  std::string distillation_name;
  double data_qubits = 0.0;
  double factory_qubits = 0.0;
  double n_rotations = 0.0;
  int t_per_rotation = 0;
  double n_t_gates = 0.0;
  double n_logical_cycles = 0.0;
  double n_patch_cycles = 0.0;
  double cycle_time_us = 0.0;
  double runtime_ms = 0.0;
  double total_failure_probability = 0.0;
  BudgetSplit budget;
};

struct EstimateRequest {
  double eps_total = 1e-3;
  CircuitShape shape;
  CodeParams code;
  BudgetWeights weights;
  TScaling scaling = TScaling::kClassic;
  bool distill = true;
  std::optional<DistillationCatalog> catalog;  // default catalog when unset
  std::optional<std::vector<CycleAnchor>> calibration;
};

// Full pipeline: budget split, cycle calibration, distance search,
// distillation selection (or raw injection when distill is false), and the
// footprint/runtime assembly. Throws std::runtime_error when the budget is
// infeasible.
ResourceEstimate estimate(const EstimateRequest& request);

}  // namespace qecml
