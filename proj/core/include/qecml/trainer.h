#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qecml/noise.h"
#include "qecml/qvc.h"

namespace qecml::trainer {

// The ten default seeds used wherever a criterion asks for "10 simulations
// with different starting seeds".
inline constexpr std::array<uint64_t, 10> kDefaultSeeds{1, 2, 3, 4, 5,
                                                        6, 7, 8, 9, 10};

// ---------------------------------------------------------------------------
// Configurations.
// ---------------------------------------------------------------------------

// Parity task on the [[4,2,2]] logical classifier: 24 samples (the 4 parity
// rows duplicated), single shared rotation angle, squared loss against
// targets +/-1.
struct ParityTrainConfig {
  double learning_rate = 0.05;
  int batch_size = 8;
  int iterations = 100;
  int shots = 1000;  // 0 = exact expectations (noiseless runs only)
  NoiseModel noise_model = NoiseModel::kGate;
  double p = 0.0;      // physical Pauli injection rate
  double f_anc = 1.0;  // rotation-ancilla rate ratio
  int rounds = 0;      // syndrome-extraction rounds
  // Initial angle drawn uniformly from this interval (small-init convention,
  // away from the landscape's stationary maximum).
  double init_low = -0.5;
  double init_high = 0.5;

  void check_valid() const;
};

uint64_t config_hash(const ParityTrainConfig& config);

// Desk-scale multiclass classifier: amplitude-encoded synthetic data, one
// score per qubit (softmax cross-entropy), depolarizing noise after noisy
// gates on the density-matrix path.
struct QvcTrainConfig {
  QvcArchitecture arch;  // 4 qubits x 5 layers by default
  double learning_rate = 0.005;
  int batch_size = 50;
  int iterations = 25;
  int shots = 10000;  // 0 = exact expectations
  double p_depol = 0.0;
  int per_class = 50;
  uint64_t data_seed = 424242;

  void check_valid() const;
};

uint64_t config_hash(const QvcTrainConfig& config);

// ---------------------------------------------------------------------------
// Traces.
// ---------------------------------------------------------------------------

struct IterationRecord {
  double accuracy = 0.0;
  double loss = 0.0;
  double avg_sq_gradient = 0.0;  // mean over parameters of squared components
  double discard_rate = 0.0;     // post-selection discards this iteration
};

struct TrainingTrace {
  std::vector<IterationRecord> records;
  std::vector<double> final_params;
  uint64_t seed = 0;
  uint64_t config_hash = 0;

  // Mean accuracy over the last 40 recorded iterations (all of them when the
  // trace is shorter).
  double final_accuracy() const;
};

TrainingTrace train_parity(const ParityTrainConfig& config, uint64_t seed);
TrainingTrace train_qvc(const QvcTrainConfig& config, uint64_t seed);

// ---------------------------------------------------------------------------
// Gradients.
// ---------------------------------------------------------------------------

// Shift-rule gradient of an expectation value produced by Pauli-generated
// rotations: dE/dtheta_k = [E(theta_k + shift) - E(theta_k - shift)] / 2.
// Exact when `expectation` is such an expectation; trainers chain this
// through their losses analytically.
using ExpectationFn = std::function<double(std::span<const double>)>;
std::vector<double> parameter_shift_gradient(const ExpectationFn& expectation,
                                             std::span<const double> params,
                                             double shift = 1.5707963267948966);

// Mean squared loss-gradient component over the circuit parameters of a
// freshly initialised QVC, averaged over `probe_samples` dataset rows; the
// (seed, probe row, initial parameters) draws are identical across noise
// strengths so curves differ only through p_depol.
double average_squared_gradient(const QvcTrainConfig& config, uint64_t seed,
                                int probe_samples = 8);

// ---------------------------------------------------------------------------
// Sweeps.
// ---------------------------------------------------------------------------

struct SweepCell {
  NoiseModel model = NoiseModel::kGate;
  double p = 0.0;
  int rounds = 0;
  double f_anc = 1.0;
};

struct CellSummary {
  SweepCell cell;
  double mean_final_accuracy = 0.0;
  double std_final_accuracy = 0.0;
  std::vector<double> final_accuracies;  // one per seed, in seed order
};

struct SweepConfig {
  ParityTrainConfig base;  // p / rounds / f_anc / model overridden per cell
  NoiseModel model = NoiseModel::kGate;
  std::vector<double> p_grid;
  std::vector<int> rounds_grid;
  std::vector<double> f_anc_grid{1.0};
  std::vector<uint64_t> seeds{kDefaultSeeds.begin(), kDefaultSeeds.end()};
  bool keep_traces = false;

  void check_valid() const;
};

struct SweepSummary {
  std::vector<CellSummary> cells;  // grid order: p, then rounds, then f_anc
  std::vector<uint64_t> seeds;
  // Present when keep_traces was set; traces[cell][seed_index].
  std::vector<std::vector<TrainingTrace>> traces;
};

using SweepProgressFn = std::function<void(int done, int total)>;
SweepSummary sweep(const SweepConfig& config, int jobs = 1,
                   const SweepProgressFn& progress = {});

// Largest grid p (at the given f_anc) such that every grid point up to and
// including it keeps a plateau accuracy (mean final accuracy at the deepest
// rounds setting) of at least plateau_floor and evolves monotonically with
// rounds within z_slack standard errors. Throws when even the smallest grid
// p fails.
double extract_threshold(const SweepSummary& summary, double plateau_floor = 0.90,
                         double f_anc = 1.0, double z_slack = 2.0);

}  // namespace qecml::trainer
