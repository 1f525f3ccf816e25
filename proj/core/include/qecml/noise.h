#pragma once

#include <optional>
#include <vector>

#include "qecml/channel.h"
#include "qecml/rng.h"
#include "qecml/state.h"

namespace qecml {

// ---------------------------------------------------------------------------
// Error-rate bridges between the depolarizing picture, randomized-benchmarking
// gate error, and distilled-T infidelity.
// ---------------------------------------------------------------------------

// Average gate error of a single-qubit depolarizing channel, via the
// randomized-benchmarking decay p_rb = (1 + (1 - 4p/3)^2) / 2 and
// r = 1 - p_rb - (1 - p_rb)/2:
//   r = (1 - (1 - 4p/3)^2) / 4.
// Strictly increasing on p in [0, 0.75], with r(0.75) = 1/4.
double effective_gate_error(double p_depol);

// Inverse of effective_gate_error; requires r in [0, 0.25).
double depol_from_gate_error(double r);

enum class TScaling {
  kClassic,   // 1.5 * log2(1/eps) T gates per rotation
  kImproved,  // log2(1/eps) T gates per rotation
};

// Gate error of an eps-accurate synthesized rotation built from T gates of
// infidelity eps_t:  r = 1 - (1 - eps_t)^(scaling * log2(1/eps)).
// The exponent is used as a real number here; discrete T counts belong to the
// resource estimator.
double gate_error_from_t_error(double eps_t, double eps, TScaling scaling);

double t_count_per_rotation(double eps, TScaling scaling);  // real-valued

// ---------------------------------------------------------------------------
// Stochastic Pauli injection used by the trajectory simulators.
// ---------------------------------------------------------------------------

enum class NoiseModel { kGate, kEnvironmental };

struct PauliInjectionSpec {
  NoiseModel model = NoiseModel::kGate;
  double rate = 0.0;               // per-site Pauli probability p
  double two_qubit_multiplier = 2.0;  // rate scaling at two-qubit gate sites
  double f_anc = 1.0;              // extra scaling for ancilla-qubit sites
  int cadence_gates = 4;           // environmental model: gates per sweep

  void check_valid() const;
};

// One potential fault location: with probability `rate` a uniformly random
// X/Y/Z is applied to `qubit` at circuit position `position`.
struct InjectionSite {
  int position = 0;  // index into the owning circuit's operation list
  int qubit = 0;
  double rate = 0.0;
};

struct InjectionEvent {
  int position = 0;
  int qubit = 0;
  int pauli = 1;  // 1=X, 2=Y, 3=Z
};

// Sample the faults of one trajectory. Site order is fixed, so a (seed,
// shot) pair reproduces the same pattern on any thread.
std::vector<InjectionEvent> sample_injections(std::span<const InjectionSite> sites,
                                              Rng& rng);

// Apply sampled Pauli faults to a state right away (sites interpreted as
// immediate). Returns the events for logging.
std::vector<InjectionEvent> inject_pauli_noise(PureState& psi,
                                               std::span<const InjectionSite> sites,
                                               Rng& rng);

// ---------------------------------------------------------------------------
// Composite two-qubit gate noise in superoperator form.
// ---------------------------------------------------------------------------

struct CrosstalkSpec {
  double alpha = 0.01;  // ZZ angle in exp(-i alpha Z Z); |alpha| < pi/2
};

// Always-on ZZ coupling between two neighbouring qubits.
KrausChannel crosstalk_channel(const CrosstalkSpec& spec);

// Noise attached to a two-qubit gate on (q1, q2) inside an n-qubit row:
// depolarizing on q1 and q2 plus ZZ crosstalk to the outer neighbours
// (q1-1, q1) and (q2, q2+1). Terms whose neighbour falls off the row edge
// are dropped. The component superoperators are composed through their
// matrix logarithms, exp(sum_i log E_i), on the minimal qubit support.
// Returns the superoperator together with the ordered support qubits.
struct ComposedGateNoise {
  SuperOperatorMatrix superop;
  std::vector<int> support;  // ascending qubit labels
};

ComposedGateNoise two_qubit_gate_noise(double p_depol, const CrosstalkSpec& crosstalk,
                                       int q1, int q2, int n_qubits);

}  // namespace qecml
