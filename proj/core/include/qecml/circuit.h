#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qecml/noise.h"
#include "qecml/state.h"

namespace qecml {

enum class GateKind {
  kX,
  kY,
  kZ,
  kH,
  kS,
  kCx,    // q0 control, q1 target
  kCz,
  kSwap,
  kRx,
  kRy,
  kRz,
  kMeasureZ,  // marker; executors leave the state untouched
};

bool is_rotation(GateKind kind);
bool is_two_qubit(GateKind kind);

enum class Stage { kEncoding, kVariational, kExtraction };

enum class QubitRole { kData, kRotationAncilla, kSyndrome };

struct Op {
  GateKind kind = GateKind::kX;
  int q0 = 0;
  int q1 = -1;         // second qubit for two-qubit kinds
  double angle = 0.0;  // fixed rotation angle, used when param < 0
  int param = -1;      // parameter slot bound at execution time
  Stage stage = Stage::kVariational;
  bool noisy = false;  // eligible for gate-noise fault sites
};

// Flat gate list over a fixed register. Roles drive noise-site placement:
// syndrome qubits never receive faults, rotation-ancilla sites are scaled
// by f_anc.
struct CircuitIR {
  int n_qubits = 0;
  int n_params = 0;
  std::vector<Op> ops;
  std::vector<QubitRole> roles;  // size n_qubits; data by default

  void check_valid() const;

  Op& add(Op op);  // validates and appends, returns the stored op
};

double bound_angle(const Op& op, std::span<const double> params);

// Gate-noise fault sites: one site per qubit touched by each noisy op,
// firing right after that op. Two-qubit ops use rate * two_qubit_multiplier
// on both qubits. Zero-rate sites are omitted.
std::vector<InjectionSite> gate_noise_sites(const CircuitIR& circuit,
                                            const PauliInjectionSpec& spec);

// Environmental fault sites: every cadence_gates-th operation (measurement
// markers excluded from the count) triggers a sweep site on every data and
// rotation-ancilla qubit.
std::vector<InjectionSite> environmental_sites(const CircuitIR& circuit,
                                               const PauliInjectionSpec& spec);

// Dispatch on spec.model.
std::vector<InjectionSite> injection_sites(const CircuitIR& circuit,
                                           const PauliInjectionSpec& spec);

// Statevector execution. Injection events (sorted by position, as produced
// by sample_injections over a position-sorted site list) fire immediately
// after their op index.
void run_pure(const CircuitIR& circuit, std::span<const double> params, PureState& psi,
              std::span<const InjectionEvent> injections = {});

// Channel attachment for the density-matrix path.
struct DensityNoise {
  double p_1q = 0.0;  // depolarizing strength after noisy single-qubit ops
  double p_2q = 0.0;  // depolarizing component after noisy two-qubit ops
  std::optional<CrosstalkSpec> crosstalk;  // ZZ neighbour term for 2q ops
};

void run_density(const CircuitIR& circuit, std::span<const double> params,
                 DensityMatrix& rho, const DensityNoise& noise = {});

}  // namespace qecml
