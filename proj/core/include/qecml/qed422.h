#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "qecml/circuit.h"

namespace qecml::qed422 {

// ---------------------------------------------------------------------------
// [[4,2,2]] error-detecting code: 2 logical qubits in physical qubits q0..q3,
// stabilized by XXXX and ZZZZ. Logical bits of an even-weight physical string
// s0 s1 s2 s3 are b1 = s0 xor s1 and b2 = s0 xor s2; logical operators are
// X1 = X(q1) X(q3), X2 = X(q2) X(q3), Z1 = Z(q0) Z(q1).
// ---------------------------------------------------------------------------

// Codeword (|b1 b2>_L) as a 4-qubit state: the even-weight pair
// {mask, ~mask} with mask = b1 * 0101 xor b2 * 0011.
PureState codeword(int b1, int b2);

// Logical index (b1 << 1) | b2 for an even-weight 4-bit string; -1 for odd
// weight (detected error).
int logical_bits_of_string(uint64_t string4);

struct LogicalRegister422 {
  std::array<int, 4> physical{0, 1, 2, 3};
  std::vector<int> rotation_ancillas;
  std::vector<int> syndrome_qubits;
  int round_count = 0;

  int total_qubits() const {
    return 4 + static_cast<int>(rotation_ancillas.size() + syndrome_qubits.size());
  }
};

// One rotation stage: which ancilla pair was invoked, where its logical bits
// came from, and which older ancillas its clear/re-match CNOTs touched.
struct RotationStageRecord {
  std::array<int, 2> ancillas{};
  GateKind axis = GateKind::kRx;
  std::array<int, 2> copied_from{-1, -1};  // source pair; -1 = fresh prep
  std::vector<int> cleared_even;  // older ancillas paired with ancillas[0]
  std::vector<int> cleared_odd;   // older ancillas paired with ancillas[1]
};

struct LogicalParityCircuit {
  CircuitIR ir;
  LogicalRegister422 reg;
  int b1 = 0;
  int b2 = 0;
  int first_extraction_op = 0;  // ops before this touch only qubits 0..9
  std::array<int, 6> rotation_positions{};  // op indices of the 6 rotations
  // Per round: op indices of the X- and Z-stabilizer measurements.
  std::vector<std::array<int, 2>> round_measure_positions;
  std::vector<RotationStageRecord> ledger;
};

// Full logically-encoded parity classifier: codeword encoding, the
// ancilla-mediated rx/rz/cnot/ry sequence bound to the shared parameter 0,
// sigma_z on logical qubit 1, then `rounds` syndrome extractions and the
// physical-quartet measurement markers.
LogicalParityCircuit build_logical_parity_circuit(int b1, int b2, int rounds);

// Encoding by circuit (H + CNOT fan-out + logical X gates); equals
// codeword(b1, b2) exactly.
PureState encode_logical(int b1, int b2);

struct SyndromeFlags {
  bool x_stabilizer = false;  // -1 outcome of XXXX
  bool z_stabilizer = false;  // -1 outcome of ZZZZ
  bool any() const { return x_stabilizer || z_stabilizer; }
};

// Measure both stabilizers on qubits 0..3 of `state` through two transient
// ancillas. Collapses the state on each outcome.
SyndromeFlags syndrome_round(PureState& state, Rng& rng);

// Exact flag probabilities without collapsing (copies internally).
struct SyndromeProbabilities {
  double x_stabilizer = 0.0;
  double z_stabilizer = 0.0;
};
SyndromeProbabilities syndrome_flag_probabilities(const PureState& state);

struct LogicalMeasurement {
  double z1_expectation = 0.0;
  std::array<double, 4> distribution{};  // P(00), P(01), P(10), P(11)
  double discard_rate = 0.0;             // odd-weight fraction
  long kept = 0;                         // surviving shots (exact mode: -1)
};

// Quartet-marginal readout: even-weight strings bin to logical states, odd
// weight is discarded and the distribution renormalized. Throws
// std::runtime_error when nothing survives.
LogicalMeasurement logical_measure_z1_exact(const PureState& state);
LogicalMeasurement logical_measure_z1(const PureState& state, int shots, Rng& rng);

struct ShotOutcome {
  bool discarded = false;
  int logical_state = -1;  // 0..3 when kept
  std::vector<SyndromeFlags> flags;
  std::vector<InjectionEvent> injections;
};

struct EvalResult {
  double z1_expectation = 0.0;
  std::array<double, 4> distribution{};
  long kept = 0;
  long discarded = 0;
  double discard_rate = 0.0;
};

// Monte-Carlo trajectory evaluator for one theta. Noise trajectories run as
// symbolic Pauli frames over the Clifford skeleton: each injected Pauli is
// pushed to the end of the circuit, flipping the sign of any rotation it
// anticommutes with on the way, so a trajectory reduces to (sign pattern,
// syndrome flags, X mask) plus one cached noiseless simulation per sign
// pattern and input.
class LogicalParityEvaluator {
 public:
  LogicalParityEvaluator(double theta, int rounds, const PauliInjectionSpec& spec);

  // Sampled evaluation; shots >= 1. Throws std::runtime_error when every
  // shot is discarded.
  EvalResult evaluate(int b1, int b2, int shots, Rng& rng);
  // Noiseless exact evaluation of the same circuit.
  EvalResult evaluate_exact(int b1, int b2);
  // Single logged trajectory (test and debug surface).
  ShotOutcome run_shot(int b1, int b2, Rng& rng);

  const LogicalParityCircuit& circuit(int b1, int b2);

 private:
  struct CacheEntry {
    std::array<double, 16> marginal{};
    std::array<double, 16> cdf{};
  };
  struct RateGroup {
    double rate = 0.0;
    std::vector<int> sites;  // indices into InputContext::sites
  };
  struct InputContext {
    LogicalParityCircuit circuit;
    std::vector<InjectionSite> sites;
    std::vector<RateGroup> groups;    // sites bucketed by exact rate
    std::vector<int8_t> rot_of_op;    // op index -> rotation slot, -1 otherwise
    std::vector<int16_t> meas_slot;   // op index -> (round << 1) | stabilizer
    std::array<std::optional<CacheEntry>, 64> cache;
  };
  struct FrameResult {
    uint32_t sigma_mask = 0;   // bit k set = rotation k runs at -theta
    uint32_t quartet_xmask = 0;  // X components on q0..q3 at measurement
    bool flagged = false;
    std::vector<SyndromeFlags> flags;
  };

  InputContext& context(int b1, int b2);
  const CacheEntry& cached(InputContext& input, uint32_t sigma_mask);
  FrameResult propagate(const InputContext& input,
                        std::span<const InjectionEvent> events,
                        bool collect_flags) const;
  // Equivalent in distribution to sample_injections over the site list, but
  // draws one binomial per rate bucket instead of one Bernoulli per site.
  void sample_events(const InputContext& input, Rng& rng,
                     std::vector<InjectionEvent>& out) const;

  double theta_;
  int rounds_;
  PauliInjectionSpec spec_;
  std::array<std::optional<InputContext>, 4> inputs_;
};

// Convenience wrapper building a throwaway evaluator.
ShotOutcome run_shot(double theta, int b1, int b2, int rounds,
                     const PauliInjectionSpec& spec, Rng& rng);

// Dense statevector reference for one fixed injection pattern: executes the
// IR literally (syndrome qubits appended transiently), asserts that every
// stabilizer outcome is deterministic, and returns exact statistics.
struct DenseShotResult {
  bool discarded = false;
  std::vector<SyndromeFlags> flags;
  LogicalMeasurement measurement;  // valid when not discarded
};
DenseShotResult dense_reference(const LogicalParityCircuit& circuit, double theta,
                                std::span<const InjectionEvent> events);

}  // namespace qecml::qed422
