#include "qecml/qed422.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "qecml/gates.h"

namespace qecml::qed422 {

namespace {

void check_logical_bits(int b1, int b2) {
  if (b1 < 0 || b1 > 1 || b2 < 0 || b2 > 1)
    throw std::invalid_argument("logical bits must be 0 or 1");
}

// X-support masks of the logical X operators, as 4-bit string indices.
constexpr uint64_t kX1Mask = 0b0101;  // X(q1) X(q3)
constexpr uint64_t kX2Mask = 0b0011;  // X(q2) X(q3)

void apply_gate(PureState& psi, GateKind kind, int q0, int q1, double angle) {
  switch (kind) {
    case GateKind::kX: psi.apply_x(q0); break;
    case GateKind::kY: psi.apply_y(q0); break;
    case GateKind::kZ: psi.apply_z(q0); break;
    case GateKind::kH: psi.apply_h(q0); break;
    case GateKind::kS: psi.apply_1q(gates::s(), q0); break;
    case GateKind::kCx: psi.apply_cnot(q0, q1); break;
    case GateKind::kCz: psi.apply_cz(q0, q1); break;
    case GateKind::kSwap: psi.apply_swap(q0, q1); break;
    case GateKind::kRx: psi.apply_1q(gates::rx(angle), q0); break;
    case GateKind::kRy: psi.apply_1q(gates::ry(angle), q0); break;
    case GateKind::kRz: psi.apply_1q(gates::rz(angle), q0); break;
    case GateKind::kMeasureZ: break;
  }
}

// Qubit-indexed X mask on q0..q3 -> 4-bit string index (q0 is the MSB).
uint32_t quartet_mask_to_index(uint32_t xmask) {
  uint32_t index = 0;
  for (int q = 0; q < 4; ++q)
    if ((xmask >> q) & 1u) index |= 1u << (3 - q);
  return index;
}

constexpr std::array<int, 4> kQuartet{0, 1, 2, 3};

}  // namespace

PureState codeword(int b1, int b2) {
  check_logical_bits(b1, b2);
  const uint64_t mask = (b1 ? kX1Mask : 0u) ^ (b2 ? kX2Mask : 0u);
  PureState psi(4);
  psi[0] = 0.0;
  const double amp = 1.0 / std::sqrt(2.0);
  psi[mask] = amp;
  psi[0xFull ^ mask] = amp;
  return psi;
}

int logical_bits_of_string(uint64_t string4) {
  if (string4 > 15) throw std::invalid_argument("expected a 4-bit string");
  if (std::popcount(string4) % 2 != 0) return -1;
  const int s0 = static_cast<int>(string4 >> 3) & 1;
  const int s1 = static_cast<int>(string4 >> 2) & 1;
  const int s2 = static_cast<int>(string4 >> 1) & 1;
  return ((s0 ^ s1) << 1) | (s0 ^ s2);
}

PureState encode_logical(int b1, int b2) {
  check_logical_bits(b1, b2);
  PureState psi(4);
  psi.apply_h(0);
  psi.apply_cnot(0, 1);
  psi.apply_cnot(0, 2);
  psi.apply_cnot(0, 3);
  if (b1) {
    psi.apply_x(1);
    psi.apply_x(3);
  }
  if (b2) {
    psi.apply_x(2);
    psi.apply_x(3);
  }
  return psi;
}

LogicalParityCircuit build_logical_parity_circuit(int b1, int b2, int rounds) {
  check_logical_bits(b1, b2);
  // 32-bit Pauli-frame masks cap the register at 32 qubits (10 + 2 per round).
  if (rounds < 0 || rounds > 11)
    throw std::invalid_argument("rounds must be in [0, 11]");

  LogicalParityCircuit c;
  c.b1 = b1;
  c.b2 = b2;
  c.reg.rotation_ancillas = {4, 5, 6, 7, 8, 9};
  for (int r = 0; r < rounds; ++r) {
    c.reg.syndrome_qubits.push_back(10 + 2 * r);
    c.reg.syndrome_qubits.push_back(11 + 2 * r);
  }
  c.reg.round_count = rounds;

  CircuitIR& ir = c.ir;
  ir.n_qubits = 10 + 2 * rounds;
  ir.n_params = 1;
  ir.roles.assign(ir.n_qubits, QubitRole::kData);
  for (int a = 4; a <= 9; ++a) ir.roles[a] = QubitRole::kRotationAncilla;
  for (int s = 10; s < ir.n_qubits; ++s) ir.roles[s] = QubitRole::kSyndrome;

  auto push = [&ir](GateKind kind, int q0, int q1, Stage stage, bool noisy) {
    Op op;
    op.kind = kind;
    op.q0 = q0;
    op.q1 = q1;
    op.stage = stage;
    op.noisy = noisy;
    return static_cast<int>(&ir.add(op) - ir.ops.data());
  };
  auto enc = [&](GateKind kind, int q0, int q1 = -1) {
    push(kind, q0, q1, Stage::kEncoding, true);
  };
  auto var = [&](GateKind kind, int q0, int q1 = -1) {
    push(kind, q0, q1, Stage::kVariational, true);
  };
  auto rot = [&](GateKind kind, int q) {
    Op op;
    op.kind = kind;
    op.q0 = q;
    op.param = 0;
    op.stage = Stage::kVariational;
    op.noisy = true;
    const int position = static_cast<int>(ir.ops.size());
    ir.add(op);
    return position;
  };
  // Writes the logical bits held by the pair (a_even, a_odd) onto the
  // quartet's logical X operators; applied twice it teleports the logical
  // state onto the pair and back.
  auto teleport = [&](int a_even, int a_odd) {
    var(GateKind::kCx, a_even, 1);
    var(GateKind::kCx, a_even, 3);
    var(GateKind::kCx, a_odd, 2);
    var(GateKind::kCx, a_odd, 3);
  };

  // Codeword preparation.
  enc(GateKind::kH, 0);
  enc(GateKind::kCx, 0, 1);
  enc(GateKind::kCx, 0, 2);
  enc(GateKind::kCx, 0, 3);
  if (b1) {
    enc(GateKind::kX, 1);
    enc(GateKind::kX, 3);
  }
  if (b2) {
    enc(GateKind::kX, 2);
    enc(GateKind::kX, 3);
  }

  // rx stage on the fresh pair (4, 5), prepared to match the input bits.
  if (b1) var(GateKind::kX, 4);
  if (b2) var(GateKind::kX, 5);
  teleport(4, 5);
  c.rotation_positions[0] = rot(GateKind::kRx, 4);
  c.rotation_positions[1] = rot(GateKind::kRx, 5);
  teleport(4, 5);
  c.ledger.push_back({{4, 5}, GateKind::kRx, {-1, -1}, {}, {}});

  // rz stage on the pair (6, 7): diagonal, so copying the logical bits out
  // and rotating the copies is enough.
  var(GateKind::kCx, 4, 6);
  var(GateKind::kCx, 5, 7);
  c.rotation_positions[2] = rot(GateKind::kRz, 6);
  c.rotation_positions[3] = rot(GateKind::kRz, 7);
  c.ledger.push_back({{6, 7}, GateKind::kRz, {4, 5}, {}, {}});

  // Logical CNOT (control = logical 1): SWAP(q0, q1) plus the per-pair
  // fixups keeping every ancilla pair aligned with the logical bits.
  var(GateKind::kSwap, 0, 1);
  var(GateKind::kCx, 4, 5);
  var(GateKind::kCx, 6, 7);

  // ry stage on the pair (8, 9): copy from (6, 7), clear the older pairs,
  // teleport, rotate, re-encode, re-match.
  var(GateKind::kCx, 6, 8);
  var(GateKind::kCx, 7, 9);
  auto clear_match = [&] {
    var(GateKind::kCx, 8, 4);
    var(GateKind::kCx, 8, 6);
    var(GateKind::kCx, 9, 5);
    var(GateKind::kCx, 9, 7);
  };
  clear_match();
  teleport(8, 9);
  c.rotation_positions[4] = rot(GateKind::kRy, 8);
  c.rotation_positions[5] = rot(GateKind::kRy, 9);
  teleport(8, 9);
  clear_match();
  c.ledger.push_back({{8, 9}, GateKind::kRy, {6, 7}, {4, 6}, {5, 7}});

  // sigma_z on logical qubit 1.
  var(GateKind::kZ, 0);
  var(GateKind::kZ, 1);

  c.first_extraction_op = static_cast<int>(ir.ops.size());

  // Extraction ops are noisy too; syndrome-qubit sites drop out via the
  // role-based rate, leaving faults only on the physical side of each CX.
  auto ext = [&](GateKind kind, int q0, int q1 = -1) {
    return push(kind, q0, q1, Stage::kExtraction, true);
  };
  for (int r = 0; r < rounds; ++r) {
    const int sx = 10 + 2 * r;
    const int sz = 11 + 2 * r;
    ext(GateKind::kH, sx);
    for (int q = 0; q < 4; ++q) ext(GateKind::kCx, sx, q);
    ext(GateKind::kH, sx);
    const int x_measure = ext(GateKind::kMeasureZ, sx);
    for (int q = 0; q < 4; ++q) ext(GateKind::kCx, q, sz);
    const int z_measure = ext(GateKind::kMeasureZ, sz);
    c.round_measure_positions.push_back({x_measure, z_measure});
  }
  for (int q = 0; q < 4; ++q) ext(GateKind::kMeasureZ, q);

  ir.check_valid();
  return c;
}

SyndromeFlags syndrome_round(PureState& state, Rng& rng) {
  if (state.n_qubits() < 4)
    throw std::invalid_argument("syndrome_round needs the 4-qubit quartet");
  SyndromeFlags flags;

  int anc = state.append_qubit();
  state.apply_h(anc);
  for (int q = 0; q < 4; ++q) state.apply_cnot(anc, q);
  state.apply_h(anc);
  flags.x_stabilizer = state.measure_remove_last(rng);

  anc = state.append_qubit();
  for (int q = 0; q < 4; ++q) state.apply_cnot(q, anc);
  flags.z_stabilizer = state.measure_remove_last(rng);
  return flags;
}

SyndromeProbabilities syndrome_flag_probabilities(const PureState& state) {
  if (state.n_qubits() < 4)
    throw std::invalid_argument("syndrome_flag_probabilities needs the quartet");
  SyndromeProbabilities probs;
  {
    PureState psi = state;
    const int anc = psi.append_qubit();
    psi.apply_h(anc);
    for (int q = 0; q < 4; ++q) psi.apply_cnot(anc, q);
    psi.apply_h(anc);
    probs.x_stabilizer = psi.prob_last_one();
  }
  {
    PureState psi = state;
    const int anc = psi.append_qubit();
    for (int q = 0; q < 4; ++q) psi.apply_cnot(q, anc);
    probs.z_stabilizer = psi.prob_last_one();
  }
  return probs;
}

LogicalMeasurement logical_measure_z1_exact(const PureState& state) {
  if (state.n_qubits() < 4)
    throw std::invalid_argument("logical measurement needs the quartet");
  const auto probs = state.marginal_probabilities(kQuartet);
  LogicalMeasurement m;
  double discard_mass = 0.0;
  for (int s = 0; s < 16; ++s) {
    const int bits = logical_bits_of_string(static_cast<uint64_t>(s));
    if (bits < 0)
      discard_mass += probs[s];
    else
      m.distribution[bits] += probs[s];
  }
  const double kept_mass = 1.0 - discard_mass;
  if (kept_mass <= 1e-12)
    throw std::runtime_error("every quartet outcome has odd weight");
  for (auto& p : m.distribution) p /= kept_mass;
  m.z1_expectation =
      m.distribution[0] + m.distribution[1] - m.distribution[2] - m.distribution[3];
  m.discard_rate = discard_mass;
  m.kept = -1;
  return m;
}

LogicalMeasurement logical_measure_z1(const PureState& state, int shots, Rng& rng) {
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  if (state.n_qubits() < 4)
    throw std::invalid_argument("logical measurement needs the quartet");
  const int n = state.n_qubits();
  std::array<long, 4> counts{};
  long discarded = 0;
  for (int t = 0; t < shots; ++t) {
    const uint64_t full = state.sample_bitstring(rng);
    const uint64_t quartet = (full >> (n - 4)) & 0xFull;
    const int bits = logical_bits_of_string(quartet);
    if (bits < 0)
      ++discarded;
    else
      ++counts[bits];
  }
  const long kept = shots - discarded;
  if (kept == 0) throw std::runtime_error("every sampled shot was discarded");
  LogicalMeasurement m;
  for (int b = 0; b < 4; ++b)
    m.distribution[b] = static_cast<double>(counts[b]) / static_cast<double>(kept);
  m.z1_expectation =
      m.distribution[0] + m.distribution[1] - m.distribution[2] - m.distribution[3];
  m.discard_rate = static_cast<double>(discarded) / static_cast<double>(shots);
  m.kept = kept;
  return m;
}

// ---------------------------------------------------------------------------
// Trajectory evaluator.
// ---------------------------------------------------------------------------

LogicalParityEvaluator::LogicalParityEvaluator(double theta, int rounds,
                                               const PauliInjectionSpec& spec)
    : theta_(theta), rounds_(rounds), spec_(spec) {
  if (!std::isfinite(theta)) throw std::invalid_argument("theta must be finite");
  if (rounds < 0) throw std::invalid_argument("rounds must be >= 0");
  spec.check_valid();
}

LogicalParityEvaluator::InputContext& LogicalParityEvaluator::context(int b1, int b2) {
  check_logical_bits(b1, b2);
  auto& slot = inputs_[(b1 << 1) | b2];
  if (!slot) {
    InputContext input;
    input.circuit = build_logical_parity_circuit(b1, b2, rounds_);
    input.sites = injection_sites(input.circuit.ir, spec_);
    for (size_t s = 0; s < input.sites.size(); ++s) {
      const double rate = input.sites[s].rate;
      auto it = std::find_if(input.groups.begin(), input.groups.end(),
                             [rate](const RateGroup& g) { return g.rate == rate; });
      if (it == input.groups.end()) {
        input.groups.push_back({rate, {}});
        it = std::prev(input.groups.end());
      }
      it->sites.push_back(static_cast<int>(s));
    }
    std::sort(input.groups.begin(), input.groups.end(),
              [](const RateGroup& a, const RateGroup& b) { return a.rate < b.rate; });
    const size_t n_ops = input.circuit.ir.ops.size();
    input.rot_of_op.assign(n_ops, -1);
    for (int k = 0; k < 6; ++k)
      input.rot_of_op[input.circuit.rotation_positions[k]] = static_cast<int8_t>(k);
    input.meas_slot.assign(n_ops, -1);
    for (int r = 0; r < rounds_; ++r) {
      input.meas_slot[input.circuit.round_measure_positions[r][0]] =
          static_cast<int16_t>(r << 1);
      input.meas_slot[input.circuit.round_measure_positions[r][1]] =
          static_cast<int16_t>((r << 1) | 1);
    }
    slot = std::move(input);
  }
  return *slot;
}

const LogicalParityCircuit& LogicalParityEvaluator::circuit(int b1, int b2) {
  return context(b1, b2).circuit;
}

const LogicalParityEvaluator::CacheEntry& LogicalParityEvaluator::cached(
    InputContext& input, uint32_t sigma_mask) {
  auto& slot = input.cache[sigma_mask & 63u];
  if (!slot) {
    PureState psi(10);
    const auto& ops = input.circuit.ir.ops;
    for (int i = 0; i < input.circuit.first_extraction_op; ++i) {
      const Op& op = ops[i];
      double angle = 0.0;
      if (is_rotation(op.kind)) {
        const int k = input.rot_of_op[i];
        angle = ((sigma_mask >> k) & 1u) ? -theta_ : theta_;
      }
      apply_gate(psi, op.kind, op.q0, op.q1, angle);
    }
    CacheEntry entry;
    const auto probs = psi.marginal_probabilities(kQuartet);
    double total = 0.0;
    for (int s = 0; s < 16; ++s) {
      entry.marginal[s] = std::max(probs[s], 0.0);
      total += entry.marginal[s];
      entry.cdf[s] = total;
    }
    slot = entry;
  }
  return *slot;
}

void LogicalParityEvaluator::sample_events(const InputContext& input, Rng& rng,
                                           std::vector<InjectionEvent>& out) const {
  out.clear();
  int picked[8];
  for (const auto& group : input.groups) {
    const uint64_t n = group.sites.size();
    uint64_t k = rng.binomial(n, group.rate);
    while (k > 0) {
      // Distinct uniform picks; a batch of at most 8 keeps rejection cheap
      // even in the (astronomically rare) high-k tail.
      const int batch = static_cast<int>(std::min<uint64_t>(k, 8));
      int got = 0;
      while (got < batch) {
        const int candidate = static_cast<int>(rng.uniform_below(n));
        bool dup = false;
        for (int i = 0; i < got; ++i) dup = dup || picked[i] == candidate;
        for (const auto& ev : out) {
          const InjectionSite& site = input.sites[group.sites[candidate]];
          dup = dup || (ev.position == site.position && ev.qubit == site.qubit);
        }
        if (!dup) picked[got++] = candidate;
      }
      for (int i = 0; i < batch; ++i) {
        const InjectionSite& site = input.sites[group.sites[picked[i]]];
        out.push_back({site.position, site.qubit,
                       static_cast<int>(rng.uniform_below(3)) + 1});
      }
      k -= batch;
    }
  }
  std::sort(out.begin(), out.end(), [](const InjectionEvent& a, const InjectionEvent& b) {
    return a.position != b.position ? a.position < b.position : a.qubit < b.qubit;
  });
}

LogicalParityEvaluator::FrameResult LogicalParityEvaluator::propagate(
    const InputContext& input, std::span<const InjectionEvent> events,
    bool collect_flags) const {
  FrameResult result;
  if (collect_flags) result.flags.assign(rounds_, SyndromeFlags{});
  const auto& ops = input.circuit.ir.ops;
  const int n_ops = static_cast<int>(ops.size());
  uint32_t fx = 0;
  uint32_t fz = 0;
  size_t e = 0;
  // The frame is the identity until the first fault fires, so start there.
  const int start = events.empty() ? n_ops : events.front().position;
  for (int i = start; i < n_ops; ++i) {
    const Op& op = ops[i];
    const uint32_t b0 = 1u << op.q0;
    switch (op.kind) {
      case GateKind::kX:
      case GateKind::kY:
      case GateKind::kZ:
        break;  // Pauli frames commute with Paulis up to phase
      case GateKind::kH: {
        const bool hx = fx & b0;
        const bool hz = fz & b0;
        if (hx != hz) {
          fx ^= b0;
          fz ^= b0;
        }
        break;
      }
      case GateKind::kS:
        if (fx & b0) fz ^= b0;
        break;
      case GateKind::kCx: {
        const uint32_t bt = 1u << op.q1;
        if (fx & b0) fx ^= bt;
        if (fz & bt) fz ^= b0;
        break;
      }
      case GateKind::kCz: {
        const uint32_t b1 = 1u << op.q1;
        if (fx & b0) fz ^= b1;
        if (fx & b1) fz ^= b0;
        break;
      }
      case GateKind::kSwap: {
        const uint32_t b1 = 1u << op.q1;
        const uint32_t both = b0 | b1;
        const uint32_t mx = fx & both;
        if (mx != 0 && mx != both) fx ^= both;
        const uint32_t mz = fz & both;
        if (mz != 0 && mz != both) fz ^= both;
        break;
      }
      case GateKind::kRx:
      case GateKind::kRy:
      case GateKind::kRz: {
        const bool bx = fx & b0;
        const bool bz = fz & b0;
        const bool flip = op.kind == GateKind::kRx   ? bz
                          : op.kind == GateKind::kRz ? bx
                                                     : bx != bz;
        if (flip) result.sigma_mask ^= 1u << input.rot_of_op[i];
        break;
      }
      case GateKind::kMeasureZ: {
        if (input.circuit.ir.roles[op.q0] == QubitRole::kSyndrome) {
          const bool flag = fx & b0;
          fx &= ~b0;
          fz &= ~b0;
          if (flag) {
            result.flagged = true;
            if (!collect_flags) return result;
            const int slot = input.meas_slot[i];
            if (slot & 1)
              result.flags[slot >> 1].z_stabilizer = true;
            else
              result.flags[slot >> 1].x_stabilizer = true;
          }
        }
        break;
      }
    }
    while (e < events.size() && events[e].position == i) {
      const uint32_t bit = 1u << events[e].qubit;
      if (events[e].pauli != 3) fx ^= bit;  // X or Y component
      if (events[e].pauli != 1) fz ^= bit;  // Z or Y component
      ++e;
    }
  }
  result.quartet_xmask = fx & 0xFu;
  return result;
}

EvalResult LogicalParityEvaluator::evaluate(int b1, int b2, int shots, Rng& rng) {
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  InputContext& input = context(b1, b2);
  std::array<long, 4> counts{};
  long discarded = 0;
  std::vector<InjectionEvent> events;
  for (int t = 0; t < shots; ++t) {
    sample_events(input, rng, events);
    FrameResult frame;
    if (!events.empty()) frame = propagate(input, events, false);
    if (frame.flagged) {
      ++discarded;
      continue;
    }
    const CacheEntry& entry = cached(input, frame.sigma_mask);
    const uint64_t sampled = rng.categorical_from_cdf(entry.cdf);
    const uint64_t string4 = sampled ^ quartet_mask_to_index(frame.quartet_xmask);
    const int bits = logical_bits_of_string(string4);
    if (bits < 0)
      ++discarded;
    else
      ++counts[bits];
  }
  EvalResult result;
  result.kept = shots - discarded;
  result.discarded = discarded;
  result.discard_rate = static_cast<double>(discarded) / static_cast<double>(shots);
  if (result.kept == 0)
    throw std::runtime_error("every trajectory was discarded; nothing to average");
  for (int b = 0; b < 4; ++b)
    result.distribution[b] =
        static_cast<double>(counts[b]) / static_cast<double>(result.kept);
  result.z1_expectation = result.distribution[0] + result.distribution[1] -
                          result.distribution[2] - result.distribution[3];
  return result;
}

EvalResult LogicalParityEvaluator::evaluate_exact(int b1, int b2) {
  InputContext& input = context(b1, b2);
  const CacheEntry& entry = cached(input, 0);
  EvalResult result;
  double discard_mass = 0.0;
  for (int s = 0; s < 16; ++s) {
    const int bits = logical_bits_of_string(static_cast<uint64_t>(s));
    if (bits < 0)
      discard_mass += entry.marginal[s];
    else
      result.distribution[bits] += entry.marginal[s];
  }
  const double kept_mass = 1.0 - discard_mass;
  if (kept_mass <= 1e-12)
    throw std::runtime_error("noiseless quartet marginal has no even support");
  for (auto& p : result.distribution) p /= kept_mass;
  result.z1_expectation = result.distribution[0] + result.distribution[1] -
                          result.distribution[2] - result.distribution[3];
  result.kept = -1;
  return result;
}

ShotOutcome LogicalParityEvaluator::run_shot(int b1, int b2, Rng& rng) {
  InputContext& input = context(b1, b2);
  ShotOutcome out;
  sample_events(input, rng, out.injections);
  const FrameResult frame = propagate(input, out.injections, true);
  out.flags = frame.flags;
  if (frame.flagged) {
    out.discarded = true;
    return out;
  }
  const CacheEntry& entry = cached(input, frame.sigma_mask);
  const uint64_t sampled = rng.categorical_from_cdf(entry.cdf);
  const uint64_t string4 = sampled ^ quartet_mask_to_index(frame.quartet_xmask);
  const int bits = logical_bits_of_string(string4);
  if (bits < 0) {
    out.discarded = true;
    return out;
  }
  out.logical_state = bits;
  return out;
}

ShotOutcome run_shot(double theta, int b1, int b2, int rounds,
                     const PauliInjectionSpec& spec, Rng& rng) {
  LogicalParityEvaluator evaluator(theta, rounds, spec);
  return evaluator.run_shot(b1, b2, rng);
}

DenseShotResult dense_reference(const LogicalParityCircuit& circuit, double theta,
                                std::span<const InjectionEvent> events) {
  DenseShotResult out;
  PureState psi(10);
  const std::array<double, 1> params{theta};
  int live_syndrome = -1;  // IR id of the currently appended transient qubit
  size_t e = 0;
  const auto& ops = circuit.ir.ops;
  auto map_qubit = [&](int q) {
    if (q < 10) return q;
    if (live_syndrome == -1) {
      psi.append_qubit();
      live_syndrome = q;
    }
    if (q != live_syndrome)
      throw std::logic_error("two syndrome qubits live at once");
    return 10;
  };
  for (int i = 0; i < static_cast<int>(ops.size()); ++i) {
    const Op& op = ops[i];
    if (op.kind == GateKind::kMeasureZ) {
      if (op.q0 >= 10) {
        if (op.q0 != live_syndrome)
          throw std::logic_error("measured a syndrome qubit that was never touched");
        const double p1 = psi.prob_last_one();
        if (p1 > 1e-9 && p1 < 1.0 - 1e-9)
          throw std::logic_error("stabilizer outcome is not deterministic");
        const bool outcome = p1 > 0.5;
        psi.project_remove_last(outcome);
        live_syndrome = -1;
        // The X measurement opens a round; the Z measurement closes it.
        if (out.flags.size() < circuit.round_measure_positions.size() &&
            i == circuit.round_measure_positions[out.flags.size()][0]) {
          SyndromeFlags flags;
          flags.x_stabilizer = outcome;
          out.flags.push_back(flags);
        } else {
          out.flags.back().z_stabilizer = outcome;
        }
      }
      continue;
    }
    const int q0 = map_qubit(op.q0);
    const int q1 = op.q1 >= 0 ? map_qubit(op.q1) : -1;
    apply_gate(psi, op.kind, q0, q1, bound_angle(op, params));
    while (e < events.size() && events[e].position == i) {
      const auto& ev = events[e];
      if (ev.qubit >= 10) throw std::logic_error("fault on a syndrome qubit");
      if (ev.pauli == 1)
        psi.apply_x(ev.qubit);
      else if (ev.pauli == 2)
        psi.apply_y(ev.qubit);
      else
        psi.apply_z(ev.qubit);
      ++e;
    }
  }
  for (const auto& flags : out.flags)
    if (flags.any()) out.discarded = true;
  if (!out.discarded) out.measurement = logical_measure_z1_exact(psi);
  return out;
}

}  // namespace qecml::qed422
