#include "qecml/circuit.h"

#include <algorithm>
#include <array>
#include <map>
#include <stdexcept>
#include <utility>

#include "qecml/channel.h"
#include "qecml/gates.h"

namespace qecml {

bool is_rotation(GateKind kind) {
  return kind == GateKind::kRx || kind == GateKind::kRy || kind == GateKind::kRz;
}

bool is_two_qubit(GateKind kind) {
  return kind == GateKind::kCx || kind == GateKind::kCz || kind == GateKind::kSwap;
}

namespace {

void check_op(const Op& op, int n_qubits, int n_params) {
  if (op.q0 < 0 || op.q0 >= n_qubits) {
    throw std::invalid_argument("CircuitIR: op qubit out of range");
  }
  if (is_two_qubit(op.kind)) {
    if (op.q1 < 0 || op.q1 >= n_qubits || op.q1 == op.q0) {
      throw std::invalid_argument("CircuitIR: invalid two-qubit pair");
    }
  } else if (op.q1 != -1) {
    throw std::invalid_argument("CircuitIR: single-qubit op with a second qubit");
  }
  if (op.param >= 0 && !is_rotation(op.kind)) {
    throw std::invalid_argument("CircuitIR: parameter bound to a non-rotation");
  }
  if (op.param >= n_params) {
    throw std::invalid_argument("CircuitIR: parameter index out of range");
  }
}

}  // namespace

void CircuitIR::check_valid() const {
  if (n_qubits <= 0) throw std::invalid_argument("CircuitIR: empty register");
  if (!roles.empty() && static_cast<int>(roles.size()) != n_qubits) {
    throw std::invalid_argument("CircuitIR: role list size mismatch");
  }
  for (const Op& op : ops) check_op(op, n_qubits, n_params);
}

Op& CircuitIR::add(Op op) {
  check_op(op, n_qubits, n_params);
  ops.push_back(op);
  return ops.back();
}

double bound_angle(const Op& op, std::span<const double> params) {
  if (op.param < 0) return op.angle;
  if (static_cast<size_t>(op.param) >= params.size()) {
    throw std::invalid_argument("bound_angle: parameter vector too short");
  }
  return params[op.param];
}

namespace {

QubitRole role_of(const CircuitIR& circuit, int qubit) {
  return circuit.roles.empty() ? QubitRole::kData : circuit.roles[qubit];
}

double site_rate(const CircuitIR& circuit, const PauliInjectionSpec& spec, int qubit,
                 double base) {
  switch (role_of(circuit, qubit)) {
    case QubitRole::kSyndrome:
      return 0.0;
    case QubitRole::kRotationAncilla:
      return base * spec.f_anc;
    case QubitRole::kData:
      break;
  }
  return base;
}

void push_site(std::vector<InjectionSite>& sites, int position, int qubit, double rate) {
  if (rate > 0.0) sites.push_back({position, qubit, rate});
}

}  // namespace

std::vector<InjectionSite> gate_noise_sites(const CircuitIR& circuit,
                                            const PauliInjectionSpec& spec) {
  spec.check_valid();
  std::vector<InjectionSite> sites;
  for (size_t i = 0; i < circuit.ops.size(); ++i) {
    const Op& op = circuit.ops[i];
    if (!op.noisy || op.kind == GateKind::kMeasureZ) continue;
    const int position = static_cast<int>(i);
    if (is_two_qubit(op.kind)) {
      const double base = spec.rate * spec.two_qubit_multiplier;
      push_site(sites, position, op.q0, site_rate(circuit, spec, op.q0, base));
      push_site(sites, position, op.q1, site_rate(circuit, spec, op.q1, base));
    } else {
      push_site(sites, position, op.q0, site_rate(circuit, spec, op.q0, spec.rate));
    }
  }
  return sites;
}

std::vector<InjectionSite> environmental_sites(const CircuitIR& circuit,
                                               const PauliInjectionSpec& spec) {
  spec.check_valid();
  std::vector<InjectionSite> sites;
  int gate_count = 0;
  for (size_t i = 0; i < circuit.ops.size(); ++i) {
    if (circuit.ops[i].kind == GateKind::kMeasureZ) continue;
    ++gate_count;
    if (gate_count % spec.cadence_gates != 0) continue;
    for (int q = 0; q < circuit.n_qubits; ++q) {
      if (role_of(circuit, q) == QubitRole::kSyndrome) continue;
      push_site(sites, static_cast<int>(i), q,
                site_rate(circuit, spec, q, spec.rate));
    }
  }
  return sites;
}

std::vector<InjectionSite> injection_sites(const CircuitIR& circuit,
                                           const PauliInjectionSpec& spec) {
  return spec.model == NoiseModel::kGate ? gate_noise_sites(circuit, spec)
                                         : environmental_sites(circuit, spec);
}

namespace {

void apply_pauli(PureState& psi, int qubit, int pauli) {
  switch (pauli) {
    case 1:
      psi.apply_x(qubit);
      break;
    case 2:
      psi.apply_y(qubit);
      break;
    case 3:
      psi.apply_z(qubit);
      break;
    default:
      throw std::invalid_argument("apply_pauli: code must be 1, 2, or 3");
  }
}

void apply_op_pure(const Op& op, std::span<const double> params, PureState& psi) {
  switch (op.kind) {
    case GateKind::kX:
      psi.apply_x(op.q0);
      break;
    case GateKind::kY:
      psi.apply_y(op.q0);
      break;
    case GateKind::kZ:
      psi.apply_z(op.q0);
      break;
    case GateKind::kH:
      psi.apply_h(op.q0);
      break;
    case GateKind::kS:
      psi.apply_1q(gates::s(), op.q0);
      break;
    case GateKind::kCx:
      psi.apply_cnot(op.q0, op.q1);
      break;
    case GateKind::kCz:
      psi.apply_cz(op.q0, op.q1);
      break;
    case GateKind::kSwap:
      psi.apply_swap(op.q0, op.q1);
      break;
    case GateKind::kRx:
      psi.apply_1q(gates::rx(bound_angle(op, params)), op.q0);
      break;
    case GateKind::kRy:
      psi.apply_1q(gates::ry(bound_angle(op, params)), op.q0);
      break;
    case GateKind::kRz:
      psi.apply_1q(gates::rz(bound_angle(op, params)), op.q0);
      break;
    case GateKind::kMeasureZ:
      break;
  }
}

}  // namespace

void run_pure(const CircuitIR& circuit, std::span<const double> params, PureState& psi,
              std::span<const InjectionEvent> injections) {
  if (psi.n_qubits() != circuit.n_qubits) {
    throw std::invalid_argument("run_pure: register size mismatch");
  }
  size_t next = 0;
  for (size_t i = 0; i < circuit.ops.size(); ++i) {
    apply_op_pure(circuit.ops[i], params, psi);
    while (next < injections.size() &&
           injections[next].position == static_cast<int>(i)) {
      apply_pauli(psi, injections[next].qubit, injections[next].pauli);
      ++next;
    }
  }
  if (next != injections.size()) {
    throw std::invalid_argument("run_pure: injection position out of range");
  }
}

void run_density(const CircuitIR& circuit, std::span<const double> params,
                 DensityMatrix& rho, const DensityNoise& noise) {
  if (rho.n_qubits() != circuit.n_qubits) {
    throw std::invalid_argument("run_density: register size mismatch");
  }
  const bool has_2q_noise = noise.p_2q > 0.0 || noise.crosstalk.has_value();
  KrausChannel depol_1q;
  if (noise.p_1q > 0.0) depol_1q = depolarizing_channel(noise.p_1q);
  struct CachedNoise {
    KrausChannel channel;
    std::vector<int> support;
  };
  std::map<std::pair<int, int>, CachedNoise> composed;

  for (const Op& op : circuit.ops) {
    switch (op.kind) {
      case GateKind::kX:
        rho.apply_1q(gates::x(), op.q0);
        break;
      case GateKind::kY:
        rho.apply_1q(gates::y(), op.q0);
        break;
      case GateKind::kZ:
        rho.apply_1q(gates::z(), op.q0);
        break;
      case GateKind::kH:
        rho.apply_1q(gates::h(), op.q0);
        break;
      case GateKind::kS:
        rho.apply_1q(gates::s(), op.q0);
        break;
      case GateKind::kCx:
        rho.apply_cnot(op.q0, op.q1);
        break;
      case GateKind::kCz:
        rho.apply_cz(op.q0, op.q1);
        break;
      case GateKind::kSwap:
        rho.apply_2q(gates::swap(), std::min(op.q0, op.q1), std::max(op.q0, op.q1));
        break;
      case GateKind::kRx:
        rho.apply_1q(gates::rx(bound_angle(op, params)), op.q0);
        break;
      case GateKind::kRy:
        rho.apply_1q(gates::ry(bound_angle(op, params)), op.q0);
        break;
      case GateKind::kRz:
        rho.apply_1q(gates::rz(bound_angle(op, params)), op.q0);
        break;
      case GateKind::kMeasureZ:
        continue;
    }
    if (!op.noisy) continue;
    if (is_two_qubit(op.kind)) {
      if (!has_2q_noise) continue;
      const std::pair<int, int> pair{std::min(op.q0, op.q1), std::max(op.q0, op.q1)};
      auto it = composed.find(pair);
      if (it == composed.end()) {
        const CrosstalkSpec cross = noise.crosstalk.value_or(CrosstalkSpec{0.0});
        ComposedGateNoise built = two_qubit_gate_noise(noise.p_2q, cross, pair.first,
                                                       pair.second, circuit.n_qubits);
        CachedNoise cached{superoperator_to_channel(built.superop),
                           std::move(built.support)};
        it = composed.emplace(pair, std::move(cached)).first;
      }
      apply_channel(rho, it->second.channel, it->second.support);
    } else if (noise.p_1q > 0.0) {
      const std::array<int, 1> target{op.q0};
      apply_channel(rho, depol_1q, target);
    }
  }
}

}  // namespace qecml
