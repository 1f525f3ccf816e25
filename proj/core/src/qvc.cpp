#include "qecml/qvc.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qecml {

void DenseLayer::check_valid(int n_qubits) const {
  if (n_outputs <= 0) throw std::invalid_argument("DenseLayer: no outputs");
  if (weights.size() != static_cast<size_t>(n_outputs) * n_qubits) {
    throw std::invalid_argument("DenseLayer: weight shape mismatch");
  }
  if (biases.size() != static_cast<size_t>(n_outputs)) {
    throw std::invalid_argument("DenseLayer: bias shape mismatch");
  }
}

void QvcArchitecture::check_valid() const {
  if (n_qubits <= 0 || n_layers < 0) {
    throw std::invalid_argument("QvcArchitecture: invalid shape");
  }
  if (dense) dense->check_valid(n_qubits);
}

PureState amplitude_encode(std::span<const double> features) {
  const size_t len = features.size();
  if (len == 0 || (len & (len - 1)) != 0) {
    throw std::invalid_argument("amplitude_encode: length must be a power of two");
  }
  double norm_sq = 0.0;
  for (double f : features) norm_sq += f * f;
  if (norm_sq <= 0.0) {
    throw std::invalid_argument("amplitude_encode: zero feature vector");
  }
  int n_qubits = 0;
  while ((size_t{1} << n_qubits) < len) ++n_qubits;
  PureState psi(std::max(n_qubits, 1));
  const double inv_norm = 1.0 / std::sqrt(norm_sq);
  for (size_t i = 0; i < len; ++i) psi[i] = features[i] * inv_norm;
  return psi;
}

PureState basis_encode(std::span<const int> bits) {
  if (bits.empty()) throw std::invalid_argument("basis_encode: no qubits");
  uint64_t index = 0;
  for (int b : bits) {
    if (b != 0 && b != 1) throw std::invalid_argument("basis_encode: bits must be 0/1");
    index = (index << 1) | static_cast<uint64_t>(b);
  }
  return PureState::basis(static_cast<int>(bits.size()), index);
}

CircuitIR build_qvc_circuit(const QvcArchitecture& arch) {
  arch.check_valid();
  CircuitIR circuit;
  circuit.n_qubits = arch.n_qubits;
  circuit.n_params = arch.parameter_count();
  circuit.roles.assign(arch.n_qubits, QubitRole::kData);
  int param = 0;
  for (int layer = 0; layer < arch.n_layers; ++layer) {
    for (int q = 0; q < arch.n_qubits; ++q) {
      circuit.add({GateKind::kRz, q, -1, 0.0, param++, Stage::kVariational, true});
      circuit.add({GateKind::kRy, q, -1, 0.0, param++, Stage::kVariational, true});
      circuit.add({GateKind::kRz, q, -1, 0.0, param++, Stage::kVariational, true});
    }
    for (int q = 0; q + 1 < arch.n_qubits; ++q) {
      const GateKind kind =
          arch.entangler == Entangler::kCzChain ? GateKind::kCz : GateKind::kCx;
      circuit.add({kind, q, q + 1, 0.0, -1, Stage::kVariational, arch.noisy_entangler});
    }
  }
  for (int q = 0; q < arch.n_qubits; ++q) {
    circuit.add({GateKind::kMeasureZ, q, -1, 0.0, -1, Stage::kVariational, false});
  }
  return circuit;
}

CircuitIR build_parity_circuit(int b1, int b2) {
  if ((b1 != 0 && b1 != 1) || (b2 != 0 && b2 != 1)) {
    throw std::invalid_argument("build_parity_circuit: bits must be 0/1");
  }
  CircuitIR circuit;
  circuit.n_qubits = 2;
  circuit.n_params = 1;
  circuit.roles.assign(2, QubitRole::kData);
  if (b1) circuit.add({GateKind::kX, 0, -1, 0.0, -1, Stage::kEncoding, false});
  if (b2) circuit.add({GateKind::kX, 1, -1, 0.0, -1, Stage::kEncoding, false});
  for (int q = 0; q < 2; ++q) {
    circuit.add({GateKind::kRx, q, -1, 0.0, 0, Stage::kVariational, true});
  }
  for (int q = 0; q < 2; ++q) {
    circuit.add({GateKind::kRz, q, -1, 0.0, 0, Stage::kVariational, true});
  }
  circuit.add({GateKind::kCx, 0, 1, 0.0, -1, Stage::kVariational, true});
  for (int q = 0; q < 2; ++q) {
    circuit.add({GateKind::kRy, q, -1, 0.0, 0, Stage::kVariational, true});
  }
  circuit.add({GateKind::kZ, 0, -1, 0.0, -1, Stage::kVariational, true});
  circuit.add({GateKind::kMeasureZ, 0, -1, 0.0, -1, Stage::kVariational, false});
  return circuit;
}

namespace {

std::vector<double> apply_dense(const QvcArchitecture& arch,
                                const std::vector<double>& z) {
  if (!arch.dense) return z;
  const DenseLayer& layer = *arch.dense;
  std::vector<double> scores(layer.n_outputs, 0.0);
  for (int out = 0; out < layer.n_outputs; ++out) {
    double acc = layer.biases[out];
    for (int q = 0; q < arch.n_qubits; ++q) {
      acc += layer.weights[static_cast<size_t>(out) * arch.n_qubits + q] * z[q];
    }
    scores[out] = acc;
  }
  return scores;
}

}  // namespace

ForwardResult forward(const QvcArchitecture& arch, std::span<const double> params,
                      const Sample& sample, const ForwardOptions& options) {
  arch.check_valid();
  if (static_cast<int>(params.size()) != arch.parameter_count()) {
    throw std::invalid_argument("forward: parameter count mismatch");
  }
  const PureState encoded = amplitude_encode(sample.features);
  if (encoded.n_qubits() != arch.n_qubits) {
    throw std::invalid_argument("forward: feature length does not fit the register");
  }
  const CircuitIR circuit = build_qvc_circuit(arch);
  DensityMatrix rho = DensityMatrix::from_pure(encoded);
  run_density(circuit, params, rho, options.noise);

  ForwardResult result;
  result.z_expectations.resize(arch.n_qubits);
  if (options.shots <= 0) {
    for (int q = 0; q < arch.n_qubits; ++q) {
      result.z_expectations[q] = rho.z_expectation(q);
    }
  } else {
    Rng rng(Rng::derive(options.seed, 0x5c02e5));
    std::vector<long> ones(arch.n_qubits, 0);
    for (int shot = 0; shot < options.shots; ++shot) {
      const uint64_t bits = rho.sample_bitstring(rng);
      for (int q = 0; q < arch.n_qubits; ++q) {
        ones[q] += static_cast<long>(bit_of(bits, q, arch.n_qubits));
      }
    }
    for (int q = 0; q < arch.n_qubits; ++q) {
      result.z_expectations[q] = 1.0 - 2.0 * static_cast<double>(ones[q]) / options.shots;
    }
  }
  result.scores = apply_dense(arch, result.z_expectations);
  return result;
}

int predict_class(const ForwardResult& result) {
  if (result.scores.empty()) throw std::invalid_argument("predict_class: no scores");
  return static_cast<int>(std::max_element(result.scores.begin(), result.scores.end()) -
                          result.scores.begin());
}

double parity_z_expectation(double theta, int b1, int b2) {
  const CircuitIR circuit = build_parity_circuit(b1, b2);
  PureState psi(2);
  const double params[1] = {theta};
  run_pure(circuit, params, psi);
  return psi.z_expectation(0);
}

}  // namespace qecml
