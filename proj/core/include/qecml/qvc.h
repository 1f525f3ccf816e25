#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qecml/circuit.h"
#include "qecml/dataset.h"

namespace qecml {

enum class Entangler { kCzChain, kCnotChain };

struct DenseLayer {
  // scores = weights * z_expectations + biases; weights is row-major
  // (n_outputs x n_qubits).
  int n_outputs = 0;
  std::vector<double> weights;
  std::vector<double> biases;

  void check_valid(int n_qubits) const;
};

struct QvcArchitecture {
  int n_qubits = 4;
  int n_layers = 5;
  Entangler entangler = Entangler::kCzChain;
  // Partial QEC treats entanglers as error corrected; setting this tags them
  // for two-qubit noise attachment instead.
  bool noisy_entangler = false;
  std::optional<DenseLayer> dense;

  // Euler form: three angles (rz, ry, rz) per qubit per layer.
  int parameter_count() const { return 3 * n_layers * n_qubits; }
  int n_outputs() const { return dense ? dense->n_outputs : n_qubits; }
  void check_valid() const;
};

// Amplitude encoding: amplitudes = features / |features|. Length must be a
// power of two and nonzero.
PureState amplitude_encode(std::span<const double> features);

// Computational basis state via X gates on the 1-bits.
PureState basis_encode(std::span<const int> bits);

// Layered ansatz: per layer, an rz-ry-rz Euler triple on every qubit (each
// rotation tagged for post-gate noise), then the entangling chain over
// neighbouring pairs.
CircuitIR build_qvc_circuit(const QvcArchitecture& arch);

// The two-qubit parity classifier: basis encoding, then rx-rx, rz-rz,
// cnot(0 -> 1), ry-ry, sigma_z on qubit 0, measure qubit 0. Every rotation
// shares parameter 0.
CircuitIR build_parity_circuit(int b1, int b2);

struct ForwardResult {
  std::vector<double> z_expectations;  // one per qubit
  std::vector<double> scores;          // dense-layer outputs, or z copies
};

struct ForwardOptions {
  DensityNoise noise;
  int shots = 0;  // 0 = exact expectations from the density matrix
  uint64_t seed = 0;
};

ForwardResult forward(const QvcArchitecture& arch, std::span<const double> params,
                      const Sample& sample, const ForwardOptions& options = {});

int predict_class(const ForwardResult& result);

// Bare parity circuit readout: <Z> on qubit 0 after build_parity_circuit,
// evaluated exactly on the statevector. Oracle for the encoded variant.
double parity_z_expectation(double theta, int b1, int b2);

}  // namespace qecml
