#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "qecml/rng.h"

namespace qecml {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Bit convention used across the library: qubit 0 is the leftmost (most
// significant) bit of a basis-state label, so |10> on two qubits is index 2.
inline uint64_t bit_of(uint64_t basis_index, int qubit, int n_qubits) {
  return (basis_index >> (n_qubits - 1 - qubit)) & 1ull;
}

// Dense state vector. Practical up to ~20 qubits (16M amplitudes).
class PureState {
 public:
  explicit PureState(int n_qubits);
  static PureState basis(int n_qubits, uint64_t index);

  int n_qubits() const { return n_qubits_; }
  uint64_t dim() const { return uint64_t{1} << n_qubits_; }
  std::span<cplx> amplitudes() { return amps_; }
  std::span<const cplx> amplitudes() const { return amps_; }
  cplx& operator[](uint64_t i) { return amps_[i]; }
  const cplx& operator[](uint64_t i) const { return amps_[i]; }

  double norm_sq() const;
  void normalize();

  // 2x2 matrix on one qubit; no unitarity assumption.
  void apply_1q(const Eigen::Matrix2cd& u, int qubit);
  // Dense 4x4 on an ordered qubit pair (q_hi is the more significant label).
  void apply_2q(const Eigen::Matrix4cd& u, int q_hi, int q_lo);
  void apply_x(int qubit);
  void apply_y(int qubit);
  void apply_z(int qubit);
  void apply_h(int qubit);
  void apply_cnot(int control, int target);
  void apply_cz(int q0, int q1);
  void apply_swap(int q0, int q1);
  // Diagonal phase exp(-i*alpha*Z(q0)Z(q1)).
  void apply_zz_phase(double alpha, int q0, int q1);

  // Grow the register by one fresh |0> qubit at the least significant slot
  // (index n_qubits). Returns the new qubit's index.
  int append_qubit();
  // Projectively measure the last qubit and drop it from the register.
  bool measure_remove_last(Rng& rng);
  // Probability that the last qubit reads 1.
  double prob_last_one() const;
  // Deterministically project the last qubit onto |outcome> and drop it;
  // returns the branch probability (state is renormalized when nonzero).
  double project_remove_last(bool outcome);

  double prob_of_one(int qubit) const;
  double z_expectation(int qubit) const;
  // Joint probability table over an ordered subset of qubits; entry order
  // follows the subset's own most-significant-first labeling.
  std::vector<double> marginal_probabilities(std::span<const int> qubits) const;
  uint64_t sample_bitstring(Rng& rng) const;

 private:
  void check_qubit(int qubit) const;
  int n_qubits_;
  std::vector<cplx> amps_;
};

// Dense density matrix. Practical up to ~10 qubits.
class DensityMatrix {
 public:
  explicit DensityMatrix(int n_qubits);
  static DensityMatrix from_pure(const PureState& psi);

  int n_qubits() const { return n_qubits_; }
  uint64_t dim() const { return uint64_t{1} << n_qubits_; }
  Mat& matrix() { return rho_; }
  const Mat& matrix() const { return rho_; }

  double trace_real() const;
  void normalize_trace();

  // rho <- U rho U^dagger with U acting on the given qubit(s).
  void apply_1q(const Eigen::Matrix2cd& u, int qubit);
  void apply_2q(const Eigen::Matrix4cd& u, int q_hi, int q_lo);
  void apply_cnot(int control, int target);
  void apply_cz(int q0, int q1);

  // rho <- sum_j K_j rho K_j^dagger for Kraus ops on 1 or 2 qubits.
  void apply_kraus_1q(std::span<const Eigen::Matrix2cd> kraus, int qubit);
  void apply_kraus_2q(std::span<const Eigen::Matrix4cd> kraus, int q_hi, int q_lo);

  double z_expectation(int qubit) const;
  std::vector<double> diagonal_probabilities() const;
  uint64_t sample_bitstring(Rng& rng) const;

 private:
  // Left action A.rho (columns untouched) and right action rho.B.
  void left_mul_1q(const Eigen::Matrix2cd& a, int qubit);
  void right_mul_1q(const Eigen::Matrix2cd& b, int qubit);
  void left_mul_2q(const Eigen::Matrix4cd& a, int q_hi, int q_lo);
  void right_mul_2q(const Eigen::Matrix4cd& b, int q_hi, int q_lo);
  void check_qubit(int qubit) const;
  int n_qubits_;
  Mat rho_;
};

}  // namespace qecml
