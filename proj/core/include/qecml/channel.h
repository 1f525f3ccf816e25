#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qecml/state.h"

namespace qecml {

// Completely positive trace preserving map in Kraus form. Operators act on
// n_qubits qubits (dimension 2^n each) with the library's qubit ordering.
struct KrausChannel {
  int n_qubits = 1;
  std::vector<Mat> ops;

  // max_j |sum_j K_j^dagger K_j - I| entrywise; 0 for an exact channel.
  double completeness_defect() const;
  void check_valid(double tol = 1e-9) const;
};

// Identity channel on n qubits.
KrausChannel identity_channel(int n_qubits);
// Single-qubit depolarizing channel:
//   E(rho) = (1-p) rho + p/3 (X rho X + Y rho Y + Z rho Z), 0 <= p <= 1.
KrausChannel depolarizing_channel(double p);
// Unitary channel with a single Kraus operator.
KrausChannel unitary_channel(const Mat& u);

// Vectorization is column stacking: vec(rho)[i + d*j] = rho(i, j). Under it a
// channel acts as  E = sum_j conj(K_j) (x) K_j,  which for Hermitian Kraus
// operators (every Pauli channel) coincides with sum_j K_j^T (x) K_j.
struct SuperOperatorMatrix {
  int n_qubits = 1;
  Mat m;
};

Vec vectorize(const Mat& rho);
Mat devectorize(const Vec& v);

SuperOperatorMatrix channel_to_superoperator(const KrausChannel& channel);
Mat apply_superoperator(const SuperOperatorMatrix& s, const Mat& rho);
// Recover a Kraus form from a superoperator via its Choi matrix. Requires a
// (numerically) completely positive map.
KrausChannel superoperator_to_channel(const SuperOperatorMatrix& s, double tol = 1e-9);

// Principal matrix logarithm of a channel's superoperator. Rejects spectra
// touching the negative real axis (e.g. depolarizing with p >= 0.75).
SuperOperatorMatrix log_superoperator(const SuperOperatorMatrix& s);
// exp(L * t) for a Lindbladian-like generator; t >= 0.
SuperOperatorMatrix exp_lindbladian(const SuperOperatorMatrix& generator, double t);

// Apply a 1- or 2-qubit channel to the given qubits of a density matrix.
void apply_channel(DensityMatrix& rho, const KrausChannel& channel,
                   std::span<const int> targets);

}  // namespace qecml
