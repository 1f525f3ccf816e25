#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>

namespace qecml::gates {

// Rotation convention used everywhere in this library:
//   R_A(theta) = exp(-i * theta * A / 2),
// so matrix entries involve cos(theta/2) and sin(theta/2).

Eigen::Matrix2cd identity2();
Eigen::Matrix2cd x();
Eigen::Matrix2cd y();
Eigen::Matrix2cd z();
Eigen::Matrix2cd h();
Eigen::Matrix2cd s();
Eigen::Matrix2cd rx(double theta);
Eigen::Matrix2cd ry(double theta);
Eigen::Matrix2cd rz(double theta);
// exp(-i*theta*(nx X + ny Y + nz Z)/2); axis is normalized internally.
Eigen::Matrix2cd rot_axis(double nx, double ny, double nz, double theta);
// Euler decomposition Rz(alpha) Ry(beta) Rz(gamma), applied right to left.
Eigen::Matrix2cd euler_zyz(double alpha, double beta, double gamma);

Eigen::Matrix4cd cnot();           // control = high label, target = low label
Eigen::Matrix4cd cz();
Eigen::Matrix4cd swap();
Eigen::Matrix4cd zz_rotation(double alpha);  // exp(-i*alpha*Z(x)Z)

Eigen::Matrix2cd pauli(int index);  // 0=I, 1=X, 2=Y, 3=Z

// Kronecker product with the library's most-significant-first qubit order.
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);
// Embed an operator acting on `targets` (subset of 0..n-1) into n qubits.
Eigen::MatrixXcd embed(const Eigen::MatrixXcd& op, std::span<const int> targets,
                       int n_qubits);

}  // namespace qecml::gates
