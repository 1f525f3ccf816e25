#include "qecml/gates.h"

#include <cmath>
#include <span>
#include <stdexcept>

namespace qecml::gates {

using cplx = std::complex<double>;
namespace {
const cplx kI{0.0, 1.0};
}

Eigen::Matrix2cd identity2() { return Eigen::Matrix2cd::Identity(); }

Eigen::Matrix2cd x() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}

Eigen::Matrix2cd y() {
  Eigen::Matrix2cd m;
  m << 0, -kI, kI, 0;
  return m;
}

Eigen::Matrix2cd z() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, -1;
  return m;
}

Eigen::Matrix2cd h() {
  Eigen::Matrix2cd m;
  const double r = 1.0 / std::sqrt(2.0);
  m << r, r, r, -r;
  return m;
}

Eigen::Matrix2cd s() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, kI;
  return m;
}

Eigen::Matrix2cd rx(double theta) {
  const double c = std::cos(theta / 2.0);
  const double sn = std::sin(theta / 2.0);
  Eigen::Matrix2cd m;
  m << c, -kI * sn, -kI * sn, c;
  return m;
}

Eigen::Matrix2cd ry(double theta) {
  const double c = std::cos(theta / 2.0);
  const double sn = std::sin(theta / 2.0);
  Eigen::Matrix2cd m;
  m << c, -sn, sn, c;
  return m;
}

Eigen::Matrix2cd rz(double theta) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 0) = std::exp(-kI * (theta / 2.0));
  m(1, 1) = std::exp(kI * (theta / 2.0));
  return m;
}

Eigen::Matrix2cd rot_axis(double nx, double ny, double nz, double theta) {
  const double n = std::sqrt(nx * nx + ny * ny + nz * nz);
  if (n == 0.0) throw std::invalid_argument("rot_axis: zero axis");
  nx /= n;
  ny /= n;
  nz /= n;
  const double c = std::cos(theta / 2.0);
  const double sn = std::sin(theta / 2.0);
  Eigen::Matrix2cd m = c * Eigen::Matrix2cd::Identity() -
                       kI * sn * (nx * x() + ny * y() + nz * z());
  return m;
}

Eigen::Matrix2cd euler_zyz(double alpha, double beta, double gamma) {
  return rz(alpha) * ry(beta) * rz(gamma);
}

Eigen::Matrix4cd cnot() {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
  return m;
}

Eigen::Matrix4cd cz() {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Identity();
  m(3, 3) = -1.0;
  return m;
}

Eigen::Matrix4cd swap() {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
  return m;
}

Eigen::Matrix4cd zz_rotation(double alpha) {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  const cplx eq = std::exp(-kI * alpha);
  const cplx ne = std::exp(kI * alpha);
  m(0, 0) = eq;
  m(1, 1) = ne;
  m(2, 2) = ne;
  m(3, 3) = eq;
  return m;
}

Eigen::Matrix2cd pauli(int index) {
  switch (index) {
    case 0: return identity2();
    case 1: return x();
    case 2: return y();
    case 3: return z();
    default: throw std::invalid_argument("pauli: index must be 0..3");
  }
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Eigen::MatrixXcd embed(const Eigen::MatrixXcd& op, std::span<const int> targets,
                       int n_qubits) {
  const size_t k = targets.size();
  if (op.rows() != op.cols() || op.rows() != Eigen::Index(1) << k)
    throw std::invalid_argument("embed: operator size does not match target count");
  for (int t : targets)
    if (t < 0 || t >= n_qubits) throw std::out_of_range("embed: target out of range");
  const uint64_t dim = uint64_t{1} << n_qubits;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  // Walk all basis pairs whose bits agree outside the target set.
  for (uint64_t col = 0; col < dim; ++col) {
    uint64_t sub_col = 0;
    for (int t : targets)
      sub_col = (sub_col << 1) | ((col >> (n_qubits - 1 - t)) & 1ull);
    for (uint64_t sub_row = 0; sub_row < (uint64_t{1} << k); ++sub_row) {
      const cplx v = op(sub_row, sub_col);
      if (v == cplx{0.0, 0.0}) continue;
      uint64_t row = col;
      size_t pos = 0;
      for (int t : targets) {
        const uint64_t bit = (sub_row >> (k - 1 - pos)) & 1ull;
        const uint64_t mask = uint64_t{1} << (n_qubits - 1 - t);
        row = (row & ~mask) | (bit ? mask : 0);
        ++pos;
      }
      out(row, col) += v;
    }
  }
  return out;
}

}  // namespace qecml::gates
