#include "qecml/channel.h"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>

#include "qecml/gates.h"

namespace qecml {

double KrausChannel::completeness_defect() const {
  if (ops.empty()) return 1.0;
  const Eigen::Index d = ops.front().rows();
  Mat sum = Mat::Zero(d, d);
  for (const auto& k : ops) sum += k.adjoint() * k;
  return (sum - Mat::Identity(d, d)).cwiseAbs().maxCoeff();
}

void KrausChannel::check_valid(double tol) const {
  if (n_qubits < 1) throw std::invalid_argument("KrausChannel: bad qubit count");
  const Eigen::Index d = Eigen::Index{1} << n_qubits;
  if (ops.empty()) throw std::invalid_argument("KrausChannel: no Kraus operators");
  for (const auto& k : ops)
    if (k.rows() != d || k.cols() != d)
      throw std::invalid_argument("KrausChannel: operator dimension mismatch");
  if (completeness_defect() > tol)
    throw std::invalid_argument("KrausChannel: completeness relation violated");
}

KrausChannel identity_channel(int n_qubits) {
  const Eigen::Index d = Eigen::Index{1} << n_qubits;
  return KrausChannel{n_qubits, {Mat::Identity(d, d)}};
}

KrausChannel depolarizing_channel(double p) {
  if (p < 0.0 || p > 1.0)
    throw std::invalid_argument("depolarizing_channel: p must be in [0, 1]");
  KrausChannel ch;
  ch.n_qubits = 1;
  ch.ops.push_back(std::sqrt(1.0 - p) * gates::identity2());
  const double w = std::sqrt(p / 3.0);
  ch.ops.push_back(w * gates::x());
  ch.ops.push_back(w * gates::y());
  ch.ops.push_back(w * gates::z());
  return ch;
}

KrausChannel unitary_channel(const Mat& u) {
  if (u.rows() != u.cols() || u.rows() < 2)
    throw std::invalid_argument("unitary_channel: square matrix required");
  int n = 0;
  while ((Eigen::Index{1} << n) < u.rows()) ++n;
  if ((Eigen::Index{1} << n) != u.rows())
    throw std::invalid_argument("unitary_channel: dimension must be a power of two");
  return KrausChannel{n, {u}};
}

Vec vectorize(const Mat& rho) {
  return Eigen::Map<const Vec>(rho.data(), rho.size());
}

Mat devectorize(const Vec& v) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(double(v.size()))));
  if (d * d != v.size())
    throw std::invalid_argument("devectorize: length is not a perfect square");
  return Eigen::Map<const Mat>(v.data(), d, d);
}

SuperOperatorMatrix channel_to_superoperator(const KrausChannel& channel) {
  channel.check_valid();
  const Eigen::Index d = Eigen::Index{1} << channel.n_qubits;
  Mat s = Mat::Zero(d * d, d * d);
  for (const auto& k : channel.ops) s += gates::kron(k.conjugate(), k);
  return SuperOperatorMatrix{channel.n_qubits, std::move(s)};
}

Mat apply_superoperator(const SuperOperatorMatrix& s, const Mat& rho) {
  if (rho.rows() != rho.cols() || rho.rows() * rho.cols() != s.m.cols())
    throw std::invalid_argument("apply_superoperator: dimension mismatch");
  return devectorize(s.m * vectorize(rho));
}

KrausChannel superoperator_to_channel(const SuperOperatorMatrix& s, double tol) {
  const Eigen::Index d = Eigen::Index{1} << s.n_qubits;
  if (s.m.rows() != d * d || s.m.cols() != d * d)
    throw std::invalid_argument("superoperator_to_channel: dimension mismatch");
  // Choi matrix: C[(r1,r2),(c1,c2)] = <r1 r2| C |c1 c2> = S[(r2,c2) block](r1,c1)
  // reshuffled from the column-stacking action matrix.
  Mat choi = Mat::Zero(d * d, d * d);
  for (Eigen::Index r1 = 0; r1 < d; ++r1)
    for (Eigen::Index r2 = 0; r2 < d; ++r2)
      for (Eigen::Index c1 = 0; c1 < d; ++c1)
        for (Eigen::Index c2 = 0; c2 < d; ++c2)
          // C[(r1,r2),(c1,c2)] = <r2| E(|r1><c1|) |c2>, read from the action
          // matrix at vec indices (r2 + d*c2, r1 + d*c1).
          choi(r1 * d + r2, c1 * d + c2) = s.m(r2 + d * c2, r1 + d * c1);
  Eigen::SelfAdjointEigenSolver<Mat> es((choi + choi.adjoint()) / 2.0);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("superoperator_to_channel: eigensolver failed");
  KrausChannel out;
  out.n_qubits = s.n_qubits;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double lam = es.eigenvalues()(i);
    if (lam < -tol)
      throw std::invalid_argument("superoperator_to_channel: map is not CP");
    if (lam <= tol) continue;
    const Vec col = es.eigenvectors().col(i) * std::sqrt(lam);
    Mat k(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b) k(a, b) = col(b * d + a);
    out.ops.push_back(std::move(k));
  }
  if (out.ops.empty())
    throw std::invalid_argument("superoperator_to_channel: zero map");
  return out;
}

SuperOperatorMatrix log_superoperator(const SuperOperatorMatrix& s) {
  Eigen::ComplexEigenSolver<Mat> es(s.m);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("log_superoperator: eigensolver failed");
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const cplx lam = es.eigenvalues()(i);
    if (lam.real() <= 0.0 && std::abs(lam.imag()) < 1e-12)
      throw std::invalid_argument(
          "log_superoperator: spectrum touches the branch cut of the principal "
          "logarithm");
  }
  return SuperOperatorMatrix{s.n_qubits, s.m.log()};
}

SuperOperatorMatrix exp_lindbladian(const SuperOperatorMatrix& generator, double t) {
  if (t < 0.0) throw std::invalid_argument("exp_lindbladian: t must be >= 0");
  if (generator.m.rows() != generator.m.cols())
    throw std::invalid_argument("exp_lindbladian: generator must be square");
  Mat scaled = generator.m * t;
  return SuperOperatorMatrix{generator.n_qubits, scaled.exp()};
}

void apply_channel(DensityMatrix& rho, const KrausChannel& channel,
                   std::span<const int> targets) {
  channel.check_valid();
  if (static_cast<size_t>(channel.n_qubits) != targets.size())
    throw std::invalid_argument("apply_channel: target count mismatch");
  if (channel.n_qubits == 1) {
    std::vector<Eigen::Matrix2cd> ks;
    ks.reserve(channel.ops.size());
    for (const auto& k : channel.ops) ks.push_back(k);
    rho.apply_kraus_1q(ks, targets[0]);
  } else if (channel.n_qubits == 2) {
    std::vector<Eigen::Matrix4cd> ks;
    ks.reserve(channel.ops.size());
    if (targets[0] < targets[1]) {
      for (const auto& k : channel.ops) ks.push_back(k);
      rho.apply_kraus_2q(ks, targets[0], targets[1]);
    } else {
      // Reorder the channel to the (low label, high label) orientation.
      Eigen::Matrix4cd sw = gates::swap();
      for (const auto& k : channel.ops) ks.push_back(sw * Eigen::Matrix4cd(k) * sw);
      rho.apply_kraus_2q(ks, targets[1], targets[0]);
    }
  } else {
    // Wider channels act through full-space embeddings; fine at the small
    // register sizes the density path is used for.
    Mat acc = Mat::Zero(rho.dim(), rho.dim());
    for (const auto& k : channel.ops) {
      const Mat e = gates::embed(k, targets, rho.n_qubits());
      acc += e * rho.matrix() * e.adjoint();
    }
    rho.matrix() = acc;
  }
}

}  // namespace qecml
