#include "qecml/state.h"

#include <cmath>
#include <stdexcept>

namespace qecml {

namespace {
constexpr int kMaxPureQubits = 26;
constexpr int kMaxDensityQubits = 13;
}  // namespace

PureState::PureState(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxPureQubits)
    throw std::invalid_argument("PureState: qubit count out of range");
  amps_.assign(dim(), cplx{0.0, 0.0});
  amps_[0] = 1.0;
}

PureState PureState::basis(int n_qubits, uint64_t index) {
  PureState psi(n_qubits);
  if (index >= psi.dim())
    throw std::invalid_argument("PureState::basis: index out of range");
  psi.amps_[0] = 0.0;
  psi.amps_[index] = 1.0;
  return psi;
}

void PureState::check_qubit(int qubit) const {
  if (qubit < 0 || qubit >= n_qubits_)
    throw std::out_of_range("PureState: qubit index out of range");
}

double PureState::norm_sq() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return s;
}

void PureState::normalize() {
  const double n = std::sqrt(norm_sq());
  if (n == 0.0) throw std::runtime_error("PureState: cannot normalize zero vector");
  for (auto& a : amps_) a /= n;
}

void PureState::apply_1q(const Eigen::Matrix2cd& u, int qubit) {
  check_qubit(qubit);
  const uint64_t m = uint64_t{1} << (n_qubits_ - 1 - qubit);
  const cplx u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
  for (uint64_t base = 0; base < dim(); base += 2 * m) {
    for (uint64_t off = 0; off < m; ++off) {
      const uint64_t i0 = base + off;
      const uint64_t i1 = i0 + m;
      const cplx a0 = amps_[i0];
      const cplx a1 = amps_[i1];
      amps_[i0] = u00 * a0 + u01 * a1;
      amps_[i1] = u10 * a0 + u11 * a1;
    }
  }
}

void PureState::apply_2q(const Eigen::Matrix4cd& u, int q_hi, int q_lo) {
  check_qubit(q_hi);
  check_qubit(q_lo);
  if (q_hi == q_lo) throw std::invalid_argument("apply_2q: qubits must differ");
  const uint64_t mh = uint64_t{1} << (n_qubits_ - 1 - q_hi);
  const uint64_t ml = uint64_t{1} << (n_qubits_ - 1 - q_lo);
  for (uint64_t i = 0; i < dim(); ++i) {
    if (i & (mh | ml)) continue;
    const uint64_t idx[4] = {i, i | ml, i | mh, i | mh | ml};
    cplx in[4], out[4];
    for (int k = 0; k < 4; ++k) in[k] = amps_[idx[k]];
    for (int r = 0; r < 4; ++r) {
      out[r] = u(r, 0) * in[0] + u(r, 1) * in[1] + u(r, 2) * in[2] + u(r, 3) * in[3];
    }
    for (int k = 0; k < 4; ++k) amps_[idx[k]] = out[k];
  }
}

void PureState::apply_x(int qubit) {
  check_qubit(qubit);
  const uint64_t m = uint64_t{1} << (n_qubits_ - 1 - qubit);
  for (uint64_t base = 0; base < dim(); base += 2 * m)
    for (uint64_t off = 0; off < m; ++off)
      std::swap(amps_[base + off], amps_[base + off + m]);
}

void PureState::apply_y(int qubit) {
  check_qubit(qubit);
  const uint64_t m = uint64_t{1} << (n_qubits_ - 1 - qubit);
  const cplx i_unit{0.0, 1.0};
  for (uint64_t base = 0; base < dim(); base += 2 * m) {
    for (uint64_t off = 0; off < m; ++off) {
      const uint64_t i0 = base + off;
      const uint64_t i1 = i0 + m;
      const cplx a0 = amps_[i0];
      amps_[i0] = -i_unit * amps_[i1];
      amps_[i1] = i_unit * a0;
    }
  }
}

void PureState::apply_z(int qubit) {
  check_qubit(qubit);
  const uint64_t m = uint64_t{1} << (n_qubits_ - 1 - qubit);
  for (uint64_t i = 0; i < dim(); ++i)
    if (i & m) amps_[i] = -amps_[i];
}

void PureState::apply_h(int qubit) {
  check_qubit(qubit);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const uint64_t m = uint64_t{1} << (n_qubits_ - 1 - qubit);
  for (uint64_t base = 0; base < dim(); base += 2 * m) {
    for (uint64_t off = 0; off < m; ++off) {
      const uint64_t i0 = base + off;
      const uint64_t i1 = i0 + m;
      const cplx a0 = amps_[i0];
      const cplx a1 = amps_[i1];
      amps_[i0] = inv_sqrt2 * (a0 + a1);
      amps_[i1] = inv_sqrt2 * (a0 - a1);
    }
  }
}

void PureState::apply_cnot(int control, int target) {
  check_qubit(control);
  check_qubit(target);
  if (control == target) throw std::invalid_argument("apply_cnot: qubits must differ");
  const uint64_t mc = uint64_t{1} << (n_qubits_ - 1 - control);
  const uint64_t mt = uint64_t{1} << (n_qubits_ - 1 - target);
  for (uint64_t i = 0; i < dim(); ++i)
    if ((i & mc) && !(i & mt)) std::swap(amps_[i], amps_[i | mt]);
}

void PureState::apply_cz(int q0, int q1) {
  check_qubit(q0);
  check_qubit(q1);
  if (q0 == q1) throw std::invalid_argument("apply_cz: qubits must differ");
  const uint64_t m0 = uint64_t{1} << (n_qubits_ - 1 - q0);
  const uint64_t m1 = uint64_t{1} << (n_qubits_ - 1 - q1);
  for (uint64_t i = 0; i < dim(); ++i)
    if ((i & m0) && (i & m1)) amps_[i] = -amps_[i];
}

void PureState::apply_swap(int q0, int q1) {
  check_qubit(q0);
  check_qubit(q1);
  if (q0 == q1) throw std::invalid_argument("apply_swap: qubits must differ");
  const uint64_t m0 = uint64_t{1} << (n_qubits_ - 1 - q0);
  const uint64_t m1 = uint64_t{1} << (n_qubits_ - 1 - q1);
  for (uint64_t i = 0; i < dim(); ++i)
    if ((i & m0) && !(i & m1)) std::swap(amps_[i], amps_[(i ^ m0) | m1]);
}

void PureState::apply_zz_phase(double alpha, int q0, int q1) {
  check_qubit(q0);
  check_qubit(q1);
  const uint64_t m0 = uint64_t{1} << (n_qubits_ - 1 - q0);
  const uint64_t m1 = uint64_t{1} << (n_qubits_ - 1 - q1);
  const cplx phase_eq = std::exp(cplx{0.0, -alpha});
  const cplx phase_ne = std::exp(cplx{0.0, alpha});
  for (uint64_t i = 0; i < dim(); ++i) {
    const bool b0 = (i & m0) != 0;
    const bool b1 = (i & m1) != 0;
    amps_[i] *= (b0 == b1) ? phase_eq : phase_ne;
  }
}

int PureState::append_qubit() {
  if (n_qubits_ + 1 > kMaxPureQubits)
    throw std::runtime_error("append_qubit: register too large");
  const uint64_t old_dim = dim();
  amps_.resize(old_dim * 2);
  for (uint64_t i = old_dim; i-- > 0;) {
    amps_[2 * i] = amps_[i];
    amps_[2 * i + 1] = 0.0;
  }
  return n_qubits_++;
}

double PureState::prob_last_one() const {
  double p1 = 0.0;
  for (uint64_t i = 1; i < dim(); i += 2) p1 += std::norm(amps_[i]);
  return p1;
}

bool PureState::measure_remove_last(Rng& rng) {
  const bool outcome = rng.uniform() < prob_last_one();
  project_remove_last(outcome);
  return outcome;
}

double PureState::project_remove_last(bool outcome) {
  if (n_qubits_ < 2) throw std::runtime_error("project_remove_last: register too small");
  const uint64_t off = outcome ? 1 : 0;
  double p = 0.0;
  const uint64_t half = dim() / 2;
  for (uint64_t i = 0; i < half; ++i) p += std::norm(amps_[2 * i + off]);
  if (p > 0.0) {
    const double inv = 1.0 / std::sqrt(p);
    for (uint64_t i = 0; i < half; ++i) amps_[i] = amps_[2 * i + off] * inv;
  } else {
    for (uint64_t i = 0; i < half; ++i) amps_[i] = 0.0;
  }
  amps_.resize(half);
  --n_qubits_;
  return p;
}

double PureState::prob_of_one(int qubit) const {
  check_qubit(qubit);
  const uint64_t m = uint64_t{1} << (n_qubits_ - 1 - qubit);
  double p = 0.0;
  for (uint64_t i = 0; i < dim(); ++i)
    if (i & m) p += std::norm(amps_[i]);
  return p;
}

double PureState::z_expectation(int qubit) const {
  return 1.0 - 2.0 * prob_of_one(qubit);
}

std::vector<double> PureState::marginal_probabilities(std::span<const int> qubits) const {
  for (int q : qubits) check_qubit(q);
  if (qubits.size() > 20) throw std::invalid_argument("marginal: subset too large");
  std::vector<double> out(uint64_t{1} << qubits.size(), 0.0);
  for (uint64_t i = 0; i < dim(); ++i) {
    const double w = std::norm(amps_[i]);
    if (w == 0.0) continue;
    uint64_t key = 0;
    for (int q : qubits) key = (key << 1) | bit_of(i, q, n_qubits_);
    out[key] += w;
  }
  return out;
}

uint64_t PureState::sample_bitstring(Rng& rng) const {
  const double u = rng.uniform() * norm_sq();
  double acc = 0.0;
  for (uint64_t i = 0; i < dim(); ++i) {
    acc += std::norm(amps_[i]);
    if (u < acc) return i;
  }
  return dim() - 1;
}

//// DensityMatrix

DensityMatrix::DensityMatrix(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxDensityQubits)
    throw std::invalid_argument("DensityMatrix: qubit count out of range");
  rho_ = Mat::Zero(dim(), dim());
  rho_(0, 0) = 1.0;
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  DensityMatrix rho(psi.n_qubits());
  const auto amps = psi.amplitudes();
  const auto d = psi.dim();
  for (uint64_t c = 0; c < d; ++c)
    for (uint64_t r = 0; r < d; ++r)
      rho.rho_(r, c) = amps[r] * std::conj(amps[c]);
  return rho;
}

void DensityMatrix::check_qubit(int qubit) const {
  if (qubit < 0 || qubit >= n_qubits_)
    throw std::out_of_range("DensityMatrix: qubit index out of range");
}

double DensityMatrix::trace_real() const { return rho_.trace().real(); }

void DensityMatrix::normalize_trace() {
  const double t = trace_real();
  if (t <= 0.0) throw std::runtime_error("DensityMatrix: non-positive trace");
  rho_ /= t;
}

void DensityMatrix::left_mul_1q(const Eigen::Matrix2cd& a, int qubit) {
  const uint64_t m = uint64_t{1} << (n_qubits_ - 1 - qubit);
  const uint64_t d = dim();
  for (uint64_t c = 0; c < d; ++c) {
    for (uint64_t base = 0; base < d; base += 2 * m) {
      for (uint64_t off = 0; off < m; ++off) {
        const uint64_t r0 = base + off;
        const uint64_t r1 = r0 + m;
        const cplx v0 = rho_(r0, c);
        const cplx v1 = rho_(r1, c);
        rho_(r0, c) = a(0, 0) * v0 + a(0, 1) * v1;
        rho_(r1, c) = a(1, 0) * v0 + a(1, 1) * v1;
      }
    }
  }
}

void DensityMatrix::right_mul_1q(const Eigen::Matrix2cd& b, int qubit) {
  const uint64_t m = uint64_t{1} << (n_qubits_ - 1 - qubit);
  const uint64_t d = dim();
  for (uint64_t base = 0; base < d; base += 2 * m) {
    for (uint64_t off = 0; off < m; ++off) {
      const uint64_t c0 = base + off;
      const uint64_t c1 = c0 + m;
      for (uint64_t r = 0; r < d; ++r) {
        const cplx v0 = rho_(r, c0);
        const cplx v1 = rho_(r, c1);
        rho_(r, c0) = v0 * b(0, 0) + v1 * b(1, 0);
        rho_(r, c1) = v0 * b(0, 1) + v1 * b(1, 1);
      }
    }
  }
}

void DensityMatrix::apply_1q(const Eigen::Matrix2cd& u, int qubit) {
  check_qubit(qubit);
  left_mul_1q(u, qubit);
  right_mul_1q(u.adjoint(), qubit);
}

void DensityMatrix::left_mul_2q(const Eigen::Matrix4cd& a, int q_hi, int q_lo) {
  const uint64_t mh = uint64_t{1} << (n_qubits_ - 1 - q_hi);
  const uint64_t ml = uint64_t{1} << (n_qubits_ - 1 - q_lo);
  const uint64_t d = dim();
  for (uint64_t c = 0; c < d; ++c) {
    for (uint64_t r = 0; r < d; ++r) {
      if (r & (mh | ml)) continue;
      const uint64_t idx[4] = {r, r | ml, r | mh, r | mh | ml};
      cplx in[4];
      for (int k = 0; k < 4; ++k) in[k] = rho_(idx[k], c);
      for (int i = 0; i < 4; ++i) {
        rho_(idx[i], c) =
            a(i, 0) * in[0] + a(i, 1) * in[1] + a(i, 2) * in[2] + a(i, 3) * in[3];
      }
    }
  }
}

void DensityMatrix::right_mul_2q(const Eigen::Matrix4cd& b, int q_hi, int q_lo) {
  const uint64_t mh = uint64_t{1} << (n_qubits_ - 1 - q_hi);
  const uint64_t ml = uint64_t{1} << (n_qubits_ - 1 - q_lo);
  const uint64_t d = dim();
  for (uint64_t c = 0; c < d; ++c) {
    if (c & (mh | ml)) continue;
    const uint64_t idx[4] = {c, c | ml, c | mh, c | mh | ml};
    for (uint64_t r = 0; r < d; ++r) {
      cplx in[4];
      for (int k = 0; k < 4; ++k) in[k] = rho_(r, idx[k]);
      for (int j = 0; j < 4; ++j) {
        rho_(r, idx[j]) =
            in[0] * b(0, j) + in[1] * b(1, j) + in[2] * b(2, j) + in[3] * b(3, j);
      }
    }
  }
}

void DensityMatrix::apply_2q(const Eigen::Matrix4cd& u, int q_hi, int q_lo) {
  check_qubit(q_hi);
  check_qubit(q_lo);
  if (q_hi == q_lo) throw std::invalid_argument("apply_2q: qubits must differ");
  left_mul_2q(u, q_hi, q_lo);
  right_mul_2q(u.adjoint(), q_hi, q_lo);
}

void DensityMatrix::apply_cnot(int control, int target) {
  if (control < target) {
    Eigen::Matrix4cd u = Eigen::Matrix4cd::Zero();
    u(0, 0) = u(1, 1) = u(2, 3) = u(3, 2) = 1.0;
    apply_2q(u, control, target);
  } else {
    // Ordered pair is (target, control); the flip acts on the high label.
    Eigen::Matrix4cd u = Eigen::Matrix4cd::Zero();
    u(0, 0) = u(2, 2) = u(1, 3) = u(3, 1) = 1.0;
    apply_2q(u, target, control);
  }
}

void DensityMatrix::apply_cz(int q0, int q1) {
  Eigen::Matrix4cd u = Eigen::Matrix4cd::Identity();
  u(3, 3) = -1.0;
  apply_2q(u, std::min(q0, q1), std::max(q0, q1));
}

void DensityMatrix::apply_kraus_1q(std::span<const Eigen::Matrix2cd> kraus, int qubit) {
  check_qubit(qubit);
  Mat acc = Mat::Zero(dim(), dim());
  const Mat original = rho_;
  for (const auto& k : kraus) {
    rho_ = original;
    left_mul_1q(k, qubit);
    right_mul_1q(k.adjoint(), qubit);
    acc += rho_;
  }
  rho_ = std::move(acc);
}

void DensityMatrix::apply_kraus_2q(std::span<const Eigen::Matrix4cd> kraus, int q_hi,
                                   int q_lo) {
  check_qubit(q_hi);
  check_qubit(q_lo);
  Mat acc = Mat::Zero(dim(), dim());
  const Mat original = rho_;
  for (const auto& k : kraus) {
    rho_ = original;
    left_mul_2q(k, q_hi, q_lo);
    right_mul_2q(k.adjoint(), q_hi, q_lo);
    acc += rho_;
  }
  rho_ = std::move(acc);
}

double DensityMatrix::z_expectation(int qubit) const {
  check_qubit(qubit);
  const uint64_t m = uint64_t{1} << (n_qubits_ - 1 - qubit);
  double e = 0.0;
  for (uint64_t i = 0; i < dim(); ++i)
    e += ((i & m) ? -1.0 : 1.0) * rho_(i, i).real();
  return e;
}

std::vector<double> DensityMatrix::diagonal_probabilities() const {
  std::vector<double> p(dim());
  for (uint64_t i = 0; i < dim(); ++i) p[i] = std::max(0.0, rho_(i, i).real());
  return p;
}

uint64_t DensityMatrix::sample_bitstring(Rng& rng) const {
  const auto p = diagonal_probabilities();
  double total = 0.0;
  for (double v : p) total += v;
  const double u = rng.uniform() * total;
  double acc = 0.0;
  for (uint64_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return i;
  }
  return p.size() - 1;
}

}  // namespace qecml
