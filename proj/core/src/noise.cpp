#include "qecml/noise.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qecml/gates.h"

namespace qecml {

double effective_gate_error(double p_depol) {
  if (p_depol < 0.0 || p_depol > 0.75)
    throw std::invalid_argument("effective_gate_error: p must be in [0, 0.75]");
  // (1 - (1 - 4p/3)^2) / 4 expanded to avoid cancellation at small p.
  const double q = 4.0 * p_depol / 3.0;
  return q * (2.0 - q) / 4.0;
}

double depol_from_gate_error(double r) {
  if (r < 0.0 || r >= 0.25)
    throw std::invalid_argument("depol_from_gate_error: r must be in [0, 0.25)");
  // 0.75 * (1 - sqrt(1 - 4r)) rewritten to avoid cancellation at small r.
  return 3.0 * r / (1.0 + std::sqrt(1.0 - 4.0 * r));
}

double t_count_per_rotation(double eps, TScaling scaling) {
  if (eps <= 0.0 || eps >= 1.0)
    throw std::invalid_argument("t_count_per_rotation: eps must be in (0, 1)");
  const double factor = scaling == TScaling::kClassic ? 1.5 : 1.0;
  return factor * std::log2(1.0 / eps);
}

double gate_error_from_t_error(double eps_t, double eps, TScaling scaling) {
  if (eps_t < 0.0 || eps_t >= 1.0)
    throw std::invalid_argument("gate_error_from_t_error: eps_t must be in [0, 1)");
  const double n_t = t_count_per_rotation(eps, scaling);
  return 1.0 - std::pow(1.0 - eps_t, n_t);
}

void PauliInjectionSpec::check_valid() const {
  if (rate < 0.0 || rate > 1.0)
    throw std::invalid_argument("PauliInjectionSpec: rate must be in [0, 1]");
  if (rate * two_qubit_multiplier > 1.0)
    throw std::invalid_argument(
        "PauliInjectionSpec: rate * two_qubit_multiplier exceeds 1");
  if (f_anc < 0.0 || f_anc > 1.0)
    throw std::invalid_argument("PauliInjectionSpec: f_anc must be in [0, 1]");
  if (model == NoiseModel::kEnvironmental && cadence_gates < 1)
    throw std::invalid_argument("PauliInjectionSpec: cadence must be >= 1");
}

std::vector<InjectionEvent> sample_injections(std::span<const InjectionSite> sites,
                                              Rng& rng) {
  std::vector<InjectionEvent> events;
  for (const auto& site : sites) {
    if (site.rate <= 0.0) continue;
    if (rng.uniform() < site.rate) {
      const int pauli = 1 + static_cast<int>(rng.uniform_below(3));
      events.push_back(InjectionEvent{site.position, site.qubit, pauli});
    }
  }
  return events;
}

std::vector<InjectionEvent> inject_pauli_noise(PureState& psi,
                                               std::span<const InjectionSite> sites,
                                               Rng& rng) {
  auto events = sample_injections(sites, rng);
  for (const auto& e : events) {
    switch (e.pauli) {
      case 1: psi.apply_x(e.qubit); break;
      case 2: psi.apply_y(e.qubit); break;
      case 3: psi.apply_z(e.qubit); break;
      default: throw std::logic_error("inject_pauli_noise: bad Pauli index");
    }
  }
  return events;
}

KrausChannel crosstalk_channel(const CrosstalkSpec& spec) {
  return unitary_channel(gates::zz_rotation(spec.alpha));
}

ComposedGateNoise two_qubit_gate_noise(double p_depol, const CrosstalkSpec& crosstalk,
                                       int q1, int q2, int n_qubits) {
  if (q1 >= q2) throw std::invalid_argument("two_qubit_gate_noise: require q1 < q2");
  if (q1 < 0 || q2 >= n_qubits)
    throw std::invalid_argument("two_qubit_gate_noise: gate qubits out of range");
  if (std::abs(crosstalk.alpha) >= std::numbers::pi / 2)
    throw std::invalid_argument(
        "two_qubit_gate_noise: |alpha| must be below pi/2 for the log composition");

  std::vector<int> support;
  if (q1 - 1 >= 0) support.push_back(q1 - 1);
  support.push_back(q1);
  support.push_back(q2);
  if (q2 + 1 < n_qubits) support.push_back(q2 + 1);
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  const int k = static_cast<int>(support.size());
  const auto local = [&](int qubit) {
    const auto it = std::find(support.begin(), support.end(), qubit);
    return static_cast<int>(it - support.begin());
  };

  const Eigen::Index dim2 = (Eigen::Index{1} << k) * (Eigen::Index{1} << k);
  Mat generator = Mat::Zero(dim2, dim2);
  const auto add_log_term = [&](const KrausChannel& ch, std::span<const int> targets) {
    KrausChannel embedded;
    embedded.n_qubits = k;
    for (const auto& op : ch.ops)
      embedded.ops.push_back(gates::embed(op, targets, k));
    generator += log_superoperator(channel_to_superoperator(embedded)).m;
  };

  const KrausChannel depol = depolarizing_channel(p_depol);
  {
    const int t[1] = {local(q1)};
    add_log_term(depol, t);
  }
  {
    const int t[1] = {local(q2)};
    add_log_term(depol, t);
  }
  if (crosstalk.alpha != 0.0) {
    const KrausChannel zz = crosstalk_channel(crosstalk);
    if (q1 - 1 >= 0) {
      const int t[2] = {local(q1 - 1), local(q1)};
      add_log_term(zz, t);
    }
    if (q2 + 1 < n_qubits) {
      const int t[2] = {local(q2), local(q2 + 1)};
      add_log_term(zz, t);
    }
  }

  SuperOperatorMatrix lindblad{k, std::move(generator)};
  return ComposedGateNoise{exp_lindbladian(lindblad, 1.0), std::move(support)};
}

}  // namespace qecml
