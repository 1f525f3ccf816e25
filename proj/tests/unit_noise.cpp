#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "qecml/channel.h"
#include "qecml/circuit.h"
#include "qecml/gates.h"
#include "qecml/noise.h"
#include "qecml/rng.h"
#include "test_support.h"

using namespace qecml;
using testsupport::max_abs_diff;
using testsupport::random_density;

TEST_CASE("depolarizing strength maps to benchmarking gate error") {
  CHECK(effective_gate_error(0.0) == 0.0);
  CHECK(effective_gate_error(0.75) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(effective_gate_error(2.99e-3) == doctest::Approx(1.99e-3).epsilon(0.005));
  CHECK(effective_gate_error(1.99e-3) == doctest::Approx(1.33e-3).epsilon(0.005));

  double last = -1.0;
  for (int i = 0; i <= 100; ++i) {
    const double p = 0.75 * i / 100.0;
    const double r = effective_gate_error(p);
    CHECK(r > last);
    last = r;
  }
}

TEST_CASE("gate-error bridge inverts exactly inside its domain") {
  for (const double p : {1e-5, 1e-3, 0.1, 0.5, 0.74}) {
    const double r = effective_gate_error(p);
    CHECK(depol_from_gate_error(r) == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK_THROWS_AS(depol_from_gate_error(0.25), std::invalid_argument);
  CHECK_THROWS_AS(depol_from_gate_error(-1e-12), std::invalid_argument);
}

TEST_CASE("synthesized rotation error matches the anchors") {
  CHECK(gate_error_from_t_error(1e-4, 1e-4, TScaling::kClassic) ==
        doctest::Approx(1.99e-3).epsilon(0.01));
  CHECK(gate_error_from_t_error(1e-4, 1e-4, TScaling::kImproved) ==
        doctest::Approx(1.33e-3).epsilon(0.01));
  CHECK(gate_error_from_t_error(0.0, 1e-4, TScaling::kClassic) == 0.0);

  const double improved = t_count_per_rotation(1e-4, TScaling::kImproved);
  const double classic = t_count_per_rotation(1e-4, TScaling::kClassic);
  CHECK(improved == doctest::Approx(std::log2(1e4)).epsilon(1e-12));
  CHECK(classic == doctest::Approx(1.5 * improved).epsilon(1e-12));
}

TEST_CASE("injection spec validation rejects bad fields") {
  PauliInjectionSpec spec;
  spec.rate = 0.01;
  CHECK_NOTHROW(spec.check_valid());
  spec.rate = -0.1;
  CHECK_THROWS_AS(spec.check_valid(), std::invalid_argument);
  spec.rate = 0.01;
  spec.f_anc = -1.0;
  CHECK_THROWS_AS(spec.check_valid(), std::invalid_argument);
  spec.f_anc = 1.0;
  spec.cadence_gates = 0;
  CHECK_THROWS_AS(spec.check_valid(), std::invalid_argument);
}

TEST_CASE("injection sampling is seed deterministic with binomial counts") {
  std::vector<InjectionSite> sites;
  for (int i = 0; i < 40; ++i) sites.push_back({i, i % 4, 0.5});

  Rng a(77), b(77);
  const auto ea = sample_injections(sites, a);
  const auto eb = sample_injections(sites, b);
  REQUIRE(ea.size() == eb.size());
  for (size_t i = 0; i < ea.size(); ++i) {
    CHECK(ea[i].position == eb[i].position);
    CHECK(ea[i].qubit == eb[i].qubit);
    CHECK(ea[i].pauli == eb[i].pauli);
  }

  // Mean fault count over trials ~ Binomial(40, 0.5); Paulis near uniform.
  Rng rng(78);
  long total = 0;
  long pauli_counts[4] = {0, 0, 0, 0};
  const int trials = 2000;
  for (int t = 0; t < trials; ++t) {
    const auto events = sample_injections(sites, rng);
    total += static_cast<long>(events.size());
    for (const auto& e : events) {
      REQUIRE(e.pauli >= 1);
      REQUIRE(e.pauli <= 3);
      ++pauli_counts[e.pauli];
    }
  }
  const double mean_faults = static_cast<double>(total) / trials;
  CHECK(std::abs(mean_faults - 20.0) < 4.0 * std::sqrt(10.0 / trials));
  for (int p = 1; p <= 3; ++p) {
    const double frac = static_cast<double>(pauli_counts[p]) / total;
    CHECK(std::abs(frac - 1.0 / 3.0) < 0.02);
  }
}

TEST_CASE("immediate injection reproduces its event log") {
  std::vector<InjectionSite> sites;
  for (int i = 0; i < 6; ++i) sites.push_back({i, i % 3, 0.7});
  Rng a(80), b(80);
  PureState psi(3);
  psi.apply_h(0);
  psi.apply_cnot(0, 1);
  PureState replay = psi;

  const auto events = inject_pauli_noise(psi, sites, a);
  const auto events_b = inject_pauli_noise(replay, sites, b);
  REQUIRE(events.size() == events_b.size());
  for (uint64_t i = 0; i < psi.dim(); ++i)
    CHECK(std::abs(psi[i] - replay[i]) < 1e-15);

  // Applying the logged Paulis by hand reproduces the same state.
  PureState manual(3);
  manual.apply_h(0);
  manual.apply_cnot(0, 1);
  for (const auto& e : events) {
    if (e.pauli == 1) manual.apply_x(e.qubit);
    if (e.pauli == 2) manual.apply_y(e.qubit);
    if (e.pauli == 3) manual.apply_z(e.qubit);
  }
  for (uint64_t i = 0; i < psi.dim(); ++i)
    CHECK(std::abs(psi[i] - manual[i]) < 1e-15);
}

TEST_CASE("crosstalk channel is the zz rotation unitary") {
  const KrausChannel channel = crosstalk_channel({0.31});
  REQUIRE(channel.ops.size() == 1);
  CHECK(max_abs_diff(channel.ops[0], gates::zz_rotation(0.31)) < 1e-12);

  const KrausChannel quarter = crosstalk_channel({std::numbers::pi / 2});
  Mat expect = gates::zz_rotation(std::numbers::pi / 2);
  CHECK(max_abs_diff(expect, cplx(0.0, -1.0) *
                                 gates::kron(gates::z(), gates::z())) < 1e-12);
  CHECK(max_abs_diff(quarter.ops[0], expect) < 1e-12);
}

TEST_CASE("composite gate noise reduces to its parts") {
  // Depolarizing only: acts as independent single-qubit channels.
  {
    const auto composed = two_qubit_gate_noise(0.02, {0.0}, 1, 2, 4);
    REQUIRE(composed.support == std::vector<int>{1, 2});
    Rng rng(90);
    const Mat rho = random_density(rng, 4);
    const Mat via_composed = apply_superoperator(composed.superop, rho);

    DensityMatrix direct(2);
    direct.matrix() = rho;
    std::vector<Eigen::Matrix2cd> kraus;
    for (const Mat& k : depolarizing_channel(0.02).ops) kraus.push_back(k);
    direct.apply_kraus_1q(kraus, 0);
    direct.apply_kraus_1q(kraus, 1);
    CHECK(max_abs_diff(via_composed, direct.matrix()) < 1e-9);
  }

  // Crosstalk only, interior pair: support widens to both neighbours and the
  // commuting zz factors multiply.
  {
    const double alpha = 0.05;
    const auto composed = two_qubit_gate_noise(0.0, {alpha}, 1, 2, 4);
    REQUIRE(composed.support == std::vector<int>{0, 1, 2, 3});
    const Mat zz = gates::zz_rotation(alpha);
    const std::vector<int> left{0, 1}, right{2, 3};
    const Mat u = gates::embed(zz, left, 4) * gates::embed(zz, right, 4);
    const Mat expect = channel_to_superoperator(unitary_channel(u)).m;
    CHECK(max_abs_diff(composed.superop.m, expect) < 1e-9);
  }

  // Edge pairs drop the out-of-row terms.
  {
    const auto composed = two_qubit_gate_noise(0.0, {0.05}, 0, 1, 2);
    CHECK(composed.support == std::vector<int>{0, 1});
    const Mat expect =
        channel_to_superoperator(unitary_channel(gates::zz_rotation(0.05))).m;
    CHECK(max_abs_diff(composed.superop.m, expect) < 1e-9);
  }

  // Full composition: all factors commute, so exp(sum of logs) equals the
  // plain product of the component superoperators.
  {
    const double p = 0.01, alpha = 0.02;
    const auto composed = two_qubit_gate_noise(p, {alpha}, 1, 2, 4);
    REQUIRE(composed.support == std::vector<int>{0, 1, 2, 3});
    const auto embedded_depol = [&](int qubit) {
      KrausChannel big;
      big.n_qubits = 4;
      const std::vector<int> target{qubit};
      for (const Mat& k : depolarizing_channel(p).ops)
        big.ops.push_back(gates::embed(k, target, 4));
      return channel_to_superoperator(big).m;
    };
    const std::vector<int> left{0, 1}, right{2, 3};
    const Mat zz_left = channel_to_superoperator(
                            unitary_channel(gates::embed(gates::zz_rotation(alpha),
                                                         left, 4)))
                            .m;
    const Mat zz_right = channel_to_superoperator(
                             unitary_channel(gates::embed(gates::zz_rotation(alpha),
                                                          right, 4)))
                             .m;
    const Mat product = embedded_depol(1) * embedded_depol(2) * zz_left * zz_right;
    CHECK(max_abs_diff(composed.superop.m, product) < 1e-8);
  }
}
