#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dsq/hilbert.hpp"
#include "dsq/models.hpp"
#include "dsq/solver.hpp"

using namespace dsq;

namespace {

double dense_ground_energy(const SparseOperator& h) {
  Eigen::MatrixXcd m = h.to_dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()[0];
}

// Entry set after swapping the roles of the two factors (valid for equal
// factor dimensions).
std::vector<CooEntry> swapped_entries(const SparseOperator& op) {
  const std::int64_t d = factor_dim(op.space().factor(1));
  std::vector<CooEntry> out;
  for (const auto& e : op.entries()) {
    out.push_back({(e.row % d) * d + e.row / d, (e.col % d) * d + e.col / d, e.val});
  }
  std::sort(out.begin(), out.end(), [](const CooEntry& a, const CooEntry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  return out;
}

}  // namespace

TEST_CASE("model params derive the critical coupling and ratio") {
  const auto p = ModelParams::from_ratio(1.0, 4.0, 0.5, 3, 8);
  CHECK(p.critical_coupling() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(p.g == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p.coupling_ratio() == doctest::Approx(0.5).epsilon(1e-15));

  CHECK_THROWS_AS(ModelParams::from_ratio(-1.0, 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams::from_ratio(1.0, 0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams::from_ratio(1.0, 1.0, -0.1), std::invalid_argument);
}

TEST_CASE("decoupled Dicke model is diagonal n + m") {
  const auto params = ModelParams::from_ratio(1.0, 1.0, 0.0, 2, 2);
  const SparseOperator h = dicke_hamiltonian(params);
  const SpaceSpec& s = h.space();
  const Eigen::MatrixXcd dense = h.to_dense();
  for (int n = 0; n <= 2; ++n) {
    for (int i = 0; i <= 2; ++i) {
      const double m = i - 1.0;  // j = 1
      const std::int64_t flat = s.flat_index({n, i});
      CHECK(dense(flat, flat).real() == doctest::Approx(n + m).epsilon(1e-15));
    }
  }
  CHECK((dense - Eigen::MatrixXcd(dense.diagonal().asDiagonal())).cwiseAbs().maxCoeff() ==
        0.0);
}

TEST_CASE("Dicke coupling matrix element at g = g_c, one spin") {
  const auto params = ModelParams::from_ratio(1.0, 1.0, 1.0, 1, 2);
  const SparseOperator h = dicke_hamiltonian(params);
  const SpaceSpec& s = h.space();
  const Eigen::MatrixXcd dense = h.to_dense();
  const std::int64_t ground = s.flat_index({0, 0});   // |0, -1/2>
  const std::int64_t excited = s.flat_index({1, 1});  // |1, +1/2>
  CHECK(dense(excited, ground).real() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(dense(ground, excited).real() == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("Dicke cutoff must be resolved") {
  ModelParams p = ModelParams::from_ratio(1.0, 1.0, 0.5, 2);
  CHECK(!p.fock_cutoff.has_value());
  CHECK_THROWS_AS(dicke_hamiltonian(p), std::invalid_argument);
  CHECK_THROWS_AS(rabi_hamiltonian(p), std::invalid_argument);
}

TEST_CASE("decoupled two-oscillator model is diagonal") {
  const auto params = ModelParams::from_ratio(1.0, 2.0, 0.0);
  const SparseOperator h = hp_hamiltonian(params, 3, 3);
  const Eigen::MatrixXcd dense = h.to_dense();
  for (int na = 0; na <= 3; ++na) {
    for (int nb = 0; nb <= 3; ++nb) {
      CHECK(dense(na * 4 + nb, na * 4 + nb).real() ==
            doctest::Approx(na + 2.0 * nb).epsilon(1e-15));
    }
  }
}

TEST_CASE("two-oscillator ground energy matches the diagonal-form value") {
  const auto params = ModelParams::from_ratio(1.0, 1.0, 0.5);
  const SparseOperator h = hp_hamiltonian(params, 60, 60);
  const SpectrumResult res = ground_state(h);
  // (sqrt(0.5) + sqrt(1.5))/2 - 1, from the normal-mode frequencies
  CHECK(std::abs(res.energies[0] - (-0.0340741737109317)) < 1e-8);
}

TEST_CASE("two-oscillator virtual occupation near criticality") {
  const auto params = ModelParams::from_ratio(1.0, 1.0, 0.99);
  SolveConfig cfg;
  cfg.max_lanczos_iters = 3000;
  const SparseOperator h = hp_hamiltonian(params, 128, 128);
  const SpectrumResult res = ground_state(h, cfg);
  const double total = slot_number_expectation(res.states[0], 0) +
                       slot_number_expectation(res.states[0], 1);
  CHECK(std::abs(total - 2.05488870074373) < 1e-3);
}

TEST_CASE("resonant two-oscillator model is mode-swap invariant") {
  const auto params = ModelParams::from_ratio(1.0, 1.0, 0.7);
  const SparseOperator h = hp_hamiltonian(params, 10, 10);
  const auto swapped = swapped_entries(h);
  REQUIRE(swapped.size() == h.entries().size());
  for (std::size_t i = 0; i < swapped.size(); ++i) {
    CHECK(swapped[i].row == h.entries()[i].row);
    CHECK(swapped[i].col == h.entries()[i].col);
    CHECK(swapped[i].val == h.entries()[i].val);
  }

  // off resonance the entry set changes
  const auto off = ModelParams::from_ratio(1.0, 2.0, 0.7);
  const SparseOperator h2 = hp_hamiltonian(off, 10, 10);
  const auto swapped2 = swapped_entries(h2);
  bool any_diff = false;
  for (std::size_t i = 0; i < swapped2.size() && !any_diff; ++i) {
    any_diff = swapped2[i].val != h2.entries()[i].val ||
               swapped2[i].row != h2.entries()[i].row;
  }
  CHECK(any_diff);
}

TEST_CASE("decoupled Rabi model is diagonal n omega +- Omega/2") {
  const auto params = ModelParams::from_ratio(1.0, 3.0, 0.0, 1, 3);
  const SparseOperator h = rabi_hamiltonian(params);
  const Eigen::MatrixXcd dense = h.to_dense();
  for (int n = 0; n <= 3; ++n) {
    CHECK(dense(n * 2 + 0, n * 2 + 0).real() == doctest::Approx(n - 1.5).epsilon(1e-15));
    CHECK(dense(n * 2 + 1, n * 2 + 1).real() == doctest::Approx(n + 1.5).epsilon(1e-15));
  }
}

TEST_CASE("Rabi ground state matches the low-frequency closed form within 10%") {
  const auto params = ModelParams::from_ratio(1e-4, 1.0, 0.8, 1, 96);
  const SparseOperator h = rabi_hamiltonian(params);
  const SpectrumResult res = ground_state(h);
  const double n_a = slot_number_expectation(res.states[0], 0);
  const double closed_form = 1.0 / 15.0;  // sinh^2( ln(0.36)/4 )
  CHECK(std::abs(n_a - closed_form) < 0.1 * closed_form);
}

TEST_CASE("Rabi ground states have definite parity") {
  for (double ratio : {0.0, 0.3, 0.8, 0.95}) {
    const auto params = ModelParams::from_ratio(0.5, 1.0, ratio, 1, 40);
    const SparseOperator h = rabi_hamiltonian(params);
    const SpectrumResult res = ground_state(h);
    const SparseOperator pi = parity_op(h.space());
    const Eigen::VectorXcd pv = pi.csr().apply(res.states[0].amplitudes());
    const double expect = res.states[0].amplitudes().dot(pv).real();
    CHECK(std::abs(std::abs(expect) - 1.0) < 1e-10);
  }
}

TEST_CASE("effective oscillator reproduces the squeezed-mode closed forms") {
  const auto params0 = ModelParams::from_ratio(1.0, 1000.0, 0.0);
  const SparseOperator h0 = effective_oscillator_hamiltonian(params0, 8);
  const Eigen::MatrixXcd dense0 = h0.to_dense();
  for (int n = 0; n <= 8; ++n) {
    CHECK(dense0(n, n).real() == doctest::Approx(n).epsilon(1e-15));
  }

  const auto params = ModelParams::from_ratio(1.0, 1000.0, 0.9);
  const SparseOperator h = effective_oscillator_hamiltonian(params, 200);
  const SpectrumResult res = low_spectrum(h, 2);
  CHECK(std::abs(res.energies[1] - res.energies[0] - 0.435889894354067) < 1e-6);
  CHECK(std::abs(slot_number_expectation(res.states[0], 0) - 0.182511808264921) < 1e-6);
}

TEST_CASE("every built Hamiltonian is bitwise hermitian") {
  const auto dicke = dicke_hamiltonian(ModelParams::from_ratio(1.0, 2.0, 0.8, 4, 10));
  const auto hp = hp_hamiltonian(ModelParams::from_ratio(1.0, 2.0, 0.8), 12, 9);
  const auto rabi = rabi_hamiltonian(ModelParams::from_ratio(1.0, 2.0, 0.8, 1, 10));
  const auto eff = effective_oscillator_hamiltonian(ModelParams::from_ratio(1.0, 2.0, 0.8), 10);
  CHECK(dicke.hermiticity_violation() == 0.0);
  CHECK(hp.hermiticity_violation() == 0.0);
  CHECK(rabi.hermiticity_violation() == 0.0);
  CHECK(eff.hermiticity_violation() == 0.0);
  CHECK(dicke.hermitian());
  CHECK(hp.hermitian());
}

TEST_CASE("Dicke and Rabi Hamiltonians never connect opposite parity sectors") {
  const auto models = {
      dicke_hamiltonian(ModelParams::from_ratio(1.0, 1.0, 0.9, 5, 8)),
      rabi_hamiltonian(ModelParams::from_ratio(1.0, 1.0, 0.9, 1, 8)),
  };
  for (const auto& h : models) {
    const std::int64_t spin_dim = factor_dim(h.space().factor(1));
    for (const auto& e : h.entries()) {
      const auto parity = [&](std::int64_t flat) {
        return (flat / spin_dim + flat % spin_dim) % 2;
      };
      CHECK(parity(e.row) == parity(e.col));
    }
  }
}

TEST_CASE("ground energy is non-increasing in the coupling") {
  auto check_monotone = [](auto build) {
    double prev = std::numeric_limits<double>::infinity();
    for (double ratio : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
      const double e0 = dense_ground_energy(build(ratio));
      CHECK(e0 <= prev + 1e-12);
      prev = e0;
    }
  };
  check_monotone([](double r) {
    return dicke_hamiltonian(ModelParams::from_ratio(1.0, 1.0, r, 3, 16));
  });
  check_monotone([](double r) {
    return hp_hamiltonian(ModelParams::from_ratio(1.0, 1.0, r), 14, 14);
  });
  check_monotone([](double r) {
    return rabi_hamiltonian(ModelParams::from_ratio(1.0, 1.0, r, 1, 16));
  });
  check_monotone([](double r) {
    return effective_oscillator_hamiltonian(ModelParams::from_ratio(1.0, 1.0, r), 16);
  });
}

TEST_CASE("Dicke ground energy matches an independent dense diagonalization") {
  const auto params = ModelParams::from_ratio(1.0, 1.0, 0.5, 8, 32);
  const SparseOperator h = dicke_hamiltonian(params);
  const double dense_e0 = dense_ground_energy(h);
  const SpectrumResult res = ground_state(h);
  CHECK(std::abs(res.energies[0] - dense_e0) < 1e-9);
}
