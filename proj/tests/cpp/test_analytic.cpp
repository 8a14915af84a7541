#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dsq/analytic.hpp"
#include "dsq/errors.hpp"

using namespace dsq;

TEST_CASE("critical coupling in both conventions") {
  CHECK(critical_coupling(1.0, 1.0) == 1.0);
  CHECK(critical_coupling(1.0, 4.0) == 2.0);
  CHECK(critical_coupling(1.0, 1.0, 4) == 0.5);
  CHECK_THROWS_AS(critical_coupling(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(critical_coupling(1.0, -2.0), std::invalid_argument);
}

TEST_CASE("squeezing parameters closed form") {
  const auto [m0, p0] = squeezing_parameters(0.0);
  CHECK(m0 == 0.0);
  CHECK(p0 == 0.0);

  const auto [m, p] = squeezing_parameters(0.99);
  CHECK(std::abs(m - (-1.15129254649702284)) < 1e-14);
  CHECK(std::abs(m + std::log(10.0) / 2.0) < 1e-15);  // exact identity at 0.99
  CHECK(std::abs(p - 0.17203365968410026) < 1e-14);

  // e^{2 xi_minus} = sqrt(1 - ratio) to machine precision
  const auto [m5, p5] = squeezing_parameters(0.5);
  CHECK(std::abs(std::exp(2.0 * m5) - std::sqrt(0.5)) < 1e-15);
  CHECK(std::abs(std::exp(2.0 * p5) - std::sqrt(1.5)) < 1e-15);

  CHECK_THROWS_AS(squeezing_parameters(1.0), SingularCouplingError);
  CHECK_THROWS_AS(squeezing_parameters(-0.1), std::domain_error);
}

TEST_CASE("physical frequencies and their identities") {
  const auto [w0, W0] = physical_frequencies(2.0, 0.0);
  CHECK(w0 == 2.0);
  CHECK(W0 == 2.0);

  const auto [w, W] = physical_frequencies(1.0, 0.99);
  CHECK(std::abs(w - 0.1) < 1e-14);
  CHECK(std::abs(W - 1.41067359796658844) < 1e-14);

  const auto [wc, Wc] = physical_frequencies(1.0, 1.0);
  CHECK(wc == 0.0);  // gap closes at the critical point
  CHECK_THROWS_AS(physical_frequencies(1.0, 1.1), std::domain_error);

  for (int i = 0; i <= 100; ++i) {
    const double r = i / 100.0;
    const auto [lo, hi] = physical_frequencies(1.5, r);
    CHECK(lo <= 1.5 + 1e-15);
    CHECK(hi >= 1.5 - 1e-15);
    if (r > 0.0) {
      CHECK(lo < 1.5);
      CHECK(hi > 1.5);
    }
    CHECK(std::abs(lo * hi - 1.5 * 1.5 * std::sqrt(1.0 - r * r)) < 1e-12);
  }
}

TEST_CASE("frequency-squeezing link across the grid") {
  // omega_tilde/omega = e^{2 xi_minus} and Omega_tilde/omega = e^{2 xi_plus}
  for (int i = 0; i < 1000; ++i) {
    const double r = 0.999 * i / 999.0;
    const auto [xm, xp] = squeezing_parameters(r);
    const auto [wt, Wt] = physical_frequencies(1.0, r);
    CHECK(std::abs(wt - std::exp(2.0 * xm)) <= 1e-12);
    CHECK(std::abs(Wt - std::exp(2.0 * xp)) <= 1e-12);
    CHECK(xm <= 0.0);
    CHECK(xp >= 0.0);
  }
}

TEST_CASE("general Bogoliubov frequencies") {
  const auto [lo0, hi0] = bogoliubov_frequencies(1.0, 2.0, 0.0);
  CHECK(lo0 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(hi0 == doctest::Approx(2.0).epsilon(1e-15));

  // resonant reduction agrees with the closed form
  for (double r : {0.1, 0.5, 0.9}) {
    const auto [lo, hi] = bogoliubov_frequencies(1.0, 1.0, r);
    const auto [wt, Wt] = physical_frequencies(1.0, r);
    CHECK(std::abs(lo - wt) < 1e-14);
    CHECK(std::abs(hi - Wt) < 1e-14);
  }

  const auto [lo, hi] = bogoliubov_frequencies(1.0, 2.0, 1.0);
  CHECK(std::abs(lo - 0.66215344686195641) < 1e-14);
  CHECK(std::abs(hi - 2.13577920506985700) < 1e-14);

  // the lower mode closes exactly at g = sqrt(omega Omega)
  const auto [lc, hc] = bogoliubov_frequencies(1.0, 2.0, std::sqrt(2.0));
  CHECK(lc < 1e-7);
  CHECK(hc > 0.0);
  CHECK_THROWS_AS(bogoliubov_frequencies(1.0, 2.0, 1.5), SingularCouplingError);
}

TEST_CASE("virtual excitation number") {
  CHECK(virtual_excitations(0.0) == 0.0);
  CHECK(std::abs(virtual_excitations(0.5) - 0.04064044896973941) < 1e-14);
  CHECK(std::abs(virtual_excitations(0.99) - 2.05488870074373109) < 1e-13);

  // the xi_minus term is exactly 81/40 at ratio 0.99
  const double sm = std::sinh(squeezing_parameters(0.99).first);
  CHECK(std::abs(sm * sm - 81.0 / 40.0) < 1e-13);

  // strictly increasing on a dense grid
  double prev = -1.0;
  for (int i = 0; i < 1000; ++i) {
    const double n = virtual_excitations(0.999 * i / 999.0);
    CHECK(n > prev);
    prev = n;
  }

  // leading-order divergence n ~ (1/4) (1 - r)^{-1/2}
  const double r_near = 1.0 - 1e-8;
  CHECK(virtual_excitations(r_near) * std::sqrt(1.0 - r_near) ==
        doctest::Approx(0.25).epsilon(2e-2));

  CHECK_THROWS_AS(virtual_excitations(1.0), SingularCouplingError);
}

TEST_CASE("linear vacuum Rabi splitting") {
  const auto [lo, hi] = vrs_linear(1.0, 0.01);
  CHECK(lo == doctest::Approx(0.995).epsilon(1e-15));
  CHECK(hi == doctest::Approx(1.005).epsilon(1e-15));

  const auto [lo_n, hi_n] = vrs_linear(1.0, 0.01, 100);
  CHECK(lo_n == doctest::Approx(0.95).epsilon(1e-14));
  CHECK(hi_n == doctest::Approx(1.05).epsilon(1e-14));

  // Taylor remainder: |vrs - physical| <= r^2 omega/8 * 1.01 for r <= 0.1
  for (int i = 1; i <= 20; ++i) {
    const double r = 0.005 * i;
    const double g = r;  // omega = 1 resonant, so g = r * omega
    const auto [llo, lhi] = vrs_linear(1.0, g);
    const auto [plo, phi] = physical_frequencies(1.0, r);
    const double bound = r * r / 8.0 * 1.01;
    CHECK(std::abs(llo - plo) <= bound);
    CHECK(std::abs(lhi - phi) <= bound);
  }
}

TEST_CASE("squeezing report bundles consistent values") {
  const SqueezingReport rep = squeezing_report(2.0, 0.5);
  CHECK(std::abs(rep.omega_tilde - 2.0 * std::exp(2.0 * rep.xi_minus)) == 0.0);
  CHECK(std::abs(rep.Omega_tilde - 2.0 * std::exp(2.0 * rep.xi_plus)) == 0.0);
  CHECK(std::abs(rep.n_virtual - virtual_excitations(0.5)) == 0.0);
}

TEST_CASE("ground covariance of the coupled oscillators") {
  const CovarianceMatrix vac = hp_ground_covariance(0.0);
  CHECK((vac.matrix() - 0.5 * Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-15);

  const CovarianceMatrix cov = hp_ground_covariance(0.99);
  const Eigen::Matrix4d o = hybrid_quadrature_map();
  const Eigen::Matrix4d hybrid = o * cov.matrix() * o.transpose();
  CHECK(std::abs(hybrid(0, 0) - 5.0) < 1e-12);   // Var(x_c) = e^{-2 xi_-}/2
  CHECK(std::abs(hybrid(1, 1) - 0.05) < 1e-12);  // Var(p_c) = e^{2 xi_-}/2
  // no cross correlations among the hybrid quadratures
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i != j) CHECK(std::abs(hybrid(i, j)) < 1e-12);
    }
  }

  // purity: both symplectic eigenvalues equal 1/2
  for (double r : {0.0, 0.3, 0.9, 0.99}) {
    const auto [nu1, nu2] = hp_ground_covariance(r).symplectic_eigenvalues();
    CHECK(std::abs(nu1 - 0.5) < 1e-12);
    CHECK(std::abs(nu2 - 0.5) < 1e-12);
  }

  // minimum uncertainty in the hybrid blocks, exactly in closed form
  for (double r : {0.1, 0.5, 0.9, 0.999}) {
    const auto [xm, xp] = squeezing_parameters(r);
    const double vx = 0.5 * std::exp(-2.0 * xm);
    const double vp = 0.5 * std::exp(2.0 * xm);
    CHECK(vx * vp == 0.25);
    CHECK(0.5 * std::exp(-2.0 * xp) * 0.5 * std::exp(2.0 * xp) == 0.25);
  }

  CHECK_THROWS_AS(hp_ground_covariance(1.0), SingularCouplingError);
}

TEST_CASE("hybrid quadrature map is orthogonal and involutive") {
  const Eigen::Matrix4d o = hybrid_quadrature_map();
  CHECK((o * o.transpose() - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((o * o - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("quantum Rabi appendix closed forms") {
  const RabiSqueezing r0 = rabi_squeezing(0.0);
  CHECK(r0.xi == 0.0);
  CHECK(r0.n_photons == 0.0);
  CHECK(r0.omega_tilde_factor == 1.0);

  const RabiSqueezing r = rabi_squeezing(0.9);
  CHECK(std::abs(r.xi - (-0.41518280170541273)) < 1e-14);
  CHECK(std::abs(r.n_photons - 0.18251180826492125) < 1e-14);
  CHECK(std::abs(r.omega_tilde_factor - 0.43588989435406736) < 1e-14);

  for (int i = 0; i < 200; ++i) {
    const double ratio = 0.995 * i / 199.0;
    const RabiSqueezing rr = rabi_squeezing(ratio);
    CHECK(std::abs(std::exp(2.0 * rr.xi) - rr.omega_tilde_factor) < 1e-14);
  }
  CHECK_THROWS_AS(rabi_squeezing(1.0), SingularCouplingError);
}

TEST_CASE("covariance matrix type enforces its invariants") {
  Eigen::Matrix4d bad = 0.5 * Eigen::Matrix4d::Identity();
  bad(0, 1) = 0.3;  // asymmetric
  CHECK_THROWS_AS(CovarianceMatrix{bad}, std::invalid_argument);

  Eigen::Matrix4d tight = 0.5 * Eigen::Matrix4d::Identity();
  tight(0, 0) = tight(1, 1) = 0.3;  // det = 0.09 < 1/4
  CHECK_THROWS_AS(CovarianceMatrix{tight}, std::invalid_argument);
}
