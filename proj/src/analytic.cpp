#include "dsq/analytic.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "dsq/errors.hpp"

namespace dsq {

namespace {

void require_normal_phase(double ratio, const char* what) {
  if (ratio < 0.0) {
    throw std::domain_error(std::string(what) + ": ratio must be >= 0");
  }
  if (ratio >= 1.0) {
    throw SingularCouplingError(std::string(what) +
                                ": closed form is singular at ratio >= 1");
  }
}

}  // namespace

CovarianceMatrix::CovarianceMatrix(const Eigen::Matrix4d& sigma) : sigma_(sigma) {
  if ((sigma_ - sigma_.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("covariance matrix must be symmetric");
  }
  for (int mode = 0; mode < 2; ++mode) {
    if (mode_block(mode).determinant() < 0.25 - 1e-12) {
      throw std::invalid_argument("single-mode covariance block violates det >= 1/4");
    }
  }
}

Eigen::Matrix2d CovarianceMatrix::mode_block(int mode) const {
  if (mode != 0 && mode != 1) throw std::out_of_range("mode must be 0 or 1");
  return sigma_.block<2, 2>(2 * mode, 2 * mode);
}

std::pair<double, double> CovarianceMatrix::symplectic_eigenvalues() const {
  Eigen::Matrix4d form;  // symplectic form for (x_a, p_a, x_b, p_b)
  form << 0, 1, 0, 0,
         -1, 0, 0, 0,
          0, 0, 0, 1,
          0, 0, -1, 0;
  const Eigen::Matrix4d m = form * sigma_;
  Eigen::EigenSolver<Eigen::Matrix4d> eig(m);
  // Eigenvalues come in +-(i nu) pairs; collect the positive magnitudes.
  std::vector<double> nus;
  for (int i = 0; i < 4; ++i) {
    const double im = eig.eigenvalues()[i].imag();
    if (im > 0.0) nus.push_back(im);
  }
  if (nus.size() != 2) throw std::runtime_error("failed to pair symplectic eigenvalues");
  if (nus[0] > nus[1]) std::swap(nus[0], nus[1]);
  return {nus[0], nus[1]};
}

double critical_coupling(double omega, double Omega, std::optional<int> n_spins) {
  if (!(omega > 0.0) || !(Omega > 0.0)) {
    throw std::invalid_argument("critical_coupling: frequencies must be positive");
  }
  if (!n_spins) return std::sqrt(omega * Omega);
  if (*n_spins < 1) throw std::invalid_argument("critical_coupling: n_spins must be >= 1");
  return std::sqrt(omega * Omega / static_cast<double>(*n_spins));
}

std::pair<double, double> squeezing_parameters(double ratio) {
  require_normal_phase(ratio, "squeezing_parameters");
  return {0.25 * std::log(1.0 - ratio), 0.25 * std::log(1.0 + ratio)};
}

std::pair<double, double> physical_frequencies(double omega, double ratio) {
  if (ratio < 0.0 || ratio > 1.0) {
    throw std::domain_error("physical_frequencies: normal phase needs ratio in [0, 1]");
  }
  return {omega * std::sqrt(1.0 - ratio), omega * std::sqrt(1.0 + ratio)};
}

std::pair<double, double> bogoliubov_frequencies(double omega, double Omega, double g) {
  if (!(omega > 0.0) || !(Omega > 0.0)) {
    throw std::invalid_argument("bogoliubov_frequencies: frequencies must be positive");
  }
  if (g < 0.0) throw std::invalid_argument("bogoliubov_frequencies: g must be >= 0");
  if (g > std::sqrt(omega * Omega)) {
    throw SingularCouplingError("bogoliubov_frequencies: g beyond the critical coupling");
  }
  const double w2 = omega * omega;
  const double W2 = Omega * Omega;
  const double split = std::sqrt((W2 - w2) * (W2 - w2) + 4.0 * g * g * omega * Omega);
  const double lo2 = 0.5 * (w2 + W2 - split);
  const double hi2 = 0.5 * (w2 + W2 + split);
  return {std::sqrt(std::max(lo2, 0.0)), std::sqrt(hi2)};
}

double virtual_excitations(double ratio) {
  require_normal_phase(ratio, "virtual_excitations");
  const auto [xm, xp] = squeezing_parameters(ratio);
  const double sm = std::sinh(xm);
  const double sp = std::sinh(xp);
  return sp * sp + sm * sm;
}

std::pair<double, double> vrs_linear(double omega, double g, std::optional<int> n_spins) {
  double half = 0.5 * g;
  if (n_spins) {
    if (*n_spins < 1) throw std::invalid_argument("vrs_linear: n_spins must be >= 1");
    half *= std::sqrt(static_cast<double>(*n_spins));
  }
  return {omega - half, omega + half};
}

SqueezingReport squeezing_report(double omega, double ratio) {
  const auto [xm, xp] = squeezing_parameters(ratio);
  SqueezingReport r;
  r.xi_minus = xm;
  r.xi_plus = xp;
  r.omega_tilde = omega * std::exp(2.0 * xm);
  r.Omega_tilde = omega * std::exp(2.0 * xp);
  const double sm = std::sinh(xm);
  const double sp = std::sinh(xp);
  r.n_virtual = sp * sp + sm * sm;
  return r;
}

Eigen::Matrix4d hybrid_quadrature_map() {
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::Matrix4d o;
  o <<  s, 0, -s,  0,
        0, s,  0, -s,
       -s, 0, -s,  0,
        0, -s, 0, -s;
  return o;
}

CovarianceMatrix hp_ground_covariance(double ratio) {
  require_normal_phase(ratio, "hp_ground_covariance");
  const auto [xm, xp] = squeezing_parameters(ratio);
  Eigen::Matrix4d hybrid = Eigen::Matrix4d::Zero();
  // The c mode (lower polariton) is squeezed in momentum, the d mode in
  // position: Var(x_c) = e^{-2 xi-}/2, Var(p_c) = e^{2 xi-}/2, etc.
  hybrid(0, 0) = 0.5 * std::exp(-2.0 * xm);
  hybrid(1, 1) = 0.5 * std::exp(2.0 * xm);
  hybrid(2, 2) = 0.5 * std::exp(-2.0 * xp);
  hybrid(3, 3) = 0.5 * std::exp(2.0 * xp);
  const Eigen::Matrix4d o = hybrid_quadrature_map();
  return CovarianceMatrix(o.transpose() * hybrid * o);
}

RabiSqueezing rabi_squeezing(double ratio) {
  require_normal_phase(ratio, "rabi_squeezing");
  RabiSqueezing r;
  r.xi = 0.25 * std::log(1.0 - ratio * ratio);
  const double s = std::sinh(r.xi);
  r.n_photons = s * s;
  r.omega_tilde_factor = std::sqrt(1.0 - ratio * ratio);
  return r;
}

}  // namespace dsq
