#pragma once

#include <optional>
#include <utility>

#include <Eigen/Dense>

namespace dsq {

/// Squeezing parameters of the hybrid modes together with the physical-mode
/// frequencies they encode. At resonance omega_tilde = omega * exp(2 xi_minus)
/// and Omega_tilde = omega * exp(2 xi_plus) hold to machine precision.
struct SqueezingReport {
  double xi_minus;
  double xi_plus;
  double omega_tilde;
  double Omega_tilde;
  double n_virtual;
};

/// 4x4 real symmetric covariance over the quadratures (x_a, p_a, x_b, p_b)
/// with x = (a + a^dag)/sqrt(2), p = i(a^dag - a)/sqrt(2); vacuum variance 1/2.
class CovarianceMatrix {
 public:
  explicit CovarianceMatrix(const Eigen::Matrix4d& sigma);

  const Eigen::Matrix4d& matrix() const { return sigma_; }

  /// 2x2 block of mode 0 (rows/cols 0,1) or mode 1 (rows/cols 2,3).
  Eigen::Matrix2d mode_block(int mode) const;

  /// Symplectic eigenvalues (both >= 1/2 for physical states; = 1/2 pure).
  std::pair<double, double> symplectic_eigenvalues() const;

 private:
  Eigen::Matrix4d sigma_;
};

/// Critical coupling sqrt(omega*Omega); with n_spins given, the
/// size-dependent convention sqrt(omega*Omega/N).
double critical_coupling(double omega, double Omega,
                         std::optional<int> n_spins = std::nullopt);

/// xi_-+ = (1/4) ln(1 -+ ratio) for ratio = g/g_c in [0, 1).
std::pair<double, double> squeezing_parameters(double ratio);

/// Resonant physical-mode frequencies (omega*sqrt(1-ratio), omega*sqrt(1+ratio));
/// valid for ratio in [0, 1], with the lower frequency closing at ratio = 1.
std::pair<double, double> physical_frequencies(double omega, double ratio);

/// General normal-mode frequencies of the two-oscillator model with the
/// (g/2)(a^dag+a)(b^dag+b) coupling:
/// eps_-+^2 = (omega^2 + Omega^2 -+ sqrt((Omega^2-omega^2)^2 + 4 g^2 omega Omega)) / 2.
/// Reduces to physical_frequencies at omega = Omega.
std::pair<double, double> bogoliubov_frequencies(double omega, double Omega, double g);

/// sinh^2(xi_plus) + sinh^2(xi_minus); diverges at ratio -> 1.
double virtual_excitations(double ratio);

/// Linearized vacuum Rabi splitting (omega - g/2, omega + g/2); with n_spins,
/// the collective version omega -+ g*sqrt(N)/2.
std::pair<double, double> vrs_linear(double omega, double g,
                                     std::optional<int> n_spins = std::nullopt);

/// Bundles squeezing parameters, physical frequencies, and the virtual
/// excitation number for the resonant model at the given ratio.
SqueezingReport squeezing_report(double omega, double ratio);

/// Orthogonal, involutive quadrature map from (x_a,p_a,x_b,p_b) to the hybrid
/// modes (x_c,p_c,x_d,p_d) with c = (a-b)/sqrt(2); the d row carries an
/// overall minus sign so the map squares to the identity, which covariances
/// do not see.
Eigen::Matrix4d hybrid_quadrature_map();

/// Ground-state covariance of the two-oscillator model at resonance, in the
/// bare (a, b) quadratures. In hybrid coordinates it is
/// diag(e^{-2xi-}, e^{2xi-}, e^{-2xi+}, e^{2xi+}) / 2.
CovarianceMatrix hp_ground_covariance(double ratio);

/// Appendix closed forms for the low-frequency Rabi model.
struct RabiSqueezing {
  double xi;                  // (1/4) ln(1 - ratio^2)
  double n_photons;           // sinh^2(xi)
  double omega_tilde_factor;  // sqrt(1 - ratio^2) = e^{2 xi}
};

RabiSqueezing rabi_squeezing(double ratio);

}  // namespace dsq
