#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dsq/analytic.hpp"
#include "dsq/hilbert.hpp"

namespace dsq {

/// Dense hermitian density matrix on a (possibly reduced) space.
/// Trace 1 within 1e-10, hermitian within 1e-12, eigenvalues >= -1e-10.
class DensityMatrix {
 public:
  DensityMatrix(SpaceSpec space, Eigen::MatrixXcd rho);

  static DensityMatrix from_pure(const QuantumState& state);

  const SpaceSpec& space() const { return space_; }
  const Eigen::MatrixXcd& matrix() const { return rho_; }
  double purity() const { return (rho_ * rho_).trace().real(); }

 private:
  SpaceSpec space_;
  Eigen::MatrixXcd rho_;
};

/// Husimi values on a square quadrature grid: Q(x,p) = <alpha|rho|alpha>/pi
/// with alpha = (x + ip)/sqrt(2). Normalized against the coherent-state
/// measure d^2alpha = dx dp / 2.
struct HusimiGrid {
  double half_width = 0.0;
  int points_per_axis = 0;
  std::vector<double> axis;    // shared x and p coordinates, ascending
  std::vector<double> values;  // row-major, x outer: values[ix * points + ip]

  double value(int ix, int ip) const { return values[static_cast<std::size_t>(ix) * points_per_axis + ip]; }

  /// Riemann sum of Q over d^2alpha = dx dp / 2; 1 up to grid truncation.
  double integral() const;
};

struct HusimiGridSpec {
  double half_width;
  int points_per_axis;
};

/// <state|op|state> for a hermitian op; errors if the imaginary residue of
/// the raw inner product exceeds 1e-10.
double expectation(const SparseOperator& op, const QuantumState& state);

DensityMatrix partial_trace(const QuantumState& state, int keep);
DensityMatrix partial_trace(const DensityMatrix& rho, int keep);

/// Symmetrized quadrature covariance of a two-Fock-mode state, with first
/// moments subtracted; vacuum gives I/2.
CovarianceMatrix covariance_matrix(const QuantumState& state);

/// Covariance in the hybrid-mode quadratures (c, d) with c = (a - b)/sqrt(2).
/// Involutive: applying it twice restores the input.
CovarianceMatrix hybrid_covariance(const CovarianceMatrix& cov);

struct SqueezeEstimate {
  double xi;                // signed: <= 0 for momentum-squeezed blocks
  bool momentum_squeezed;   // orientation of the minor principal axis
};

/// Squeezing parameter of a single-mode covariance block from its principal
/// variances: |xi| = (1/4) ln(lambda_max/lambda_min), signed by orientation.
SqueezeEstimate squeezing_from_covariance(const Eigen::Matrix2d& block);

/// Husimi function of a single-Fock-mode density matrix by truncated
/// coherent-state expansion.
HusimiGrid husimi_q(const DensityMatrix& rho, const HusimiGridSpec& spec);

/// Closed-form Gaussian Husimi function for a state known only through a
/// single-mode covariance block (used for the hybrid modes, whose reduced
/// density matrix is never materialized).
HusimiGrid gaussian_husimi(const Eigen::Matrix2d& block, const HusimiGridSpec& spec);

/// Default plot extent: four times the widest quadrature standard deviation
/// of the Husimi image of the block.
double suggested_half_width(const Eigen::Matrix2d& block);

}  // namespace dsq
