#include "dsq/observables.hpp"

#include <cmath>
#include <stdexcept>

#include "dsq/errors.hpp"

namespace dsq {

DensityMatrix::DensityMatrix(SpaceSpec space, Eigen::MatrixXcd rho)
    : space_(std::move(space)), rho_(std::move(rho)) {
  if (rho_.rows() != space_.dim() || rho_.cols() != space_.dim()) {
    throw std::invalid_argument("density matrix shape does not match space dimension");
  }
  if (std::abs(rho_.trace().real() - 1.0) > 1e-10 || std::abs(rho_.trace().imag()) > 1e-10) {
    throw std::invalid_argument("density matrix trace must be 1 within 1e-10");
  }
  if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("density matrix must be hermitian within 1e-12");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho_, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10) {
    throw std::invalid_argument("density matrix has an eigenvalue below -1e-10");
  }
}

DensityMatrix DensityMatrix::from_pure(const QuantumState& state) {
  const auto& v = state.amplitudes();
  return DensityMatrix(state.space(), v * v.adjoint());
}

double expectation(const SparseOperator& op, const QuantumState& state) {
  if (!op.hermitian()) {
    throw std::invalid_argument("expectation requires an operator flagged hermitian");
  }
  if (op.space() != state.space()) {
    throw std::invalid_argument("expectation: operator and state spaces differ");
  }
  const Complex raw = state.amplitudes().dot(op.csr().apply(state.amplitudes()));
  if (std::abs(raw.imag()) >= 1e-10) {
    throw std::runtime_error("expectation value has imaginary residue above 1e-10");
  }
  return raw.real();
}

namespace {

std::pair<std::int64_t, std::int64_t> two_factor_dims(const SpaceSpec& space,
                                                      const char* what) {
  if (space.n_factors() != 2) {
    throw std::invalid_argument(std::string(what) + " expects a two-factor space");
  }
  return {factor_dim(space.factor(0)), factor_dim(space.factor(1))};
}

}  // namespace

DensityMatrix partial_trace(const QuantumState& state, int keep) {
  const auto [d0, d1] = two_factor_dims(state.space(), "partial_trace");
  if (keep != 0 && keep != 1) throw std::invalid_argument("partial_trace: keep must be 0 or 1");
  Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
      state.amplitudes().data(), d0, d1);
  Eigen::MatrixXcd rho;
  if (keep == 0) {
    rho = m * m.adjoint();
  } else {
    rho = m.transpose() * m.conjugate();
  }
  const SpaceSpec reduced({state.space().factor(keep)});
  return DensityMatrix(reduced, std::move(rho));
}

DensityMatrix partial_trace(const DensityMatrix& rho, int keep) {
  const auto [d0, d1] = two_factor_dims(rho.space(), "partial_trace");
  if (keep != 0 && keep != 1) throw std::invalid_argument("partial_trace: keep must be 0 or 1");
  const Eigen::MatrixXcd& full = rho.matrix();
  Eigen::MatrixXcd out;
  if (keep == 0) {
    out = Eigen::MatrixXcd::Zero(d0, d0);
    for (std::int64_t i = 0; i < d0; ++i) {
      for (std::int64_t ip = 0; ip < d0; ++ip) {
        Complex acc(0.0, 0.0);
        for (std::int64_t j = 0; j < d1; ++j) acc += full(i * d1 + j, ip * d1 + j);
        out(i, ip) = acc;
      }
    }
  } else {
    out = Eigen::MatrixXcd::Zero(d1, d1);
    for (std::int64_t j = 0; j < d1; ++j) {
      for (std::int64_t jp = 0; jp < d1; ++jp) {
        Complex acc(0.0, 0.0);
        for (std::int64_t i = 0; i < d0; ++i) acc += full(i * d1 + j, i * d1 + jp);
        out(j, jp) = acc;
      }
    }
  }
  const SpaceSpec reduced({rho.space().factor(keep)});
  return DensityMatrix(reduced, std::move(out));
}

CovarianceMatrix covariance_matrix(const QuantumState& state) {
  const SpaceSpec& space = state.space();
  if (space.n_factors() != 2 || !is_fock(space.factor(0)) || !is_fock(space.factor(1))) {
    throw std::invalid_argument("covariance_matrix expects a two-Fock-mode state");
  }
  const int ca = std::get<FockFactor>(space.factor(0)).cutoff;
  const int cb = std::get<FockFactor>(space.factor(1)).cutoff;
  const Eigen::VectorXcd& psi = state.amplitudes();
  const Eigen::VectorXcd a_psi = embed(space, 0, local_annihilation(ca)).csr().apply(psi);
  const Eigen::VectorXcd b_psi = embed(space, 1, local_annihilation(cb)).csr().apply(psi);

  const Complex mean_a = psi.dot(a_psi);
  const Complex mean_b = psi.dot(b_psi);
  const double naa = a_psi.squaredNorm();              // <a^dag a>
  const double nbb = b_psi.squaredNorm();              // <b^dag b>
  // <a a> = <a^dag psi | a psi> and friends need the raised states too.
  const Eigen::VectorXcd adag_psi =
      embed(space, 0, local_annihilation(ca)).adjoint().csr().apply(psi);
  const Eigen::VectorXcd bdag_psi =
      embed(space, 1, local_annihilation(cb)).adjoint().csr().apply(psi);
  const Complex a2 = adag_psi.dot(a_psi);   // <a a>
  const Complex b2 = bdag_psi.dot(b_psi);   // <b b>
  const Complex ab = adag_psi.dot(b_psi);   // <a b>
  const Complex adb = a_psi.dot(b_psi);     // <a^dag b>

  const double sqrt2 = std::sqrt(2.0);
  const double mx_a = sqrt2 * mean_a.real();
  const double mp_a = sqrt2 * mean_a.imag();
  const double mx_b = sqrt2 * mean_b.real();
  const double mp_b = sqrt2 * mean_b.imag();

  Eigen::Matrix4d sigma;
  // Single-mode second moments from <a^2> and <a^dag a>.
  const double xx_a = a2.real() + naa + 0.5;
  const double pp_a = -a2.real() + naa + 0.5;
  const double xp_a = a2.imag();
  const double xx_b = b2.real() + nbb + 0.5;
  const double pp_b = -b2.real() + nbb + 0.5;
  const double xp_b = b2.imag();
  // Cross moments from <a b> and <a^dag b>.
  const double xaxb = ab.real() + adb.real();
  const double papb = -ab.real() + adb.real();
  const double xapb = ab.imag() + adb.imag();
  const double paxb = ab.imag() - adb.imag();

  sigma(0, 0) = xx_a - mx_a * mx_a;
  sigma(1, 1) = pp_a - mp_a * mp_a;
  sigma(0, 1) = sigma(1, 0) = xp_a - mx_a * mp_a;
  sigma(2, 2) = xx_b - mx_b * mx_b;
  sigma(3, 3) = pp_b - mp_b * mp_b;
  sigma(2, 3) = sigma(3, 2) = xp_b - mx_b * mp_b;
  sigma(0, 2) = sigma(2, 0) = xaxb - mx_a * mx_b;
  sigma(1, 3) = sigma(3, 1) = papb - mp_a * mp_b;
  sigma(0, 3) = sigma(3, 0) = xapb - mx_a * mp_b;
  sigma(1, 2) = sigma(2, 1) = paxb - mp_a * mx_b;
  return CovarianceMatrix(sigma);
}

CovarianceMatrix hybrid_covariance(const CovarianceMatrix& cov) {
  const Eigen::Matrix4d o = hybrid_quadrature_map();
  return CovarianceMatrix(o * cov.matrix() * o.transpose());
}

SqueezeEstimate squeezing_from_covariance(const Eigen::Matrix2d& block) {
  if (std::abs(block(0, 1) - block(1, 0)) > 1e-10) {
    throw std::invalid_argument("covariance block must be symmetric");
  }
  if (block.determinant() < 0.25 - 1e-12) {
    throw std::invalid_argument("covariance block violates the uncertainty relation");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(block);
  const double lo = eig.eigenvalues()[0];
  const double hi = eig.eigenvalues()[1];
  const Eigen::Vector2d minor_axis = eig.eigenvectors().col(0);
  // The mode is momentum squeezed when the small-variance principal axis
  // points along p; then xi <= 0 in our squeeze-operator convention.
  const bool momentum_squeezed = std::abs(minor_axis[1]) >= std::abs(minor_axis[0]);
  if (lo == hi) return {0.0, momentum_squeezed};
  const double magnitude = 0.25 * std::log(hi / lo);
  return {momentum_squeezed ? -magnitude : magnitude, momentum_squeezed};
}

double HusimiGrid::integral() const {
  const double step = axis.size() > 1 ? axis[1] - axis[0] : 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum * step * step * 0.5;  // d^2alpha = dx dp / 2
}

namespace {

void validate_grid_spec(const HusimiGridSpec& spec) {
  if (!(spec.half_width > 0.0)) throw std::invalid_argument("half_width must be positive");
  if (spec.points_per_axis < 16) throw std::invalid_argument("grid needs at least 16 points");
}

std::vector<double> grid_axis(const HusimiGridSpec& spec) {
  std::vector<double> xs(spec.points_per_axis);
  const double step = 2.0 * spec.half_width / (spec.points_per_axis - 1);
  for (int i = 0; i < spec.points_per_axis; ++i) xs[i] = -spec.half_width + i * step;
  return xs;
}

// Coherent-state Fock coefficients alpha^n / sqrt(n!) * exp(-|alpha|^2/2)
// by stable recurrence.
void coherent_coefficients(Complex alpha, Eigen::VectorXcd& c) {
  const double a2 = std::norm(alpha);
  c[0] = Complex(std::exp(-0.5 * a2), 0.0);
  for (Eigen::Index n = 1; n < c.size(); ++n) {
    c[n] = c[n - 1] * alpha / std::sqrt(static_cast<double>(n));
  }
}

}  // namespace

HusimiGrid husimi_q(const DensityMatrix& rho, const HusimiGridSpec& spec) {
  validate_grid_spec(spec);
  if (rho.space().n_factors() != 1 || !is_fock(rho.space().factor(0))) {
    throw std::invalid_argument("husimi_q expects a single-Fock-mode density matrix");
  }
  const std::int64_t dim = rho.space().dim();

  // Check that the corner coherent state fits the truncated ladder.
  {
    const double corner = spec.half_width * std::sqrt(2.0);  // |alpha| at a grid corner
    Eigen::VectorXcd c(dim);
    coherent_coefficients(Complex(corner / std::sqrt(2.0), corner / std::sqrt(2.0)), c);
    const double tail = 1.0 - c.squaredNorm();
    if (tail > 1e-6) {
      throw std::invalid_argument(
          "husimi_q: Fock cutoff too small for the requested half_width (coherent tail " +
          std::to_string(tail) + ")");
    }
  }

  HusimiGrid grid;
  grid.half_width = spec.half_width;
  grid.points_per_axis = spec.points_per_axis;
  grid.axis = grid_axis(spec);
  grid.values.resize(static_cast<std::size_t>(spec.points_per_axis) * spec.points_per_axis);
  Eigen::VectorXcd c(dim);
  const double inv_pi = 1.0 / M_PI;
  for (int ix = 0; ix < spec.points_per_axis; ++ix) {
    for (int ip = 0; ip < spec.points_per_axis; ++ip) {
      const Complex alpha(grid.axis[ix] / std::sqrt(2.0), grid.axis[ip] / std::sqrt(2.0));
      coherent_coefficients(alpha, c);
      const double q = (c.adjoint() * rho.matrix() * c)(0, 0).real() * inv_pi;
      grid.values[static_cast<std::size_t>(ix) * spec.points_per_axis + ip] =
          std::max(q, 0.0);
    }
  }
  return grid;
}

HusimiGrid gaussian_husimi(const Eigen::Matrix2d& block, const HusimiGridSpec& spec) {
  validate_grid_spec(spec);
  if (std::abs(block(0, 1) - block(1, 0)) > 1e-10) {
    throw std::invalid_argument("covariance block must be symmetric");
  }
  if (block.determinant() < 0.25 - 1e-12) {
    throw std::invalid_argument("covariance block violates the uncertainty relation");
  }
  const Eigen::Matrix2d m = block + 0.5 * Eigen::Matrix2d::Identity();
  const Eigen::Matrix2d minv = m.inverse();
  const double norm = 1.0 / (M_PI * std::sqrt(m.determinant()));

  HusimiGrid grid;
  grid.half_width = spec.half_width;
  grid.points_per_axis = spec.points_per_axis;
  grid.axis = grid_axis(spec);
  grid.values.resize(static_cast<std::size_t>(spec.points_per_axis) * spec.points_per_axis);
  for (int ix = 0; ix < spec.points_per_axis; ++ix) {
    for (int ip = 0; ip < spec.points_per_axis; ++ip) {
      Eigen::Vector2d r(grid.axis[ix], grid.axis[ip]);
      grid.values[static_cast<std::size_t>(ix) * spec.points_per_axis + ip] =
          norm * std::exp(-0.5 * r.dot(minv * r));
    }
  }
  return grid;
}

double suggested_half_width(const Eigen::Matrix2d& block) {
  return 4.0 * std::sqrt(2.0 * std::max(block(0, 0), block(1, 1)));
}

}  // namespace dsq
