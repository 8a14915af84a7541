#include "dsq/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "dsq/errors.hpp"

namespace dsq {

void SolveConfig::validate() const {
  if (!(eig_tol > 0.0) || eig_tol >= 1e-4) {
    throw std::invalid_argument("eig_tol must be in (0, 1e-4)");
  }
  if (max_lanczos_iters < 1) throw std::invalid_argument("max_lanczos_iters must be >= 1");
  if (dense_threshold < 1) throw std::invalid_argument("dense_threshold must be >= 1");
}

namespace {

// Deterministic start vector with entries in [-1, 1); bit-stable mapping from
// the raw 64-bit stream, independent of distribution internals.
Eigen::VectorXd seeded_vector(std::int64_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::VectorXd v(dim);
  for (std::int64_t i = 0; i < dim; ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
    v[i] = 2.0 * u - 1.0;
  }
  return v;
}

// Spectral scale |H| via a few power iterations; used to normalize residual
// certificates.
double spectral_scale(const CsrMatrix& csr, std::uint64_t seed) {
  const std::int64_t dim = csr.dim;
  if (dim == 1) {
    return csr.vals.empty() ? 0.0 : std::abs(csr.vals[0]);
  }
  Eigen::VectorXcd v = seeded_vector(dim, seed ^ 0x9E3779B97F4A7C15ull).cast<Complex>();
  v /= v.norm();
  double scale = 0.0;
  for (int it = 0; it < 20; ++it) {
    Eigen::VectorXcd w = csr.apply(v);
    const double n = w.norm();
    if (n == 0.0) return 0.0;
    scale = n;
    v = w / n;
  }
  return scale;
}

template <typename Vec>
void fix_phase(Vec& v) {
  Eigen::Index imax = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > best) {
      best = a;
      imax = i;
    }
  }
  if (best == 0.0) return;
  if constexpr (std::is_same_v<typename Vec::Scalar, double>) {
    if (v[imax] < 0.0) v = -v;
  } else {
    const Complex z = v[imax];
    v *= std::conj(z) / std::abs(z);
  }
}

template <typename Vec>
struct LanczosOut {
  double theta = 0.0;
  Vec vector;
  double residual = 0.0;
  int iterations = 0;
};

// Lowest eigenpair of H restricted to the orthogonal complement of
// `deflate`, by Lanczos with full reorthogonalization. Deterministic for a
// fixed (H, cfg, seed).
template <typename Vec>
LanczosOut<Vec> lanczos_lowest(const CsrMatrix& csr, const std::vector<Vec>& deflate,
                               const SolveConfig& cfg, double scale, std::uint64_t seed) {
  const std::int64_t dim = csr.dim;
  auto project_out = [&](Vec& w, const std::vector<Vec>& basis) {
    for (const auto& q : basis) {
      const auto c = q.dot(w);
      w -= q * c;
    }
  };

  Vec v0;
  for (std::uint64_t attempt = 0;; ++attempt) {
    if (attempt > 8) {
      throw NonConvergenceError("lanczos: could not seed a start vector outside the "
                                "deflated subspace",
                                0.0);
    }
    if constexpr (std::is_same_v<typename Vec::Scalar, double>) {
      v0 = seeded_vector(dim, seed + 1000003ull * attempt);
    } else {
      v0 = seeded_vector(dim, seed + 1000003ull * attempt).template cast<Complex>();
    }
    project_out(v0, deflate);
    const double n = v0.norm();
    if (n > 1e-8 * std::sqrt(static_cast<double>(dim))) {
      v0 /= n;
      break;
    }
  }

  std::vector<Vec> basis;
  basis.reserve(std::min<std::int64_t>(cfg.max_lanczos_iters + 1, dim));
  basis.push_back(v0);
  std::vector<double> alphas;
  std::vector<double> betas;  // betas[j] couples basis[j] and basis[j+1]

  double best_residual = std::numeric_limits<double>::infinity();
  const int max_m = static_cast<int>(
      std::min<std::int64_t>(cfg.max_lanczos_iters, dim - static_cast<std::int64_t>(deflate.size())));

  auto ritz_lowest = [&](int m) {
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      t(i, i) = alphas[i];
      if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = betas[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t);
    return std::make_pair(eig.eigenvalues()[0], Eigen::VectorXd(eig.eigenvectors().col(0)));
  };

  auto assemble = [&](const Eigen::VectorXd& s, int m) {
    Vec y = basis[0] * s[0];
    for (int i = 1; i < m; ++i) y += basis[i] * s[i];
    y /= y.norm();
    fix_phase(y);
    return y;
  };

  bool exhausted = false;
  for (int j = 0; j < max_m; ++j) {
    Vec w = csr.apply(basis[j]);
    const auto alpha = basis[j].dot(w);
    alphas.push_back(std::real(alpha));
    w -= basis[j] * alpha;
    if (j > 0) w -= basis[j - 1] * betas[j - 1];
    // Full reorthogonalization, repeated once if cancellation was severe.
    const double pre = w.norm();
    project_out(w, deflate);
    project_out(w, basis);
    if (w.norm() < 0.5 * pre) {
      project_out(w, deflate);
      project_out(w, basis);
    }
    const double beta = w.norm();
    const int m = j + 1;

    const bool breakdown = beta <= 1e-13 * std::max(scale, 1.0);
    const bool at_budget = (j + 1 == max_m);
    if (breakdown || at_budget || m % 10 == 0) {
      auto [theta, s] = ritz_lowest(m);
      const double bound = cfg.eig_tol * (std::abs(theta) + scale);
      const double estimate = breakdown ? 0.0 : beta * std::abs(s[m - 1]);
      if (estimate <= bound || breakdown || at_budget) {
        Vec y = assemble(s, m);
        Eigen::VectorXd dummy;
        const auto hy = csr.apply(y);
        const double residual = (hy - y * theta).norm();
        best_residual = std::min(best_residual, residual);
        if (residual <= bound || breakdown) {
          if (residual > bound && breakdown) {
            // Krylov space exhausted: the Ritz pair is exact on the invariant
            // subspace; accept only if the explicit residual is at roundoff.
            if (residual > 1e3 * std::numeric_limits<double>::epsilon() *
                               std::max(scale, 1.0) * std::sqrt(static_cast<double>(m)) &&
                residual > bound) {
              throw NonConvergenceError(
                  "lanczos: basis exhausted before reaching the residual bound",
                  residual);
            }
          }
          return {theta, std::move(y), residual, m};
        }
        if (at_budget) {
          throw NonConvergenceError(
              "lanczos: no convergence within " + std::to_string(max_m) +
                  " iterations (best residual " + std::to_string(best_residual) + ")",
              best_residual);
        }
      } else if (at_budget) {
        throw NonConvergenceError(
            "lanczos: no convergence within " + std::to_string(max_m) +
                " iterations (best residual estimate " + std::to_string(estimate) + ")",
            estimate);
      }
    }
    if (breakdown) break;
    betas.push_back(beta);
    basis.push_back(w / beta);
  }
  throw NonConvergenceError("lanczos: iteration budget exhausted", best_residual);
}

SpectrumResult dense_spectrum(const SparseOperator& h, int k, double scale) {
  SpectrumResult out;
  out.spectral_scale = scale;
  const std::int64_t dim = h.dim();
  if (h.csr().all_real) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& e : h.entries()) m(e.row, e.col) = e.val.real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    for (int i = 0; i < k; ++i) {
      Eigen::VectorXd v = eig.eigenvectors().col(i);
      fix_phase(v);
      out.energies.push_back(eig.eigenvalues()[i]);
      out.residual_norms.push_back((m * v - eig.eigenvalues()[i] * v).norm());
      out.states.emplace_back(QuantumState::normalized(h.space(), v.cast<Complex>()));
    }
  } else {
    Eigen::MatrixXcd m = h.to_dense();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(m);
    for (int i = 0; i < k; ++i) {
      Eigen::VectorXcd v = eig.eigenvectors().col(i);
      fix_phase(v);
      out.energies.push_back(eig.eigenvalues()[i]);
      out.residual_norms.push_back((m * v - eig.eigenvalues()[i] * v).norm());
      out.states.emplace_back(QuantumState::normalized(h.space(), v));
    }
  }
  return out;
}

template <typename Vec>
SpectrumResult iterative_spectrum(const SparseOperator& h, int k, const SolveConfig& cfg,
                                  double scale) {
  SpectrumResult out;
  out.spectral_scale = scale;
  const CsrMatrix& csr = h.csr();
  std::vector<Vec> found;
  for (int i = 0; i < k; ++i) {
    auto res = lanczos_lowest<Vec>(csr, found, cfg, scale, cfg.seed + 7919ull * i);
    out.energies.push_back(res.theta);
    out.residual_norms.push_back(res.residual);
    found.push_back(std::move(res.vector));
  }
  // Deflated runs return ascending eigenvalues up to roundoff; enforce order.
  std::vector<int> order(k);
  for (int i = 0; i < k; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return out.energies[a] < out.energies[b]; });
  SpectrumResult sorted;
  sorted.spectral_scale = scale;
  for (int i : order) {
    sorted.energies.push_back(out.energies[i]);
    sorted.residual_norms.push_back(out.residual_norms[i]);
    if constexpr (std::is_same_v<typename Vec::Scalar, double>) {
      sorted.states.emplace_back(
          QuantumState::normalized(h.space(), found[i].template cast<Complex>()));
    } else {
      sorted.states.emplace_back(QuantumState::normalized(h.space(), found[i]));
    }
  }
  return sorted;
}

}  // namespace

SpectrumResult low_spectrum(const SparseOperator& h, int k, const SolveConfig& cfg) {
  cfg.validate();
  if (!h.hermitian()) {
    throw std::invalid_argument("low_spectrum requires a hermitian operator");
  }
  if (k < 1 || k > h.dim()) {
    throw std::invalid_argument("low_spectrum: k must be in [1, dim]");
  }
  const double scale = spectral_scale(h.csr(), cfg.seed);
  if (h.dim() < cfg.dense_threshold) {
    return dense_spectrum(h, k, scale);
  }
  if (h.csr().all_real) {
    return iterative_spectrum<Eigen::VectorXd>(h, k, cfg, scale);
  }
  return iterative_spectrum<Eigen::VectorXcd>(h, k, cfg, scale);
}

SpectrumResult ground_state(const SparseOperator& h, const SolveConfig& cfg) {
  return low_spectrum(h, 1, cfg);
}

double slot_number_expectation(const QuantumState& state, int slot) {
  const SpaceSpec& space = state.space();
  if (!is_fock(space.factor(slot))) {
    throw std::invalid_argument("slot_number_expectation: slot is not a Fock factor");
  }
  const std::int64_t stride = space.stride(slot);
  const std::int64_t levels = factor_dim(space.factor(slot));
  double total = 0.0;
  for (std::int64_t flat = 0; flat < space.dim(); ++flat) {
    const std::int64_t n = (flat / stride) % levels;
    total += static_cast<double>(n) * std::norm(state.amplitudes()[flat]);
  }
  return total;
}

double top_level_population(const QuantumState& state, int slot) {
  const SpaceSpec& space = state.space();
  if (!is_fock(space.factor(slot))) {
    throw std::invalid_argument("top_level_population: slot is not a Fock factor");
  }
  const std::int64_t stride = space.stride(slot);
  const std::int64_t levels = factor_dim(space.factor(slot));
  double total = 0.0;
  for (std::int64_t flat = 0; flat < space.dim(); ++flat) {
    if ((flat / stride) % levels == levels - 1) total += std::norm(state.amplitudes()[flat]);
  }
  return total;
}

AutoCutoffResult auto_cutoff(const HamiltonianRecipe& recipe, const SolveConfig& cfg) {
  cfg.validate();
  constexpr int kStart = 16;
  constexpr int kCap = 4096;
  double prev_n = 0.0;
  bool have_prev = false;
  for (int cutoff = kStart; cutoff <= kCap; cutoff *= 2) {
    SparseOperator h = recipe(cutoff);
    SpectrumResult res = ground_state(h, cfg);
    const QuantumState& psi = res.states[0];
    const double n = slot_number_expectation(psi, 0);
    const double top = top_level_population(psi, 0);

    bool converged = false;
    if (have_prev) {
      converged = std::abs(n - prev_n) < std::max(1e-6, 1e-4 * std::abs(n)) && top < 1e-8;
    } else {
      // First-cutoff shortcut: if the state occupies only the lower half of
      // the truncated ladder, doubling the cutoff cannot move <n>.
      const std::int64_t stride = psi.space().stride(0);
      const std::int64_t levels = factor_dim(psi.space().factor(0));
      double upper_half = 0.0;
      for (std::int64_t flat = 0; flat < psi.space().dim(); ++flat) {
        if ((flat / stride) % levels > levels / 2) {
          upper_half += std::norm(psi.amplitudes()[flat]);
        }
      }
      converged = upper_half < 1e-12 && top < 1e-8;
    }
    if (converged) {
      res.cutoff_used = cutoff;
      return {cutoff, std::move(res), n};
    }
    prev_n = n;
    have_prev = true;
  }
  throw NonConvergenceError(
      "auto_cutoff: <a^dag a> did not stabilize up to cutoff 4096 (last estimate " +
          std::to_string(prev_n) + ")",
      prev_n);
}

// --- gap extraction ----------------------------------------------------------

namespace {

bool entries_swap_invariant(const SparseOperator& h) {
  const SpaceSpec& space = h.space();
  if (space.n_factors() != 2 || !is_fock(space.factor(0)) || !is_fock(space.factor(1))) {
    return false;
  }
  const int ca = std::get<FockFactor>(space.factor(0)).cutoff;
  const int cb = std::get<FockFactor>(space.factor(1)).cutoff;
  if (ca != cb) return false;
  const std::int64_t d = ca + 1;
  std::vector<CooEntry> swapped;
  swapped.reserve(h.nnz());
  for (const auto& e : h.entries()) {
    const std::int64_t r = (e.row % d) * d + e.row / d;
    const std::int64_t c = (e.col % d) * d + e.col / d;
    swapped.push_back({r, c, e.val});
  }
  std::sort(swapped.begin(), swapped.end(), [](const CooEntry& a, const CooEntry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  const auto& base = h.entries();
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (base[i].row != swapped[i].row || base[i].col != swapped[i].col ||
        base[i].val != swapped[i].val) {
      return false;
    }
  }
  return true;
}

// Reduced operator of a resonant two-oscillator Hamiltonian in one combined
// (swap, parity) sector. Basis: |n,n> (swap-even) and (|n,m> +- |m,n>)/sqrt2
// for n < m, filtered by total parity (n+m) mod 2.
struct SectorBasis {
  std::vector<std::int64_t> reduced_of_full;  // -1 if the full index has no weight here
  std::vector<double> coeff_of_full;          // weight of the full index in its reduced vector
  std::int64_t size = 0;
};

SectorBasis build_sector(std::int64_t d, bool swap_even, int parity) {
  SectorBasis sb;
  sb.reduced_of_full.assign(d * d, -1);
  sb.coeff_of_full.assign(d * d, 0.0);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (std::int64_t na = 0; na < d; ++na) {
    for (std::int64_t nb = na; nb < d; ++nb) {
      if (static_cast<int>((na + nb) % 2) != parity) continue;
      if (na == nb) {
        if (!swap_even) continue;
        const std::int64_t red = sb.size++;
        sb.reduced_of_full[na * d + nb] = red;
        sb.coeff_of_full[na * d + nb] = 1.0;
      } else {
        const std::int64_t red = sb.size++;
        sb.reduced_of_full[na * d + nb] = red;
        sb.coeff_of_full[na * d + nb] = inv_sqrt2;
        sb.reduced_of_full[nb * d + na] = red;
        sb.coeff_of_full[nb * d + na] = swap_even ? inv_sqrt2 : -inv_sqrt2;
      }
    }
  }
  return sb;
}

double sector_ground_energy(const SparseOperator& h, std::int64_t d, bool swap_even,
                            int parity, const SolveConfig& cfg) {
  const SectorBasis sb = build_sector(d, swap_even, parity);
  std::vector<CooEntry> entries;
  entries.reserve(h.nnz());
  for (const auto& e : h.entries()) {
    const std::int64_t r = sb.reduced_of_full[e.row];
    const std::int64_t c = sb.reduced_of_full[e.col];
    if (r < 0 || c < 0) continue;
    entries.push_back({r, c, e.val * sb.coeff_of_full[e.row] * sb.coeff_of_full[e.col]});
  }
  SparseOperator reduced(SpaceSpec::fock(static_cast<int>(sb.size - 1)), std::move(entries),
                         true);
  return ground_state(reduced, cfg).energies[0];
}

GapEstimate resonant_hp_gaps(const SparseOperator& h, const SolveConfig& cfg) {
  const std::int64_t d = factor_dim(h.space().factor(0));
  // (swap even, parity even) holds the global ground state; one e quantum is
  // (odd, odd); one f quantum is (even, odd).
  const double e0 = sector_ground_energy(h, d, true, 0, cfg);
  const double e_lower = sector_ground_energy(h, d, false, 1, cfg);
  const double e_upper = sector_ground_energy(h, d, true, 1, cfg);
  GapEstimate out{e_lower - e0, e_upper - e0, false};
  if (out.omega_tilde < 1e-6 * out.Omega_tilde) out.ill_conditioned = true;
  return out;
}

GapEstimate transition_moment_gaps(const SparseOperator& h, const SolveConfig& cfg) {
  const SpaceSpec& space = h.space();
  SparseOperator a_quad = embed(
      space, 0, local_ladder_sum(std::get<FockFactor>(space.factor(0)).cutoff), true);
  SparseOperator b_quad =
      is_spin(space.factor(1))
          ? embed(space, 1, local_spin_x(std::get<SpinFactor>(space.factor(1)).n_spins), true)
          : embed(space, 1,
                  local_ladder_sum(std::get<FockFactor>(space.factor(1)).cutoff), true);

  int k = 3;
  const int k_cap = static_cast<int>(std::min<std::int64_t>(32, h.dim()));
  std::string last_problem = "not started";
  while (true) {
    SpectrumResult res = low_spectrum(h, k, cfg);
    const Eigen::VectorXcd phi_a = apply(a_quad, res.states[0]);
    const Eigen::VectorXcd phi_b = apply(b_quad, res.states[0]);
    const double tot_a = phi_a.squaredNorm();
    const double tot_b = phi_b.squaredNorm();
    std::vector<double> wa(k, 0.0);
    std::vector<double> wb(k, 0.0);
    for (int i = 0; i < k; ++i) {
      wa[i] = std::norm(res.states[i].amplitudes().dot(phi_a)) / tot_a;
      wb[i] = std::norm(res.states[i].amplitudes().dot(phi_b)) / tot_b;
    }
    double captured_a = 0.0;
    double captured_b = 0.0;
    for (int i = 0; i < k; ++i) {
      captured_a += wa[i];
      captured_b += wb[i];
    }
    std::vector<int> idx;
    for (int i = 1; i < k; ++i) idx.push_back(i);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
      return std::max(wa[a], wb[a]) > std::max(wa[b], wb[b]);
    });
    if (idx.size() >= 2 && captured_a > 0.99 && captured_b > 0.99 &&
        std::max(idx[0], idx[1]) < k - 1) {
      const int lo = std::min(idx[0], idx[1]);
      const int hi = std::max(idx[0], idx[1]);
      GapEstimate out{res.energies[lo] - res.energies[0],
                      res.energies[hi] - res.energies[0], false};
      if (out.omega_tilde < 1e-6 * out.Omega_tilde) out.ill_conditioned = true;
      return out;
    }
    last_problem = "captured weights " + std::to_string(captured_a) + ", " +
                   std::to_string(captured_b) + " at k = " + std::to_string(k);
    if (k == k_cap) break;
    k = std::min(2 * k, k_cap);
  }
  throw NonConvergenceError("gap_frequencies: polariton states not identified (" +
                                last_problem + ")",
                            0.0);
}

}  // namespace

GapEstimate gap_frequencies(const SparseOperator& h, const SolveConfig& cfg) {
  cfg.validate();
  const SpaceSpec& space = h.space();
  if (space.n_factors() != 2 || !is_fock(space.factor(0))) {
    throw std::invalid_argument(
        "gap_frequencies expects a two-factor space with a Fock photon mode");
  }
  if (entries_swap_invariant(h)) {
    return resonant_hp_gaps(h, cfg);
  }
  return transition_moment_gaps(h, cfg);
}

}  // namespace dsq
