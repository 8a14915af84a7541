#include "dsq/sweep_fit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <thread>

#include <Eigen/Dense>

#include "dsq/analytic.hpp"
#include "dsq/errors.hpp"
#include "dsq/models.hpp"
#include "dsq/observables.hpp"

namespace dsq {

SweepModel sweep_model_from_name(const std::string& name) {
  if (name == "dicke") return SweepModel::Dicke;
  if (name == "hp") return SweepModel::Hp;
  if (name == "rabi") return SweepModel::Rabi;
  if (name == "effective") return SweepModel::Effective;
  if (name == "analytic") return SweepModel::Analytic;
  throw std::invalid_argument("unknown model '" + name +
                              "' (expected dicke|hp|rabi|effective|analytic)");
}

std::string sweep_model_name(SweepModel model) {
  switch (model) {
    case SweepModel::Dicke: return "dicke";
    case SweepModel::Hp: return "hp";
    case SweepModel::Rabi: return "rabi";
    case SweepModel::Effective: return "effective";
    case SweepModel::Analytic: return "analytic";
  }
  return "?";
}

AxisSpacing axis_spacing_from_name(const std::string& name) {
  if (name == "linear") return AxisSpacing::Linear;
  if (name == "log") return AxisSpacing::Log;
  if (name == "inverse") return AxisSpacing::Inverse;
  throw std::invalid_argument("unknown spacing '" + name +
                              "' (expected linear|log|inverse)");
}

std::vector<double> AxisSpec::values() const {
  if (count < 2) throw std::invalid_argument("axis '" + name + "' needs count >= 2");
  std::vector<double> out(count);
  switch (spacing) {
    case AxisSpacing::Linear: {
      const double step = (stop - start) / (count - 1);
      for (int i = 0; i < count; ++i) out[i] = start + i * step;
      break;
    }
    case AxisSpacing::Log: {
      if (!(start > 0.0) || !(stop > 0.0)) {
        throw std::invalid_argument("axis '" + name + "': log spacing needs positive bounds");
      }
      const double ratio = std::log(stop / start) / (count - 1);
      for (int i = 0; i < count; ++i) out[i] = start * std::exp(i * ratio);
      break;
    }
    case AxisSpacing::Inverse: {
      if (!(start < 1.0) || !(stop < 1.0)) {
        throw std::invalid_argument("axis '" + name + "': inverse spacing needs bounds < 1");
      }
      const double u0 = 1.0 / (1.0 - start);
      const double u1 = 1.0 / (1.0 - stop);
      const double step = (u1 - u0) / (count - 1);
      for (int i = 0; i < count; ++i) out[i] = 1.0 - 1.0 / (u0 + i * step);
      break;
    }
  }
  if (name == "n_spins") {
    for (double& v : out) v = std::max(1.0, std::round(v));
  }
  return out;
}

namespace {

const std::set<std::string> kAxisNames = {"ratio", "omega", "Omega", "n_spins"};

const std::set<std::string> kAnalyticObs = {"xi_minus", "xi_plus",  "omega_tilde",
                                            "Omega_tilde", "n_virtual", "vrs_low",
                                            "vrs_high", "rabi_xi", "rabi_n",
                                            "rabi_omega_tilde_factor"};

bool ed_observable_valid(SweepModel model, const std::string& obs) {
  if (obs == "energy" || obs == "n_a" || obs == "cutoff" || obs == "gap_low") return true;
  if (obs == "n_b") return model != SweepModel::Effective;
  if (obs == "gap_high") return model == SweepModel::Hp || model == SweepModel::Dicke;
  if (obs == "parity") return model == SweepModel::Dicke || model == SweepModel::Rabi;
  return false;
}

struct GridPoint {
  double omega;
  double Omega;
  double ratio;
  int n_spins;
};

// Observables of one ED grid point, computed lazily so a sweep only pays for
// the solves its column list needs.
struct PointEvaluation {
  SweepModel model;
  SolveConfig solve;
  std::optional<int> fixed_cutoff;
  GridPoint pt;

  std::optional<SparseOperator> h;
  std::optional<SpectrumResult> spectrum;
  std::optional<GapEstimate> gaps;
  int cutoff_used = 0;

  SparseOperator build(int cutoff) const {
    const ModelParams params =
        ModelParams::from_ratio(pt.omega, pt.Omega, pt.ratio, pt.n_spins, cutoff);
    switch (model) {
      case SweepModel::Dicke: return dicke_hamiltonian(params);
      case SweepModel::Hp: return hp_hamiltonian(params, cutoff, cutoff);
      case SweepModel::Rabi: return rabi_hamiltonian(params);
      case SweepModel::Effective: return effective_oscillator_hamiltonian(params, cutoff);
      default: throw std::logic_error("analytic model has no Hamiltonian");
    }
  }

  void ensure_solved() {
    if (spectrum) return;
    if (fixed_cutoff) {
      cutoff_used = *fixed_cutoff;
      h = build(cutoff_used);
      spectrum = ground_state(*h, solve);
    } else {
      auto res = auto_cutoff([this](int c) { return build(c); }, solve);
      cutoff_used = res.cutoff;
      h = build(res.cutoff);
      spectrum = std::move(res.spectrum);
    }
  }

  void ensure_gaps() {
    ensure_solved();
    if (gaps) return;
    if (model == SweepModel::Hp || model == SweepModel::Dicke) {
      gaps = gap_frequencies(*h, solve);
    } else {
      SpectrumResult two = low_spectrum(*h, 2, solve);
      gaps = GapEstimate{two.energies[1] - two.energies[0], 0.0, false};
    }
  }

  double matter_excitation() {
    ensure_solved();
    const QuantumState& psi = spectrum->states[0];
    if (model == SweepModel::Hp) return slot_number_expectation(psi, 1);
    const auto ops = spin_ops(psi.space(), 1);
    const double j = 0.5 * pt.n_spins;
    return expectation(ops.sz, psi) + (model == SweepModel::Rabi ? 0.5 : j);
  }

  double evaluate(const std::string& obs) {
    if (obs == "energy") {
      ensure_solved();
      return spectrum->energies[0];
    }
    if (obs == "n_a") {
      ensure_solved();
      return slot_number_expectation(spectrum->states[0], 0);
    }
    if (obs == "n_b") return matter_excitation();
    if (obs == "gap_low") {
      ensure_gaps();
      return gaps->omega_tilde;
    }
    if (obs == "gap_high") {
      ensure_gaps();
      return gaps->Omega_tilde;
    }
    if (obs == "parity") {
      ensure_solved();
      return expectation(parity_op(spectrum->states[0].space()), spectrum->states[0]);
    }
    if (obs == "cutoff") {
      ensure_solved();
      return static_cast<double>(cutoff_used);
    }
    throw std::logic_error("unhandled observable " + obs);
  }
};

double analytic_observable(const std::string& obs, const GridPoint& pt) {
  if (obs == "xi_minus") return squeezing_parameters(pt.ratio).first;
  if (obs == "xi_plus") return squeezing_parameters(pt.ratio).second;
  if (obs == "omega_tilde") return physical_frequencies(pt.omega, pt.ratio).first;
  if (obs == "Omega_tilde") return physical_frequencies(pt.omega, pt.ratio).second;
  if (obs == "n_virtual") return virtual_excitations(pt.ratio);
  if (obs == "vrs_low" || obs == "vrs_high") {
    const double g = pt.ratio * std::sqrt(pt.omega * pt.Omega);
    const auto [lo, hi] = vrs_linear(pt.omega, g);
    return obs == "vrs_low" ? lo : hi;
  }
  if (obs == "rabi_xi") return rabi_squeezing(pt.ratio).xi;
  if (obs == "rabi_n") return rabi_squeezing(pt.ratio).n_photons;
  if (obs == "rabi_omega_tilde_factor") return rabi_squeezing(pt.ratio).omega_tilde_factor;
  throw std::logic_error("unhandled analytic observable " + obs);
}

}  // namespace

void SweepSpec::validate() const {
  solve.validate();
  if (axes.empty()) throw std::invalid_argument("sweep needs at least one axis");
  for (const auto& axis : axes) {
    if (!kAxisNames.count(axis.name)) {
      throw std::invalid_argument("unknown axis name '" + axis.name +
                                  "' (expected ratio|omega|Omega|n_spins)");
    }
    (void)axis.values();  // validates count and spacing bounds
    if (axis.name == "n_spins" && model != SweepModel::Dicke) {
      throw std::invalid_argument("axis 'n_spins' is only meaningful for the dicke model");
    }
    if (model == SweepModel::Analytic && axis.name == "ratio") {
      for (double v : axis.values()) {
        if (v >= 1.0) {
          throw std::invalid_argument(
              "axis 'ratio': analytic closed forms need ratio < 1");
        }
      }
    }
  }
  if (observables.empty()) throw std::invalid_argument("sweep needs at least one observable");
  for (const auto& obs : observables) {
    const bool ok = model == SweepModel::Analytic ? kAnalyticObs.count(obs) > 0
                                                  : ed_observable_valid(model, obs);
    if (!ok) {
      throw std::invalid_argument("observable '" + obs + "' is not available for model '" +
                                  sweep_model_name(model) + "'");
    }
  }
  if (!(omega > 0.0) || !(Omega > 0.0)) {
    throw std::invalid_argument("base omega and Omega must be positive");
  }
  if (ratio < 0.0) throw std::invalid_argument("base ratio must be >= 0");
  if (n_spins < 1) throw std::invalid_argument("base n_spins must be >= 1");
  if (cutoff && *cutoff < 1) throw std::invalid_argument("cutoff must be >= 1 when fixed");
}

bool SweepTable::has_errors() const {
  return std::any_of(row_errors.begin(), row_errors.end(),
                     [](const std::string& e) { return !e.empty(); });
}

SweepTable run_sweep(const SweepSpec& spec) {
  spec.validate();

  std::vector<std::vector<double>> axis_values;
  std::int64_t n_points = 1;
  for (const auto& axis : spec.axes) {
    axis_values.push_back(axis.values());
    n_points *= static_cast<std::int64_t>(axis_values.back().size());
  }

  SweepTable table;
  for (const auto& axis : spec.axes) table.columns.push_back(axis.name);
  for (const auto& obs : spec.observables) table.columns.push_back(obs);
  table.rows.assign(n_points, {});
  table.row_errors.assign(n_points, "");

  auto evaluate_point = [&](std::int64_t flat) {
    // Decode the lexicographic grid index, first axis slowest.
    GridPoint pt{spec.omega, spec.Omega, spec.ratio, spec.n_spins};
    std::vector<double> row;
    std::int64_t rem = flat;
    for (std::size_t ax = spec.axes.size(); ax-- > 0;) {
      const auto& vals = axis_values[ax];
      const std::int64_t i = rem % static_cast<std::int64_t>(vals.size());
      rem /= static_cast<std::int64_t>(vals.size());
      const double v = vals[static_cast<std::size_t>(i)];
      const std::string& name = spec.axes[ax].name;
      if (name == "ratio") pt.ratio = v;
      else if (name == "omega") pt.omega = v;
      else if (name == "Omega") pt.Omega = v;
      else pt.n_spins = static_cast<int>(v);
    }
    for (std::size_t ax = 0; ax < spec.axes.size(); ++ax) {
      const std::string& name = spec.axes[ax].name;
      if (name == "ratio") row.push_back(pt.ratio);
      else if (name == "omega") row.push_back(pt.omega);
      else if (name == "Omega") row.push_back(pt.Omega);
      else row.push_back(static_cast<double>(pt.n_spins));
    }

    try {
      if (spec.model == SweepModel::Analytic) {
        for (const auto& obs : spec.observables) row.push_back(analytic_observable(obs, pt));
      } else {
        PointEvaluation eval{spec.model, spec.solve, spec.cutoff, pt, {}, {}, {}, 0};
        for (const auto& obs : spec.observables) row.push_back(eval.evaluate(obs));
      }
    } catch (const NonConvergenceError& e) {
      while (row.size() < table.columns.size()) {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
      }
      table.row_errors[flat] = e.what();
    }
    table.rows[flat] = std::move(row);
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned n_workers =
      static_cast<unsigned>(std::min<std::int64_t>(hw, n_points));
  if (n_workers <= 1) {
    for (std::int64_t i = 0; i < n_points; ++i) evaluate_point(i);
  } else {
    std::atomic<std::int64_t> next{0};
    std::vector<std::exception_ptr> worker_errors(n_workers);
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < n_workers; ++w) {
      workers.emplace_back([&, w] {
        try {
          for (std::int64_t i = next.fetch_add(1); i < n_points; i = next.fetch_add(1)) {
            evaluate_point(i);
          }
        } catch (...) {
          worker_errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : workers) t.join();
    for (const auto& err : worker_errors) {
      if (err) std::rethrow_exception(err);
    }
  }

  const bool all_failed = std::all_of(table.row_errors.begin(), table.row_errors.end(),
                                      [](const std::string& e) { return !e.empty(); });
  if (all_failed) {
    throw NonConvergenceError("run_sweep: every grid point failed; first error: " +
                                  table.row_errors.front(),
                              0.0);
  }
  return table;
}

// --- power-law fit -------------------------------------------------------------

namespace {

Eigen::VectorXd fit_residuals(const Eigen::Vector3d& theta, const Eigen::VectorXd& n,
                              const Eigen::VectorXd& y) {
  Eigen::VectorXd r(n.size());
  for (Eigen::Index i = 0; i < n.size(); ++i) {
    r[i] = theta[0] * std::pow(n[i], theta[1]) + theta[2] - y[i];
  }
  return r;
}

Eigen::MatrixXd fit_jacobian(const Eigen::Vector3d& theta, const Eigen::VectorXd& n) {
  Eigen::MatrixXd j(n.size(), 3);
  for (Eigen::Index i = 0; i < n.size(); ++i) {
    const double nb = std::pow(n[i], theta[1]);
    j(i, 0) = nb;
    j(i, 1) = theta[0] * nb * std::log(n[i]);
    j(i, 2) = 1.0;
  }
  return j;
}

}  // namespace

FitResult power_law_fit(const std::vector<std::pair<double, double>>& points) {
  std::set<double> distinct;
  for (const auto& [n, y] : points) {
    if (!(n > 0.0)) throw std::invalid_argument("power_law_fit: N values must be positive");
    if (!std::isfinite(y)) throw std::invalid_argument("power_law_fit: y values must be finite");
    distinct.insert(n);
  }
  if (distinct.size() < 4) {
    throw std::invalid_argument(
        "power_law_fit requires at least 4 distinct N values (got " +
        std::to_string(distinct.size()) + ")");
  }

  const Eigen::Index m = static_cast<Eigen::Index>(points.size());
  Eigen::VectorXd n(m);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    n[i] = points[static_cast<std::size_t>(i)].first;
    y[i] = points[static_cast<std::size_t>(i)].second;
  }

  const double y_spread = y.maxCoeff() - y.minCoeff();
  if (y_spread <= 1e-14 * std::max(1.0, y.cwiseAbs().maxCoeff())) {
    throw UnidentifiableFitError(
        "power_law_fit: constant y leaves alpha and beta unidentifiable");
  }

  // Initial guess: gamma from half the smallest y, then a log-log line.
  double gamma0 = 0.5 * y.minCoeff();
  if ((y.array() - gamma0 <= 0.0).any()) {
    gamma0 = y.minCoeff() - 1e-3 * y_spread;
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double lx = std::log(n[i]);
    const double ly = std::log(y[i] - gamma0);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = m * sxx - sx * sx;
  const double beta0 = denom != 0.0 ? (m * sxy - sx * sy) / denom : 0.5;
  const double alpha0 = std::exp((sy - beta0 * sx) / m);

  Eigen::Vector3d theta(alpha0, beta0, gamma0);
  Eigen::VectorXd r = fit_residuals(theta, n, y);
  double objective = r.squaredNorm();

  FitResult out;
  out.objective_trace.push_back(objective);
  double lambda = 1e-3;
  bool converged = false;
  int iter = 0;
  for (; iter < 500 && !converged; ++iter) {
    const Eigen::MatrixXd j = fit_jacobian(theta, n);
    const Eigen::Matrix3d jtj = j.transpose() * j;
    const Eigen::Vector3d g = j.transpose() * r;
    Eigen::Matrix3d damped = jtj;
    for (int d = 0; d < 3; ++d) {
      if (jtj(d, d) <= 0.0 || !std::isfinite(jtj(d, d))) {
        throw UnidentifiableFitError(
            "power_law_fit: rank-deficient Jacobian; parameters are unidentifiable");
      }
      damped(d, d) += lambda * jtj(d, d);
    }
    const Eigen::Vector3d step = damped.ldlt().solve(-g);
    if (!step.allFinite()) {
      throw UnidentifiableFitError("power_law_fit: singular normal equations");
    }
    const Eigen::Vector3d candidate = theta + step;
    const Eigen::VectorXd r_new = fit_residuals(candidate, n, y);
    const double obj_new = r_new.squaredNorm();
    if (std::isfinite(obj_new) && obj_new < objective) {
      theta = candidate;
      r = r_new;
      objective = obj_new;
      out.objective_trace.push_back(objective);
      lambda = std::max(lambda / 10.0, 1e-14);
      const double rel_step = step.norm() / std::max(theta.norm(), 1e-300);
      if (rel_step < 1e-10) converged = true;
    } else {
      lambda *= 10.0;
      if (lambda > 1e14) break;  // stuck at a plateau
    }
  }

  out.alpha = theta[0];
  out.beta = theta[1];
  out.gamma = theta[2];
  out.iterations = iter;
  out.converged = converged;
  out.residual_rms = std::sqrt(objective / static_cast<double>(m));
  out.n_min = n.minCoeff();
  out.n_max = n.maxCoeff();
  out.n_points = static_cast<int>(m);

  // Standard errors from the final Jacobian.
  const Eigen::MatrixXd j = fit_jacobian(theta, n);
  const Eigen::Matrix3d jtj = j.transpose() * j;
  const double dof = static_cast<double>(m - 3);
  const double variance = dof > 0.0 ? objective / dof : 0.0;
  const Eigen::Matrix3d cov = variance * jtj.inverse();
  out.alpha_se = std::sqrt(std::max(cov(0, 0), 0.0));
  out.beta_se = std::sqrt(std::max(cov(1, 1), 0.0));
  out.gamma_se = std::sqrt(std::max(cov(2, 2), 0.0));
  return out;
}

}  // namespace dsq
