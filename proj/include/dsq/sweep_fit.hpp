#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dsq/solver.hpp"

namespace dsq {

enum class SweepModel { Dicke, Hp, Rabi, Effective, Analytic };

SweepModel sweep_model_from_name(const std::string& name);
std::string sweep_model_name(SweepModel model);

enum class AxisSpacing { Linear, Log, Inverse };

AxisSpacing axis_spacing_from_name(const std::string& name);

/// Named parameter range. `inverse` spacing places (1 - value)^{-1} on a
/// uniform grid, resolving the approach to the critical coupling; it is
/// meant for ratio axes.
struct AxisSpec {
  std::string name;  // one of: ratio, omega, Omega, n_spins
  double start = 0.0;
  double stop = 0.0;
  int count = 0;
  AxisSpacing spacing = AxisSpacing::Linear;

  std::vector<double> values() const;
};

struct SweepSpec {
  SweepModel model = SweepModel::Analytic;
  std::vector<AxisSpec> axes;
  std::vector<std::string> observables;
  SolveConfig solve;

  // Base parameter point; axes override the fields they are named after.
  double omega = 1.0;
  double Omega = 1.0;
  double ratio = 0.0;
  int n_spins = 1;
  std::optional<int> cutoff;  // empty = adaptive cutoff for the ED models

  void validate() const;
};

/// One row per grid point, axes lexicographic with the first axis slowest.
/// Failed points keep their axis cells, carry NaN observables and a non-empty
/// error string; they are never dropped.
struct SweepTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> row_errors;

  bool has_errors() const;
};

SweepTable run_sweep(const SweepSpec& spec);

/// Parameters of y = alpha * N^beta + gamma fitted by damped least squares,
/// with standard errors from the final Jacobian.
struct FitResult {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double alpha_se = 0.0;
  double beta_se = 0.0;
  double gamma_se = 0.0;
  double residual_rms = 0.0;
  int iterations = 0;
  bool converged = false;
  double n_min = 0.0;  // fit window
  double n_max = 0.0;
  int n_points = 0;
  std::vector<double> objective_trace;  // objective after each accepted step
};

FitResult power_law_fit(const std::vector<std::pair<double, double>>& points);

}  // namespace dsq
