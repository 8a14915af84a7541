#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "dsq/hilbert.hpp"

namespace dsq {

struct SolveConfig {
  double eig_tol = 1e-10;       // relative eigenvalue tolerance
  int max_lanczos_iters = 500;  // Krylov basis budget per eigenpair
  int dense_threshold = 2000;   // below this dimension a dense solve is used
  std::uint64_t seed = 7;       // deterministic pseudo-random start vector

  void validate() const;
};

/// k lowest eigenpairs in ascending order. Every residual satisfies
/// ||H v - E v|| <= eig_tol * (|E| + spectral_scale).
struct SpectrumResult {
  std::vector<double> energies;
  std::vector<QuantumState> states;
  std::vector<double> residual_norms;
  double spectral_scale = 0.0;
  std::optional<int> cutoff_used;
};

SpectrumResult ground_state(const SparseOperator& h, const SolveConfig& cfg = {});

SpectrumResult low_spectrum(const SparseOperator& h, int k, const SolveConfig& cfg = {});

/// Polariton frequencies extracted from the low spectrum, the generalized
/// vacuum Rabi splitting. The lower entry is always E1 - E0; the upper one is
/// located by symmetry sectors (resonant two-oscillator model) or by linear
/// transition moments from the ground state, since near criticality several
/// multi-quanta levels slide below the upper polariton.
struct GapEstimate {
  double omega_tilde;
  double Omega_tilde;
  bool ill_conditioned = false;  // set when E1 - E0 < 1e-6 * Omega_tilde
};

GapEstimate gap_frequencies(const SparseOperator& h, const SolveConfig& cfg = {});

/// Parametrized Hamiltonian recipe: maps a Fock cutoff to the operator.
using HamiltonianRecipe = std::function<SparseOperator(int)>;

struct AutoCutoffResult {
  int cutoff;
  SpectrumResult spectrum;
  double n_photons;  // converged <a^dag a> of the slot-0 mode
};

/// Doubles the cutoff from 16 until <a^dag a> is stable between successive
/// cutoffs (|delta| < max(1e-6, 1e-4 * value)) and the top Fock level holds
/// less than 1e-8 population; hard cap 4096.
AutoCutoffResult auto_cutoff(const HamiltonianRecipe& recipe, const SolveConfig& cfg = {});

/// <a^dag a> of the Fock factor at `slot` (diagonal observable, exact sum).
double slot_number_expectation(const QuantumState& state, int slot);

/// Total population of the highest level of the Fock factor at `slot`.
double top_level_population(const QuantumState& state, int slot);

}  // namespace dsq
