#pragma once

#include <optional>

#include "dsq/hilbert.hpp"

namespace dsq {

/// Physical inputs of the Dicke-family models (hbar = 1). The coupling is
/// stored as the absolute strength g; the critical coupling
/// g_c = sqrt(omega * Omega) and the dimensionless ratio g/g_c are derived.
struct ModelParams {
  double omega = 1.0;   // photon frequency
  double Omega = 1.0;   // atomic transition frequency
  double g = 0.0;       // coupling strength
  int n_spins = 1;      // number of two-level systems (Dicke only)
  std::optional<int> fock_cutoff;  // empty means "auto", to be resolved by the solver

  static ModelParams from_ratio(double omega, double Omega, double ratio, int n_spins = 1,
                                std::optional<int> fock_cutoff = std::nullopt);

  double critical_coupling() const;
  double coupling_ratio() const;

  void validate() const;
};

/// H = omega a^dag a + Omega Sz + (g/sqrt(N)) (a^dag + a) Sx
/// on Fock(cutoff) (x) Spin(n_spins). Commutes with parity_op exactly by
/// sparsity.
SparseOperator dicke_hamiltonian(const ModelParams& params);

/// Two-oscillator limit of the Dicke model:
/// H = omega a^dag a + Omega b^dag b + (g/2)(a^dag + a)(b^dag + b)
/// on Fock(cutoff_a) (x) Fock(cutoff_b). The g/2 normalization keeps
/// g_c = sqrt(omega * Omega) and the resonant eigenfrequencies
/// omega*sqrt(1 -+ g/g_c).
SparseOperator hp_hamiltonian(const ModelParams& params, int cutoff_a, int cutoff_b);

/// Quantum Rabi model: H = omega a^dag a + (Omega/2) sigma_z
/// + (g/2)(a + a^dag) sigma_x on Fock(cutoff) (x) Spin(1).
SparseOperator rabi_hamiltonian(const ModelParams& params);

/// Low-frequency limit of the Rabi model, a single squeezed mode:
/// H = omega a^dag a - (g^2 / 4 Omega)(a + a^dag)^2 on Fock(cutoff).
SparseOperator effective_oscillator_hamiltonian(const ModelParams& params, int cutoff);

}  // namespace dsq
