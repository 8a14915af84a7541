#include "dsq/models.hpp"

#include <cmath>
#include <stdexcept>

namespace dsq {

ModelParams ModelParams::from_ratio(double omega, double Omega, double ratio, int n_spins,
                                    std::optional<int> fock_cutoff) {
  if (ratio < 0.0) throw std::invalid_argument("coupling ratio must be >= 0");
  ModelParams p;
  p.omega = omega;
  p.Omega = Omega;
  p.g = ratio * std::sqrt(omega * Omega);
  p.n_spins = n_spins;
  p.fock_cutoff = fock_cutoff;
  p.validate();
  return p;
}

double ModelParams::critical_coupling() const { return std::sqrt(omega * Omega); }

double ModelParams::coupling_ratio() const { return g / critical_coupling(); }

void ModelParams::validate() const {
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
  if (!(Omega > 0.0)) throw std::invalid_argument("Omega must be positive");
  if (g < 0.0) throw std::invalid_argument("coupling g must be >= 0");
  if (n_spins < 1) throw std::invalid_argument("n_spins must be >= 1");
  if (fock_cutoff && *fock_cutoff < 1) {
    throw std::invalid_argument("fock_cutoff must be >= 1 when given");
  }
}

namespace {

int resolved_cutoff(const ModelParams& params, const char* model) {
  if (!params.fock_cutoff) {
    throw std::invalid_argument(std::string(model) +
                                ": fock_cutoff is unresolved; pick one or use auto_cutoff");
  }
  return *params.fock_cutoff;
}

// (a + a^dag)^2 in the truncated space, i.e. the square of the truncated
// ladder sum. Built entry-wise so it is bitwise symmetric.
LocalMatrix local_ladder_sum_squared(int cutoff) {
  LocalMatrix m{cutoff + 1, {}};
  for (int n = 0; n <= cutoff; ++n) {
    double diag = static_cast<double>(n);
    if (n < cutoff) diag += static_cast<double>(n + 1);
    m.entries.push_back({n, n, Complex(diag, 0.0)});
  }
  for (int n = 0; n + 2 <= cutoff; ++n) {
    const double v = std::sqrt(static_cast<double>(n + 1)) *
                     std::sqrt(static_cast<double>(n + 2));
    m.entries.push_back({n, n + 2, Complex(v, 0.0)});
    m.entries.push_back({n + 2, n, Complex(v, 0.0)});
  }
  return m;
}

// omega a^dag a + Omega Sz + coupling (a^dag + a) Sx on Fock (x) Spin.
SparseOperator fock_spin_hamiltonian(const SpaceSpec& space, double omega, double Omega,
                                     double coupling, int cutoff, int n_spins) {
  std::vector<SparseOperator> terms;
  terms.push_back(scaled(embed(space, 0, local_number(cutoff), true), omega));
  terms.push_back(scaled(embed(space, 1, local_spin_z(n_spins), true), Omega));
  terms.push_back(scaled(
      embed_product(space, {{0, local_ladder_sum(cutoff)}, {1, local_spin_x(n_spins)}}, true),
      coupling));
  return sparse_sum(terms, true);
}

}  // namespace

SparseOperator dicke_hamiltonian(const ModelParams& params) {
  params.validate();
  const int cutoff = resolved_cutoff(params, "dicke_hamiltonian");
  const SpaceSpec space = SpaceSpec::fock_spin(cutoff, params.n_spins);
  const double coupling = params.g / std::sqrt(static_cast<double>(params.n_spins));
  return fock_spin_hamiltonian(space, params.omega, params.Omega, coupling, cutoff,
                               params.n_spins);
}

SparseOperator hp_hamiltonian(const ModelParams& params, int cutoff_a, int cutoff_b) {
  params.validate();
  if (cutoff_a < 1 || cutoff_b < 1) {
    throw std::invalid_argument("hp_hamiltonian: both cutoffs must be >= 1");
  }
  const SpaceSpec space = SpaceSpec::fock_fock(cutoff_a, cutoff_b);
  std::vector<SparseOperator> terms;
  terms.push_back(scaled(embed(space, 0, local_number(cutoff_a), true), params.omega));
  terms.push_back(scaled(embed(space, 1, local_number(cutoff_b), true), params.Omega));
  terms.push_back(scaled(
      embed_product(space, {{0, local_ladder_sum(cutoff_a)}, {1, local_ladder_sum(cutoff_b)}},
                    true),
      0.5 * params.g));
  return sparse_sum(terms, true);
}

SparseOperator rabi_hamiltonian(const ModelParams& params) {
  params.validate();
  const int cutoff = resolved_cutoff(params, "rabi_hamiltonian");
  const SpaceSpec space = SpaceSpec::fock_spin(cutoff, 1);
  // (Omega/2) sigma_z = Omega Sz and (g/2) sigma_x = g Sx for a single spin.
  return fock_spin_hamiltonian(space, params.omega, params.Omega, params.g, cutoff, 1);
}

SparseOperator effective_oscillator_hamiltonian(const ModelParams& params, int cutoff) {
  params.validate();
  if (cutoff < 1) throw std::invalid_argument("effective_oscillator_hamiltonian: cutoff >= 1");
  const SpaceSpec space = SpaceSpec::fock(cutoff);
  std::vector<SparseOperator> terms;
  terms.push_back(scaled(embed(space, 0, local_number(cutoff), true), params.omega));
  terms.push_back(scaled(embed(space, 0, local_ladder_sum_squared(cutoff), true),
                         -params.g * params.g / (4.0 * params.Omega)));
  return sparse_sum(terms, true);
}

}  // namespace dsq
