#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <mutex>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace dsq {

using Complex = std::complex<double>;

/// Bosonic factor truncated at `cutoff` quanta; dimension cutoff + 1.
struct FockFactor {
  int cutoff;
};

/// Collective spin of n_spins two-level systems restricted to the maximal
/// ladder j = n_spins/2; dimension n_spins + 1. Basis ordered by ascending
/// magnetic number m = index - j.
struct SpinFactor {
  int n_spins;

  double j() const { return 0.5 * n_spins; }
};

using Factor = std::variant<FockFactor, SpinFactor>;

std::int64_t factor_dim(const Factor& f);
bool is_fock(const Factor& f);
bool is_spin(const Factor& f);

/// Truncated tensor-product Hilbert space. The composite index is
/// lexicographic with the FIRST factor slowest: for two factors,
/// flat = i0 * dim1 + i1.
class SpaceSpec {
 public:
  explicit SpaceSpec(std::vector<Factor> factors);

  static SpaceSpec fock(int cutoff);
  static SpaceSpec spin(int n_spins);
  static SpaceSpec fock_spin(int cutoff, int n_spins);
  static SpaceSpec fock_fock(int cutoff_a, int cutoff_b);

  std::int64_t dim() const { return dim_; }
  int n_factors() const { return static_cast<int>(factors_.size()); }
  const Factor& factor(int slot) const;
  const std::vector<Factor>& factors() const { return factors_; }

  /// Product of factor dimensions strictly after `slot` (the stride of that
  /// slot's index in the flat composite index).
  std::int64_t stride(int slot) const;

  std::int64_t flat_index(const std::vector<int>& per_factor) const;
  std::vector<int> unflatten(std::int64_t flat) const;

  bool operator==(const SpaceSpec& other) const;
  bool operator!=(const SpaceSpec& other) const { return !(*this == other); }

 private:
  std::vector<Factor> factors_;
  std::int64_t dim_;
};

/// One coordinate-format matrix entry.
struct CooEntry {
  std::int64_t row;
  std::int64_t col;
  Complex val;
};

/// Compressed-row layout used for matrix-vector products. When every stored
/// value is purely real, a real-valued copy is kept so solves can run in
/// real arithmetic.
struct CsrMatrix {
  std::int64_t dim = 0;
  std::vector<std::int64_t> row_ptr;
  std::vector<std::int64_t> cols;
  std::vector<Complex> vals;
  bool all_real = false;
  std::vector<double> real_vals;  // populated iff all_real

  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
};

/// Sparse operator on a SpaceSpec. Entries are kept canonical: sorted by
/// (row, col), duplicates summed, exact zeros dropped. Immutable after
/// construction; safe for concurrent readers.
class SparseOperator {
 public:
  SparseOperator(SpaceSpec space, std::vector<CooEntry> entries, bool hermitian);

  SparseOperator(const SparseOperator& other);
  SparseOperator(SparseOperator&& other) noexcept;
  SparseOperator& operator=(const SparseOperator& other);
  SparseOperator& operator=(SparseOperator&& other) noexcept;

  const SpaceSpec& space() const { return space_; }
  std::int64_t dim() const { return space_.dim(); }
  const std::vector<CooEntry>& entries() const { return entries_; }
  std::size_t nnz() const { return entries_.size(); }
  bool hermitian() const { return hermitian_; }

  /// Max |A(r,c) - conj(A(c,r))| over the canonical entry set; 0 means the
  /// entry set equals its conjugate transpose bit-identically.
  double hermiticity_violation() const;

  SparseOperator adjoint() const;
  Eigen::MatrixXcd to_dense() const;

  /// Compressed-row form, built once on first use (thread safe).
  const CsrMatrix& csr() const;

 private:
  SpaceSpec space_;
  std::vector<CooEntry> entries_;
  bool hermitian_;
  mutable std::mutex csr_mutex_;
  mutable std::shared_ptr<const CsrMatrix> csr_;
};

/// Normalized pure state; ||amplitudes||_2 must be 1 within 1e-12.
class QuantumState {
 public:
  QuantumState(SpaceSpec space, Eigen::VectorXcd amplitudes);

  /// Normalizes the vector first (errors only on an exactly null vector).
  static QuantumState normalized(SpaceSpec space, Eigen::VectorXcd amplitudes);

  /// Basis state |per_factor[0], per_factor[1], ...>.
  static QuantumState basis_state(SpaceSpec space, const std::vector<int>& per_factor);

  const SpaceSpec& space() const { return space_; }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }

 private:
  SpaceSpec space_;
  Eigen::VectorXcd amps_;
};

// --- factor-local matrices ------------------------------------------------

/// Small matrix on a single factor, in coordinate form.
struct LocalMatrix {
  std::int64_t dim = 0;
  std::vector<CooEntry> entries;
};

LocalMatrix local_identity(std::int64_t dim);
LocalMatrix local_annihilation(int cutoff);           // <n-1|a|n> = sqrt(n)
LocalMatrix local_number(int cutoff);                 // diag(0..cutoff)
LocalMatrix local_ladder_sum(int cutoff);             // a + a^dag, exactly symmetric
LocalMatrix local_spin_z(int n_spins);                // diag(m), m = i - j
LocalMatrix local_spin_plus(int n_spins);             // sqrt(j(j+1)-m(m+1))
LocalMatrix local_spin_x(int n_spins);                // (S+ + S-)/2, exactly symmetric
LocalMatrix local_spin_y(int n_spins);                // (S+ - S-)/(2i)

/// Embeds a factor-local matrix into the full product space (identity on
/// all other slots).
SparseOperator embed(const SpaceSpec& space, int slot, const LocalMatrix& local,
                     bool hermitian = false);

/// Embeds a product of factor-local matrices acting on distinct slots
/// (identity elsewhere). Each output entry is a single product of factor
/// entries, so bitwise symmetry of the locals is preserved exactly.
SparseOperator embed_product(const SpaceSpec& space,
                             const std::vector<std::pair<int, LocalMatrix>>& locals,
                             bool hermitian = false);

// --- operators required by the library surface -----------------------------

SparseOperator identity_op(const SpaceSpec& space);

/// Annihilation operator of the Fock factor at `slot`, embedded in the full
/// space.
SparseOperator annihilation_op(const SpaceSpec& space, int slot);

/// Number operator a^dag a of the Fock factor at `slot`.
SparseOperator number_op(const SpaceSpec& space, int slot);

struct SpinOps {
  SparseOperator sx;
  SparseOperator sy;
  SparseOperator sz;
};

/// Collective spin operators of the Spin factor at `slot`, embedded in the
/// full space.
SpinOps spin_ops(const SpaceSpec& space, int slot);

/// Parity operator on a Fock (x) Spin space: diagonal entries
/// exp[i*pi*(n + m + j)] = +/-1 on |n> (x) |j,m>.
SparseOperator parity_op(const SpaceSpec& space);

/// Exact sparse matrix-vector product; the result is not renormalized.
Eigen::VectorXcd apply(const SparseOperator& op, const QuantumState& state);

// --- operator algebra -------------------------------------------------------

SparseOperator scaled(const SparseOperator& op, Complex factor);

/// Sum of operators on a common space. Terms are concatenated in order and
/// re-canonicalized, so bitwise-hermitian inputs stay bitwise hermitian.
SparseOperator sparse_sum(const std::vector<SparseOperator>& terms, bool hermitian = false);

/// Exact sparse product A*B (COO accumulation in deterministic order).
SparseOperator sparse_matmul(const SparseOperator& a, const SparseOperator& b,
                             bool hermitian = false);

}  // namespace dsq
