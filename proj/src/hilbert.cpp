#include "dsq/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dsq {

namespace {

std::vector<CooEntry> canonicalize(std::vector<CooEntry> entries, std::int64_t dim) {
  for (const auto& e : entries) {
    if (e.row < 0 || e.row >= dim || e.col < 0 || e.col >= dim) {
      throw std::out_of_range("sparse entry index out of range (dim = " +
                              std::to_string(dim) + ")");
    }
  }
  // Stable sort keeps the insertion order of duplicates, so duplicate sums
  // run in term order for both (r,c) and (c,r) and bitwise symmetry of
  // hermitian inputs survives the merge.
  std::stable_sort(entries.begin(), entries.end(), [](const CooEntry& a, const CooEntry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<CooEntry> merged;
  merged.reserve(entries.size());
  for (const auto& e : entries) {
    if (!merged.empty() && merged.back().row == e.row && merged.back().col == e.col) {
      merged.back().val += e.val;
    } else {
      merged.push_back(e);
    }
  }
  std::erase_if(merged, [](const CooEntry& e) {
    return e.val.real() == 0.0 && e.val.imag() == 0.0;
  });
  return merged;
}

}  // namespace

std::int64_t factor_dim(const Factor& f) {
  if (const auto* fock = std::get_if<FockFactor>(&f)) return fock->cutoff + 1;
  return std::get<SpinFactor>(f).n_spins + 1;
}

bool is_fock(const Factor& f) { return std::holds_alternative<FockFactor>(f); }
bool is_spin(const Factor& f) { return std::holds_alternative<SpinFactor>(f); }

SpaceSpec::SpaceSpec(std::vector<Factor> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw std::invalid_argument("SpaceSpec needs at least one factor");
  dim_ = 1;
  for (const auto& f : factors_) {
    if (const auto* fock = std::get_if<FockFactor>(&f)) {
      if (fock->cutoff < 0) throw std::invalid_argument("Fock cutoff must be >= 0");
    } else if (std::get<SpinFactor>(f).n_spins < 1) {
      throw std::invalid_argument("Spin factor needs n_spins >= 1");
    }
    dim_ *= factor_dim(f);
  }
}

SpaceSpec SpaceSpec::fock(int cutoff) { return SpaceSpec({FockFactor{cutoff}}); }
SpaceSpec SpaceSpec::spin(int n_spins) { return SpaceSpec({SpinFactor{n_spins}}); }
SpaceSpec SpaceSpec::fock_spin(int cutoff, int n_spins) {
  return SpaceSpec({FockFactor{cutoff}, SpinFactor{n_spins}});
}
SpaceSpec SpaceSpec::fock_fock(int cutoff_a, int cutoff_b) {
  return SpaceSpec({FockFactor{cutoff_a}, FockFactor{cutoff_b}});
}

const Factor& SpaceSpec::factor(int slot) const {
  if (slot < 0 || slot >= n_factors()) throw std::out_of_range("factor slot out of range");
  return factors_[static_cast<std::size_t>(slot)];
}

std::int64_t SpaceSpec::stride(int slot) const {
  if (slot < 0 || slot >= n_factors()) throw std::out_of_range("factor slot out of range");
  std::int64_t s = 1;
  for (int i = slot + 1; i < n_factors(); ++i) s *= factor_dim(factors_[i]);
  return s;
}

std::int64_t SpaceSpec::flat_index(const std::vector<int>& per_factor) const {
  if (static_cast<int>(per_factor.size()) != n_factors()) {
    throw std::invalid_argument("per-factor index count does not match factor count");
  }
  std::int64_t flat = 0;
  for (int i = 0; i < n_factors(); ++i) {
    const std::int64_t d = factor_dim(factors_[i]);
    if (per_factor[i] < 0 || per_factor[i] >= d) {
      throw std::out_of_range("factor index out of range");
    }
    flat = flat * d + per_factor[i];
  }
  return flat;
}

std::vector<int> SpaceSpec::unflatten(std::int64_t flat) const {
  if (flat < 0 || flat >= dim_) throw std::out_of_range("flat index out of range");
  std::vector<int> idx(factors_.size());
  for (int i = n_factors() - 1; i >= 0; --i) {
    const std::int64_t d = factor_dim(factors_[i]);
    idx[i] = static_cast<int>(flat % d);
    flat /= d;
  }
  return idx;
}

bool SpaceSpec::operator==(const SpaceSpec& other) const {
  if (factors_.size() != other.factors_.size()) return false;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const auto& a = factors_[i];
    const auto& b = other.factors_[i];
    if (a.index() != b.index()) return false;
    if (is_fock(a)) {
      if (std::get<FockFactor>(a).cutoff != std::get<FockFactor>(b).cutoff) return false;
    } else {
      if (std::get<SpinFactor>(a).n_spins != std::get<SpinFactor>(b).n_spins) return false;
    }
  }
  return true;
}

Eigen::VectorXcd CsrMatrix::apply(const Eigen::VectorXcd& x) const {
  if (x.size() != dim) throw std::invalid_argument("matvec dimension mismatch");
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(dim);
  for (std::int64_t r = 0; r < dim; ++r) {
    Complex acc(0.0, 0.0);
    for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) acc += vals[k] * x[cols[k]];
    y[r] = acc;
  }
  return y;
}

Eigen::VectorXd CsrMatrix::apply(const Eigen::VectorXd& x) const {
  if (!all_real) throw std::logic_error("real matvec on a complex-valued operator");
  if (x.size() != dim) throw std::invalid_argument("matvec dimension mismatch");
  Eigen::VectorXd y = Eigen::VectorXd::Zero(dim);
  for (std::int64_t r = 0; r < dim; ++r) {
    double acc = 0.0;
    for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) acc += real_vals[k] * x[cols[k]];
    y[r] = acc;
  }
  return y;
}

SparseOperator::SparseOperator(SpaceSpec space, std::vector<CooEntry> entries, bool hermitian)
    : space_(std::move(space)),
      entries_(canonicalize(std::move(entries), space_.dim())),
      hermitian_(hermitian) {}

SparseOperator::SparseOperator(const SparseOperator& other)
    : space_(other.space_), entries_(other.entries_), hermitian_(other.hermitian_) {
  std::lock_guard<std::mutex> lock(other.csr_mutex_);
  csr_ = other.csr_;
}

SparseOperator::SparseOperator(SparseOperator&& other) noexcept
    : space_(std::move(other.space_)),
      entries_(std::move(other.entries_)),
      hermitian_(other.hermitian_),
      csr_(std::move(other.csr_)) {}

SparseOperator& SparseOperator::operator=(const SparseOperator& other) {
  if (this != &other) {
    space_ = other.space_;
    entries_ = other.entries_;
    hermitian_ = other.hermitian_;
    std::lock_guard<std::mutex> lock(other.csr_mutex_);
    csr_ = other.csr_;
  }
  return *this;
}

SparseOperator& SparseOperator::operator=(SparseOperator&& other) noexcept {
  if (this != &other) {
    space_ = std::move(other.space_);
    entries_ = std::move(other.entries_);
    hermitian_ = other.hermitian_;
    csr_ = std::move(other.csr_);
  }
  return *this;
}

double SparseOperator::hermiticity_violation() const {
  // Canonical entries are sorted by (row, col); look up each transpose partner.
  auto find_val = [this](std::int64_t r, std::int64_t c) -> Complex {
    auto cmp = [](const CooEntry& a, const std::pair<std::int64_t, std::int64_t>& key) {
      return a.row != key.first ? a.row < key.first : a.col < key.second;
    };
    auto it = std::lower_bound(entries_.begin(), entries_.end(), std::make_pair(r, c), cmp);
    if (it != entries_.end() && it->row == r && it->col == c) return it->val;
    return Complex(0.0, 0.0);
  };
  double worst = 0.0;
  for (const auto& e : entries_) {
    worst = std::max(worst, std::abs(e.val - std::conj(find_val(e.col, e.row))));
  }
  return worst;
}

SparseOperator SparseOperator::adjoint() const {
  std::vector<CooEntry> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back({e.col, e.row, std::conj(e.val)});
  return SparseOperator(space_, std::move(out), hermitian_);
}

Eigen::MatrixXcd SparseOperator::to_dense() const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim(), dim());
  for (const auto& e : entries_) m(e.row, e.col) += e.val;
  return m;
}

const CsrMatrix& SparseOperator::csr() const {
  std::lock_guard<std::mutex> lock(csr_mutex_);
  if (!csr_) {
    auto csr = std::make_unique<CsrMatrix>();
    csr->dim = dim();
    csr->row_ptr.assign(csr->dim + 1, 0);
    for (const auto& e : entries_) ++csr->row_ptr[e.row + 1];
    for (std::int64_t r = 0; r < csr->dim; ++r) csr->row_ptr[r + 1] += csr->row_ptr[r];
    csr->cols.resize(entries_.size());
    csr->vals.resize(entries_.size());
    // Entries are already in canonical row-major order.
    for (std::size_t k = 0; k < entries_.size(); ++k) {
      csr->cols[k] = entries_[k].col;
      csr->vals[k] = entries_[k].val;
    }
    csr->all_real = std::all_of(entries_.begin(), entries_.end(),
                                [](const CooEntry& e) { return e.val.imag() == 0.0; });
    if (csr->all_real) {
      csr->real_vals.resize(entries_.size());
      for (std::size_t k = 0; k < entries_.size(); ++k) {
        csr->real_vals[k] = entries_[k].val.real();
      }
    }
    csr_ = std::move(csr);
  }
  return *csr_;
}

QuantumState::QuantumState(SpaceSpec space, Eigen::VectorXcd amplitudes)
    : space_(std::move(space)), amps_(std::move(amplitudes)) {
  if (amps_.size() != space_.dim()) {
    throw std::invalid_argument("amplitude vector length does not match space dimension");
  }
  if (std::abs(amps_.norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("state vector is not normalized to 1e-12");
  }
}

QuantumState QuantumState::normalized(SpaceSpec space, Eigen::VectorXcd amplitudes) {
  const double n = amplitudes.norm();
  if (n == 0.0) throw std::invalid_argument("cannot normalize a null vector");
  return QuantumState(std::move(space), amplitudes / n);
}

QuantumState QuantumState::basis_state(SpaceSpec space, const std::vector<int>& per_factor) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(space.dim());
  v[space.flat_index(per_factor)] = Complex(1.0, 0.0);
  return QuantumState(std::move(space), std::move(v));
}

// --- factor-local matrices ---------------------------------------------------

LocalMatrix local_identity(std::int64_t dim) {
  LocalMatrix m{dim, {}};
  m.entries.reserve(dim);
  for (std::int64_t i = 0; i < dim; ++i) m.entries.push_back({i, i, Complex(1.0, 0.0)});
  return m;
}

LocalMatrix local_annihilation(int cutoff) {
  LocalMatrix m{cutoff + 1, {}};
  for (int n = 1; n <= cutoff; ++n) {
    m.entries.push_back({n - 1, n, Complex(std::sqrt(static_cast<double>(n)), 0.0)});
  }
  return m;
}

LocalMatrix local_number(int cutoff) {
  LocalMatrix m{cutoff + 1, {}};
  for (int n = 1; n <= cutoff; ++n) {
    m.entries.push_back({n, n, Complex(static_cast<double>(n), 0.0)});
  }
  return m;
}

LocalMatrix local_ladder_sum(int cutoff) {
  LocalMatrix m{cutoff + 1, {}};
  for (int n = 1; n <= cutoff; ++n) {
    const double s = std::sqrt(static_cast<double>(n));
    m.entries.push_back({n - 1, n, Complex(s, 0.0)});
    m.entries.push_back({n, n - 1, Complex(s, 0.0)});
  }
  return m;
}

LocalMatrix local_spin_z(int n_spins) {
  LocalMatrix m{n_spins + 1, {}};
  const double j = 0.5 * n_spins;
  for (int i = 0; i <= n_spins; ++i) {
    const double mz = i - j;
    if (mz != 0.0) m.entries.push_back({i, i, Complex(mz, 0.0)});
  }
  return m;
}

LocalMatrix local_spin_plus(int n_spins) {
  LocalMatrix m{n_spins + 1, {}};
  const double j = 0.5 * n_spins;
  for (int i = 0; i + 1 <= n_spins; ++i) {
    const double mz = i - j;
    const double s = std::sqrt(j * (j + 1.0) - mz * (mz + 1.0));
    m.entries.push_back({i + 1, i, Complex(s, 0.0)});
  }
  return m;
}

LocalMatrix local_spin_x(int n_spins) {
  LocalMatrix m{n_spins + 1, {}};
  const double j = 0.5 * n_spins;
  for (int i = 0; i + 1 <= n_spins; ++i) {
    const double mz = i - j;
    const double half = 0.5 * std::sqrt(j * (j + 1.0) - mz * (mz + 1.0));
    m.entries.push_back({i + 1, i, Complex(half, 0.0)});
    m.entries.push_back({i, i + 1, Complex(half, 0.0)});
  }
  return m;
}

LocalMatrix local_spin_y(int n_spins) {
  LocalMatrix m{n_spins + 1, {}};
  const double j = 0.5 * n_spins;
  for (int i = 0; i + 1 <= n_spins; ++i) {
    const double mz = i - j;
    const double half = 0.5 * std::sqrt(j * (j + 1.0) - mz * (mz + 1.0));
    // Sy = (S+ - S-)/(2i): raising entries get -i/2, lowering +i/2 weights.
    m.entries.push_back({i + 1, i, Complex(0.0, -half)});
    m.entries.push_back({i, i + 1, Complex(0.0, half)});
  }
  return m;
}

SparseOperator embed(const SpaceSpec& space, int slot, const LocalMatrix& local,
                     bool hermitian) {
  return embed_product(space, {{slot, local}}, hermitian);
}

SparseOperator embed_product(const SpaceSpec& space,
                             const std::vector<std::pair<int, LocalMatrix>>& locals,
                             bool hermitian) {
  for (const auto& [slot, local] : locals) {
    if (slot < 0 || slot >= space.n_factors()) {
      throw std::out_of_range("embed slot out of range");
    }
    if (local.dim != factor_dim(space.factor(slot))) {
      throw std::invalid_argument("local matrix dimension does not match factor");
    }
  }
  for (std::size_t i = 0; i < locals.size(); ++i) {
    for (std::size_t k = i + 1; k < locals.size(); ++k) {
      if (locals[i].first == locals[k].first) {
        throw std::invalid_argument("embed_product slots must be distinct");
      }
    }
  }

  std::vector<bool> acted(space.n_factors(), false);
  for (const auto& [slot, local] : locals) acted[slot] = true;

  // Enumerate the identity multi-index over the untouched slots once.
  std::vector<int> idle_slots;
  for (int s = 0; s < space.n_factors(); ++s) {
    if (!acted[s]) idle_slots.push_back(s);
  }
  std::vector<std::int64_t> idle_offsets{0};
  for (int s : idle_slots) {
    const std::int64_t d = factor_dim(space.factor(s));
    const std::int64_t stride = space.stride(s);
    std::vector<std::int64_t> next;
    next.reserve(idle_offsets.size() * d);
    for (std::int64_t base : idle_offsets) {
      for (std::int64_t i = 0; i < d; ++i) next.push_back(base + i * stride);
    }
    idle_offsets = std::move(next);
  }

  // Cartesian product over the entry lists of the acted slots.
  std::vector<CooEntry> out;
  std::vector<std::size_t> pick(locals.size(), 0);
  while (true) {
    std::int64_t row = 0;
    std::int64_t col = 0;
    Complex val(1.0, 0.0);
    bool alive = true;
    for (std::size_t i = 0; i < locals.size(); ++i) {
      const auto& [slot, local] = locals[i];
      if (local.entries.empty()) {
        alive = false;
        break;
      }
      const CooEntry& e = local.entries[pick[i]];
      const std::int64_t stride = space.stride(slot);
      row += e.row * stride;
      col += e.col * stride;
      val *= e.val;
    }
    if (!alive) break;
    for (std::int64_t base : idle_offsets) out.push_back({base + row, base + col, val});

    // advance the mixed-radix pick
    std::size_t p = 0;
    while (p < pick.size()) {
      if (++pick[p] < locals[p].second.entries.size()) break;
      pick[p] = 0;
      ++p;
    }
    if (p == pick.size()) break;
  }
  return SparseOperator(space, std::move(out), hermitian);
}

// --- named operators ---------------------------------------------------------

SparseOperator identity_op(const SpaceSpec& space) {
  std::vector<CooEntry> entries;
  entries.reserve(space.dim());
  for (std::int64_t i = 0; i < space.dim(); ++i) entries.push_back({i, i, Complex(1.0, 0.0)});
  return SparseOperator(space, std::move(entries), true);
}

namespace {
const FockFactor& require_fock(const SpaceSpec& space, int slot, const char* what) {
  const Factor& f = space.factor(slot);
  if (!is_fock(f)) {
    throw std::invalid_argument(std::string(what) + ": slot is not a Fock factor");
  }
  return std::get<FockFactor>(f);
}

const SpinFactor& require_spin(const SpaceSpec& space, int slot, const char* what) {
  const Factor& f = space.factor(slot);
  if (!is_spin(f)) {
    throw std::invalid_argument(std::string(what) + ": slot is not a Spin factor");
  }
  return std::get<SpinFactor>(f);
}
}  // namespace

SparseOperator annihilation_op(const SpaceSpec& space, int slot) {
  const auto& fock = require_fock(space, slot, "annihilation_op");
  return embed(space, slot, local_annihilation(fock.cutoff), false);
}

SparseOperator number_op(const SpaceSpec& space, int slot) {
  const auto& fock = require_fock(space, slot, "number_op");
  return embed(space, slot, local_number(fock.cutoff), true);
}

SpinOps spin_ops(const SpaceSpec& space, int slot) {
  const auto& spin = require_spin(space, slot, "spin_ops");
  return SpinOps{embed(space, slot, local_spin_x(spin.n_spins), true),
                 embed(space, slot, local_spin_y(spin.n_spins), true),
                 embed(space, slot, local_spin_z(spin.n_spins), true)};
}

SparseOperator parity_op(const SpaceSpec& space) {
  if (space.n_factors() != 2 || !is_fock(space.factor(0)) || !is_spin(space.factor(1))) {
    throw std::invalid_argument("parity_op expects a Fock (x) Spin space");
  }
  const std::int64_t spin_dim = factor_dim(space.factor(1));
  std::vector<CooEntry> entries;
  entries.reserve(space.dim());
  for (std::int64_t flat = 0; flat < space.dim(); ++flat) {
    const std::int64_t n = flat / spin_dim;
    const std::int64_t ladder = flat % spin_dim;  // m + j, a non-negative integer
    const double sign = ((n + ladder) % 2 == 0) ? 1.0 : -1.0;
    entries.push_back({flat, flat, Complex(sign, 0.0)});
  }
  return SparseOperator(space, std::move(entries), true);
}

Eigen::VectorXcd apply(const SparseOperator& op, const QuantumState& state) {
  if (op.space() != state.space()) {
    throw std::invalid_argument("apply: operator and state live on different spaces");
  }
  return op.csr().apply(state.amplitudes());
}

SparseOperator scaled(const SparseOperator& op, Complex factor) {
  std::vector<CooEntry> entries = op.entries();
  for (auto& e : entries) e.val *= factor;
  const bool herm = op.hermitian() && factor.imag() == 0.0;
  return SparseOperator(op.space(), std::move(entries), herm);
}

SparseOperator sparse_sum(const std::vector<SparseOperator>& terms, bool hermitian) {
  if (terms.empty()) throw std::invalid_argument("sparse_sum of zero terms");
  std::vector<CooEntry> entries;
  for (const auto& t : terms) {
    if (t.space() != terms.front().space()) {
      throw std::invalid_argument("sparse_sum terms live on different spaces");
    }
    entries.insert(entries.end(), t.entries().begin(), t.entries().end());
  }
  return SparseOperator(terms.front().space(), std::move(entries), hermitian);
}

SparseOperator sparse_matmul(const SparseOperator& a, const SparseOperator& b,
                             bool hermitian) {
  if (a.space() != b.space()) {
    throw std::invalid_argument("sparse_matmul operands live on different spaces");
  }
  const CsrMatrix& A = a.csr();
  const CsrMatrix& B = b.csr();
  const std::int64_t dim = A.dim;
  std::vector<CooEntry> out;
  std::vector<Complex> acc(dim, Complex(0.0, 0.0));
  std::vector<char> seen(dim, 0);
  std::vector<std::int64_t> touched;
  for (std::int64_t r = 0; r < dim; ++r) {
    touched.clear();
    for (std::int64_t ka = A.row_ptr[r]; ka < A.row_ptr[r + 1]; ++ka) {
      const std::int64_t mid = A.cols[ka];
      const Complex va = A.vals[ka];
      for (std::int64_t kb = B.row_ptr[mid]; kb < B.row_ptr[mid + 1]; ++kb) {
        const std::int64_t c = B.cols[kb];
        if (!seen[c]) {
          seen[c] = 1;
          touched.push_back(c);
        }
        acc[c] += va * B.vals[kb];
      }
    }
    std::sort(touched.begin(), touched.end());
    for (std::int64_t c : touched) {
      out.push_back({r, c, acc[c]});
      acc[c] = Complex(0.0, 0.0);
      seen[c] = 0;
    }
  }
  return SparseOperator(a.space(), std::move(out), hermitian);
}

}  // namespace dsq
