#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "dsq/hilbert.hpp"
#include "dsq/models.hpp"

using namespace dsq;

namespace {

const CooEntry* find_entry(const SparseOperator& op, std::int64_t r, std::int64_t c) {
  for (const auto& e : op.entries()) {
    if (e.row == r && e.col == c) return &e;
  }
  return nullptr;
}

Eigen::MatrixXcd dense_kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Eigen::MatrixXcd local_dense(const LocalMatrix& m) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(m.dim, m.dim);
  for (const auto& e : m.entries) out(e.row, e.col) += e.val;
  return out;
}

}  // namespace

TEST_CASE("space spec dimensions and index conventions") {
  const SpaceSpec s = SpaceSpec::fock_spin(3, 2);
  CHECK(s.dim() == 4 * 3);
  CHECK(s.stride(0) == 3);
  CHECK(s.stride(1) == 1);
  CHECK(s.flat_index({2, 1}) == 2 * 3 + 1);
  const auto idx = s.unflatten(7);
  CHECK(idx[0] == 2);
  CHECK(idx[1] == 1);

  // kron dimension law over a grid of factor pairs
  for (int ca = 0; ca <= 4; ++ca) {
    for (int n = 1; n <= 4; ++n) {
      const SpaceSpec pair = SpaceSpec::fock_spin(ca, n);
      CHECK(pair.dim() == (ca + 1) * (n + 1));
    }
  }

  CHECK_THROWS_AS(SpaceSpec::fock(-1), std::invalid_argument);
  CHECK_THROWS_AS(SpaceSpec::spin(0), std::invalid_argument);
  CHECK_THROWS_AS(s.flat_index({4, 0}), std::out_of_range);
}

TEST_CASE("annihilation operator ladder elements") {
  const SpaceSpec s = SpaceSpec::fock(2);
  const SparseOperator a = annihilation_op(s, 0);
  CHECK(a.nnz() == 2);
  const auto* e01 = find_entry(a, 0, 1);
  const auto* e12 = find_entry(a, 1, 2);
  REQUIRE(e01 != nullptr);
  REQUIRE(e12 != nullptr);
  CHECK(e01->val == Complex(1.0, 0.0));
  CHECK(e12->val == Complex(std::sqrt(2.0), 0.0));

  CHECK_THROWS_AS(annihilation_op(s, 1), std::out_of_range);
  CHECK_THROWS_AS(annihilation_op(SpaceSpec::spin(2), 0), std::invalid_argument);
}

TEST_CASE("number operator from a^dag a") {
  const SpaceSpec s = SpaceSpec::fock(3);
  const SparseOperator a = annihilation_op(s, 0);
  const SparseOperator n = sparse_matmul(a.adjoint(), a, true);
  for (int k = 0; k <= 3; ++k) {
    const auto* e = find_entry(n, k, k);
    if (k == 0) {
      CHECK(e == nullptr);  // exact zero dropped
    } else {
      REQUIRE(e != nullptr);
      CHECK(e->val.real() == doctest::Approx(k).epsilon(0));
    }
  }
  // matches the direct builder entry for entry
  const SparseOperator n2 = number_op(s, 0);
  CHECK(n.entries().size() == n2.entries().size());
  for (std::size_t i = 0; i < n.entries().size(); ++i) {
    CHECK(n.entries()[i].val == n2.entries()[i].val);
  }
}

TEST_CASE("truncated commutator [a, a^dag]") {
  for (int cutoff : {2, 5, 9}) {
    const SpaceSpec s = SpaceSpec::fock(cutoff);
    const SparseOperator a = annihilation_op(s, 0);
    const SparseOperator comm = sparse_sum(
        {sparse_matmul(a, a.adjoint()), scaled(sparse_matmul(a.adjoint(), a), -1.0)});
    for (int k = 0; k <= cutoff; ++k) {
      const auto* e = find_entry(comm, k, k);
      REQUIRE(e != nullptr);
      const double expected = (k == cutoff) ? -static_cast<double>(cutoff) : 1.0;
      CHECK(e->val.real() == expected);
      CHECK(e->val.imag() == 0.0);
    }
    CHECK(comm.nnz() == static_cast<std::size_t>(cutoff + 1));
  }
}

TEST_CASE("spin operators for small ladders") {
  const SpaceSpec s1 = SpaceSpec::spin(1);
  const auto ops1 = spin_ops(s1, 0);
  CHECK(find_entry(ops1.sz, 0, 0)->val.real() == -0.5);
  CHECK(find_entry(ops1.sz, 1, 1)->val.real() == 0.5);
  CHECK(find_entry(ops1.sx, 0, 1)->val.real() == 0.5);
  CHECK(find_entry(ops1.sx, 1, 0)->val.real() == 0.5);

  const SpaceSpec s2 = SpaceSpec::spin(2);
  const auto ops2 = spin_ops(s2, 0);
  CHECK(find_entry(ops2.sz, 0, 0)->val.real() == -1.0);
  CHECK(find_entry(ops2.sz, 1, 1) == nullptr);  // exact zero dropped
  CHECK(find_entry(ops2.sz, 2, 2)->val.real() == 1.0);
  // S+ ladder elements sqrt(2) show up in Sx as sqrt(2)/2
  CHECK(find_entry(ops2.sx, 1, 0)->val.real() == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-15));

  CHECK_THROWS_AS(spin_ops(SpaceSpec::fock(2), 0), std::invalid_argument);
}

TEST_CASE("angular momentum algebra and Casimir up to 20 spins") {
  for (int n = 1; n <= 20; ++n) {
    const SpaceSpec s = SpaceSpec::spin(n);
    const auto ops = spin_ops(s, 0);
    const double j = 0.5 * n;

    const Eigen::MatrixXcd sx = ops.sx.to_dense();
    const Eigen::MatrixXcd sy = ops.sy.to_dense();
    const Eigen::MatrixXcd sz = ops.sz.to_dense();
    const Eigen::MatrixXcd comm = sx * sy - sy * sx - Complex(0.0, 1.0) * sz;
    CHECK(comm.cwiseAbs().maxCoeff() <= 1e-12);

    const Eigen::MatrixXcd casimir = sx * sx + sy * sy + sz * sz;
    const Eigen::MatrixXcd expected =
        j * (j + 1.0) * Eigen::MatrixXcd::Identity(s.dim(), s.dim());
    CHECK((casimir - expected).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("parity operator entries and exact commutation with the Dicke model") {
  const SpaceSpec s = SpaceSpec::fock_spin(4, 3);
  const SparseOperator pi = parity_op(s);
  CHECK(find_entry(pi, s.flat_index({0, 0}), s.flat_index({0, 0}))->val.real() == 1.0);
  CHECK(find_entry(pi, s.flat_index({1, 0}), s.flat_index({1, 0}))->val.real() == -1.0);
  CHECK(pi.hermiticity_violation() == 0.0);
  CHECK_THROWS_AS(parity_op(SpaceSpec::fock_fock(2, 2)), std::invalid_argument);

  for (double ratio : {0.0, 0.5, 1.0, 1.3}) {
    for (int n : {1, 2, 5}) {
      const auto params = ModelParams::from_ratio(1.0, 1.0, ratio, n, 6);
      const SparseOperator h = dicke_hamiltonian(params);
      const SparseOperator p = parity_op(h.space());
      const SparseOperator comm =
          sparse_sum({sparse_matmul(h, p), scaled(sparse_matmul(p, h), -1.0)});
      CHECK(comm.nnz() == 0);  // exact cancellation: H never mixes parity sectors
    }
  }
}

TEST_CASE("apply performs the exact sparse matrix-vector product") {
  const SpaceSpec s = SpaceSpec::fock(3);
  const QuantumState one = QuantumState::basis_state(s, {1});
  const Eigen::VectorXcd lowered = apply(annihilation_op(s, 0), one);
  CHECK(lowered[0] == Complex(1.0, 0.0));
  CHECK(lowered.tail(3).norm() == 0.0);

  const QuantumState id_in = QuantumState::basis_state(s, {2});
  const Eigen::VectorXcd same = apply(identity_op(s), id_in);
  CHECK((same - id_in.amplitudes()).norm() == 0.0);

  Eigen::VectorXcd sup = Eigen::VectorXcd::Zero(4);
  sup[0] = sup[2] = 1.0 / std::sqrt(2.0);
  const QuantumState state(s, sup);
  const Eigen::VectorXcd out = apply(number_op(s, 0), state);
  CHECK(out[0] == Complex(0.0, 0.0));
  CHECK(out[1] == Complex(0.0, 0.0));
  CHECK(std::abs(out[2] - Complex(std::sqrt(2.0), 0.0)) < 1e-15);

  const QuantumState other(SpaceSpec::fock(5),
                           Eigen::VectorXcd::Unit(6, 0));
  CHECK_THROWS_AS(apply(number_op(s, 0), other), std::invalid_argument);
}

TEST_CASE("hermitian-flagged operators are bitwise hermitian") {
  const SpaceSpec s = SpaceSpec::fock_spin(8, 5);
  const auto ops = spin_ops(s, 1);
  for (const SparseOperator* op :
       {&ops.sx, &ops.sy, &ops.sz}) {
    CHECK(op->hermiticity_violation() == 0.0);
  }
  CHECK(number_op(s, 0).hermiticity_violation() == 0.0);
  CHECK(parity_op(s).hermiticity_violation() == 0.0);
  // annihilation is not hermitian and reports a violation
  CHECK(annihilation_op(s, 0).hermiticity_violation() > 0.0);
}

TEST_CASE("embed_product equals the dense Kronecker product") {
  const SpaceSpec s = SpaceSpec::fock_spin(3, 2);
  const LocalMatrix ladder = local_ladder_sum(3);
  const LocalMatrix sx = local_spin_x(2);
  const SparseOperator joint = embed_product(s, {{0, ladder}, {1, sx}}, true);
  const Eigen::MatrixXcd expected = dense_kron(local_dense(ladder), local_dense(sx));
  CHECK((joint.to_dense() - expected).cwiseAbs().maxCoeff() == 0.0);
  CHECK(joint.hermiticity_violation() == 0.0);

  // identity on the untouched slot
  const SparseOperator only_spin = embed(s, 1, sx, true);
  const Eigen::MatrixXcd expected2 =
      dense_kron(Eigen::MatrixXcd::Identity(4, 4), local_dense(sx));
  CHECK((only_spin.to_dense() - expected2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("coordinate entries are canonicalized") {
  const SpaceSpec s = SpaceSpec::fock(2);
  const SparseOperator op(
      s, {{1, 0, Complex(0.25, 0.0)}, {0, 0, Complex(1.0, 0.0)}, {1, 0, Complex(0.75, 0.0)},
          {2, 2, Complex(0.0, 0.0)}},
      false);
  CHECK(op.nnz() == 2);  // duplicates merged, exact zero dropped
  CHECK(op.entries()[0].row == 0);
  CHECK(find_entry(op, 1, 0)->val.real() == 1.0);
  CHECK_THROWS_AS(SparseOperator(s, {{5, 0, Complex(1.0, 0.0)}}, false), std::out_of_range);
}

TEST_CASE("quantum state normalization contract") {
  const SpaceSpec s = SpaceSpec::fock(1);
  Eigen::VectorXcd bad(2);
  bad << 1.0, 1.0;
  CHECK_THROWS_AS(QuantumState(s, bad), std::invalid_argument);
  const QuantumState ok = QuantumState::normalized(s, bad);
  CHECK(std::abs(ok.amplitudes().norm() - 1.0) <= 1e-15);
  CHECK_THROWS_AS(QuantumState::normalized(s, Eigen::VectorXcd::Zero(2)),
                  std::invalid_argument);
}
