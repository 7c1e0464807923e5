#include "doctest.h"

#include "opalg/antisym.hpp"
#include "opalg/triangular.hpp"
#include "fixtures_common.hpp"
#include "oracles.hpp"

using namespace opalg;
using GQ = GaussianRational;

namespace {

BlockOrderedBasis<GQ> standard_blocks(int n, std::vector<int> sizes) {
  BlockOrderedBasis<GQ> b;
  for (int i = 0; i < n; ++i) b.vectors.push_back(basis_vector<GQ>(n, i));
  b.block_sizes = std::move(sizes);
  b.normalized = true;
  b.validate();
  return b;
}

template <class S>
OperatorAlgebra<S> diagonal_algebra_for_basis(const std::vector<Vector<S>>& v) {
  int n = static_cast<int>(v.size());
  auto vm = Matrix<S>::from_columns(v);
  auto vinv = inverse(vm);
  std::vector<Matrix<S>> gens;
  for (int i = 0; i < n; ++i) gens.push_back(vm * Matrix<S>::unit(n, i, i) * vinv);
  return close_algebra<S>(n, gens, true);
}

}  // namespace

TEST_CASE("triangularization of already-triangular algebras") {
  for (int n = 2; n <= 5; ++n) {
    auto tn = close_algebra<GQ>(n, testfx::tn_spanning<GQ>(n), true);
    auto res = upper_triangularize(tn);
    REQUIRE(res.kind == TriangularizationResult<GQ>::Basis);
    CHECK(static_cast<int>(res.basis.size()) == n);
    // Verification is built in; spot-check one element anyway.
    auto mb = matrix_in_basis(testfx::shift<GQ>(n), res.basis);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j) CHECK(mb(i, j).is_zero());
  }
}

TEST_CASE("triangularization of a conjugated triangular algebra") {
  Rng rng(307);
  auto t3 = close_algebra<GQ>(3, testfx::tn_spanning<GQ>(3), true);
  auto s = random_invertible<GQ>(rng, 3);
  auto conj = conjugate(t3, s);
  auto res = upper_triangularize(conj);
  REQUIRE(res.kind == TriangularizationResult<GQ>::Basis);
}

TEST_CASE("triangularization of the M_8 nilpotent fixture") {
  auto a = close_algebra<GQ>(8, testfx::m8_nilpotent_generators<GQ>(), false);
  auto res = upper_triangularize(a);
  REQUIRE(res.kind == TriangularizationResult<GQ>::Basis);
  for (const auto& b : a.basis()) {
    auto mb = matrix_in_basis(b, res.basis);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j <= i; ++j) CHECK(mb(i, j).is_zero());  // strictly upper: nilpotent
  }
}

TEST_CASE("full algebras obstruct with a full subquotient") {
  std::vector<Matrix<GQ>> gens{Matrix<GQ>::unit(2, 0, 1), Matrix<GQ>::unit(2, 1, 0)};
  auto m2 = close_algebra<GQ>(2, gens, true);
  auto res = upper_triangularize(m2);
  REQUIRE(res.kind == TriangularizationResult<GQ>::Obstruction);
  const auto& spec = *res.obstruction;
  CHECK(spec.e.dim() == 2);
  auto comp = compress_to(m2, spec.e);
  CHECK(comp.alg.dim() == 4);
}

TEST_CASE("spectral idempotents from the polynomial construction") {
  SUBCASE("distinct diagonal") {
    Matrix<GQ> a(2, 2);
    a(0, 0) = GQ(2);
    auto p = spectral_idempotent_poly(a, standard_blocks(2, {1, 1}), GQ(2));
    CHECK(approx_equal(p, Matrix<GQ>::unit(2, 0, 0)));
  }
  SUBCASE("single block telescopes to the identity") {
    Matrix<GQ> a(2, 2);
    a(0, 0) = a(1, 1) = a(0, 1) = GQ(1);
    auto p = spectral_idempotent_poly(a, standard_blocks(2, {2}), GQ(1));
    CHECK(approx_equal(p, Matrix<GQ>::identity(2)));
  }
  SUBCASE("two blocks with distinct nonzero eigenvalues") {
    Matrix<GQ> a(3, 3);
    a(0, 0) = a(1, 1) = GQ(2);
    a(0, 1) = GQ(1);
    a(2, 2) = GQ(3);
    auto p = spectral_idempotent_poly(a, standard_blocks(3, {2, 1}), GQ(2));
    Matrix<GQ> expected(3, 3);
    expected(0, 0) = expected(1, 1) = GQ(1);
    CHECK(approx_equal(p, expected));
    CHECK(approx_equal(p, oracles::spectral_projection_crt<GQ>(a, {GQ(2), GQ(3)}, GQ(2))));
    auto gen = close_algebra<GQ>(3, {a}, false);
    CHECK(gen.span.contains(p));
    CHECK(approx_equal(p * a, a * p));
  }
  SUBCASE("rejections") {
    Matrix<GQ> a(2, 2);
    a(0, 0) = GQ(2);
    auto blocks = standard_blocks(2, {1, 1});
    CHECK_THROWS_AS(spectral_idempotent_poly(a, blocks, GQ(0)), PreconditionError);
    CHECK_THROWS_AS(spectral_idempotent_poly(a, blocks, GQ(5)), NotFoundError);
    Matrix<GQ> bad = Matrix<GQ>::unit(2, 1, 0);
    CHECK_THROWS_AS(spectral_idempotent_poly(bad, blocks, GQ(1)), PreconditionError);
  }
}

TEST_CASE("random Jordanesque matrices: idempotent agrees with the holomorphic oracle") {
  Rng rng(401);
  for (int trial = 0; trial < 10; ++trial) {
    int nblocks = rng.uniform_int(2, 3);
    std::vector<int> sizes;
    int n = 0;
    for (int b = 0; b < nblocks; ++b) {
      sizes.push_back(rng.uniform_int(1, 2));
      n += sizes.back();
    }
    // Distinct nonzero rational block eigenvalues.
    std::vector<GQ> eigs;
    for (int b = 0; b < nblocks; ++b) eigs.push_back(GQ(b + 1 + rng.uniform_int(0, 1) * nblocks));
    bool distinct = true;
    for (size_t i = 0; i < eigs.size(); ++i)
      for (size_t j = i + 1; j < eigs.size(); ++j)
        if (eigs[i] == eigs[j]) distinct = false;
    if (!distinct) continue;
    Matrix<GQ> a(n, n);
    int at = 0;
    for (int b = 0; b < nblocks; ++b) {
      for (int i = 0; i < sizes[b]; ++i) {
        a(at + i, at + i) = eigs[b];
        for (int j = i + 1; j < sizes[b]; ++j) a(at + i, at + j) = random_scalar<GQ>(rng);
      }
      at += sizes[b];
    }
    auto blocks = standard_blocks(n, sizes);
    auto p = spectral_idempotent_poly(a, blocks, eigs[0]);
    CHECK(approx_equal(p * p, p));
    std::vector<GQ> distinct_eigs;
    for (const auto& e : eigs) {
      bool seen = false;
      for (const auto& d : distinct_eigs)
        if (d == e) seen = true;
      if (!seen) distinct_eigs.push_back(e);
    }
    CHECK(approx_equal(p, oracles::spectral_projection_crt<GQ>(a, distinct_eigs, eigs[0])));
    CHECK(close_algebra<GQ>(n, {a}, false).span.contains(p));
  }
}

TEST_CASE("diagonal plus nilpotent decomposition") {
  SUBCASE("diagonalizable algebra in its eigenbasis") {
    Matrix<GQ> d(2, 2);
    d(0, 0) = GQ(1);
    d(1, 1) = GQ(2);
    auto a = close_algebra<GQ>(2, {d}, true);
    auto split = diag_nil_decompose(a, standard_blocks(2, {1, 1}));
    CHECK(split.diag.span.equals(a.span));
    CHECK(split.nil.dim() == 0);
  }
  SUBCASE("triangular family in the standard single block") {
    for (int n = 2; n <= 4; ++n) {
      auto tn = close_algebra<GQ>(n, testfx::tn_spanning<GQ>(n), true);
      auto split = diag_nil_decompose(tn, standard_blocks(n, {n}));
      CHECK(split.diag.dim() == 1);
      CHECK(split.diag.span.contains(Matrix<GQ>::identity(n)));
      CHECK(split.nil.dim() == n * (n - 1) / 2);
    }
  }
  SUBCASE("per-element reconstruction through spectral idempotents") {
    // Two blocks with eigenvalues 1 and 2 plus nilpotent parts.
    Matrix<GQ> g1(3, 3), g2(3, 3);
    g1(0, 0) = g1(1, 1) = GQ(1);
    g1(2, 2) = GQ(2);
    g1(0, 1) = GQ(1);
    g2(0, 1) = GQ(1);
    auto a = close_algebra<GQ>(3, {g1, g2}, true);
    auto blocks = standard_blocks(3, {2, 1});
    auto split = diag_nil_decompose(a, blocks);
    for (const auto& m : a.basis()) {
      auto check = jordanesque_check(m, blocks);
      REQUIRE(check.ok);
      auto eigs = block_eigenvalues(check.matrix, blocks);
      Matrix<GQ> diag_part = Matrix<GQ>::zero(3);
      std::vector<GQ> done;
      for (const auto& lam : eigs) {
        if (lam.is_zero()) continue;
        bool seen = false;
        for (const auto& d : done)
          if (d == lam) seen = true;
        if (seen) continue;
        done.push_back(lam);
        diag_part = diag_part + lam * spectral_idempotent_poly(m, blocks, lam);
      }
      CHECK(split.diag.span.contains(diag_part));
      CHECK(split.nil.contains(m - diag_part));
    }
  }
  SUBCASE("non-Jordanesque element is rejected") {
    auto t2 = close_algebra<GQ>(2, testfx::tn_spanning<GQ>(2), true);
    CHECK_THROWS_AS(diag_nil_decompose(t2, standard_blocks(2, {1, 1})), PreconditionError);
  }
}

TEST_CASE("separating element") {
  std::vector<Vector<GQ>> std_basis3;
  for (int i = 0; i < 3; ++i) std_basis3.push_back(basis_vector<GQ>(3, i));

  SUBCASE("scalars") {
    auto ci = close_algebra<GQ>(3, {}, true);
    auto sep = separating_element(ci, std_basis3);
    CHECK(approx_equal(sep, Matrix<GQ>::identity(3)));
  }
  SUBCASE("two diagonal classes") {
    Matrix<GQ> d(3, 3);
    d(0, 0) = d(1, 1) = GQ(1);
    auto a = close_algebra<GQ>(3, {Matrix<GQ>::identity(3), d}, true);
    auto sep = separating_element(a, std_basis3);
    CHECK(a.span.contains(sep));
    CHECK(sep(0, 0) == sep(1, 1));
    CHECK(sep(0, 0) != sep(2, 2));
    for (int i = 0; i < 3; ++i) CHECK(sep(i, i).is_real());
  }
  SUBCASE("constant-diagonal algebras have a single class") {
    auto t3 = close_algebra<GQ>(3, testfx::tn_spanning<GQ>(3), true);
    auto sep = separating_element(t3, std_basis3);
    CHECK(t3.span.contains(sep));
    CHECK(sep(0, 0) == sep(1, 1));
    CHECK(sep(1, 1) == sep(2, 2));
    CHECK(sep(0, 0).is_real());
  }
}

TEST_CASE("jordanesque basis for the triangular family is a single block") {
  for (int n = 2; n <= 4; ++n) {
    auto tn = close_algebra<GQ>(n, testfx::tn_spanning<GQ>(n), true);
    auto b = jordanesque_basis(tn);
    CHECK(b.block_sizes == std::vector<int>{n});
    for (const auto& m : tn.basis()) CHECK(jordanesque_check(m, b).ok);
  }
}

TEST_CASE("jordanesque basis for a diagonal algebra recovers the eigenvectors") {
  std::vector<Vector<GQ>> v{{GQ(1), GQ(0), GQ(0)}, {GQ(2), GQ(1), GQ(0)}, {GQ(3), GQ(2), GQ(1)}};
  auto dv = diagonal_algebra_for_basis(v);
  auto b = jordanesque_basis(dv);
  CHECK(b.block_sizes == std::vector<int>(3, 1));
  for (const auto& m : dv.basis()) CHECK(jordanesque_check(m, b).ok);
  // Each output vector is a common eigenvector, so it must be parallel to
  // one of the defining basis vectors.
  for (const auto& u : b.vectors) {
    bool parallel = false;
    for (const auto& w : v)
      if (rank_of(std::vector<Vector<GQ>>{u, w}, 3) == 1) parallel = true;
    CHECK(parallel);
  }
}

TEST_CASE("jordanesque basis handles merged and separate blocks") {
  // {[[a,b],[0,a]] ⊕ [c]}: Jordanesque with blocks (2,1) in standard basis.
  Matrix<GQ> g1(3, 3), g2(3, 3);
  g1(0, 0) = g1(1, 1) = GQ(1);
  g1(0, 1) = GQ(1);
  g2(2, 2) = GQ(1);
  auto a = close_algebra<GQ>(3, {g1, g2, Matrix<GQ>::identity(3)}, true);
  auto b = jordanesque_basis(a);
  std::vector<int> sorted_sizes = b.block_sizes;
  std::sort(sorted_sizes.begin(), sorted_sizes.end());
  CHECK(sorted_sizes == std::vector<int>{1, 2});
  for (const auto& m : a.basis()) CHECK(jordanesque_check(m, b).ok);
}

TEST_CASE("jordanesque basis rejects non-triangularizable input") {
  auto m2 =
      close_algebra<GQ>(2, {Matrix<GQ>::unit(2, 0, 1), Matrix<GQ>::unit(2, 1, 0)}, true);
  CHECK_THROWS_AS(jordanesque_basis(m2), PreconditionError);
}
