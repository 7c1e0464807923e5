#include "doctest.h"

#include "opalg/linalg.hpp"
#include "opalg/random.hpp"
#include "oracles.hpp"

using namespace opalg;
using GQ = GaussianRational;

namespace {

template <class S>
Vector<S> vec(std::initializer_list<long> entries) {
  Vector<S> v;
  for (long e : entries) v.push_back(S(e));
  return v;
}

Vector<Cplx> to_cvec(const Vector<GQ>& v) {
  Vector<Cplx> w;
  for (const auto& x : v) w.push_back(x.to_complex());
  return w;
}

}  // namespace

TEST_CASE("scalar parse/print round-trips") {
  GQ x(1, 2, -3, 4);
  CHECK(x.str() == "1/2-3/4 i");
  CHECK(GQ::parse(x.str()) == x);
  CHECK(GQ::parse("-5/3+7/2 i") == GQ(-5, 3, 7, 2));
  CHECK(GQ::parse("2") == GQ(2));
  CHECK(GQ::parse("0/1+0/1 i") == GQ(0));
  CHECK((GQ(1, 2, 0, 1) + GQ(1, 3, 0, 1)) == GQ(5, 6, 0, 1));
  CHECK((GQ(0, 1, 1, 1) * GQ(0, 1, 1, 1)) == GQ(-1));
  CHECK((GQ(3, 7, 2, 5) / GQ(3, 7, 2, 5)) == GQ(1));
  CHECK_THROWS_AS(GQ::parse("1/0"), ParseError);
}

TEST_CASE("canonical span collapses scalings") {
  auto e1 = basis_vector<GQ>(3, 0);
  auto s = Subspace<GQ>::span(3, {e1, vec_scale(e1, GQ(2))});
  CHECK(s.dim() == 1);
  CHECK(s.basis()[0] == e1);

  auto z = Subspace<GQ>::span(3, {});
  CHECK(z.dim() == 0);
  CHECK(z.is_zero());
}

TEST_CASE("canonical span dim equals oracle rank on random rational vectors") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Vector<GQ>> vs;
    for (int i = 0; i < 3; ++i) vs.push_back(random_vector<GQ>(rng, 5));
    auto s = Subspace<GQ>::span(5, vs);
    CHECK(s.dim() == oracles::row_reduce_rank(vs));
  }
}

TEST_CASE("canonical form is permutation and scaling invariant") {
  Rng rng(11);
  for (int trial = 0; trial < 8; ++trial) {
    std::vector<Vector<GQ>> vs;
    for (int i = 0; i < 4; ++i) vs.push_back(random_vector<GQ>(rng, 4));
    auto a = Subspace<GQ>::span(4, vs);
    std::vector<Vector<GQ>> shuffled;
    for (int i = 3; i >= 0; --i) shuffled.push_back(vec_scale(vs[i], GQ(-3)));
    auto b = Subspace<GQ>::span(4, shuffled);
    CHECK(a.equals(b));
    // Idempotence: re-canonicalizing the canonical basis is the identity.
    auto c = Subspace<GQ>::span(4, a.basis());
    CHECK(c.equals(a));
    for (int r = 0; r < a.dim(); ++r) CHECK(c.basis()[r] == a.basis()[r]);
  }
}

TEST_CASE("subspace sum/intersect dimension formula") {
  Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Vector<GQ>> bu, bv;
    for (int i = 0; i < 3; ++i) bu.push_back(random_vector<GQ>(rng, 5));
    for (int i = 0; i < 3; ++i) bv.push_back(random_vector<GQ>(rng, 5));
    auto u = Subspace<GQ>::span(5, bu);
    auto v = Subspace<GQ>::span(5, bv);
    auto s = u + v;
    auto i = u.intersect(v);
    CHECK(u.dim() + v.dim() == s.dim() + i.dim());
    CHECK(i.dim() == oracles::intersection_dim(bu, bv));
    CHECK(u.contains(i));
    CHECK(v.contains(i));
  }
}

TEST_CASE("orthogonal difference") {
  auto e1 = basis_vector<GQ>(2, 0), e2 = basis_vector<GQ>(2, 1);
  auto full2 = Subspace<GQ>::full(2);

  auto d1 = Subspace<GQ>::span(2, {e1, e2}).orth_difference(Subspace<GQ>::span(2, {e1}));
  CHECK(d1.equals(Subspace<GQ>::span(2, {e2})));

  auto diag = Subspace<GQ>::span(2, {vec_add(e1, e2)});
  auto d2 = full2.orth_difference(diag);
  CHECK(d2.equals(Subspace<GQ>::span(2, {vec_sub(e1, e2)})));

  CHECK_THROWS_AS(Subspace<GQ>::span(2, {e1}).orth_difference(Subspace<GQ>::span(2, {e2})),
                  ContainmentError);
}

TEST_CASE("gram_schmidt basics and prefix spans") {
  auto e1 = basis_vector<GQ>(2, 0), e2 = basis_vector<GQ>(2, 1);
  auto gs = gram_schmidt<GQ>({e1, vec_add(e1, e2)});
  CHECK(gs.vecs[0] == e1);
  CHECK(gs.vecs[1] == e2);
  CHECK(gs.sq_norms[0] == 1);

  // Orthonormal input is unchanged up to scalar equality.
  auto id = gram_schmidt<GQ>({e2, e1});
  CHECK(id.vecs[0] == e2);
  CHECK(id.vecs[1] == e1);

  CHECK_THROWS_AS(gram_schmidt<GQ>({e1, e1}), RankError);

  Rng rng(31);
  for (int trial = 0; trial < 6; ++trial) {
    auto basis = random_basis<GQ>(rng, 4);
    auto out = gram_schmidt<GQ>(basis);
    for (size_t i = 0; i < out.vecs.size(); ++i)
      for (size_t j = 0; j < i; ++j) CHECK(inner(out.vecs[i], out.vecs[j]).is_zero());
    // Prefix spans agree with the input prefixes.
    for (size_t k = 1; k <= basis.size(); ++k) {
      std::vector<Vector<GQ>> in(basis.begin(), basis.begin() + k);
      std::vector<Vector<GQ>> on(out.vecs.begin(), out.vecs.begin() + k);
      CHECK(Subspace<GQ>::span(4, in).equals(Subspace<GQ>::span(4, on)));
    }
  }
}

TEST_CASE("orthogonal projection") {
  auto p = orth_projection(Subspace<GQ>::span(2, {basis_vector<GQ>(2, 0)}));
  CHECK(p(0, 0) == GQ(1));
  CHECK(p(1, 1) == GQ(0));
  CHECK(p(0, 1) == GQ(0));

  CHECK(orth_projection(Subspace<GQ>(3)).is_zero());

  // span{(1,1)} has projector with every entry 1/2.
  Vector<GQ> v{GQ(1), GQ(1)};
  auto q = orth_projection(Subspace<GQ>::span(2, {v}));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(q(i, j) == GQ(1, 2, 0, 1));
  CHECK(approx_equal(q, oracles::rank_one_projector(v)));

  Rng rng(41);
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<Vector<GQ>> vs;
    for (int i = 0; i < 2; ++i) vs.push_back(random_vector<GQ>(rng, 4));
    auto e = Subspace<GQ>::span(4, vs);
    auto pr = orth_projection(e);
    CHECK(approx_equal(pr * pr, pr));
    CHECK(approx_equal(pr.adjoint(), pr));
    for (const auto& b : e.basis()) CHECK(pr * b == b);
  }
}

TEST_CASE("kernel") {
  CHECK(kernel(Matrix<GQ>::identity(3)).is_zero());
  CHECK(kernel(Matrix<GQ>::zero(3)).is_full());

  // Shift with superdiagonal ones: U e_j = e_{j-1}, U e_1 = 0.
  Matrix<GQ> u(4, 4);
  for (int i = 0; i + 1 < 4; ++i) u(i, i + 1) = GQ(1);
  auto k = kernel(u);
  CHECK(k.dim() == 1);
  CHECK(k.basis()[0] == basis_vector<GQ>(4, 0));
  // Direct solve confirms: U x = 0 forces x_2 = x_3 = x_4 = 0.
  for (const auto& b : k.basis()) CHECK(vec_is_zero(u * b));
}

TEST_CASE("solve, express, inverse") {
  Rng rng(53);
  for (int trial = 0; trial < 6; ++trial) {
    auto m = random_invertible<GQ>(rng, 4);
    auto x = random_vector<GQ>(rng, 4);
    auto b = m * x;
    auto sol = solve(m, b);
    REQUIRE(sol.has_value());
    CHECK(*sol == x);
    auto inv = inverse(m);
    CHECK(approx_equal(inv * m, Matrix<GQ>::identity(4)));
  }
  // Inconsistent system.
  Matrix<GQ> a(2, 1);
  a(0, 0) = GQ(1);
  CHECK_FALSE(solve(a, Vector<GQ>{GQ(0), GQ(1)}).has_value());
}

TEST_CASE("exact and numeric backends agree on rational inputs") {
  Rng rng(67);
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<Vector<GQ>> vs;
    for (int i = 0; i < 3; ++i) vs.push_back(random_vector<GQ>(rng, 4));
    auto se = Subspace<GQ>::span(4, vs);
    std::vector<Vector<Cplx>> cs;
    for (const auto& v : vs) cs.push_back(to_cvec(v));
    auto sn = Subspace<Cplx>::span(4, cs);
    CHECK(se.dim() == sn.dim());
    for (const auto& b : se.basis()) CHECK(sn.contains(to_cvec(b)));

    auto pe = orth_projection(se);
    auto pn = orth_projection(sn);
    Matrix<Cplx> pec(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) pec(i, j) = pe(i, j).to_complex();
    CHECK(approx_equal(pec, pn, Tolerance{1e-8, 1e-8, 1e-8}));
  }
}

TEST_CASE("numeric echelon rank decisions") {
  Tolerance tol;
  auto e1 = basis_vector<Cplx>(3, 0);
  Vector<Cplx> tiny = e1;
  tiny[1] = Cplx(1e-12, 0);  // below rank threshold after reduction
  auto s = Subspace<Cplx>::span(3, {e1, tiny}, tol);
  CHECK(s.dim() == 1);

  Vector<Cplx> sep = e1;
  sep[1] = Cplx(1e-3, 0);  // clearly above threshold
  auto s2 = Subspace<Cplx>::span(3, {e1, sep}, tol);
  CHECK(s2.dim() == 2);
}

TEST_CASE("metric-aware orthogonality") {
  // Metric g = (1, 4): vectors (2, 1) and (2, -1) are g-orthogonal.
  Metric<GQ> g{mpq_class(1), mpq_class(4)};
  Vector<GQ> a{GQ(2), GQ(1)}, b{GQ(2), GQ(-1)};
  CHECK(inner(a, b, g).is_zero());
  auto gs = gram_schmidt<GQ>({a, b}, g);
  CHECK(gs.vecs[1] == b);
  auto p = orth_projection(Subspace<GQ>::span(2, {a}), g);
  CHECK(approx_equal(p * p, p));
  CHECK(approx_equal(metric_adjoint(p, g), p));
  CHECK(p * a == a);
  CHECK(vec_is_zero(p * b));
}
