#include "doctest.h"

#include "opalg/families.hpp"
#include "fixtures_common.hpp"

using namespace opalg;
using GQ = GaussianRational;

namespace {

std::vector<Vector<GQ>> antiorth_basis3() {
  // Verified anti-orthogonal: every pair stays non-orthogonal after
  // projecting off any subset of the rest.
  return {{GQ(1), GQ(0), GQ(0)}, {GQ(2), GQ(1), GQ(0)}, {GQ(3), GQ(2), GQ(1)}};
}

std::vector<Vector<GQ>> ex47_basis() {
  // v1 orthogonal to v3; both inner products with v2 nonzero.
  return {{GQ(1), GQ(0), GQ(0)}, {GQ(1), GQ(1), GQ(0)}, {GQ(0), GQ(1), GQ(1)}};
}

// Blocks (2,2) with v^1_2 orthogonal to v^2_2 yet suitably nonorthogonal.
BlockOrderedBasis<GQ> suitable_with_orthogonal_pair() {
  BlockOrderedBasis<GQ> b;
  b.vectors = {{GQ(1), GQ(0), GQ(0), GQ(0)},
               {GQ(0), GQ(1), GQ(0), GQ(0)},
               {GQ(1), GQ(1), GQ(1), GQ(0)},
               {GQ(1), GQ(0), GQ(-1), GQ(1)}};
  b.block_sizes = {2, 2};
  b.normalized = true;
  return b;
}

BlockOrderedBasis<GQ> standard_two_blocks() {
  BlockOrderedBasis<GQ> b;
  for (int i = 0; i < 4; ++i) b.vectors.push_back(basis_vector<GQ>(4, i));
  b.block_sizes = {2, 2};
  b.normalized = true;
  return b;
}

}  // namespace

TEST_CASE("triangular family constructor") {
  auto t1 = make_Tn<GQ>(1);
  CHECK(t1.dim() == 1);
  auto t3 = make_Tn<GQ>(3);
  CHECK(t3.dim() == 4);
  CHECK(t3.span.contains(testfx::shift<GQ>(3)));
  CHECK(t3.prov.kind == FamilyProvenance::Tn);
}

TEST_CASE("diagonal family constructor") {
  std::vector<Vector<GQ>> std3;
  for (int i = 0; i < 3; ++i) std3.push_back(basis_vector<GQ>(3, i));
  auto dv = make_Dv(std3);
  CHECK(dv.dim() == 3);
  for (int i = 0; i < 3; ++i) CHECK(dv.span.contains(Matrix<GQ>::unit(3, i, i)));

  Rng rng(601);
  for (int trial = 0; trial < 5; ++trial) {
    auto v = random_basis<GQ>(rng, 3);
    auto a = make_Dv(v);
    CHECK(a.dim() == 3);
    CHECK(a.span.contains(Matrix<GQ>::identity(3)));
    // Contains each rank-one eigenprojection of the basis.
    auto cols = Matrix<GQ>::from_columns(v);
    auto inv = inverse(cols);
    for (int i = 0; i < 3; ++i) CHECK(a.span.contains(basis_unit(cols, inv, i, i)));
  }

  CHECK_THROWS_AS(make_Dv<GQ>({basis_vector<GQ>(2, 0), basis_vector<GQ>(2, 0)}), RankError);
}

TEST_CASE("nonorthogonality graph") {
  std::vector<Vector<GQ>> std3;
  for (int i = 0; i < 3; ++i) std3.push_back(basis_vector<GQ>(3, i));
  auto g = nonorth_graph(std3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK_FALSE(g.adj[i][j]);
  CHECK_FALSE(is_connected(g));

  auto path = nonorth_graph(ex47_basis());
  CHECK(path.adj[0][1]);
  CHECK(path.adj[1][2]);
  CHECK_FALSE(path.adj[0][2]);
  CHECK(is_connected(path));
}

TEST_CASE("diagonal algebra antisymmetry tracks graph connectivity") {
  Rng rng(617);
  int disagreements = 0;
  for (int trial = 0; trial < 25; ++trial) {
    auto v = random_basis<GQ>(rng, 3);
    if (rng.coin(0.4)) {
      // Plant a disconnection: split {v1} vs {v2,v3} orthogonally.
      auto sub = Subspace<GQ>::span(3, {v[1], v[2]});
      auto perp = sub.orth_complement();
      if (perp.dim() == 1) v[0] = perp.basis()[0];
    }
    if (rank_of(v, 3) != 3) continue;
    auto a = make_Dv(v);
    bool antisym = is_antisymmetric(a).antisymmetric;
    bool conn = is_connected(nonorth_graph(v));
    if (antisym != conn) ++disagreements;
  }
  CHECK(disagreements == 0);
}

TEST_CASE("anti-orthogonality enumeration") {
  auto rep = is_anti_orthogonal(antiorth_basis3());
  CHECK(rep.anti_orthogonal);

  auto bad = is_anti_orthogonal(ex47_basis());
  CHECK_FALSE(bad.anti_orthogonal);
  REQUIRE(bad.violation.has_value());
  auto [i, j, x] = *bad.violation;
  CHECK(i == 0);
  CHECK(j == 2);
  CHECK(x.empty());  // already orthogonal with nothing projected off

  // Direct projector oracle on a random-ish perturbed basis.
  std::vector<Vector<GQ>> v{{GQ(1), GQ(1, 7, 0, 1), GQ(1, 9, 0, 1)},
                            {GQ(1, 5, 0, 1), GQ(1), GQ(1, 3, 0, 1)},
                            {GQ(1, 2, 0, 1), GQ(1, 4, 0, 1), GQ(1)}};
  auto r2 = is_anti_orthogonal(v);
  bool oracle_all_nonzero = true;
  for (int a = 0; a < 3; ++a)
    for (int b2 = a + 1; b2 < 3; ++b2) {
      for (int omit = 0; omit < 3; ++omit) {
        if (omit == a || omit == b2) continue;
        // P off span{v_omit} computed directly.
        auto p = Matrix<GQ>::identity(3);
        GQ ns = inner(v[omit], v[omit]);
        for (int r = 0; r < 3; ++r)
          for (int c = 0; c < 3; ++c)
            p(r, c) -= v[omit][r] * ScalarTraits<GQ>::conj(v[omit][c]) / ns;
        if (inner(p * v[a], v[b2]).is_zero()) oracle_all_nonzero = false;
        if (inner(v[a], v[b2]).is_zero()) oracle_all_nonzero = false;
      }
    }
  CHECK(r2.anti_orthogonal == oracle_all_nonzero);

  CHECK_THROWS_AS(is_anti_orthogonal(std::vector<Vector<GQ>>(17, Vector<GQ>(17))), GuardError);
}

TEST_CASE("hereditary antisymmetry of diagonal algebras matches anti-orthogonality") {
  auto good = make_Dv(antiorth_basis3());
  auto lat_good = classify_invariants(good);
  CHECK(is_hereditarily_antisymmetric(good, lat_good, true).status == Hereditary::Yes);
  CHECK(is_anti_orthogonal(antiorth_basis3()).anti_orthogonal);

  auto bad = make_Dv(ex47_basis());
  auto lat_bad = classify_invariants(bad);
  CHECK(is_hereditarily_antisymmetric(bad, lat_bad, true).status == Hereditary::No);
  CHECK_FALSE(is_anti_orthogonal(ex47_basis()).anti_orthogonal);
}

TEST_CASE("Jordanesque family and suitable nonorthogonality") {
  SUBCASE("single block reduces to the triangular family") {
    BlockOrderedBasis<GQ> b;
    for (int i = 0; i < 3; ++i) b.vectors.push_back(basis_vector<GQ>(3, i));
    b.block_sizes = {3};
    b.normalized = true;
    auto jv = make_Jv(b);
    CHECK(jv.span.equals(make_Tn<GQ>(3).span));
    CHECK(is_suitably_nonorthogonal(b).suitable);  // no pairs to test
  }
  SUBCASE("orthogonal cross-block pair is compatible with suitability") {
    auto b = suitable_with_orthogonal_pair();
    CHECK(inner(b.vectors[1], b.vectors[3]).is_zero());
    auto rep = is_suitably_nonorthogonal(b);
    CHECK(rep.suitable);
    auto jv = make_Jv(b);
    CHECK(jv.dim() == 2 + 1 + 1);  // two block constants plus one upper unit per block
    auto lat = classify_invariants(jv);
    CHECK(lat.size() == 9);
    CHECK(is_hereditarily_antisymmetric(jv, lat, true).status == Hereditary::Yes);
    // The structure recovery returns blocks of the same shape.
    auto recovered = jordanesque_basis(jv, lat);
    std::vector<int> sizes = recovered.block_sizes;
    std::sort(sizes.begin(), sizes.end());
    CHECK(sizes == std::vector<int>{2, 2});
    for (const auto& m : jv.basis()) CHECK(jordanesque_check(m, recovered).ok);
  }
  SUBCASE("fully orthogonal blocks are not suitably nonorthogonal") {
    auto b = standard_two_blocks();
    auto rep = is_suitably_nonorthogonal(b);
    CHECK_FALSE(rep.suitable);
    REQUIRE(rep.violation.has_value());
    auto jv = make_Jv(b);
    auto lat = classify_invariants(jv);
    auto verdict = is_hereditarily_antisymmetric(jv, lat, true);
    CHECK(verdict.status == Hereditary::No);
    REQUIRE(verdict.counterexample.has_value());
    CHECK(distinguishes_blocks(jv, b));
  }
  SUBCASE("size-one blocks reduce suitability to anti-orthogonality") {
    Rng rng(631);
    for (int trial = 0; trial < 8; ++trial) {
      auto v = random_basis<GQ>(rng, 3);
      BlockOrderedBasis<GQ> b{v, {1, 1, 1}, true};
      CHECK(is_suitably_nonorthogonal(b).suitable == is_anti_orthogonal(v).anti_orthogonal);
    }
  }
  SUBCASE("unnormalized bases are rejected") {
    BlockOrderedBasis<GQ> b;
    b.vectors = {{GQ(1), GQ(1)}, {GQ(1), GQ(-2)}};
    b.block_sizes = {2};
    b.normalized = false;
    CHECK_THROWS_AS(make_Jv(b), PreconditionError);
    b.normalized = true;  // claims orthogonality it does not have
    CHECK_THROWS_AS(make_Jv(b), PreconditionError);
  }
}

TEST_CASE("preorder algebras") {
  std::vector<Vector<GQ>> std3;
  for (int i = 0; i < 3; ++i) std3.push_back(basis_vector<GQ>(3, i));

  auto eq = make_preorder_algebra(Preorder::equality(3), std3);
  CHECK(eq.span.equals(make_Dv(std3).span));

  auto total = make_preorder_algebra(Preorder::total(3), std3);
  CHECK(total.dim() == 6);  // n(n+1)/2

  Preorder bad = Preorder::equality(3);
  bad.rel[0][1] = true;
  bad.rel[1][2] = true;  // missing 0 -> 2 breaks transitivity
  CHECK_THROWS_AS(make_preorder_algebra(bad, std3), PreconditionError);
}

TEST_CASE("preorder extraction round-trips") {
  std::vector<Vector<GQ>> std4;
  for (int i = 0; i < 4; ++i) std4.push_back(basis_vector<GQ>(4, i));

  auto dv = make_Dv(std4);
  CHECK(extract_preorder(dv, std4) == Preorder::equality(4));

  auto total = make_preorder_algebra(Preorder::total(4), std4);
  CHECK(extract_preorder(total, std4) == Preorder::total(4));

  Rng rng(643);
  for (int trial = 0; trial < 20; ++trial) {
    // Random preorder: transitive closure of random arcs over equality.
    Preorder p = Preorder::equality(4);
    for (int arcs = rng.uniform_int(0, 4); arcs > 0; --arcs)
      p.rel[rng.uniform_int(0, 3)][rng.uniform_int(0, 3)] = true;
    for (int k = 0; k < 4; ++k)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          if (p.rel[i][k] && p.rel[k][j]) p.rel[i][j] = true;
    auto a = make_preorder_algebra(p, std4);
    CHECK(extract_preorder(a, std4) == p);
    CHECK(make_preorder_algebra(extract_preorder(a, std4), std4).span.equals(a.span));
  }
}

TEST_CASE("exact invariant-subspace classifications") {
  auto t3 = make_Tn<GQ>(3);
  auto lat_t = classify_invariants(t3);
  CHECK(lat_t.size() == 4);

  std::vector<Vector<GQ>> std3;
  for (int i = 0; i < 3; ++i) std3.push_back(basis_vector<GQ>(3, i));
  Preorder p = Preorder::equality(3);
  p.rel[0][1] = true;
  auto ap = make_preorder_algebra(p, std3);
  auto lat_p = classify_invariants(ap);
  CHECK(lat_p.size() == 6);  // lower sets: {}, {1}, {3}, {13}, {12}, {123}

  auto jv = make_Jv(suitable_with_orthogonal_pair());
  CHECK(classify_invariants(jv).size() == 9);

  auto generic = close_algebra<GQ>(2, {Matrix<GQ>::unit(2, 0, 1)}, false);
  CHECK_THROWS_AS(classify_invariants(generic), PreconditionError);
  auto [lat_g, complete] = invariant_lattice(generic);
  CHECK_FALSE(complete);
  CHECK(lat_g.size() >= 2);
}

TEST_CASE("triangular family maximality at small scale") {
  for (int n = 2; n <= 3; ++n) {
    auto tn = make_Tn<GQ>(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j) {
        auto gens = tn.basis();
        gens.push_back(Matrix<GQ>::unit(n, i, j));
        CHECK_FALSE(is_antisymmetric(close_algebra<GQ>(n, gens, true)).antisymmetric);
      }
    for (int i = 0; i < n; ++i) {
      auto gens = tn.basis();
      gens.push_back(Matrix<GQ>::unit(n, i, i));
      CHECK_FALSE(is_antisymmetric(close_algebra<GQ>(n, gens, true)).antisymmetric);
    }
  }
}

TEST_CASE("diagonal maximal hereditary: strict enlargements fail") {
  auto v = antiorth_basis3();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      Preorder p = Preorder::equality(3);
      p.rel[i][j] = true;
      auto a = make_preorder_algebra(p, v);
      auto lat = classify_invariants(a);
      CHECK(is_hereditarily_antisymmetric(a, lat, true).status == Hereditary::No);
    }
}

TEST_CASE("diagonal algebras with connected graphs are not maximal antisymmetric") {
  // Orthogonal-pair branch of the enlargement recipe.
  auto v = ex47_basis();
  auto cols = Matrix<GQ>::from_columns(v);
  auto inv = inverse(cols);
  auto gens = make_Dv(v).basis();
  gens.push_back(basis_unit(cols, inv, 0, 2));  // E_13 for the orthogonal pair (1,3)
  auto enlarged = close_algebra<GQ>(3, gens, true);
  CHECK(enlarged.dim() == 4);
  CHECK(is_antisymmetric(enlarged).antisymmetric);
}

TEST_CASE("the full-subobject fixture") {
  auto fx = make_fullsubex_fixture<GQ>(7);
  CHECK(fx.algebra.dim() == 6);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) CHECK_FALSE(inner(fx.basis[i], fx.basis[j]).is_zero());
  CHECK(is_antisymmetric(fx.algebra).antisymmetric);

  auto lat = classify_invariants(fx.algebra);
  auto witness = full_subquotient_witness(fx.algebra, lat);
  REQUIRE(witness.has_value());
  CHECK(witness->e.dim() == 2);
  CHECK(witness->e.equals(Subspace<GQ>::span(4, {fx.basis[0], fx.basis[1]})));

  auto res = upper_triangularize(fx.algebra, lat);
  REQUIRE(res.kind == TriangularizationResult<GQ>::Obstruction);
  auto comp = compress_to(fx.algebra, res.obstruction->e);
  CHECK(comp.alg.dim() == res.obstruction->e.dim() * res.obstruction->e.dim());
}
