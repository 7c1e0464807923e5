#pragma once

#include <limits>
#include <map>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "opalg/antisym.hpp"
#include "opalg/triangular.hpp"

namespace opalg {

struct Preorder {
  int n = 0;
  std::vector<std::vector<bool>> rel;  // rel[i][j] means i precedes j

  static Preorder equality(int n) {
    Preorder p;
    p.n = n;
    p.rel.assign(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i) p.rel[i][i] = true;
    return p;
  }
  static Preorder total(int n) {
    Preorder p = equality(n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) p.rel[i][j] = true;
    return p;
  }
  void validate() const {
    for (int i = 0; i < n; ++i)
      if (!rel[i][i]) throw PreconditionError("preorder: not reflexive");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          if (rel[i][j] && rel[j][k] && !rel[i][k])
            throw PreconditionError("preorder: not transitive");
  }
  bool operator==(const Preorder& other) const { return n == other.n && rel == other.rel; }
};

struct NonorthGraph {
  int n = 0;
  std::vector<std::vector<bool>> adj;  // symmetric, no self loops
};

inline bool is_connected(const NonorthGraph& g) {
  if (g.n == 0) return true;
  std::vector<bool> seen(g.n, false);
  std::vector<int> stack{0};
  seen[0] = true;
  int count = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w = 0; w < g.n; ++w)
      if (g.adj[v][w] && !seen[w]) {
        seen[w] = true;
        ++count;
        stack.push_back(w);
      }
  }
  return count == g.n;
}

template <class S>
NonorthGraph nonorth_graph(const std::vector<Vector<S>>& v, const Tolerance& tol = {}) {
  int n = static_cast<int>(v.size());
  NonorthGraph g;
  g.n = n;
  g.adj.assign(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      bool edge = !ScalarTraits<S>::is_zero(inner(v[i], v[j]), tol);
      g.adj[i][j] = g.adj[j][i] = edge;
    }
  return g;
}

// ---------------------------------------------------------------------------
// Family constructors.
// ---------------------------------------------------------------------------

// Upper triangular with constant main diagonal, standard basis.
template <class S>
OperatorAlgebra<S> make_Tn(int n, const Tolerance& tol = {}) {
  if (n < 1) throw PreconditionError("Tn: dimension must be positive");
  std::vector<Matrix<S>> gens{Matrix<S>::identity(n)};
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) gens.push_back(Matrix<S>::unit(n, i, j));
  auto a = close_algebra<S>(n, gens, true, tol);
  a.prov.kind = FamilyProvenance::Tn;
  a.family_basis.clear();
  for (int i = 0; i < n; ++i) a.family_basis.push_back(basis_vector<S>(n, i));
  return a;
}

// Matrix unit relative to a basis: maps v_j to v_i, kills the other v_k.
template <class S>
Matrix<S> basis_unit(const Matrix<S>& v_cols, const Matrix<S>& v_inv, int i, int j) {
  return v_cols * Matrix<S>::unit(v_cols.n(), i, j) * v_inv;
}

// Operators diagonal relative to the given basis.
template <class S>
OperatorAlgebra<S> make_Dv(const std::vector<Vector<S>>& v, const Tolerance& tol = {}) {
  int n = static_cast<int>(v.size());
  Matrix<S> cols = Matrix<S>::from_columns(v);
  auto inv = try_inverse(cols, tol);
  if (!inv) throw RankError("Dv: vectors do not form a basis");
  std::vector<Matrix<S>> gens;
  for (int i = 0; i < n; ++i) gens.push_back(basis_unit(cols, *inv, i, i));
  auto a = close_algebra<S>(n, gens, true, tol);
  a.prov.kind = FamilyProvenance::Dv;
  a.family_basis = v;
  return a;
}

template <class S>
OperatorAlgebra<S> make_preorder_algebra(const Preorder& p, const std::vector<Vector<S>>& v,
                                         const Tolerance& tol = {}) {
  p.validate();
  if (static_cast<int>(v.size()) != p.n) throw DimensionError("preorder algebra: size mismatch");
  Matrix<S> cols = Matrix<S>::from_columns(v);
  auto inv = try_inverse(cols, tol);
  if (!inv) throw RankError("preorder algebra: vectors do not form a basis");
  std::vector<Matrix<S>> gens;
  for (int i = 0; i < p.n; ++i)
    for (int j = 0; j < p.n; ++j)
      if (p.rel[i][j]) gens.push_back(basis_unit(cols, *inv, i, j));
  auto a = close_algebra<S>(p.n, gens, true, tol);
  a.prov.kind = FamilyProvenance::PreorderAlg;
  a.prov.rel.assign(p.n, std::vector<bool>(p.n, false));
  for (int i = 0; i < p.n; ++i)
    for (int j = 0; j < p.n; ++j) a.prov.rel[i][j] = p.rel[i][j];
  a.family_basis = v;
  return a;
}

// All operators Jordanesque for the block ordered basis. The basis must be
// normalized (orthogonal within each block; unit norms in the numeric
// backend).
template <class S>
OperatorAlgebra<S> make_Jv(const BlockOrderedBasis<S>& b, const Tolerance& tol = {}) {
  b.validate();
  if (!b.normalized) throw PreconditionError("Jv: basis must be normalized");
  int n = b.n();
  for (int j = 0; j < b.blocks(); ++j) {
    int s = b.block_start(j);
    for (int p = 0; p < b.block_sizes[j]; ++p)
      for (int q = p + 1; q < b.block_sizes[j]; ++q)
        if (!ScalarTraits<S>::is_zero(inner(b.vectors[s + p], b.vectors[s + q]), tol))
          throw PreconditionError("Jv: block vectors are not orthogonal");
  }
  Matrix<S> cols = Matrix<S>::from_columns(b.vectors);
  auto inv = try_inverse(cols, tol);
  if (!inv) throw RankError("Jv: vectors do not form a basis");
  std::vector<Matrix<S>> gens;
  for (int j = 0; j < b.blocks(); ++j) {
    int s = b.block_start(j);
    Matrix<S> block_id = Matrix<S>::zero(n);
    for (int p = 0; p < b.block_sizes[j]; ++p)
      block_id = block_id + Matrix<S>::unit(n, s + p, s + p);
    gens.push_back(cols * block_id * *inv);
    for (int p = 0; p < b.block_sizes[j]; ++p)
      for (int q = p + 1; q < b.block_sizes[j]; ++q)
        gens.push_back(basis_unit(cols, *inv, s + p, s + q));
  }
  auto a = close_algebra<S>(n, gens, true, tol);
  a.prov.kind = FamilyProvenance::Jv;
  a.prov.block_sizes = b.block_sizes;
  a.family_basis = b.vectors;
  return a;
}

// ---------------------------------------------------------------------------
// Orthogonality combinatorics.
// ---------------------------------------------------------------------------

struct AntiOrthReport {
  bool anti_orthogonal = false;
  // Violating pair (i, j) with the omitted index set X (all 0-based).
  std::optional<std::tuple<int, int, std::vector<int>>> violation;
  double min_margin = 0;  // numeric transparency: smallest |<P v_i, v_j>| seen
};

// Exhaustive check over all pairs i < j and subsets X of the remaining
// indices: the projections of v_i, v_j off span{v_k : k in X} must never be
// orthogonal.
template <class S>
AntiOrthReport is_anti_orthogonal(const std::vector<Vector<S>>& v, const Tolerance& tol = {}) {
  int n = static_cast<int>(v.size());
  if (n > 16) throw GuardError("anti-orthogonality: enumeration guard (n <= 16)");
  if (rank_of(v, n, tol) != n) throw RankError("anti-orthogonality: not a basis");
  AntiOrthReport rep;
  rep.min_margin = std::numeric_limits<double>::infinity();
  std::map<unsigned, Matrix<S>> proj_cache;
  auto proj_off = [&](unsigned mask) -> const Matrix<S>& {
    auto it = proj_cache.find(mask);
    if (it != proj_cache.end()) return it->second;
    std::vector<Vector<S>> gens;
    for (int k = 0; k < n; ++k)
      if (mask & (1u << k)) gens.push_back(v[k]);
    Matrix<S> p = Matrix<S>::identity(n) - orth_projection(Subspace<S>::span(n, gens, tol));
    return proj_cache.emplace(mask, std::move(p)).first->second;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      std::vector<int> rest;
      for (int k = 0; k < n; ++k)
        if (k != i && k != j) rest.push_back(k);
      for (unsigned sub = 0; sub < (1u << rest.size()); ++sub) {
        unsigned mask = 0;
        std::vector<int> x;
        for (size_t t = 0; t < rest.size(); ++t)
          if (sub & (1u << t)) {
            mask |= 1u << rest[t];
            x.push_back(rest[t]);
          }
        S val = inner(proj_off(mask) * v[i], v[j]);
        rep.min_margin = std::min(rep.min_margin, ScalarTraits<S>::approx_abs(val));
        if (ScalarTraits<S>::is_zero(val, tol)) {
          rep.anti_orthogonal = false;
          rep.violation = {i, j, x};
          return rep;
        }
      }
    }
  rep.anti_orthogonal = true;
  return rep;
}

struct SuitabilityReport {
  bool suitable = false;
  // Violating data: the tuple (m_1..m_k) and block pair (j, j').
  std::optional<std::tuple<std::vector<int>, int, int>> violation;
  double min_margin = 0;
};

// Enumerates every tuple (m_1..m_k) and block pair j < j' with m_j < n_j and
// m_j' < n_j', testing that v^j_{m_j+1} and v^j'_{m_j'+1} remain
// non-orthogonal after projecting off the (m_1..m_k) subspace.
template <class S>
SuitabilityReport is_suitably_nonorthogonal(const BlockOrderedBasis<S>& b,
                                            const Tolerance& tol = {}) {
  b.validate();
  if (!b.normalized) throw PreconditionError("suitability: basis must be normalized");
  int k = b.blocks();
  long tuples = 1;
  for (int j = 0; j < k; ++j) {
    tuples *= b.block_sizes[j] + 1;
    if (tuples > 200000) throw GuardError("suitability: enumeration guard exceeded");
  }
  int n = b.n();
  SuitabilityReport rep;
  rep.min_margin = std::numeric_limits<double>::infinity();
  std::vector<int> m(k, 0);
  while (true) {
    // Projection off the (m_1..m_k) subspace.
    std::vector<Vector<S>> gens;
    for (int j = 0; j < k; ++j) {
      int s = b.block_start(j);
      for (int t = 0; t < m[j]; ++t) gens.push_back(b.vectors[s + t]);
    }
    Matrix<S> p = Matrix<S>::identity(n) - orth_projection(Subspace<S>::span(n, gens, tol));
    for (int j = 0; j < k; ++j) {
      if (m[j] >= b.block_sizes[j]) continue;
      for (int j2 = j + 1; j2 < k; ++j2) {
        if (m[j2] >= b.block_sizes[j2]) continue;
        Vector<S> a = p * b.vectors[b.block_start(j) + m[j]];
        S val = inner(a, b.vectors[b.block_start(j2) + m[j2]]);
        rep.min_margin = std::min(rep.min_margin, ScalarTraits<S>::approx_abs(val));
        if (ScalarTraits<S>::is_zero(val, tol)) {
          rep.suitable = false;
          rep.violation = {m, j, j2};
          return rep;
        }
      }
    }
    int t = 0;
    while (t < k && ++m[t] > b.block_sizes[t]) m[t++] = 0;
    if (t == k) break;
  }
  rep.suitable = true;
  return rep;
}

// Some element takes different main-diagonal values on every pair of blocks.
template <class S>
bool distinguishes_blocks(const OperatorAlgebra<S>& a, const BlockOrderedBasis<S>& b) {
  std::vector<std::vector<S>> values;
  for (const auto& m : a.basis()) {
    auto check = jordanesque_check(m, b, a.tol());
    if (!check.ok) throw PreconditionError("distinguishes_blocks: element not Jordanesque");
    values.push_back(block_eigenvalues(check.matrix, b));
  }
  for (int j = 0; j < b.blocks(); ++j)
    for (int j2 = j + 1; j2 < b.blocks(); ++j2) {
      bool separated = false;
      for (const auto& val : values)
        if (!ScalarTraits<S>::eq(val[j], val[j2], a.tol())) separated = true;
      if (!separated) return false;
    }
  return true;
}

// ---------------------------------------------------------------------------
// Preorder extraction and exact invariant-subspace classifications.
// ---------------------------------------------------------------------------

template <class S>
Preorder extract_preorder(const OperatorAlgebra<S>& a, const std::vector<Vector<S>>& v) {
  int n = a.n();
  Matrix<S> cols = Matrix<S>::from_columns(v);
  auto inv = try_inverse(cols, a.tol());
  if (!inv) throw RankError("extract_preorder: vectors do not form a basis");
  for (int i = 0; i < n; ++i)
    if (!a.span.contains(basis_unit(cols, *inv, i, i)))
      throw PreconditionError("extract_preorder: algebra does not contain the diagonal units");
  Preorder p;
  p.n = n;
  p.rel.assign(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) {
    Matrix<S> ei = basis_unit(cols, *inv, i, i);
    for (int j = 0; j < n; ++j) {
      Matrix<S> ej = basis_unit(cols, *inv, j, j);
      for (const auto& b : a.basis()) {
        if (!(ei * b * ej).is_zero(a.tol())) {
          p.rel[i][j] = true;
          break;
        }
      }
    }
  }
  p.validate();
  return p;
}

// Exact lattices for the structured families, re-verified before returning.
template <class S>
std::vector<Subspace<S>> classify_invariants(const OperatorAlgebra<S>& a) {
  const auto& v = a.family_basis;
  int n = a.n();
  std::vector<Subspace<S>> out;
  switch (a.prov.kind) {
    case FamilyProvenance::Tn: {
      for (int k = 0; k <= n; ++k) {
        std::vector<Vector<S>> gens(v.begin(), v.begin() + k);
        out.push_back(Subspace<S>::span(n, gens, a.tol()));
      }
      break;
    }
    case FamilyProvenance::Dv: {
      if (n > 20) throw GuardError("classify: subset enumeration guard");
      for (unsigned mask = 0; mask < (1u << n); ++mask) {
        std::vector<Vector<S>> gens;
        for (int i = 0; i < n; ++i)
          if (mask & (1u << i)) gens.push_back(v[i]);
        out.push_back(Subspace<S>::span(n, gens, a.tol()));
      }
      break;
    }
    case FamilyProvenance::PreorderAlg: {
      if (n > 20) throw GuardError("classify: subset enumeration guard");
      for (unsigned mask = 0; mask < (1u << n); ++mask) {
        bool lower = true;
        for (int j = 0; j < n && lower; ++j) {
          if (!(mask & (1u << j))) continue;
          for (int i = 0; i < n && lower; ++i)
            if (a.prov.rel[i][j] && !(mask & (1u << i))) lower = false;
        }
        if (!lower) continue;
        std::vector<Vector<S>> gens;
        for (int i = 0; i < n; ++i)
          if (mask & (1u << i)) gens.push_back(v[i]);
        out.push_back(Subspace<S>::span(n, gens, a.tol()));
      }
      break;
    }
    case FamilyProvenance::Jv: {
      const auto& sizes = a.prov.block_sizes;
      int k = static_cast<int>(sizes.size());
      std::vector<int> m(k, 0);
      std::vector<int> starts(k, 0);
      for (int j = 1; j < k; ++j) starts[j] = starts[j - 1] + sizes[j - 1];
      while (true) {
        std::vector<Vector<S>> gens;
        for (int j = 0; j < k; ++j)
          for (int t = 0; t < m[j]; ++t) gens.push_back(v[starts[j] + t]);
        out.push_back(Subspace<S>::span(n, gens, a.tol()));
        int t = 0;
        while (t < k && ++m[t] > sizes[t]) m[t++] = 0;
        if (t == k) break;
      }
      break;
    }
    case FamilyProvenance::Generic:
      throw PreconditionError("classify: no exact classification for generic algebras");
  }
  // Deduplicate (different masks can span the same subspace only when the
  // family basis is degenerate, which constructors reject) and re-verify.
  for (const auto& s : out)
    if (!is_invariant(a, s)) throw Error("classify: classification member failed verification");
  std::sort(out.begin(), out.end(), detail::subspace_order<S>);
  out.erase(std::unique(out.begin(), out.end(),
                        [](const Subspace<S>& x, const Subspace<S>& y) { return x.equals(y); }),
            out.end());
  return out;
}

// Family-aware lattice: exact classification when provenance allows, the
// search closure otherwise.
template <class S>
std::pair<std::vector<Subspace<S>>, bool> invariant_lattice(const OperatorAlgebra<S>& a,
                                                            uint64_t seed = 0, int budget = 50) {
  if (a.prov.kind != FamilyProvenance::Generic) return {classify_invariants(a), true};
  return search_invariant_lattice(a, seed, budget);
}

// ---------------------------------------------------------------------------
// The antisymmetric-but-not-triangularizable fixture on C^4.
// ---------------------------------------------------------------------------

template <class S>
struct FullSubobjectFixture {
  std::vector<Vector<S>> basis;
  OperatorAlgebra<S> algebra;
};

// Seeded search for a basis with all pairwise inner products nonzero and
// span{v1,v2} meeting span{v3,v4}-perp only at zero; the algebra adds the
// 1<->2 matrix units to the diagonal algebra of the basis.
template <class S>
FullSubobjectFixture<S> make_fullsubex_fixture(uint64_t seed = 0, const Tolerance& tol = {}) {
  Rng rng(seed);
  for (int attempt = 0; attempt < 256; ++attempt) {
    std::vector<Vector<S>> v;
    bool ok = true;
    for (int i = 0; i < 4; ++i) v.push_back(random_vector<S>(rng, 4));
    if (rank_of(v, 4, tol) != 4) continue;
    for (int i = 0; i < 4 && ok; ++i)
      for (int j = i + 1; j < 4 && ok; ++j)
        if (ScalarTraits<S>::is_zero(inner(v[i], v[j]), tol)) ok = false;
    if (!ok) continue;
    auto e = Subspace<S>::span(4, {v[0], v[1]}, tol);
    auto f_perp = Subspace<S>::span(4, {v[2], v[3]}, tol).orth_complement();
    if (e.intersect(f_perp).dim() != 0) continue;

    Preorder p = Preorder::equality(4);
    p.rel[0][1] = p.rel[1][0] = true;
    FullSubobjectFixture<S> out;
    out.basis = v;
    out.algebra = make_preorder_algebra(p, v, tol);
    return out;
  }
  throw Error("fullsubex fixture: search budget exhausted; retry with another seed");
}

}  // namespace opalg
