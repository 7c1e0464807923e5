#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "opalg/algebra.hpp"
#include "opalg/random.hpp"
#include "opalg/spectrum.hpp"

namespace opalg {

// E1 and E2 invariant, E2 inside E1, E = E1 minus E2 (orthogonal difference).
template <class S>
struct SemiInvariantSpec {
  Subspace<S> e1, e2, e;
};

template <class S>
struct CompanionProjection {
  Subspace<S> f;  // direct complement of E2 inside E1
  Matrix<S> q;    // projection onto F with kernel E2 + E1-perp
};

// Compression P A P restricted to E, in coordinates of an orthogonal
// (numeric: orthonormal) basis of E. The carrier records that basis as
// ambient vectors; the algebra's metric records its squared norms.
template <class S>
struct Compression {
  OperatorAlgebra<S> alg;
  std::vector<Vector<S>> carrier;
};

template <class S>
bool is_invariant(const OperatorAlgebra<S>& a, const Subspace<S>& e) {
  if (e.ambient() != a.n()) throw DimensionError("is_invariant: dimension mismatch");
  for (const auto& b : a.basis())
    for (const auto& v : e.basis())
      if (!e.contains(b * v)) return false;
  return true;
}

// Smallest invariant subspace containing v (breadth-first span growth).
template <class S>
Subspace<S> orbit_subspace(const OperatorAlgebra<S>& a, const Vector<S>& v) {
  Echelon<S> ech(a.n(), a.tol());
  std::vector<Vector<S>> frontier;
  if (ech.insert(v)) frontier.push_back(v);
  auto basis = a.basis();
  while (!frontier.empty()) {
    std::vector<Vector<S>> next;
    for (const auto& u : frontier)
      for (const auto& b : basis) {
        Vector<S> w = b * u;
        if (ech.insert(w)) next.push_back(std::move(w));
      }
    frontier = std::move(next);
  }
  return Subspace<S>::span(a.n(), ech.rows(), a.tol());
}

template <class S>
SemiInvariantSpec<S> make_semi_invariant_spec(const OperatorAlgebra<S>& a, const Subspace<S>& e1,
                                              const Subspace<S>& e2) {
  if (!e1.contains(e2)) throw PreconditionError("spec: E2 not contained in E1");
  if (!is_invariant(a, e1)) throw PreconditionError("spec: E1 not invariant");
  if (!is_invariant(a, e2)) throw PreconditionError("spec: E2 not invariant");
  SemiInvariantSpec<S> spec;
  spec.e1 = e1;
  spec.e2 = e2;
  spec.e = e1.orth_difference(e2, a.metric);
  return spec;
}

// Multiplicativity test: P Bi Bj P = (P Bi P)(P Bj P) on the spanning set.
template <class S>
bool is_semi_invariant(const OperatorAlgebra<S>& a, const Subspace<S>& e) {
  Matrix<S> p = orth_projection(e, a.metric);
  auto basis = a.basis();
  for (const auto& x : basis)
    for (const auto& y : basis) {
      Matrix<S> lhs = p * (x * y) * p;
      Matrix<S> rhs = (p * x * p) * (p * y * p);
      if (!approx_equal(lhs, rhs, a.tol())) return false;
    }
  return true;
}

// Core compression onto a subspace E that the caller knows to be
// semi-invariant. Exact mode produces an orthogonal carrier basis with
// recorded squared norms; numeric mode an orthonormal one.
template <class S>
Compression<S> compress_to(const OperatorAlgebra<S>& a, const Subspace<S>& e) {
  if (e.dim() == 0) throw PreconditionError("compress: zero subspace");
  auto gs = gram_schmidt(e.basis(), a.metric, a.tol());
  int m = static_cast<int>(gs.vecs.size());
  MatSpan<S> span(m, a.tol());
  for (const auto& b : a.basis()) {
    Matrix<S> c(m, m);
    for (int j = 0; j < m; ++j) {
      Vector<S> img = b * gs.vecs[j];
      for (int i = 0; i < m; ++i)
        c(i, j) =
            inner(img, gs.vecs[i], a.metric) / ScalarTraits<S>::from_real(gs.sq_norms[i]);
    }
    span.insert(c);
  }
  Compression<S> out;
  out.alg.span = std::move(span);
  if constexpr (ScalarTraits<S>::exact) {
    bool unit_metric = true;
    for (const auto& g : gs.sq_norms)
      if (g != 1) unit_metric = false;
    if (!unit_metric) out.alg.metric = gs.sq_norms;
  }
  out.alg.unital = out.alg.span.contains(Matrix<S>::identity(m));
  out.carrier = gs.vecs;
  return out;
}

template <class S>
Compression<S> compress(const OperatorAlgebra<S>& a, const SemiInvariantSpec<S>& spec) {
  if (spec.e.ambient() != a.n()) throw DimensionError("compress: dimension mismatch");
  auto expected = spec.e1.orth_difference(spec.e2, a.metric);
  if (!expected.equals(spec.e)) throw PreconditionError("compress: inconsistent spec");
  auto out = compress_to(a, spec.e);
  if (!is_product_stable(out.alg)) throw PreconditionError("compress: image not product stable");
  return out;
}

// The unique projection with range F and kernel E2 + E1-perp.
template <class S>
CompanionProjection<S> natural_projection(const SemiInvariantSpec<S>& spec, const Subspace<S>& f,
                                          const Metric<S>& metric = {}, const Tolerance& tol = {}) {
  if (!spec.e1.contains(f)) throw PreconditionError("companion: F not inside E1");
  if (f.intersect(spec.e2).dim() != 0) throw PreconditionError("companion: F meets E2");
  if ((f + spec.e2).dim() != spec.e1.dim())
    throw PreconditionError("companion: F + E2 does not fill E1");
  Subspace<S> ker = spec.e2 + spec.e1.orth_complement(metric);
  int n = spec.e1.ambient();
  std::vector<Vector<S>> cols = f.basis();
  for (const auto& v : ker.basis()) cols.push_back(v);
  if (static_cast<int>(cols.size()) != n)
    throw PreconditionError("companion: F and kernel do not decompose the space");
  Matrix<S> m = Matrix<S>::from_columns(cols);
  Matrix<S> d(n, n);
  for (int i = 0; i < f.dim(); ++i) d(i, i) = ScalarTraits<S>::one();
  CompanionProjection<S> out;
  out.f = f;
  out.q = m * d * inverse(m, tol);
  return out;
}

// Checks that conjugating the companion compression by P0 (the restriction
// of the orthogonal projection to F) reproduces the orthogonal compression.
template <class S>
bool compression_isomorphism_check(const OperatorAlgebra<S>& a, const SemiInvariantSpec<S>& spec,
                                   const CompanionProjection<S>& companion) {
  Matrix<S> p = orth_projection(spec.e, a.metric);
  // z = P0^{-1} y for each basis vector y of E: solve P (F c) = y over c.
  std::vector<Vector<S>> fcols = companion.f.basis();
  Matrix<S> pf(a.n(), static_cast<int>(fcols.size()));
  for (size_t j = 0; j < fcols.size(); ++j) {
    Vector<S> img = p * fcols[j];
    for (int i = 0; i < a.n(); ++i) pf(i, static_cast<int>(j)) = img[i];
  }
  for (const auto& y : spec.e.basis()) {
    auto c = solve(pf, y, a.tol());
    if (!c) return false;  // P0 not invertible: precondition violated upstream
    Vector<S> z = zero_vector<S>(a.n());
    for (size_t j = 0; j < fcols.size(); ++j) z = vec_add(std::move(z), vec_scale(fcols[j], (*c)[j]));
    for (const auto& b : a.basis()) {
      Vector<S> lhs = p * (companion.q * (b * z));
      Vector<S> rhs = p * (b * y);
      Vector<S> diff = vec_sub(std::move(lhs), rhs);
      if constexpr (ScalarTraits<S>::exact) {
        if (!vec_is_zero(diff, a.tol())) return false;
      } else {
        double scale = 0;
        for (const auto& xx : rhs) scale = std::max(scale, ScalarTraits<S>::approx_abs(xx));
        for (const auto& xx : diff)
          if (ScalarTraits<S>::approx_abs(xx) > a.tol().rank_threshold * std::max(1.0, scale))
            return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Invariant subspace search.
// ---------------------------------------------------------------------------

template <class S>
struct InvariantSearchResult {
  enum Kind { Found, NoneExists, Unknown } kind = Unknown;
  Subspace<S> subspace;  // meaningful for Found
};

namespace detail {

template <class S>
std::vector<std::pair<S, Vector<S>>> eigenpairs_for_search(const Matrix<S>& b,
                                                           const Tolerance& tol) {
  std::vector<std::pair<S, Vector<S>>> out;
  if constexpr (ScalarTraits<S>::exact) {
    auto spec = exact_eigenvalues(b);
    for (const auto& lam : spec.roots) {
      Matrix<S> shifted = b - lam * Matrix<S>::identity(b.n());
      for (const auto& v : kernel_basis(shifted, tol)) out.push_back({lam, v});
    }
  } else {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(to_eigen(b), true);
    for (int k = 0; k < es.eigenvalues().size(); ++k) {
      Vector<S> v(b.n());
      for (int i = 0; i < b.n(); ++i) v[i] = es.eigenvectors()(i, k);
      out.push_back({es.eigenvalues()[k], std::move(v)});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& c) {
      if (a.first.real() != c.first.real()) return a.first.real() < c.first.real();
      return a.first.imag() < c.first.imag();
    });
  }
  return out;
}

template <class S>
bool subspace_order(const Subspace<S>& a, const Subspace<S>& b) {
  if (a.dim() != b.dim()) return a.dim() < b.dim();
  for (int r = 0; r < a.dim(); ++r) {
    if (a.basis()[r] != b.basis()[r]) return vec_less(a.basis()[r], b.basis()[r]);
  }
  return false;
}

}  // namespace detail

// Randomized search for a nontrivial invariant subspace: eigenvector kernels
// of sampled elements seed orbit spans, on both the algebra and its adjoint
// (whose orbits yield coinvariant subspaces, hence invariant complements).
// NoneExists carries an exact certificate: the span is all of M_n.
template <class S>
InvariantSearchResult<S> find_nontrivial_invariant_subspace(const OperatorAlgebra<S>& a,
                                                            uint64_t seed = 0, int budget = 50) {
  int n = a.n();
  InvariantSearchResult<S> res;
  if (n == 1 || a.dim() == n * n) {
    res.kind = InvariantSearchResult<S>::NoneExists;
    return res;
  }
  if (a.dim() == 0) {
    // The zero algebra leaves every line invariant.
    res.kind = InvariantSearchResult<S>::Found;
    res.subspace = Subspace<S>::span(n, {basis_vector<S>(n, 0)}, a.tol());
    return res;
  }

  OperatorAlgebra<S> adj;
  adj.span = adjoint_span(a.span, a.metric);
  adj.metric = a.metric;
  adj.unital = a.unital;

  std::vector<Subspace<S>> candidates;
  auto try_element = [&](const Matrix<S>& b, const OperatorAlgebra<S>& side, bool adjoint_side) {
    for (auto& [lam, v] : detail::eigenpairs_for_search(b, a.tol())) {
      Subspace<S> orb = orbit_subspace(side, v);
      if (orb.dim() == 0 || orb.dim() == n) continue;
      if (adjoint_side) orb = orb.orth_complement(a.metric);
      if (orb.dim() > 0 && orb.dim() < n) candidates.push_back(std::move(orb));
    }
  };

  // Deterministic pass over the canonical basis of both sides.
  for (const auto& b : a.basis()) try_element(b, a, false);
  for (const auto& b : adj.basis()) try_element(b, adj, true);

  if (candidates.empty()) {
    Rng rng(seed);
    auto abasis = a.basis();
    auto dbasis = adj.basis();
    for (int it = 0; it < budget && candidates.empty(); ++it) {
      Matrix<S> b = Matrix<S>::zero(n);
      for (const auto& x : abasis) b = b + random_scalar<S>(rng) * x;
      try_element(b, a, false);
      Matrix<S> c = Matrix<S>::zero(n);
      for (const auto& x : dbasis) c = c + random_scalar<S>(rng) * x;
      try_element(c, adj, true);
    }
  }

  if (candidates.empty()) {
    res.kind = InvariantSearchResult<S>::Unknown;
    return res;
  }
  std::sort(candidates.begin(), candidates.end(), detail::subspace_order<S>);
  res.kind = InvariantSearchResult<S>::Found;
  res.subspace = candidates.front();
  return res;
}

// Search-based lattice approximation: eigenvector orbits of basis elements,
// repeated seeded searches, then meet/join closure. Never claims completeness.
template <class S>
std::pair<std::vector<Subspace<S>>, bool> search_invariant_lattice(const OperatorAlgebra<S>& a,
                                                                   uint64_t seed = 0,
                                                                   int budget = 50) {
  int n = a.n();
  std::vector<Subspace<S>> found;
  auto add = [&](const Subspace<S>& s) {
    for (const auto& t : found)
      if (t.equals(s)) return false;
    found.push_back(s);
    return true;
  };
  add(Subspace<S>(n, a.tol()));
  add(Subspace<S>::full(n, a.tol()));

  for (const auto& b : a.basis())
    for (auto& [lam, v] : detail::eigenpairs_for_search(b, a.tol()))
      add(orbit_subspace(a, v));

  Rng rng(seed);
  auto abasis = a.basis();
  for (int it = 0; it < budget; ++it) {
    if (abasis.empty()) break;
    Matrix<S> b = Matrix<S>::zero(n);
    for (const auto& x : abasis) b = b + random_scalar<S>(rng) * x;
    for (auto& [lam, v] : detail::eigenpairs_for_search(b, a.tol())) add(orbit_subspace(a, v));
  }

  // Meet/join closure with a size guard.
  bool grew = true;
  while (grew && found.size() < 512) {
    grew = false;
    size_t sz = found.size();
    for (size_t i = 0; i < sz && found.size() < 512; ++i)
      for (size_t j = i + 1; j < sz && found.size() < 512; ++j) {
        grew = add(found[i] + found[j]) || grew;
        grew = add(found[i].intersect(found[j])) || grew;
      }
  }
  // Keep only verified-invariant subspaces (orbits always are; meets/joins
  // of invariants are invariant, so this is a belt check).
  std::vector<Subspace<S>> out;
  for (const auto& s : found)
    if (is_invariant(a, s)) out.push_back(s);
  std::sort(out.begin(), out.end(), detail::subspace_order<S>);
  return {out, false};
}

// First lattice pair whose orthogonal difference has dimension >= 2 and
// compresses onto the full operator space.
template <class S>
std::optional<SemiInvariantSpec<S>> full_subquotient_witness(const OperatorAlgebra<S>& a,
                                                             std::vector<Subspace<S>> lattice) {
  std::sort(lattice.begin(), lattice.end(), detail::subspace_order<S>);
  for (const auto& e1 : lattice)
    for (const auto& e2 : lattice) {
      if (!e1.contains(e2) || e1.dim() - e2.dim() < 2) continue;
      SemiInvariantSpec<S> spec;
      spec.e1 = e1;
      spec.e2 = e2;
      spec.e = e1.orth_difference(e2, a.metric);
      auto comp = compress_to(a, spec.e);
      int m = spec.e.dim();
      if (comp.alg.dim() == m * m) return spec;
    }
  return std::nullopt;
}

}  // namespace opalg
