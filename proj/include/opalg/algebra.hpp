#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "opalg/linalg.hpp"

namespace opalg {

// Linear span of n x n matrices in canonical vectorized-echelon form.
template <class S>
class MatSpan {
 public:
  explicit MatSpan(int n = 0, Tolerance tol = {}) : n_(n), ech_(n * n, tol) {}

  static MatSpan span(int n, const std::vector<Matrix<S>>& mats, const Tolerance& tol = {}) {
    MatSpan s(n, tol);
    for (const auto& m : mats) s.insert(m);
    return s;
  }

  int n() const { return n_; }
  int dim() const { return ech_.dim(); }
  const Tolerance& tol() const { return ech_.tol(); }

  bool insert(const Matrix<S>& m) {
    if (m.rows() != n_ || m.cols() != n_) throw DimensionError("span insert: wrong shape");
    return ech_.insert(m.vectorize());
  }

  bool contains(const Matrix<S>& m) const {
    if (m.rows() != n_ || m.cols() != n_) throw DimensionError("span member: wrong shape");
    return ech_.contains(m.vectorize());
  }

  std::vector<Matrix<S>> basis() const {
    std::vector<Matrix<S>> out;
    out.reserve(ech_.dim());
    for (const auto& r : ech_.rows()) out.push_back(Matrix<S>::from_vectorized(r, n_));
    return out;
  }
  const std::vector<Vector<S>>& vectorized_basis() const { return ech_.rows(); }

  // Coefficients of m over the canonical basis, if m lies in the span.
  std::optional<Vector<S>> coordinates(const Matrix<S>& m) const {
    return express(ech_.rows(), m.vectorize(), tol());
  }

  bool equals(const MatSpan& other) const {
    if (n_ != other.n_ || dim() != other.dim()) return false;
    for (const auto& b : other.basis())
      if (!contains(b)) return false;
    return true;
  }

 private:
  int n_;
  Echelon<S> ech_;
};

// Provenance tag keying exact lattice classifications for the structured
// families; Generic carries no classification claims.
struct FamilyProvenance {
  enum Kind { Generic, Tn, Dv, Jv, PreorderAlg } kind = Generic;
  // Family parameters live on the constructing module; what the algebra
  // itself retains is the defining basis (columns) and, for Jv, block sizes,
  // and for PreorderAlg, the relation table.
  std::vector<std::vector<bool>> rel;  // PreorderAlg only
  std::vector<int> block_sizes;        // Jv only
};

// Product-stable span of matrices. The diagonal metric is nonempty only for
// exact-mode compressions, where the carrier basis of the underlying space is
// orthogonal but not normalized; adjoints are then G^{-1} M^H G.
template <class S>
struct OperatorAlgebra {
  MatSpan<S> span;
  bool unital = false;
  Metric<S> metric;
  FamilyProvenance prov;
  // Non-owning copy of the family's defining basis, when one exists.
  std::vector<Vector<S>> family_basis;

  int n() const { return span.n(); }
  int dim() const { return span.dim(); }
  const Tolerance& tol() const { return span.tol(); }
  std::vector<Matrix<S>> basis() const { return span.basis(); }

  Matrix<S> adjoint_of(const Matrix<S>& m) const { return metric_adjoint(m, metric); }
};

template <class S>
bool member(const MatSpan<S>& s, const Matrix<S>& m) {
  return s.contains(m);
}

template <class S>
MatSpan<S> adjoint_span(const MatSpan<S>& s, const Metric<S>& g = {}) {
  std::vector<Matrix<S>> adj;
  for (const auto& b : s.basis()) adj.push_back(metric_adjoint(b, g));
  return MatSpan<S>::span(s.n(), adj, s.tol());
}

template <class S>
MatSpan<S> intersect_spans(const MatSpan<S>& a, const MatSpan<S>& b) {
  if (a.n() != b.n()) throw DimensionError("span intersect: dimension mismatch");
  Subspace<S> sa = Subspace<S>::span(a.n() * a.n(), a.vectorized_basis(), a.tol());
  Subspace<S> sb = Subspace<S>::span(b.n() * b.n(), b.vectorized_basis(), b.tol());
  Subspace<S> si = sa.intersect(sb);
  MatSpan<S> out(a.n(), a.tol());
  for (const auto& v : si.basis()) out.insert(Matrix<S>::from_vectorized(v, a.n()));
  return out;
}

namespace detail {

// Orthonormal span of vectorized matrices; used by the numeric closure to
// re-orthogonalize every round so rank decisions do not drift.
template <class S>
class OrthoSpan {
 public:
  OrthoSpan(int len, Tolerance tol) : len_(len), tol_(tol) {}
  int dim() const { return static_cast<int>(vecs_.size()); }
  const std::vector<Vector<S>>& vectors() const { return vecs_; }

  bool insert(Vector<S> v) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : vecs_) {
        S c = inner(v, u);
        v = vec_sub(std::move(v), vec_scale(u, c));
      }
    double nrm = std::sqrt(ScalarTraits<S>::real_to_double(norm_sq(v)));
    if (nrm <= tol_.rank_threshold) return false;
    S inv = ScalarTraits<S>::from_real(1.0 / nrm);
    for (auto& x : v) x *= inv;
    vecs_.push_back(std::move(v));
    return true;
  }

 private:
  int len_;
  Tolerance tol_;
  std::vector<Vector<S>> vecs_;
};

}  // namespace detail

// Smallest product-stable span containing the generators (and I when unital).
// Each round multiplies all current basis pairs, canonicalizes once, and
// stops when the dimension is unchanged over a full round.
template <class S>
OperatorAlgebra<S> close_algebra(int n, const std::vector<Matrix<S>>& generators, bool unital,
                                 const Tolerance& tol = {}) {
  for (const auto& g : generators)
    if (g.rows() != n || g.cols() != n) throw DimensionError("close_algebra: generator shape");

  auto one_round = [&](std::vector<Matrix<S>>& basis, auto&& insert_mat) {
    // Deterministic merge: products in canonical basis order.
    bool grew = false;
    size_t d = basis.size();
    for (size_t i = 0; i < d; ++i)
      for (size_t j = 0; j < d; ++j) {
        Matrix<S> p = basis[i] * basis[j];
        grew = insert_mat(p) || grew;
      }
    return grew;
  };

  OperatorAlgebra<S> out;
  out.unital = unital;

  if constexpr (ScalarTraits<S>::exact) {
    MatSpan<S> span(n, tol);
    if (unital) span.insert(Matrix<S>::identity(n));
    for (const auto& g : generators) span.insert(g);
    while (true) {
      auto basis = span.basis();
      bool grew = one_round(basis, [&](const Matrix<S>& m) { return span.insert(m); });
      if (!grew || span.dim() >= n * n) break;
    }
    out.span = std::move(span);
  } else {
    detail::OrthoSpan<S> ortho(n * n, tol);
    if (unital) ortho.insert(Matrix<S>::identity(n).vectorize());
    for (const auto& g : generators) ortho.insert(g.vectorize());
    while (true) {
      std::vector<Matrix<S>> basis;
      for (const auto& v : ortho.vectors()) basis.push_back(Matrix<S>::from_vectorized(v, n));
      bool grew =
          one_round(basis, [&](const Matrix<S>& m) { return ortho.insert(m.vectorize()); });
      if (!grew || ortho.dim() >= n * n) break;
    }
    MatSpan<S> span(n, tol);
    for (const auto& v : ortho.vectors()) span.insert(Matrix<S>::from_vectorized(v, n));
    out.span = std::move(span);
  }
  return out;
}

template <class S>
OperatorAlgebra<S> close_algebra(const std::vector<Matrix<S>>& generators, bool unital,
                                 const Tolerance& tol = {}) {
  if (generators.empty()) throw DimensionError("close_algebra: empty generators need a dimension");
  return close_algebra(generators[0].n(), generators, unital, tol);
}

// Verifies product stability of the canonical basis by membership.
template <class S>
bool is_product_stable(const OperatorAlgebra<S>& a) {
  auto basis = a.basis();
  for (const auto& x : basis)
    for (const auto& y : basis)
      if (!a.span.contains(x * y)) return false;
  return true;
}

// S A S^{-1} for invertible S; product stability is preserved.
template <class S>
OperatorAlgebra<S> conjugate(const OperatorAlgebra<S>& a, const Matrix<S>& s) {
  auto sinv = try_inverse(s, a.tol());
  if (!sinv) throw RankError("conjugate: singular matrix");
  MatSpan<S> span(a.n(), a.tol());
  for (const auto& b : a.basis()) span.insert(s * b * *sinv);
  OperatorAlgebra<S> out;
  out.span = std::move(span);
  out.unital = a.unital;
  out.metric = a.metric;
  return out;
}

template <class S>
bool contains_identity(const OperatorAlgebra<S>& a) {
  return a.span.contains(Matrix<S>::identity(a.n()));
}

// True iff m = c * I for some scalar c (within tolerance).
template <class S>
bool is_scalar_matrix(const Matrix<S>& m, const Tolerance& tol = {}) {
  int n = m.n();
  const S c = m(0, 0);
  Matrix<S> d = m - c * Matrix<S>::identity(n);
  return d.is_zero(tol);
}

}  // namespace opalg
