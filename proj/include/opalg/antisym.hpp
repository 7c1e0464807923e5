#pragma once

#include <optional>
#include <string>
#include <vector>

#include "opalg/invariant.hpp"

namespace opalg {

template <class S>
struct AntisymmetryReport {
  bool antisymmetric = false;
  std::optional<Matrix<S>> witness;  // self-adjoint, non-scalar, in A
  std::string method_notes;
};

// Antisymmetric iff A meets its adjoint span only in scalars. A failure is
// witnessed by the real or imaginary part of a non-scalar element of the
// intersection; both lie in A.
template <class S>
AntisymmetryReport<S> is_antisymmetric(const OperatorAlgebra<S>& a) {
  AntisymmetryReport<S> rep;
  MatSpan<S> meet = intersect_spans(a.span, adjoint_span(a.span, a.metric));
  if (meet.dim() == 0) {
    rep.antisymmetric = true;
    rep.method_notes = "intersection with adjoint span is zero";
    return rep;
  }
  Matrix<S> nonscalar;
  bool found = false;
  for (const auto& b : meet.basis()) {
    if (!is_scalar_matrix(b, a.tol())) {
      nonscalar = b;
      found = true;
      break;
    }
  }
  if (!found) {
    rep.antisymmetric = true;
    rep.method_notes = "intersection with adjoint span is the scalars";
    return rep;
  }
  rep.antisymmetric = false;
  S half = ScalarTraits<S>::one() / S(2);
  S half_i = ScalarTraits<S>::one() / ScalarTraits<S>::from_parts(0, 2);
  Matrix<S> adj = metric_adjoint(nonscalar, a.metric);
  Matrix<S> re = half * (nonscalar + adj);
  Matrix<S> im = half_i * (nonscalar - adj);
  rep.witness = is_scalar_matrix(re, a.tol()) ? im : re;
  rep.method_notes = "self-adjoint refinement of a non-scalar intersection element";
  return rep;
}

// Real-linear basis of the self-adjoint elements of A, solved over the
// (Re, Im) coordinates of the span.
template <class S>
std::vector<Matrix<S>> hermitian_part(const OperatorAlgebra<S>& a) {
  using T = ScalarTraits<S>;
  using R = typename T::Real;
  auto basis = a.basis();
  int d = static_cast<int>(basis.size());
  int n = a.n();
  if (d == 0) return {};
  // M = sum (a_t + i b_t) B_t is self-adjoint iff for every entry:
  //   sum a_t (B_t - B_t*) + i b_t (B_t + B_t*) = 0.
  Matrix<R> sys(2 * n * n, 2 * d);
  for (int t = 0; t < d; ++t) {
    Matrix<S> adj = metric_adjoint(basis[t], a.metric);
    Matrix<S> diff = basis[t] - adj;
    Matrix<S> sum = basis[t] + adj;
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        int row = 2 * (p * n + q);
        S u = diff(p, q);
        S w = ScalarTraits<S>::from_parts(0, 1) * sum(p, q);
        sys(row, t) = T::re(u);
        sys(row + 1, t) = T::im(u);
        sys(row, d + t) = T::re(w);
        sys(row + 1, d + t) = T::im(w);
      }
  }
  std::vector<Matrix<S>> out;
  for (const auto& k : kernel_basis(sys, a.tol())) {
    Matrix<S> h = Matrix<S>::zero(n);
    for (int t = 0; t < d; ++t) {
      S c = ScalarTraits<S>::from_parts(k[t], k[d + t]);
      h = h + c * basis[t];
    }
    if (!h.is_zero(a.tol())) out.push_back(std::move(h));
  }
  return out;
}

// Searches basis elements plus seeded random algebra elements for one with
// at least two distinct (certified) eigenvalues, and extracts the spectral
// idempotent, which is a polynomial in the element and hence lies in A.
// Absent means absent over the sample, not a certificate.
template <class S>
std::optional<Matrix<S>> find_nonscalar_projection(const OperatorAlgebra<S>& a, uint64_t seed = 0,
                                                   int samples = 20) {
  int n = a.n();
  auto basis = a.basis();
  if (basis.empty()) return std::nullopt;

  auto try_element = [&](const Matrix<S>& b) -> std::optional<Matrix<S>> {
    Spectrum<S> spec = spectrum_of(b, a.tol());
    if (!spec.complete || spec.distinct.size() < 2) return std::nullopt;
    // Pick the first nonzero eigenvalue in canonical order.
    std::optional<S> lambda;
    bool has_zero = false;
    for (const auto& ev : spec.distinct) {
      if (ScalarTraits<S>::is_zero(ev, a.tol()))
        has_zero = true;
      else if (!lambda)
        lambda = ev;
    }
    if (!lambda) return std::nullopt;  // all eigenvalues zero: nilpotent element
    std::vector<S> others;
    for (const auto& ev : spec.distinct)
      if (!ScalarTraits<S>::is_zero(ev, a.tol()) && !ScalarTraits<S>::eq(ev, *lambda, a.tol()))
        others.push_back(ev);
    Matrix<S> p = spectral_idempotent_from_eigs(b, others, has_zero, *lambda);
    Tolerance vt = a.tol();
    if (!approx_equal(p * p, p, vt)) return std::nullopt;
    if (p.is_zero(vt) || is_scalar_matrix(p, vt)) return std::nullopt;
    if (!a.span.contains(p)) return std::nullopt;
    return p;
  };

  for (const auto& b : basis)
    if (auto p = try_element(b)) return p;

  Rng rng(seed);
  for (int it = 0; it < samples; ++it) {
    Matrix<S> b = Matrix<S>::zero(n);
    for (const auto& x : basis) b = b + random_scalar<S>(rng) * x;
    if (auto p = try_element(b)) return p;
  }
  return std::nullopt;
}

enum class Hereditary { Yes, No, Unknown };

template <class S>
struct HereditaryCounterexample {
  Subspace<S> e1, e2;
  Matrix<S> compressed_witness;  // non-scalar self-adjoint element of the compression
};

template <class S>
struct HereditaryVerdict {
  Hereditary status = Hereditary::Unknown;
  std::optional<HereditaryCounterexample<S>> counterexample;
  bool lattice_complete = false;
};

// Scans ordered lattice pairs E2 inside E1, compresses to the orthogonal
// difference and tests antisymmetry there. Yes requires a complete lattice.
template <class S>
HereditaryVerdict<S> is_hereditarily_antisymmetric(const OperatorAlgebra<S>& a,
                                                   std::vector<Subspace<S>> lattice,
                                                   bool lattice_complete) {
  for (const auto& e : lattice)
    if (!is_invariant(a, e)) throw PreconditionError("hereditary: non-invariant lattice member");
  std::sort(lattice.begin(), lattice.end(), detail::subspace_order<S>);

  HereditaryVerdict<S> verdict;
  verdict.lattice_complete = lattice_complete;
  for (const auto& e1 : lattice)
    for (const auto& e2 : lattice) {
      if (e1.dim() <= e2.dim() || !e1.contains(e2)) continue;
      SemiInvariantSpec<S> spec;
      spec.e1 = e1;
      spec.e2 = e2;
      spec.e = e1.orth_difference(e2, a.metric);
      if (spec.e.dim() == 0) continue;
      auto comp = compress_to(a, spec.e);
      auto rep = is_antisymmetric(comp.alg);
      if (!rep.antisymmetric) {
        verdict.status = Hereditary::No;
        verdict.counterexample =
            HereditaryCounterexample<S>{e1, e2, std::move(*rep.witness)};
        return verdict;
      }
    }
  verdict.status = lattice_complete ? Hereditary::Yes : Hereditary::Unknown;
  return verdict;
}

}  // namespace opalg
