#pragma once

#include <utility>
#include <vector>

#include "opalg/families.hpp"

namespace opalg {

template <class S>
struct KrausChannel {
  int n = 0;
  std::vector<Matrix<S>> kraus;
  double cptp_residual = 0;  // magnitude of sum K_i* K_i - I
};

template <class S>
struct ReachabilityAlgebra {
  OperatorAlgebra<S> algebra;  // unital closure of all Kraus matrices
};

// Accepts the channel iff sum K_i* K_i = I (exactly, or within tolerance).
template <class S>
KrausChannel<S> validate_channel(const std::vector<Matrix<S>>& kraus, const Tolerance& tol = {}) {
  if (kraus.empty()) throw PreconditionError("channel: no Kraus matrices");
  int n = kraus[0].n();
  Matrix<S> sum = Matrix<S>::zero(n);
  for (const auto& k : kraus) {
    if (k.rows() != n || k.cols() != n) throw DimensionError("channel: Kraus shape mismatch");
    sum = sum + k.adjoint() * k;
  }
  Matrix<S> diff = sum - Matrix<S>::identity(n);
  KrausChannel<S> out;
  out.n = n;
  out.kraus = kraus;
  out.cptp_residual = diff.max_abs();
  if constexpr (ScalarTraits<S>::exact) {
    if (!diff.is_zero(tol)) throw PreconditionError("channel: Kraus sum differs from identity");
  } else {
    if (!approx_equal(sum, Matrix<S>::identity(n), tol))
      throw PreconditionError("channel: Kraus sum differs from identity beyond tolerance");
  }
  return out;
}

template <class S>
ReachabilityAlgebra<S> reachability_algebra(const std::vector<KrausChannel<S>>& channels,
                                            const Tolerance& tol = {}) {
  if (channels.empty()) throw PreconditionError("reachability: no channels");
  int n = channels[0].n;
  std::vector<Matrix<S>> gens;
  for (const auto& c : channels) {
    if (c.n != n) throw DimensionError("reachability: channel dimensions differ");
    for (const auto& k : c.kraus) gens.push_back(k);
  }
  ReachabilityAlgebra<S> out;
  out.algebra = close_algebra<S>(n, gens, /*unital=*/true, tol);
  return out;
}

// Nonzero transition amplitude under some element of the algebra:
// <B v, w> != 0 for some canonical basis element B.
template <class S>
bool can_transition(const ReachabilityAlgebra<S>& r, Vector<S> v, Vector<S> w) {
  const auto& a = r.algebra;
  if (vec_is_zero(v, a.tol()) || vec_is_zero(w, a.tol()))
    throw PreconditionError("transition: zero state vector");
  if constexpr (!ScalarTraits<S>::exact) {
    double nv = std::sqrt(norm_sq(v)), nw = std::sqrt(norm_sq(w));
    v = vec_scale(std::move(v), Cplx(1.0 / nv, 0));
    w = vec_scale(std::move(w), Cplx(1.0 / nw, 0));
  }
  for (const auto& b : a.basis())
    if (!ScalarTraits<S>::is_zero(inner(b * v, w), a.tol())) return true;
  return false;
}

template <class S>
Matrix<S> kron(const Matrix<S>& a, const Matrix<S>& b) {
  Matrix<S> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      for (int p = 0; p < b.rows(); ++p)
        for (int q = 0; q < b.cols(); ++q)
          out(i * b.rows() + p, j * b.cols() + q) = a(i, j) * b(p, q);
  return out;
}

// Composite-system criterion: <(B ⊗ I_k) v, w> != 0 for some basis element.
// The lift is applied per query instead of closing a larger algebra.
template <class S>
bool can_transition_composite(const ReachabilityAlgebra<S>& r, const Vector<S>& v,
                              const Vector<S>& w, int k) {
  const auto& a = r.algebra;
  if (static_cast<int>(v.size()) != a.n() * k || v.size() != w.size())
    throw DimensionError("composite transition: vector shape");
  if (vec_is_zero(v, a.tol()) || vec_is_zero(w, a.tol()))
    throw PreconditionError("transition: zero state vector");
  Matrix<S> idk = Matrix<S>::identity(k);
  for (const auto& b : a.basis())
    if (!ScalarTraits<S>::is_zero(inner(kron(b, idk) * v, w), a.tol())) return true;
  return false;
}

// Invariant subspaces of the reachability algebra: states inside never leave.
template <class S>
std::pair<std::vector<Subspace<S>>, bool> trap_subspaces(const ReachabilityAlgebra<S>& r,
                                                         uint64_t seed = 0, int budget = 50) {
  return invariant_lattice(r.algebra, seed, budget);
}

}  // namespace opalg
