#pragma once

#include <tuple>
#include <utility>
#include <vector>

#include "opalg/linalg.hpp"

namespace opalg {

// Univariate polynomial over the scalar field, coefficients ascending.
template <class S>
class Poly {
 public:
  Poly() = default;
  explicit Poly(Vector<S> coeffs) : c_(std::move(coeffs)) { trim(); }
  static Poly constant(const S& v) { return Poly(Vector<S>{v}); }
  static Poly x() { return Poly(Vector<S>{ScalarTraits<S>::zero(), ScalarTraits<S>::one()}); }
  // (x - r)
  static Poly linear_root(const S& r) {
    return Poly(Vector<S>{-r, ScalarTraits<S>::one()});
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero poly
  bool is_zero() const { return c_.empty(); }
  const Vector<S>& coeffs() const { return c_; }
  S coeff(int k) const {
    return k < static_cast<int>(c_.size()) ? c_[k] : ScalarTraits<S>::zero();
  }
  S lead() const { return c_.back(); }

  S eval(const S& x) const {
    S acc = ScalarTraits<S>::zero();
    for (size_t k = c_.size(); k-- > 0;) acc = acc * x + c_[k];
    return acc;
  }

  template <class M>
  M eval_matrix(const M& a) const {  // no implicit constant-term identity: caller aware
    M acc = M::zero(a.n());
    M id = M::identity(a.n());
    for (size_t k = c_.size(); k-- > 0;) acc = acc * a + c_[k] * id;
    return acc;
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    Vector<S> c(std::max(a.c_.size(), b.c_.size()), ScalarTraits<S>::zero());
    for (size_t k = 0; k < a.c_.size(); ++k) c[k] += a.c_[k];
    for (size_t k = 0; k < b.c_.size(); ++k) c[k] += b.c_[k];
    return Poly(std::move(c));
  }
  friend Poly operator-(const Poly& a, const Poly& b) {
    Vector<S> c(std::max(a.c_.size(), b.c_.size()), ScalarTraits<S>::zero());
    for (size_t k = 0; k < a.c_.size(); ++k) c[k] += a.c_[k];
    for (size_t k = 0; k < b.c_.size(); ++k) c[k] -= b.c_[k];
    return Poly(std::move(c));
  }
  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly();
    Vector<S> c(a.c_.size() + b.c_.size() - 1, ScalarTraits<S>::zero());
    for (size_t i = 0; i < a.c_.size(); ++i)
      for (size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return Poly(std::move(c));
  }
  friend Poly operator*(const S& s, const Poly& a) {
    Vector<S> c = a.c_;
    for (auto& x : c) x *= s;
    return Poly(std::move(c));
  }

  // Division with remainder; divisor must be nonzero.
  static std::pair<Poly, Poly> divmod(Poly num, const Poly& den) {
    if (den.is_zero()) throw Error("poly division by zero");
    Poly q;
    q.c_.assign(std::max<size_t>(num.c_.size(), 1), ScalarTraits<S>::zero());
    while (!num.is_zero() && num.degree() >= den.degree()) {
      int shift = num.degree() - den.degree();
      S f = num.lead() / den.lead();
      q.c_[shift] = f;
      for (size_t k = 0; k < den.c_.size(); ++k) num.c_[k + shift] -= f * den.c_[k];
      num.trim();
    }
    q.trim();
    return {q, num};
  }

  // Extended gcd: returns (g, u, v) with u*a + v*b = g, g monic.
  static std::tuple<Poly, Poly, Poly> xgcd(Poly a, Poly b) {
    Poly u0 = constant(ScalarTraits<S>::one()), v0;
    Poly u1, v1 = constant(ScalarTraits<S>::one());
    while (!b.is_zero()) {
      auto [q, r] = divmod(a, b);
      a = b;
      b = r;
      Poly u2 = u0 - q * u1, v2 = v0 - q * v1;
      u0 = u1;
      v0 = v1;
      u1 = u2;
      v1 = v2;
    }
    if (!a.is_zero()) {
      S inv = ScalarTraits<S>::one() / a.lead();
      a = inv * a;
      u0 = inv * u0;
      v0 = inv * v0;
    }
    return {a, u0, v0};
  }

 private:
  void trim() {
    while (!c_.empty() && ScalarTraits<S>::is_zero(c_.back(), Tolerance{})) c_.pop_back();
  }
  Vector<S> c_;
};

// Characteristic polynomial det(xI - A) by the Faddeev-LeVerrier recurrence.
template <class S>
Poly<S> char_poly(const Matrix<S>& a) {
  int n = a.n();
  Vector<S> c(n + 1, ScalarTraits<S>::zero());
  c[n] = ScalarTraits<S>::one();
  Matrix<S> m = Matrix<S>::zero(n);
  Matrix<S> id = Matrix<S>::identity(n);
  for (int k = 1; k <= n; ++k) {
    m = a * (m + c[n - k + 1] * id);
    S t = m.trace();
    c[n - k] = -(t / S(static_cast<long>(k)));
  }
  return Poly<S>(std::move(c));
}

template <>
inline Poly<Cplx> char_poly(const Matrix<Cplx>& a) {
  int n = a.n();
  Vector<Cplx> c(n + 1, Cplx{});
  c[n] = Cplx{1, 0};
  Matrix<Cplx> m = Matrix<Cplx>::zero(n);
  Matrix<Cplx> id = Matrix<Cplx>::identity(n);
  for (int k = 1; k <= n; ++k) {
    m = a * (m + c[n - k + 1] * id);
    c[n - k] = -(m.trace() / Cplx(static_cast<double>(k), 0));
  }
  return Poly<Cplx>(std::move(c));
}

}  // namespace opalg
