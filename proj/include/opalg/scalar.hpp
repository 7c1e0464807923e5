#pragma once

#include <complex>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace opalg {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionError : Error {
  using Error::Error;
};
struct ContainmentError : Error {
  using Error::Error;
};
struct RankError : Error {
  using Error::Error;
};
struct PreconditionError : Error {
  using Error::Error;
};
struct GuardError : Error {
  using Error::Error;
};
struct AmbiguityError : Error {
  using Error::Error;
};
struct NotFoundError : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};

// Numeric-backend comparison thresholds. Ignored by the exact backend.
struct Tolerance {
  double eps_abs = 1e-10;
  double eps_rel = 1e-9;
  double rank_threshold = 1e-8;
};

// Complex number with rational real and imaginary parts, exact arithmetic.
class GaussianRational {
 public:
  GaussianRational() : re_(0), im_(0) {}
  GaussianRational(long v) : re_(v), im_(0) {}  // NOLINT(runtime/explicit)
  GaussianRational(const mpq_class& re, const mpq_class& im) : re_(re), im_(im) {}
  GaussianRational(long re_num, long re_den, long im_num, long im_den)
      : re_(re_num, re_den), im_(im_num, im_den) {
    if (re_den == 0 || im_den == 0) throw ParseError("zero denominator");
    re_.canonicalize();
    im_.canonicalize();
  }

  const mpq_class& real() const { return re_; }
  const mpq_class& imag() const { return im_; }

  bool is_zero() const { return re_ == 0 && im_ == 0; }
  bool is_real() const { return im_ == 0; }

  GaussianRational conj() const { return {re_, -im_}; }
  mpq_class abs_sq() const { return re_ * re_ + im_ * im_; }

  friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
    return {a.re_ + b.re_, a.im_ + b.im_};
  }
  friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
    return {a.re_ - b.re_, a.im_ - b.im_};
  }
  friend GaussianRational operator-(const GaussianRational& a) { return {-a.re_, -a.im_}; }
  friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
    return {a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_};
  }
  friend GaussianRational operator/(const GaussianRational& a, const GaussianRational& b) {
    mpq_class d = b.abs_sq();
    if (d == 0) throw Error("division by zero");
    return {(a.re_ * b.re_ + a.im_ * b.im_) / d, (a.im_ * b.re_ - a.re_ * b.im_) / d};
  }
  GaussianRational& operator+=(const GaussianRational& b) { return *this = *this + b; }
  GaussianRational& operator-=(const GaussianRational& b) { return *this = *this - b; }
  GaussianRational& operator*=(const GaussianRational& b) { return *this = *this * b; }
  GaussianRational& operator/=(const GaussianRational& b) { return *this = *this / b; }

  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }

  // Total order used only for canonical tie-breaking, not algebra.
  friend bool operator<(const GaussianRational& a, const GaussianRational& b) {
    if (a.re_ != b.re_) return a.re_ < b.re_;
    return a.im_ < b.im_;
  }

  std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

  // Serialized form "a/b+c/d i"; denominators always written.
  std::string str() const;
  static GaussianRational parse(const std::string& s);

 private:
  mpq_class re_, im_;
};

using Cplx = std::complex<double>;

namespace detail {
std::string rat_str(const mpq_class& q);
mpq_class parse_rat(const std::string& s);
}  // namespace detail

// Uniform access to field operations for the two complex backends and the
// two real fields used in real-linear solves.
template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<GaussianRational> {
  using Real = mpq_class;
  static constexpr bool exact = true;
  static GaussianRational zero() { return {}; }
  static GaussianRational one() { return GaussianRational(1); }
  static GaussianRational conj(const GaussianRational& x) { return x.conj(); }
  static bool is_zero(const GaussianRational& x, const Tolerance&) { return x.is_zero(); }
  static bool eq(const GaussianRational& a, const GaussianRational& b, const Tolerance&) {
    return a == b;
  }
  static double approx_abs(const GaussianRational& x) { return std::abs(x.to_complex()); }
  static Real abs_sq(const GaussianRational& x) { return x.abs_sq(); }
  static GaussianRational from_real(const Real& r) { return {r, mpq_class(0)}; }
  static GaussianRational from_parts(const Real& re, const Real& im) { return {re, im}; }
  static Real re(const GaussianRational& x) { return x.real(); }
  static Real im(const GaussianRational& x) { return x.imag(); }
  static bool real_is_zero(const Real& r, const Tolerance&) { return r == 0; }
  static double real_to_double(const Real& r) { return r.get_d(); }
};

template <>
struct ScalarTraits<Cplx> {
  using Real = double;
  static constexpr bool exact = false;
  static Cplx zero() { return {}; }
  static Cplx one() { return {1.0, 0.0}; }
  static Cplx conj(const Cplx& x) { return std::conj(x); }
  static bool is_zero(const Cplx& x, const Tolerance& tol) { return std::abs(x) <= tol.eps_abs; }
  static bool eq(const Cplx& a, const Cplx& b, const Tolerance& tol) {
    return std::abs(a - b) <= tol.eps_abs + tol.eps_rel * std::max(std::abs(a), std::abs(b));
  }
  static double approx_abs(const Cplx& x) { return std::abs(x); }
  static Real abs_sq(const Cplx& x) { return std::norm(x); }
  static Cplx from_real(Real r) { return {r, 0.0}; }
  static Cplx from_parts(Real re, Real im) { return {re, im}; }
  static Real re(const Cplx& x) { return x.real(); }
  static Real im(const Cplx& x) { return x.imag(); }
  static bool real_is_zero(Real r, const Tolerance& tol) { return std::abs(r) <= tol.eps_abs; }
  static double real_to_double(Real r) { return r; }
};

template <>
struct ScalarTraits<mpq_class> {
  using Real = mpq_class;
  static constexpr bool exact = true;
  static mpq_class zero() { return 0; }
  static mpq_class one() { return 1; }
  static mpq_class conj(const mpq_class& x) { return x; }
  static bool is_zero(const mpq_class& x, const Tolerance&) { return x == 0; }
  static bool eq(const mpq_class& a, const mpq_class& b, const Tolerance&) { return a == b; }
  static double approx_abs(const mpq_class& x) { return std::abs(x.get_d()); }
  static mpq_class abs_sq(const mpq_class& x) { return x * x; }
  static mpq_class from_real(const mpq_class& r) { return r; }
  static mpq_class re(const mpq_class& x) { return x; }
  static mpq_class im(const mpq_class&) { return 0; }
};

template <>
struct ScalarTraits<double> {
  using Real = double;
  static constexpr bool exact = false;
  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  static double conj(double x) { return x; }
  static bool is_zero(double x, const Tolerance& tol) { return std::abs(x) <= tol.eps_abs; }
  static bool eq(double a, double b, const Tolerance& tol) {
    return std::abs(a - b) <= tol.eps_abs + tol.eps_rel * std::max(std::abs(a), std::abs(b));
  }
  static double approx_abs(double x) { return std::abs(x); }
  static double abs_sq(double x) { return x * x; }
  static double from_real(double r) { return r; }
  static double re(double x) { return x; }
  static double im(double) { return 0.0; }
};

// Ordering for canonical, reproducible merges. Numeric path compares exact
// double values; determinism only requires a fixed order for fixed inputs.
template <class S>
inline bool scalar_less(const S& a, const S& b) {
  using T = ScalarTraits<S>;
  if (T::re(a) != T::re(b)) return T::re(a) < T::re(b);
  return T::im(a) < T::im(b);
}

}  // namespace opalg
