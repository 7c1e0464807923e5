#pragma once

#include <algorithm>
#include <set>
#include <vector>

#include <Eigen/Eigenvalues>

#include "opalg/poly.hpp"

namespace opalg {

inline Eigen::MatrixXcd to_eigen(const Matrix<Cplx>& m) {
  Eigen::MatrixXcd e(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

inline Matrix<Cplx> to_cplx(const Matrix<GaussianRational>& m) {
  Matrix<Cplx> r(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r(i, j) = m(i, j).to_complex();
  return r;
}
inline Matrix<Cplx> to_cplx(const Matrix<Cplx>& m) { return m; }

// All eigenvalues (with multiplicity), sorted by (re, im) for determinism.
inline std::vector<Cplx> numeric_eigenvalues(const Matrix<Cplx>& m) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(to_eigen(m), /*computeEigenvectors=*/false);
  std::vector<Cplx> out;
  for (int i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()[i]);
  std::sort(out.begin(), out.end(), [](const Cplx& a, const Cplx& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return out;
}

namespace detail {

// Best rational approximation with bounded denominator (continued fractions).
inline std::optional<mpq_class> rationalize(double x, long max_den = 1000000,
                                            double tol = 1e-7) {
  if (!std::isfinite(x)) return std::nullopt;
  double v = x;
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  for (int it = 0; it < 64; ++it) {
    double fl = std::floor(v);
    if (fl > 9e17 || fl < -9e17) return std::nullopt;
    long a = static_cast<long>(fl);
    long p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > max_den || q2 < 0) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    double approx = static_cast<double>(p1) / static_cast<double>(q1);
    if (std::abs(approx - x) <= tol * std::max(1.0, std::abs(x))) {
      mpq_class q(p1, q1);
      q.canonicalize();
      return q;
    }
    double frac = v - fl;
    if (frac < 1e-15) break;
    v = 1.0 / frac;
  }
  if (q1 != 0) {
    double approx = static_cast<double>(p1) / static_cast<double>(q1);
    if (std::abs(approx - x) <= tol * std::max(1.0, std::abs(x))) {
      mpq_class q(p1, q1);
      q.canonicalize();
      return q;
    }
  }
  return std::nullopt;
}

inline void divisors_up_to(const mpz_class& v, long cap, std::vector<mpz_class>* out) {
  mpz_class a = abs(v);
  if (a == 0) return;
  for (mpz_class d = 1; d * d <= a; ++d) {
    if (static_cast<long>(out->size()) > cap) return;
    if (a % d == 0) {
      out->push_back(d);
      out->push_back(a / d);
    }
  }
}

}  // namespace detail

// Verified Gaussian-rational eigenvalues of an exact matrix. Sound but not
// complete: elements whose spectrum leaves Q(i) simply contribute fewer (or
// zero) roots. Candidates come from divisor bounds on the integer-scaled
// characteristic polynomial, the matrix diagonal, and rationalized numeric
// eigenvalues; each is accepted only if p(candidate) = 0 exactly.
struct ExactSpectrum {
  std::vector<GaussianRational> roots;  // distinct, canonical order
  bool complete = false;                // true iff multiplicities sum to n
};

inline ExactSpectrum exact_eigenvalues(const Matrix<GaussianRational>& m) {
  int n = m.n();
  Poly<GaussianRational> p = char_poly(m);
  std::set<std::pair<std::string, std::string>> seen;  // dedupe candidates
  std::vector<GaussianRational> candidates;
  auto add_candidate = [&](const GaussianRational& c) {
    auto key = std::make_pair(c.real().get_str(), c.imag().get_str());
    if (seen.insert(key).second) candidates.push_back(c);
  };

  add_candidate(GaussianRational(0));
  for (int i = 0; i < n; ++i) add_candidate(m(i, i));

  // Divisor-bound rational root search when the polynomial is real.
  bool real_poly = true;
  for (const auto& c : p.coeffs())
    if (!c.is_real()) real_poly = false;
  if (real_poly) {
    mpz_class den_lcm = 1;
    for (const auto& c : p.coeffs()) den_lcm = lcm(den_lcm, c.real().get_den());
    std::vector<mpz_class> ints;
    for (const auto& c : p.coeffs()) {
      mpq_class q = c.real() * mpq_class(den_lcm);
      ints.push_back(q.get_num());
    }
    if (!ints.empty() && ints.front() != 0 && abs(ints.front()) < mpz_class("1000000000000")) {
      std::vector<mpz_class> ps, qs;
      detail::divisors_up_to(ints.front(), 256, &ps);
      detail::divisors_up_to(ints.back(), 256, &qs);
      for (const auto& a : ps)
        for (const auto& b : qs) {
          mpq_class r(a, b);
          r.canonicalize();
          add_candidate(GaussianRational(r, mpq_class(0)));
          add_candidate(GaussianRational(-r, mpq_class(0)));
        }
    }
  }

  // Numeric suggestions, rationalized then verified.
  for (const auto& ev : numeric_eigenvalues(to_cplx(m))) {
    auto re = detail::rationalize(ev.real());
    auto im = detail::rationalize(ev.imag());
    if (re && im) add_candidate(GaussianRational(*re, *im));
  }

  ExactSpectrum out;
  Poly<GaussianRational> q = p;
  for (const auto& c : candidates) {
    if (!p.eval(c).is_zero()) continue;
    out.roots.push_back(c);
    // Strip the root (with multiplicity) to decide completeness.
    while (true) {
      auto [quot, rem] = Poly<GaussianRational>::divmod(q, Poly<GaussianRational>::linear_root(c));
      if (!rem.is_zero()) break;
      q = quot;
      if (q.eval(c).is_zero()) continue;
      break;
    }
  }
  std::sort(out.roots.begin(), out.roots.end());
  out.complete = q.degree() <= 0;
  return out;
}

// Backend-uniform distinct-eigenvalue lookup. Numeric mode clusters values
// within tolerance and reports an ambiguity when clusters are closer than
// the separation the clustering assumed.
template <class S>
struct Spectrum {
  std::vector<S> distinct;
  bool complete = false;
};

inline Spectrum<GaussianRational> spectrum_of(const Matrix<GaussianRational>& m,
                                              const Tolerance&) {
  auto ex = exact_eigenvalues(m);
  return {ex.roots, ex.complete};
}

template <class S>
S scalar_pow(S base, int e) {
  S acc = ScalarTraits<S>::one();
  for (int k = 0; k < e; ++k) acc *= base;
  return acc;
}

// Idempotent onto the generalized eigenspace of a nonzero eigenvalue, built
// as a constant-term-free polynomial in the matrix, so it lies in the
// non-unital algebra the matrix generates. Requires the complete list of the
// other distinct nonzero eigenvalues. The two steps: a product of factors
// (A^2 - mu A)^n that kills every foreign block and acts as lambda' times a
// unit-diagonal triangular map on the lambda blocks, then an alternating
// telescoping sum of its powers that peels off the nilpotent part.
template <class S>
Matrix<S> spectral_idempotent_from_eigs(const Matrix<S>& a, const std::vector<S>& other_nonzero,
                                        bool has_zero_eig, const S& lambda) {
  int n = a.n();
  Matrix<S> m;
  S lam_prime;
  if (other_nonzero.empty()) {
    if (has_zero_eig) {
      m = a;
      for (int k = 1; k < n; ++k) m = m * a;  // A^n
      lam_prime = scalar_pow(lambda, n);
    } else {
      m = a;
      lam_prime = lambda;
    }
  } else {
    m = Matrix<S>::identity(n);
    lam_prime = ScalarTraits<S>::one();
    for (const auto& mu : other_nonzero) {
      Matrix<S> factor = a * a - mu * a;
      Matrix<S> fp = Matrix<S>::identity(n);
      for (int k = 0; k < n; ++k) fp = fp * factor;
      m = m * fp;
      lam_prime *= scalar_pow(lambda * (lambda - mu), n);
    }
  }
  Matrix<S> big_n = (ScalarTraits<S>::one() / lam_prime) * m;
  // P = sum_{j=1..n} (-1)^{j-1} C_j with C_1 = N, C_{j+1} = N C_j - C_j.
  Matrix<S> c = big_n;
  Matrix<S> p = c;
  bool minus = true;
  for (int j = 2; j <= n; ++j) {
    c = big_n * c - c;
    p = minus ? p - c : p + c;
    minus = !minus;
  }
  return p;
}

inline Spectrum<Cplx> spectrum_of(const Matrix<Cplx>& m, const Tolerance& tol) {
  auto evs = numeric_eigenvalues(m);
  std::vector<Cplx> distinct;
  std::vector<int> count;
  double cluster = std::max(tol.rank_threshold, 1e2 * tol.eps_abs);
  for (const auto& ev : evs) {
    bool merged = false;
    for (size_t k = 0; k < distinct.size(); ++k) {
      if (std::abs(ev - distinct[k]) <= cluster) {
        distinct[k] = (distinct[k] * static_cast<double>(count[k]) + ev) /
                      static_cast<double>(count[k] + 1);
        ++count[k];
        merged = true;
        break;
      }
    }
    if (!merged) {
      distinct.push_back(ev);
      count.push_back(1);
    }
  }
  for (size_t a = 0; a < distinct.size(); ++a)
    for (size_t b = a + 1; b < distinct.size(); ++b)
      if (std::abs(distinct[a] - distinct[b]) < 10 * cluster)
        throw AmbiguityError(
            "eigenvalue clusters closer than tolerance; rerun with the exact backend");
  return {distinct, true};
}

}  // namespace opalg
