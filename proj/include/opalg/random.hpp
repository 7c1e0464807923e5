#pragma once

#include <cstdint>
#include <random>

#include "opalg/linalg.hpp"

namespace opalg {

// Deterministic source for seeded fixtures. Distribution logic is written
// out by hand; std:: distributions vary across standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : g_(seed ^ 0x9e3779b97f4a7c15ull) {}

  uint64_t next() { return g_(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next() % static_cast<uint64_t>(hi - lo + 1));
  }
  bool coin(double p = 0.5) { return uniform01() < p; }
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  mpq_class rational(int num_max, int den_max) {
    mpq_class q(uniform_int(-num_max, num_max), uniform_int(1, den_max));
    q.canonicalize();
    return q;
  }
  GaussianRational gaussian_rational(int num_max = 3, int den_max = 3) {
    return {rational(num_max, den_max), rational(num_max, den_max)};
  }
  Cplx complex_box() { return {uniform(-1.0, 1.0), uniform(-1.0, 1.0)}; }

 private:
  std::mt19937_64 g_;
};

template <class S>
S random_scalar(Rng& rng) {
  if constexpr (ScalarTraits<S>::exact) {
    return rng.gaussian_rational();
  } else {
    return rng.complex_box();
  }
}

template <class S>
Vector<S> random_vector(Rng& rng, int n) {
  Vector<S> v(n);
  for (auto& x : v) x = random_scalar<S>(rng);
  return v;
}

template <class S>
Matrix<S> random_matrix(Rng& rng, int n, double density = 1.0) {
  Matrix<S> m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (density >= 1.0 || rng.coin(density)) m(i, j) = random_scalar<S>(rng);
  return m;
}

// Random basis of C^n (rejection on rank).
template <class S>
std::vector<Vector<S>> random_basis(Rng& rng, int n, const Tolerance& tol = {}) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::vector<Vector<S>> v;
    for (int i = 0; i < n; ++i) v.push_back(random_vector<S>(rng, n));
    if (rank_of(v, n, tol) == n) {
      if constexpr (!ScalarTraits<S>::exact) {
        // Reject badly conditioned bases; structured tests plant their own
        // orthogonality, they do not need near-degenerate frames.
        auto inv = try_inverse(Matrix<S>::from_columns(v), tol);
        if (!inv || inv->max_abs() > 1e3) continue;
      }
      return v;
    }
  }
  throw Error("random_basis: repeated rank failure");
}

template <class S>
Matrix<S> random_invertible(Rng& rng, int n, const Tolerance& tol = {}) {
  return Matrix<S>::from_columns(random_basis<S>(rng, n, tol));
}

}  // namespace opalg
