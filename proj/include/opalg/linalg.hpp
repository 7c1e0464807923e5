#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "opalg/scalar.hpp"

namespace opalg {

template <class S>
using Vector = std::vector<S>;

template <class S>
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols)
      : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, ScalarTraits<S>::zero()) {}

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = ScalarTraits<S>::one();
    return m;
  }
  static Matrix zero(int n) { return Matrix(n, n); }
  // E_{ij}: 1 in entry (i,j), zeros elsewhere (0-based).
  static Matrix unit(int n, int i, int j) {
    Matrix m(n, n);
    m(i, j) = ScalarTraits<S>::one();
    return m;
  }
  static Matrix diag(const Vector<S>& d) {
    Matrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
    for (size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }
  static Matrix from_columns(const std::vector<Vector<S>>& cols) {
    if (cols.empty()) return Matrix(0, 0);
    Matrix m(static_cast<int>(cols[0].size()), static_cast<int>(cols.size()));
    for (int j = 0; j < m.cols(); ++j) {
      if (static_cast<int>(cols[j].size()) != m.rows()) throw DimensionError("ragged columns");
      for (int i = 0; i < m.rows(); ++i) m(i, j) = cols[j][i];
    }
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }
  int n() const {
    if (!square()) throw DimensionError("matrix not square");
    return rows_;
  }

  S& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  const S& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

  Vector<S> row(int i) const {
    Vector<S> r(cols_);
    for (int j = 0; j < cols_; ++j) r[j] = (*this)(i, j);
    return r;
  }
  Vector<S> col(int j) const {
    Vector<S> c(rows_);
    for (int i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  // Row-major flattening; the canonical vectorization used by matrix spans.
  Vector<S> vectorize() const { return a_; }
  static Matrix from_vectorized(const Vector<S>& v, int n) {
    if (static_cast<int>(v.size()) != n * n) throw DimensionError("bad vectorized length");
    Matrix m(n, n);
    m.a_ = v;
    return m;
  }

  Matrix adjoint() const {
    Matrix m(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) m(j, i) = ScalarTraits<S>::conj((*this)(i, j));
    return m;
  }
  Matrix transpose() const {
    Matrix m(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
  }

  friend Matrix operator+(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DimensionError("matrix add shape");
    Matrix c = a;
    for (size_t k = 0; k < c.a_.size(); ++k) c.a_[k] += b.a_[k];
    return c;
  }
  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DimensionError("matrix sub shape");
    Matrix c = a;
    for (size_t k = 0; k < c.a_.size(); ++k) c.a_[k] -= b.a_[k];
    return c;
  }
  friend Matrix operator*(const S& s, const Matrix& a) {
    Matrix c = a;
    for (auto& x : c.a_) x *= s;
    return c;
  }
  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw DimensionError("matrix mul shape");
    Matrix c(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        const S& aik = a(i, k);
        if (ScalarTraits<S>::exact && ScalarTraits<S>::is_zero(aik, Tolerance{})) continue;
        for (int j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }
  friend Vector<S> operator*(const Matrix& a, const Vector<S>& v) {
    if (a.cols_ != static_cast<int>(v.size())) throw DimensionError("matrix-vector shape");
    Vector<S> w(a.rows_, ScalarTraits<S>::zero());
    for (int i = 0; i < a.rows_; ++i)
      for (int j = 0; j < a.cols_; ++j) w[i] += a(i, j) * v[j];
    return w;
  }

  S trace() const {
    S t = ScalarTraits<S>::zero();
    for (int i = 0; i < n(); ++i) t += (*this)(i, i);
    return t;
  }

  bool is_zero(const Tolerance& tol = {}) const {
    for (const auto& x : a_)
      if (!ScalarTraits<S>::is_zero(x, tol)) return false;
    return true;
  }

  double max_abs() const {
    double m = 0;
    for (const auto& x : a_) m = std::max(m, ScalarTraits<S>::approx_abs(x));
    return m;
  }

 private:
  int rows_ = 0, cols_ = 0;
  Vector<S> a_;
};

template <class S>
bool approx_equal(const Matrix<S>& a, const Matrix<S>& b, const Tolerance& tol = {}) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (!ScalarTraits<S>::eq(a(i, j), b(i, j), tol)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Vector helpers. A metric is a list of positive real weights g making
// <u,v> = sum_k u_k conj(v_k) g_k; empty means the standard inner product.
// Metrics arise only from exact-mode compressions onto orthogonal,
// non-normalized bases.
// ---------------------------------------------------------------------------

template <class S>
using Metric = std::vector<typename ScalarTraits<S>::Real>;

template <class S>
Vector<S> zero_vector(int n) {
  return Vector<S>(n, ScalarTraits<S>::zero());
}

template <class S>
Vector<S> basis_vector(int n, int i) {
  Vector<S> v(n, ScalarTraits<S>::zero());
  v[i] = ScalarTraits<S>::one();
  return v;
}

template <class S>
S inner(const Vector<S>& u, const Vector<S>& v, const Metric<S>& g = {}) {
  if (u.size() != v.size()) throw DimensionError("inner product shape");
  if (!g.empty() && g.size() != u.size()) throw DimensionError("metric shape");
  S acc = ScalarTraits<S>::zero();
  for (size_t k = 0; k < u.size(); ++k) {
    S term = u[k] * ScalarTraits<S>::conj(v[k]);
    if (!g.empty()) term *= ScalarTraits<S>::from_real(g[k]);
    acc += term;
  }
  return acc;
}

template <class S>
typename ScalarTraits<S>::Real norm_sq(const Vector<S>& u, const Metric<S>& g = {}) {
  return ScalarTraits<S>::re(inner(u, u, g));
}

template <class S>
bool vec_is_zero(const Vector<S>& v, const Tolerance& tol = {}) {
  for (const auto& x : v)
    if (!ScalarTraits<S>::is_zero(x, tol)) return false;
  return true;
}

template <class S>
Vector<S> vec_add(Vector<S> a, const Vector<S>& b) {
  if (a.size() != b.size()) throw DimensionError("vector add shape");
  for (size_t k = 0; k < a.size(); ++k) a[k] += b[k];
  return a;
}

template <class S>
Vector<S> vec_sub(Vector<S> a, const Vector<S>& b) {
  if (a.size() != b.size()) throw DimensionError("vector sub shape");
  for (size_t k = 0; k < a.size(); ++k) a[k] -= b[k];
  return a;
}

template <class S>
Vector<S> vec_scale(Vector<S> a, const S& c) {
  for (auto& x : a) x *= c;
  return a;
}

template <class S>
bool vec_less(const Vector<S>& a, const Vector<S>& b) {
  for (size_t k = 0; k < std::min(a.size(), b.size()); ++k) {
    if (a[k] != b[k]) return scalar_less(a[k], b[k]);
  }
  return a.size() < b.size();
}

// ---------------------------------------------------------------------------
// Incremental reduced row echelon form. Exact mode keeps the unique RREF of
// the row space; numeric mode pivots on the largest entry above
// rank_threshold after normalizing inserted vectors to unit max-norm.
// ---------------------------------------------------------------------------

template <class S>
class Echelon {
 public:
  explicit Echelon(int cols, Tolerance tol = {}) : cols_(cols), tol_(tol) {}

  int cols() const { return cols_; }
  int dim() const { return static_cast<int>(rows_.size()); }
  const std::vector<Vector<S>>& rows() const { return rows_; }
  const std::vector<int>& pivots() const { return pivots_; }

  // Eliminates v against the stored rows and returns the residual.
  Vector<S> reduce(Vector<S> v) const {
    for (size_t r = 0; r < rows_.size(); ++r) {
      const S& c = v[pivots_[r]];
      if (ScalarTraits<S>::is_zero(c, tol_)) continue;
      S f = c;  // pivot entries are exactly 1
      for (int j = 0; j < cols_; ++j) v[j] -= f * rows_[r][j];
    }
    return v;
  }

  // Adds v to the span. Returns true if the rank grew.
  bool insert(Vector<S> v) {
    if (static_cast<int>(v.size()) != cols_) throw DimensionError("echelon insert shape");
    if constexpr (!ScalarTraits<S>::exact) {
      double m = 0;
      for (const auto& x : v) m = std::max(m, ScalarTraits<S>::approx_abs(x));
      if (m <= tol_.rank_threshold) return false;
      S inv = ScalarTraits<S>::from_real(1.0 / m);
      for (auto& x : v) x *= inv;
    }
    v = reduce(std::move(v));
    int p = pick_pivot(v);
    if (p < 0) return false;
    S inv = ScalarTraits<S>::one() / v[p];
    for (auto& x : v) x *= inv;
    v[p] = ScalarTraits<S>::one();
    // Back-eliminate the new pivot column from existing rows.
    for (size_t r = 0; r < rows_.size(); ++r) {
      const S c = rows_[r][p];
      if (ScalarTraits<S>::is_zero(c, tol_)) continue;
      for (int j = 0; j < cols_; ++j) rows_[r][j] -= c * v[j];
      rows_[r][p] = ScalarTraits<S>::zero();
    }
    auto it = std::upper_bound(pivots_.begin(), pivots_.end(), p);
    size_t pos = static_cast<size_t>(it - pivots_.begin());
    pivots_.insert(it, p);
    rows_.insert(rows_.begin() + pos, std::move(v));
    return true;
  }

  bool contains(const Vector<S>& v) const {
    Vector<S> r = reduce(v);
    if constexpr (ScalarTraits<S>::exact) {
      return vec_is_zero(r, tol_);
    } else {
      double mv = 0, mr = 0;
      for (const auto& x : v) mv = std::max(mv, ScalarTraits<S>::approx_abs(x));
      for (const auto& x : r) mr = std::max(mr, ScalarTraits<S>::approx_abs(x));
      return mr <= tol_.rank_threshold * std::max(1.0, mv);
    }
  }

  const Tolerance& tol() const { return tol_; }

 private:
  int pick_pivot(const Vector<S>& v) const {
    if constexpr (ScalarTraits<S>::exact) {
      for (int j = 0; j < cols_; ++j)
        if (!ScalarTraits<S>::is_zero(v[j], tol_)) return j;
      return -1;
    } else {
      int best = -1;
      double bm = tol_.rank_threshold;
      for (int j = 0; j < cols_; ++j) {
        double m = ScalarTraits<S>::approx_abs(v[j]);
        if (m > bm) {
          bm = m;
          best = j;
        }
      }
      return best;
    }
  }

  int cols_;
  Tolerance tol_;
  std::vector<Vector<S>> rows_;    // reduced, pivot entries 1, ascending pivots
  std::vector<int> pivots_;
};

// Rank of an arbitrary list of vectors.
template <class S>
int rank_of(const std::vector<Vector<S>>& vecs, int cols, const Tolerance& tol = {}) {
  Echelon<S> e(cols, tol);
  for (const auto& v : vecs) e.insert(v);
  return e.dim();
}

// ---------------------------------------------------------------------------
// Dense solves.
// ---------------------------------------------------------------------------

// Null space of an arbitrary rectangular matrix, as canonical basis vectors.
template <class S>
std::vector<Vector<S>> kernel_basis(const Matrix<S>& m, const Tolerance& tol = {}) {
  // Row-reduce m, then read the free-column solutions.
  Echelon<S> e(m.cols(), tol);
  for (int i = 0; i < m.rows(); ++i) e.insert(m.row(i));
  std::vector<bool> is_pivot(m.cols(), false);
  for (int p : e.pivots()) is_pivot[p] = true;
  std::vector<Vector<S>> out;
  for (int j = 0; j < m.cols(); ++j) {
    if (is_pivot[j]) continue;
    Vector<S> v = zero_vector<S>(m.cols());
    v[j] = ScalarTraits<S>::one();
    for (int r = 0; r < e.dim(); ++r) v[e.pivots()[r]] = -e.rows()[r][j];
    out.push_back(std::move(v));
  }
  return out;
}

// Solves A x = b; returns nullopt when inconsistent. Numeric mode uses
// partial pivoting with the rank threshold.
template <class S>
std::optional<Vector<S>> solve(const Matrix<S>& a, const Vector<S>& b, const Tolerance& tol = {}) {
  if (a.rows() != static_cast<int>(b.size())) throw DimensionError("solve shape");
  int nr = a.rows(), nc = a.cols();
  Matrix<S> m(nr, nc + 1);
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < nc; ++j) m(i, j) = a(i, j);
    m(i, nc) = b[i];
  }
  std::vector<int> pivot_col;
  int row = 0;
  for (int j = 0; j < nc && row < nr; ++j) {
    int sel = -1;
    double best = ScalarTraits<S>::exact ? 0.0 : tol.rank_threshold;
    for (int i = row; i < nr; ++i) {
      double mag = ScalarTraits<S>::approx_abs(m(i, j));
      if constexpr (ScalarTraits<S>::exact) {
        if (!ScalarTraits<S>::is_zero(m(i, j), tol)) {
          sel = i;
          break;
        }
      } else if (mag > best) {
        best = mag;
        sel = i;
      }
    }
    if (sel < 0) continue;
    for (int k = 0; k <= nc; ++k) std::swap(m(row, k), m(sel, k));
    S inv = ScalarTraits<S>::one() / m(row, j);
    for (int k = 0; k <= nc; ++k) m(row, k) *= inv;
    for (int i = 0; i < nr; ++i) {
      if (i == row) continue;
      S c = m(i, j);
      if (ScalarTraits<S>::is_zero(c, tol)) continue;
      for (int k = 0; k <= nc; ++k) m(i, k) -= c * m(row, k);
    }
    pivot_col.push_back(j);
    ++row;
  }
  // Consistency: no pivot in the augmented column.
  for (int i = row; i < nr; ++i) {
    if constexpr (ScalarTraits<S>::exact) {
      if (!ScalarTraits<S>::is_zero(m(i, nc), tol)) return std::nullopt;
    } else {
      double scale = 0;
      for (int k = 0; k < (int)b.size(); ++k)
        scale = std::max(scale, ScalarTraits<S>::approx_abs(b[k]));
      if (ScalarTraits<S>::approx_abs(m(i, nc)) > tol.rank_threshold * std::max(1.0, scale))
        return std::nullopt;
    }
  }
  Vector<S> x = zero_vector<S>(nc);
  for (size_t r = 0; r < pivot_col.size(); ++r) x[pivot_col[r]] = m(static_cast<int>(r), nc);
  return x;
}

// Expresses target as a combination of the given vectors; returns the
// coefficients when possible.
template <class S>
std::optional<Vector<S>> express(const std::vector<Vector<S>>& vecs, const Vector<S>& target,
                                 const Tolerance& tol = {}) {
  if (vecs.empty()) return vec_is_zero(target, tol) ? std::optional<Vector<S>>(Vector<S>{})
                                                    : std::nullopt;
  return solve(Matrix<S>::from_columns(vecs), target, tol);
}

template <class S>
std::optional<Matrix<S>> try_inverse(const Matrix<S>& a, const Tolerance& tol = {}) {
  int n = a.n();
  Matrix<S> m(n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = a(i, j);
    m(i, n + i) = ScalarTraits<S>::one();
  }
  for (int j = 0; j < n; ++j) {
    int sel = -1;
    double best = ScalarTraits<S>::exact ? 0.0 : tol.rank_threshold;
    for (int i = j; i < n; ++i) {
      if constexpr (ScalarTraits<S>::exact) {
        if (!ScalarTraits<S>::is_zero(m(i, j), tol)) {
          sel = i;
          break;
        }
      } else {
        double mag = ScalarTraits<S>::approx_abs(m(i, j));
        if (mag > best) {
          best = mag;
          sel = i;
        }
      }
    }
    if (sel < 0) return std::nullopt;
    for (int k = 0; k < 2 * n; ++k) std::swap(m(j, k), m(sel, k));
    S inv = ScalarTraits<S>::one() / m(j, j);
    for (int k = 0; k < 2 * n; ++k) m(j, k) *= inv;
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      S c = m(i, j);
      if (ScalarTraits<S>::is_zero(c, tol)) continue;
      for (int k = 0; k < 2 * n; ++k) m(i, k) -= c * m(j, k);
    }
  }
  Matrix<S> r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = m(i, n + j);
  return r;
}

template <class S>
Matrix<S> inverse(const Matrix<S>& a, const Tolerance& tol = {}) {
  auto r = try_inverse(a, tol);
  if (!r) throw RankError("singular matrix");
  return *r;
}

// ---------------------------------------------------------------------------
// Gram-Schmidt. Exact mode keeps orthogonal, unnormalized vectors with their
// squared norms (normalization would leave the rational field); numeric mode
// returns orthonormal vectors.
// ---------------------------------------------------------------------------

template <class S>
struct GramSchmidtResult {
  std::vector<Vector<S>> vecs;
  std::vector<typename ScalarTraits<S>::Real> sq_norms;  // all 1 in numeric mode
};

template <class S>
GramSchmidtResult<S> gram_schmidt(const std::vector<Vector<S>>& input, const Metric<S>& g = {},
                                  const Tolerance& tol = {}) {
  GramSchmidtResult<S> out;
  for (const auto& v : input) {
    Vector<S> u = v;
    for (size_t j = 0; j < out.vecs.size(); ++j) {
      S c = inner(u, out.vecs[j], g) / ScalarTraits<S>::from_real(out.sq_norms[j]);
      u = vec_sub(std::move(u), vec_scale(out.vecs[j], c));
    }
    if constexpr (!ScalarTraits<S>::exact) {
      // One re-orthogonalization pass for numerical health.
      for (size_t j = 0; j < out.vecs.size(); ++j) {
        S c = inner(u, out.vecs[j], g);
        u = vec_sub(std::move(u), vec_scale(out.vecs[j], c));
      }
    }
    auto ns = norm_sq(u, g);
    if constexpr (ScalarTraits<S>::exact) {
      if (ns == 0) throw RankError("gram_schmidt: dependent input");
      out.vecs.push_back(std::move(u));
      out.sq_norms.push_back(ns);
    } else {
      double nrm = std::sqrt(ScalarTraits<S>::real_to_double(ns));
      if (nrm <= tol.rank_threshold) throw RankError("gram_schmidt: dependent input");
      S inv = ScalarTraits<S>::from_real(1.0 / nrm);
      for (auto& x : u) x *= inv;
      out.vecs.push_back(std::move(u));
      out.sq_norms.push_back(1.0);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Subspace of C^n in canonical reduced-echelon basis form.
// ---------------------------------------------------------------------------

template <class S>
class Subspace {
 public:
  explicit Subspace(int ambient_dim = 0, Tolerance tol = {})
      : ambient_(ambient_dim), ech_(ambient_dim, tol) {}

  static Subspace span(int ambient_dim, const std::vector<Vector<S>>& vectors,
                       const Tolerance& tol = {}) {
    Subspace s(ambient_dim, tol);
    for (const auto& v : vectors) {
      if (static_cast<int>(v.size()) != ambient_dim)
        throw DimensionError("subspace vector dimension mismatch");
      s.ech_.insert(v);
    }
    return s;
  }

  static Subspace full(int ambient_dim, const Tolerance& tol = {}) {
    std::vector<Vector<S>> b;
    for (int i = 0; i < ambient_dim; ++i) b.push_back(basis_vector<S>(ambient_dim, i));
    return span(ambient_dim, b, tol);
  }

  int ambient() const { return ambient_; }
  int dim() const { return ech_.dim(); }
  bool is_zero() const { return dim() == 0; }
  bool is_full() const { return dim() == ambient_; }
  const std::vector<Vector<S>>& basis() const { return ech_.rows(); }
  const Tolerance& tol() const { return ech_.tol(); }

  bool contains(const Vector<S>& v) const { return ech_.contains(v); }
  bool contains(const Subspace& other) const {
    for (const auto& v : other.basis())
      if (!contains(v)) return false;
    return true;
  }
  bool equals(const Subspace& other) const {
    if (ambient_ != other.ambient_ || dim() != other.dim()) return false;
    if constexpr (ScalarTraits<S>::exact) {
      // Canonical form makes equality literal.
      for (int r = 0; r < dim(); ++r)
        if (basis()[r] != other.basis()[r]) return false;
      return true;
    } else {
      return contains(other) && other.contains(*this);
    }
  }

  friend Subspace operator+(const Subspace& a, const Subspace& b) {
    if (a.ambient_ != b.ambient_) throw DimensionError("subspace sum ambient mismatch");
    Subspace s = a;
    for (const auto& v : b.basis()) s.ech_.insert(v);
    return s;
  }

  Subspace intersect(const Subspace& other) const {
    if (ambient_ != other.ambient_) throw DimensionError("subspace intersect ambient mismatch");
    // x = U^T a = V^T b; solve over stacked coefficients.
    int p = dim(), q = other.dim();
    if (p == 0 || q == 0) return Subspace(ambient_, tol());
    Matrix<S> m(ambient_, p + q);
    for (int j = 0; j < p; ++j)
      for (int i = 0; i < ambient_; ++i) m(i, j) = basis()[j][i];
    for (int j = 0; j < q; ++j)
      for (int i = 0; i < ambient_; ++i) m(i, p + j) = -other.basis()[j][i];
    auto ker = kernel_basis(m, tol());
    std::vector<Vector<S>> gens;
    for (const auto& k : ker) {
      Vector<S> x = zero_vector<S>(ambient_);
      for (int j = 0; j < p; ++j) x = vec_add(std::move(x), vec_scale(basis()[j], k[j]));
      gens.push_back(std::move(x));
    }
    return span(ambient_, gens, tol());
  }

  // Orthogonal complement, optionally with a diagonal metric.
  Subspace orth_complement(const Metric<S>& g = {}) const {
    Matrix<S> m(dim(), ambient_);
    for (int r = 0; r < dim(); ++r)
      for (int j = 0; j < ambient_; ++j) {
        S c = ScalarTraits<S>::conj(basis()[r][j]);
        if (!g.empty()) c *= ScalarTraits<S>::from_real(g[j]);
        m(r, j) = c;
      }
    return span(ambient_, kernel_basis(m, tol()), tol());
  }

  Subspace orth_difference(const Subspace& sub, const Metric<S>& g = {}) const {
    if (!contains(sub)) throw ContainmentError("orth_difference: subspace not contained");
    return intersect(sub.orth_complement(g));
  }

 private:
  int ambient_;
  Echelon<S> ech_;
};

// Orthogonal projection matrix onto E (self-adjoint for the given metric).
template <class S>
Matrix<S> orth_projection(const Subspace<S>& e, const Metric<S>& g = {}) {
  int n = e.ambient();
  Matrix<S> p(n, n);
  if (e.dim() == 0) return p;
  auto gs = gram_schmidt(e.basis(), g, e.tol());
  for (size_t t = 0; t < gs.vecs.size(); ++t) {
    const auto& u = gs.vecs[t];
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        S c = u[a] * ScalarTraits<S>::conj(u[b]) / ScalarTraits<S>::from_real(gs.sq_norms[t]);
        if (!g.empty()) c *= ScalarTraits<S>::from_real(g[b]);
        p(a, b) += c;
      }
  }
  return p;
}

// Null space of a square matrix as a canonical subspace.
template <class S>
Subspace<S> kernel(const Matrix<S>& a, const Tolerance& tol = {}) {
  return Subspace<S>::span(a.cols(), kernel_basis(a, tol), tol);
}

// Adjoint with respect to a diagonal metric: G^{-1} M^H G.
template <class S>
Matrix<S> metric_adjoint(const Matrix<S>& m, const Metric<S>& g = {}) {
  if (g.empty()) return m.adjoint();
  int n = m.n();
  Matrix<S> r = m.adjoint();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      r(i, j) = r(i, j) * ScalarTraits<S>::from_real(g[j]) / ScalarTraits<S>::from_real(g[i]);
  return r;
}

// Matrix of the operator in the given (ordered) basis: V^{-1} M V.
template <class S>
Matrix<S> matrix_in_basis(const Matrix<S>& m, const std::vector<Vector<S>>& basis,
                          const Tolerance& tol = {}) {
  Matrix<S> v = Matrix<S>::from_columns(basis);
  return inverse(v, tol) * m * v;
}

}  // namespace opalg
