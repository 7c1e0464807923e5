#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "opalg/invariant.hpp"

namespace opalg {

// Ordered basis of C^n split into consecutive blocks. normalized means each
// block is orthogonal with recorded per-vector scaling absorbed (numeric:
// orthonormal); cross-block angles are unconstrained.
template <class S>
struct BlockOrderedBasis {
  std::vector<Vector<S>> vectors;
  std::vector<int> block_sizes;
  bool normalized = false;

  int n() const { return static_cast<int>(vectors.size()); }
  int blocks() const { return static_cast<int>(block_sizes.size()); }
  int block_start(int j) const {
    int s = 0;
    for (int t = 0; t < j; ++t) s += block_sizes[t];
    return s;
  }
  int block_of(int index) const {
    int s = 0;
    for (int j = 0; j < blocks(); ++j) {
      s += block_sizes[j];
      if (index < s) return j;
    }
    throw DimensionError("block index out of range");
  }
  void validate() const {
    int total = 0;
    for (int sz : block_sizes) {
      if (sz <= 0) throw PreconditionError("block sizes must be positive");
      total += sz;
    }
    if (total != n()) throw PreconditionError("block sizes must sum to the dimension");
  }
};

template <class S>
struct JordanesqueCheck {
  Matrix<S> matrix;  // the operator in the given basis
  bool ok = false;
  std::optional<std::pair<int, int>> violation;  // first offending coordinate
};

// Block diagonal, upper triangular within blocks, constant on each block's
// main diagonal.
template <class S>
JordanesqueCheck<S> jordanesque_check(const Matrix<S>& op, const BlockOrderedBasis<S>& b,
                                      const Tolerance& tol = {}) {
  b.validate();
  JordanesqueCheck<S> out;
  out.matrix = matrix_in_basis(op, b.vectors, tol);
  int n = b.n();
  for (int i = 0; i < n && !out.violation; ++i) {
    int bi = b.block_of(i);
    for (int j = 0; j < n; ++j) {
      int bj = b.block_of(j);
      bool must_vanish = (bi != bj) || (i > j);
      if (must_vanish && !ScalarTraits<S>::is_zero(out.matrix(i, j), tol)) {
        out.violation = {i, j};
        break;
      }
      if (i == j) {
        int first = b.block_start(bi);
        if (!ScalarTraits<S>::eq(out.matrix(i, i), out.matrix(first, first), tol)) {
          out.violation = {i, j};
          break;
        }
      }
    }
  }
  out.ok = !out.violation;
  return out;
}

// Eigenvalue per block, read off the checked matrix.
template <class S>
std::vector<S> block_eigenvalues(const Matrix<S>& matrix_in_b, const BlockOrderedBasis<S>& b) {
  std::vector<S> out;
  for (int j = 0; j < b.blocks(); ++j) {
    int s = b.block_start(j);
    out.push_back(matrix_in_b(s, s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Simultaneous upper triangularization.
// ---------------------------------------------------------------------------

template <class S>
struct TriangularizationResult {
  enum Kind { Basis, Obstruction, Unknown } kind = Unknown;
  std::vector<Vector<S>> basis;            // ordered, orthogonal (numeric: orthonormal)
  std::optional<SemiInvariantSpec<S>> obstruction;  // full subquotient of dim >= 2
};

namespace detail {

// Lifts a subspace given in carrier coordinates back to ambient vectors.
template <class S>
Subspace<S> lift_through_carrier(const Subspace<S>& local,
                                 const std::vector<Vector<S>>& carrier, int ambient,
                                 const Tolerance& tol) {
  std::vector<Vector<S>> out;
  for (const auto& x : local.basis()) {
    Vector<S> v = zero_vector<S>(ambient);
    for (size_t j = 0; j < carrier.size(); ++j) v = vec_add(std::move(v), vec_scale(carrier[j], x[j]));
    out.push_back(std::move(v));
  }
  return Subspace<S>::span(ambient, out, tol);
}

template <class S>
bool triangularize_node(const OperatorAlgebra<S>& a, const Subspace<S>& e1, const Subspace<S>& e2,
                        const std::vector<Subspace<S>>& hints, uint64_t seed, int budget,
                        TriangularizationResult<S>* out) {
  Subspace<S> s = e1.orth_difference(e2, a.metric);
  int m = s.dim();
  if (m == 0) return true;
  auto comp = compress_to(a, s);
  if (m == 1) {
    out->basis.push_back(comp.carrier[0]);
    return true;
  }
  if (comp.alg.dim() == m * m) {
    out->kind = TriangularizationResult<S>::Obstruction;
    out->obstruction = SemiInvariantSpec<S>{e1, e2, s};
    return false;
  }

  // Invariant subspaces of the compression: known lattice members first,
  // then the randomized search. Smallest dimension wins, canonical order
  // breaks ties.
  std::vector<Subspace<S>> candidates;
  for (const auto& l : hints) {
    Subspace<S> f = ((l.intersect(e1)) + e2).orth_difference(e2, a.metric);
    if (f.dim() > 0 && f.dim() < m && s.contains(f)) candidates.push_back(f);
  }
  std::sort(candidates.begin(), candidates.end(), subspace_order<S>);
  Subspace<S> f_amb(a.n(), a.tol());
  if (!candidates.empty()) {
    f_amb = candidates.front();
  } else {
    auto res = find_nontrivial_invariant_subspace(comp.alg, seed, budget);
    if (res.kind == InvariantSearchResult<S>::Unknown) {
      out->kind = TriangularizationResult<S>::Unknown;
      return false;
    }
    if (res.kind == InvariantSearchResult<S>::NoneExists) {
      // dim < m^2 with no invariant subspace cannot happen (Burnside);
      // reaching this indicates an upstream inconsistency.
      throw Error("triangularize: contradictory search certificate");
    }
    f_amb = lift_through_carrier(res.subspace, comp.carrier, a.n(), a.tol());
  }

  Subspace<S> e1_left = e2 + f_amb;
  if (!triangularize_node(a, e1_left, e2, hints, seed + 1, budget, out)) return false;
  return triangularize_node(a, e1, e1_left, hints, seed + 2, budget, out);
}

}  // namespace detail

// Either an ordered orthogonal basis making every element of A upper
// triangular, or a full subquotient of dimension at least 2, or Unknown when
// the subspace search gives out. The returned basis is verified.
template <class S>
TriangularizationResult<S> upper_triangularize(const OperatorAlgebra<S>& a,
                                               const std::vector<Subspace<S>>& lattice_hints = {},
                                               uint64_t seed = 0, int budget = 50) {
  TriangularizationResult<S> out;
  out.kind = TriangularizationResult<S>::Basis;
  if (!detail::triangularize_node(a, Subspace<S>::full(a.n(), a.tol()), Subspace<S>(a.n(), a.tol()),
                                  lattice_hints, seed, budget, &out))
    return out;
  for (const auto& b : a.basis()) {
    Matrix<S> mb = matrix_in_basis(b, out.basis, a.tol());
    double scale = std::max(1.0, mb.max_abs());
    for (int i = 0; i < a.n(); ++i)
      for (int j = 0; j < i; ++j) {
        bool zero = ScalarTraits<S>::exact
                        ? ScalarTraits<S>::is_zero(mb(i, j), a.tol())
                        : ScalarTraits<S>::approx_abs(mb(i, j)) <= a.tol().rank_threshold * scale;
        if (!zero) throw Error("triangularize: output failed verification");
      }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spectral idempotent of a Jordanesque matrix (explicit polynomial form).
// ---------------------------------------------------------------------------

// The idempotent that is 1 on the blocks of b where the diagonal of a equals
// lambda and 0 elsewhere; it lies in the non-unital algebra generated by a.
template <class S>
Matrix<S> spectral_idempotent_poly(const Matrix<S>& a, const BlockOrderedBasis<S>& b,
                                   const S& lambda, const Tolerance& tol = {}) {
  if (ScalarTraits<S>::is_zero(lambda, tol))
    throw PreconditionError("spectral idempotent: lambda must be nonzero");
  auto check = jordanesque_check(a, b, tol);
  if (!check.ok) throw PreconditionError("spectral idempotent: matrix not Jordanesque in basis");
  auto eigs = block_eigenvalues(check.matrix, b);
  bool found = false, has_zero = false;
  std::vector<S> others;
  for (const auto& ev : eigs) {
    if (ScalarTraits<S>::eq(ev, lambda, tol)) {
      found = true;
    } else if (ScalarTraits<S>::is_zero(ev, tol)) {
      has_zero = true;
    } else {
      bool dup = false;
      for (const auto& o : others)
        if (ScalarTraits<S>::eq(o, ev, tol)) dup = true;
      if (!dup) others.push_back(ev);
    }
  }
  if (!found) throw NotFoundError("spectral idempotent: lambda is not a diagonal value");
  return spectral_idempotent_from_eigs(a, others, has_zero, lambda);
}

// ---------------------------------------------------------------------------
// Diagonal + nilpotent decomposition in a Jordanesque basis.
// ---------------------------------------------------------------------------

template <class S>
struct DiagNilDecomposition {
  OperatorAlgebra<S> diag;  // elements diagonal in b
  MatSpan<S> nil;           // elements strictly upper triangular in b (an ideal)
};

template <class S>
DiagNilDecomposition<S> diag_nil_decompose(const OperatorAlgebra<S>& a,
                                           const BlockOrderedBasis<S>& b) {
  auto basis = a.basis();
  std::vector<Matrix<S>> in_b;
  for (const auto& m : basis) {
    auto check = jordanesque_check(m, b, a.tol());
    if (!check.ok)
      throw PreconditionError("diag_nil: element not Jordanesque in basis (entry " +
                              std::to_string(check.violation->first) + "," +
                              std::to_string(check.violation->second) + ")");
    in_b.push_back(check.matrix);
  }
  int n = a.n();
  int d = static_cast<int>(basis.size());

  // Coefficient solves: combinations whose b-matrix kills the off-diagonal
  // (diag part) or the diagonal (nil part).
  auto span_where = [&](bool keep_diag) {
    Matrix<S> sys(n * n, d);
    for (int t = 0; t < d; ++t)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          bool constrained = keep_diag ? (i != j) : (i == j);
          sys(i * n + j, t) = constrained ? in_b[t](i, j) : ScalarTraits<S>::zero();
        }
    std::vector<Matrix<S>> out;
    for (const auto& k : kernel_basis(sys, a.tol())) {
      Matrix<S> m = Matrix<S>::zero(n);
      for (int t = 0; t < d; ++t) m = m + k[t] * basis[t];
      out.push_back(std::move(m));
    }
    return out;
  };

  DiagNilDecomposition<S> out;
  out.diag.span = MatSpan<S>::span(n, span_where(true), a.tol());
  out.diag.unital = out.diag.span.contains(Matrix<S>::identity(n));
  out.diag.metric = a.metric;
  out.nil = MatSpan<S>::span(n, span_where(false), a.tol());

  if (out.diag.dim() + out.nil.dim() != a.dim())
    throw Error("diag_nil: split dimensions do not add up");
  for (const auto& x : basis) {
    for (const auto& nb : out.nil.basis()) {
      if (!out.nil.contains(x * nb) || !out.nil.contains(nb * x))
        throw Error("diag_nil: nilpotent part is not an ideal");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Separating element of an upper triangular algebra.
// ---------------------------------------------------------------------------

namespace detail {

// Works on the diagonals (as vectors) of a spanning set of the algebra in a
// triangularizing basis. Returns the coefficients and the separating
// diagonal so the caller can lift to an algebra element.
template <class S>
std::pair<Vector<S>, Vector<S>> separating_diagonal(const std::vector<Vector<S>>& diags, int n,
                                                    const Tolerance& tol) {
  int d = static_cast<int>(diags.size());
  // Diagonal-equality classes across the whole spanning set.
  std::vector<int> cls(n, -1);
  int nclasses = 0;
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < i; ++c) {
      if (cls[c] < 0) continue;
      bool same = true;
      for (int t = 0; t < d && same; ++t)
        if (!ScalarTraits<S>::eq(diags[t][i], diags[t][c], tol)) same = false;
      if (same) {
        cls[i] = cls[c];
        break;
      }
    }
    if (cls[i] < 0) cls[i] = nclasses++;
  }
  std::vector<int> rep(nclasses, -1);
  for (int i = 0; i < n; ++i)
    if (rep[cls[i]] < 0) rep[cls[i]] = i;
  std::vector<bool> active(nclasses, false);
  for (int c = 0; c < nclasses; ++c)
    for (int t = 0; t < d; ++t)
      if (!ScalarTraits<S>::is_zero(diags[t][rep[c]], tol)) active[c] = true;

  // A combination separating the classes with nonzero values on active ones.
  Vector<S> f;
  for (long w = 1;; ++w) {
    f = zero_vector<S>(n);
    S pw = ScalarTraits<S>::one();
    for (int t = 0; t < d; ++t) {
      for (int i = 0; i < n; ++i) f[i] += pw * diags[t][i];
      pw *= S(w);
    }
    bool good = true;
    for (int c = 0; c < nclasses && good; ++c) {
      if (active[c] && ScalarTraits<S>::is_zero(f[rep[c]], tol)) good = false;
      for (int c2 = c + 1; c2 < nclasses && good; ++c2)
        if (ScalarTraits<S>::eq(f[rep[c]], f[rep[c2]], tol)) good = false;
    }
    if (good) break;
    if (w > 4 * n * n * d + 8) throw Error("separating element: interpolation search exhausted");
  }

  // Indicator of each active class through polynomial interpolation on the
  // value set (0 included so the polynomial has no constant term), then a
  // distinct real integer per class.
  Vector<S> g = zero_vector<S>(n);
  long next_value = 1;
  for (int c = 0; c < nclasses; ++c) {
    if (!active[c]) continue;
    S ac = f[rep[c]];
    // p(x) = prod (x - b)/(ac - b) over other values b and 0.
    std::vector<S> other_vals{ScalarTraits<S>::zero()};
    for (int c2 = 0; c2 < nclasses; ++c2)
      if (c2 != c && !ScalarTraits<S>::eq(f[rep[c2]], ScalarTraits<S>::zero(), tol))
        other_vals.push_back(f[rep[c2]]);
    Vector<S> indicator(n, ScalarTraits<S>::one());
    for (const auto& bval : other_vals) {
      S denom = ac - bval;
      for (int i = 0; i < n; ++i) indicator[i] *= (f[i] - bval) / denom;
    }
    for (int i = 0; i < n; ++i) g[i] += S(next_value) * indicator[i];
    ++next_value;
  }
  return {f, g};
}

}  // namespace detail

// An element of A whose main diagonal (in the triangularizing basis b) is
// real and separates the diagonal-equality classes of the whole algebra.
template <class S>
Matrix<S> separating_element(const OperatorAlgebra<S>& a, const std::vector<Vector<S>>& b) {
  auto basis = a.basis();
  int n = a.n();
  if (basis.empty()) return Matrix<S>::zero(n);
  std::vector<Vector<S>> diags;
  for (const auto& m : basis) {
    Matrix<S> mb = matrix_in_basis(m, b, a.tol());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j)
        if (!ScalarTraits<S>::is_zero(mb(i, j), a.tol()))
          throw PreconditionError("separating element: algebra not upper triangular in basis");
    Vector<S> diag(n);
    for (int i = 0; i < n; ++i) diag[i] = mb(i, i);
    diags.push_back(std::move(diag));
  }
  auto [f, g] = detail::separating_diagonal(diags, n, a.tol());
  // Lift: solve for a combination of basis elements with diagonal g.
  Matrix<S> sys(n, static_cast<int>(basis.size()));
  for (size_t t = 0; t < diags.size(); ++t)
    for (int i = 0; i < n; ++i) sys(i, static_cast<int>(t)) = diags[t][i];
  auto coeff = solve(sys, g, a.tol());
  if (!coeff) throw Error("separating element: diagonal interpolation left the algebra");
  Matrix<S> out = Matrix<S>::zero(n);
  for (size_t t = 0; t < basis.size(); ++t) out = out + (*coeff)[t] * basis[t];
  return out;
}

// ---------------------------------------------------------------------------
// Jordanesque basis for hereditarily antisymmetric algebras.
// ---------------------------------------------------------------------------

namespace detail {

template <class S>
struct JbFailure : PreconditionError {
  using PreconditionError::PreconditionError;
};

// One induction step: extend the block structure on span{w_0..w_{k-2}} to
// span{w_0..w_{k-1}}. All vectors are held in w-coordinates of length n with
// support in the first k entries.
template <class S>
void jordanesque_step(const std::vector<Matrix<S>>& mats_w, int k,
                      std::vector<std::vector<Vector<S>>>* blocks, const Tolerance& tol) {
  int n = static_cast<int>(mats_w[0].rows());
  // Separating element of the compression to the first k coordinates.
  std::vector<Vector<S>> short_diags;
  for (const auto& m : mats_w) {
    Vector<S> diag(k);
    for (int i = 0; i < k; ++i) diag[i] = m(i, i);
    short_diags.push_back(std::move(diag));
  }
  auto [f, g] = separating_diagonal(short_diags, k, tol);
  auto coeff = solve(Matrix<S>::from_columns(short_diags), g, tol);
  if (!coeff) throw Error("jordanesque: separating diagonal not realizable");
  Matrix<S> sep(n, n);
  for (size_t t = 0; t < mats_w.size(); ++t) sep = sep + (*coeff)[t] * mats_w[t];
  S lambda = sep(k - 1, k - 1);

  // Values of the separating element on the existing blocks: the diagonal
  // coefficient on each block's leading vector.
  auto all_vecs = [&]() {
    std::vector<Vector<S>> v;
    for (const auto& blk : *blocks)
      for (const auto& x : blk) v.push_back(x);
    return v;
  };
  std::optional<size_t> matched;
  {
    auto vecs = all_vecs();
    if (!vecs.empty()) {
      Matrix<S> vk(k, static_cast<int>(vecs.size()));
      for (size_t j = 0; j < vecs.size(); ++j)
        for (int i = 0; i < k; ++i) vk(i, static_cast<int>(j)) = vecs[j][i];
      size_t pos = 0;
      for (size_t bidx = 0; bidx < blocks->size(); ++bidx) {
        Vector<S> img_full = sep * (*blocks)[bidx][0];
        Vector<S> img(img_full.begin(), img_full.begin() + k);
        auto c = solve(vk, img, tol);
        if (!c) throw Error("jordanesque: block image left the flag");
        S value = (*c)[pos];
        if (ScalarTraits<S>::eq(value, lambda, tol)) {
          if (matched) throw JbFailure<S>("jordanesque: separating element does not distinguish blocks");
          matched = bidx;
        }
        pos += (*blocks)[bidx].size();
      }
    }
  }

  if (matched) {
    // Move the matched block last, project along it onto the span of the
    // rest plus w_{k-1}, and extend it by the lambda-eigenvector there.
    auto blk = (*blocks)[*matched];
    blocks->erase(blocks->begin() + static_cast<long>(*matched));
    std::vector<Vector<S>> fvecs;
    for (const auto& b : *blocks)
      for (const auto& x : b) fvecs.push_back(x);
    fvecs.push_back(basis_vector<S>(n, k - 1));  // w_{k-1} in w-coordinates
    int fd = static_cast<int>(fvecs.size());
    int kd = static_cast<int>(blk.size());
    // Natural projection within the k-dim flag: columns [F | K].
    std::vector<Vector<S>> cols = fvecs;
    for (const auto& x : blk) cols.push_back(x);
    Matrix<S> full(k, fd + kd);
    for (int j = 0; j < fd + kd; ++j)
      for (int i = 0; i < k; ++i) full(i, j) = cols[j][i];
    Matrix<S> dsel(fd + kd, fd + kd);
    for (int i = 0; i < fd; ++i) dsel(i, i) = ScalarTraits<S>::one();
    Matrix<S> proj = full * dsel * inverse(full, tol);  // k x k in flag coordinates

    // Matrix of P sep P on F in the fvecs basis.
    Matrix<S> mf(fd, fd);
    Matrix<S> fcols(k, fd);
    for (int j = 0; j < fd; ++j)
      for (int i = 0; i < k; ++i) fcols(i, j) = fvecs[j][i];
    for (int j = 0; j < fd; ++j) {
      Vector<S> img_full = sep * fvecs[j];
      Vector<S> img(img_full.begin(), img_full.begin() + k);
      img = proj * img;
      auto c = solve(fcols, img, tol);
      if (!c) throw Error("jordanesque: projected image not in companion span");
      for (int i = 0; i < fd; ++i) mf(i, j) = (*c)[i];
    }
    auto ker = kernel_basis(mf - lambda * Matrix<S>::identity(fd), tol);
    if (ker.size() != 1) throw JbFailure<S>("jordanesque: eigenvector extension not unique");
    Vector<S> v_new = zero_vector<S>(n);
    for (int j = 0; j < fd; ++j) v_new = vec_add(std::move(v_new), vec_scale(fvecs[j], ker[0][j]));
    blk.push_back(std::move(v_new));
    blocks->push_back(std::move(blk));
  } else {
    // New size-1 block: eigenvector of the compression itself.
    Matrix<S> mk(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) mk(i, j) = sep(i, j);
    auto ker = kernel_basis(mk - lambda * Matrix<S>::identity(k), tol);
    if (ker.empty()) throw Error("jordanesque: missing eigenvector for new block");
    Vector<S> v_new = zero_vector<S>(n);
    for (int i = 0; i < k; ++i) v_new[i] = ker[0][i];
    blocks->push_back({std::move(v_new)});
  }

  // Verify the extended structure on every element of the spanning set.
  std::vector<Vector<S>> vecs;
  std::vector<int> sizes;
  for (const auto& blk : *blocks) {
    sizes.push_back(static_cast<int>(blk.size()));
    for (const auto& x : blk) vecs.push_back(Vector<S>(x.begin(), x.begin() + k));
  }
  BlockOrderedBasis<S> bb{vecs, sizes, false};
  for (const auto& m : mats_w) {
    Matrix<S> top(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) top(i, j) = m(i, j);
    auto check = jordanesque_check(top, bb, tol);
    if (!check.ok)
      throw JbFailure<S>("jordanesque: element fails block structure at entry " +
                         std::to_string(check.violation->first) + "," +
                         std::to_string(check.violation->second) +
                         " (input not hereditarily antisymmetric?)");
  }
}

}  // namespace detail

// Block ordered basis in which every element of A is Jordanesque, built by
// triangularizing and then extending block structures one flag step at a
// time. Construction failures surface as PreconditionError and indicate the
// input was not hereditarily antisymmetric.
template <class S>
BlockOrderedBasis<S> jordanesque_basis(const OperatorAlgebra<S>& a,
                                       const std::vector<Subspace<S>>& lattice_hints = {},
                                       uint64_t seed = 0, int budget = 50) {
  int n = a.n();
  auto ut = upper_triangularize(a, lattice_hints, seed, budget);
  if (ut.kind != TriangularizationResult<S>::Basis)
    throw PreconditionError("jordanesque basis: algebra cannot be upper triangularized");

  std::vector<Matrix<S>> mats_w;
  for (const auto& b : a.basis()) mats_w.push_back(matrix_in_basis(b, ut.basis, a.tol()));

  std::vector<std::vector<Vector<S>>> blocks;  // vectors in w-coordinates
  blocks.push_back({basis_vector<S>(n, 0)});
  for (int k = 2; k <= n; ++k) detail::jordanesque_step(mats_w, k, &blocks, a.tol());

  // Back to ambient coordinates, then orthogonalize per block.
  Matrix<S> w_cols = Matrix<S>::from_columns(ut.basis);
  BlockOrderedBasis<S> out;
  for (const auto& blk : blocks) {
    std::vector<Vector<S>> ambient;
    for (const auto& x : blk) ambient.push_back(w_cols * x);
    auto gs = gram_schmidt(ambient, a.metric, a.tol());
    out.block_sizes.push_back(static_cast<int>(blk.size()));
    for (auto& v : gs.vecs) out.vectors.push_back(std::move(v));
  }
  out.normalized = true;
  out.validate();

  for (const auto& b : a.basis()) {
    auto check = jordanesque_check(b, out, a.tol());
    if (!check.ok)
      throw PreconditionError("jordanesque basis: verification failed at entry " +
                              std::to_string(check.violation->first) + "," +
                              std::to_string(check.violation->second));
  }
  return out;
}

}  // namespace opalg
