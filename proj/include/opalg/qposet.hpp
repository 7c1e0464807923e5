#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "opalg/invariant.hpp"

namespace opalg {

// Vector sequence with witnessing operators: witnesses[i] maps vectors[i] to
// vectors[i+1] and lies in the algebra.
template <class S>
struct QuantumChain {
  std::vector<Vector<S>> vectors;
  std::vector<Matrix<S>> witnesses;
  int length() const { return static_cast<int>(vectors.size()); }
};

template <class S>
struct AntichainPartition {
  std::vector<Subspace<S>> parts;  // pairwise orthogonal, direct sum C^n
  bool ordered = false;            // prefix sums invariant
  int size() const { return static_cast<int>(parts.size()); }
};

template <class S>
struct PowerFiltration {
  std::vector<Subspace<S>> spans;  // A^0(C^n) down to A^r(C^n) = 0
  int nilpotency_index = 0;        // r
};

namespace detail {

// One application step: span{B u : B basis, u spanning set}.
template <class S>
Subspace<S> apply_algebra(const OperatorAlgebra<S>& a, const Subspace<S>& s) {
  std::vector<Vector<S>> images;
  for (const auto& b : a.basis())
    for (const auto& u : s.basis()) images.push_back(b * u);
  return Subspace<S>::span(a.n(), images, a.tol());
}

}  // namespace detail

template <class S>
bool is_nilpotent_algebra(const OperatorAlgebra<S>& a) {
  Subspace<S> s = Subspace<S>::full(a.n(), a.tol());
  for (int i = 0; i <= a.n(); ++i) {
    if (s.dim() == 0) return true;
    Subspace<S> next = detail::apply_algebra(a, s);
    if (next.dim() >= s.dim()) return false;  // stalled before reaching zero
    s = next;
  }
  return s.dim() == 0;
}

template <class S>
PowerFiltration<S> power_filtration(const OperatorAlgebra<S>& a) {
  PowerFiltration<S> out;
  Subspace<S> s = Subspace<S>::full(a.n(), a.tol());
  out.spans.push_back(s);
  while (s.dim() > 0) {
    Subspace<S> next = detail::apply_algebra(a, s);
    if (next.dim() >= s.dim()) throw PreconditionError("power filtration: algebra not nilpotent");
    out.spans.push_back(next);
    s = out.spans.back();
  }
  out.nilpotency_index = static_cast<int>(out.spans.size()) - 1;
  return out;
}

// P A P = 0; semi-invariance of E is then automatic.
template <class S>
bool is_quantum_antichain(const OperatorAlgebra<S>& a, const Subspace<S>& e) {
  if (e.dim() == 0) throw PreconditionError("quantum antichain: zero subspace");
  Matrix<S> p = orth_projection(e, a.metric);
  for (const auto& b : a.basis())
    if (!(p * b * p).is_zero(a.tol())) return false;
  return true;
}

template <class S>
struct ChainVerification {
  bool ok = false;
  QuantumChain<S> chain;
  int failed_step = -1;  // first i with vectors[i+1] not in A * vectors[i]
};

// Solves sum_B c_B (B v_i) = v_{i+1} at every step and returns witnesses.
template <class S>
ChainVerification<S> verify_quantum_chain(const OperatorAlgebra<S>& a,
                                          const std::vector<Vector<S>>& vectors) {
  ChainVerification<S> out;
  auto basis = a.basis();
  for (const auto& v : vectors)
    if (vec_is_zero(v, a.tol())) throw PreconditionError("chain: zero vector");
  out.chain.vectors = vectors;
  for (size_t i = 0; i + 1 < vectors.size(); ++i) {
    std::vector<Vector<S>> images;
    for (const auto& b : basis) images.push_back(b * vectors[i]);
    auto coeff = express(images, vectors[i + 1], a.tol());
    if (!coeff) {
      out.failed_step = static_cast<int>(i);
      return out;
    }
    Matrix<S> w = Matrix<S>::zero(a.n());
    for (size_t t = 0; t < basis.size(); ++t) w = w + (*coeff)[t] * basis[t];
    out.chain.witnesses.push_back(std::move(w));
  }
  out.ok = true;
  return out;
}

// Orthogonal differences of consecutive filtration spans, deepest first, so
// every prefix sum is a filtration span and hence invariant.
template <class S>
AntichainPartition<S> top_down_partition(const OperatorAlgebra<S>& a) {
  auto filt = power_filtration(a);
  AntichainPartition<S> out;
  out.ordered = true;
  int r = filt.nilpotency_index;
  for (int i = r - 1; i >= 0; --i) {
    Subspace<S> part = filt.spans[i].orth_difference(filt.spans[i + 1], a.metric);
    if (!is_quantum_antichain(a, part)) throw Error("top-down partition: part not an antichain");
    out.parts.push_back(std::move(part));
  }
  return out;
}

// Kernel towers: E_1 the joint kernel, E_{i+1} the preimage of the previous
// prefix, reported as orthogonal differences.
template <class S>
AntichainPartition<S> bottom_up_partition(const OperatorAlgebra<S>& a) {
  if (!is_nilpotent_algebra(a)) throw PreconditionError("bottom-up partition: not nilpotent");
  int n = a.n();
  auto basis = a.basis();
  AntichainPartition<S> out;
  out.ordered = true;
  Subspace<S> prev(n, a.tol());
  while (prev.dim() < n) {
    // {v : B v in prev for all B} via the stacked projected system.
    Matrix<S> pperp = Matrix<S>::identity(n) - orth_projection(prev, a.metric);
    Matrix<S> stacked(static_cast<int>(basis.size()) * n, n);
    for (size_t t = 0; t < basis.size(); ++t) {
      Matrix<S> m = pperp * basis[t];
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) stacked(static_cast<int>(t) * n + i, j) = m(i, j);
    }
    Subspace<S> next = Subspace<S>::span(n, kernel_basis(stacked, a.tol()), a.tol());
    if (next.dim() <= prev.dim()) throw Error("bottom-up partition: tower stalled");
    Subspace<S> part = next.orth_difference(prev, a.metric);
    if (!is_quantum_antichain(a, part)) throw Error("bottom-up partition: part not an antichain");
    out.parts.push_back(part);
    prev = next;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Maximal chain extraction.
// ---------------------------------------------------------------------------

namespace detail {

template <class S>
bool chain_dfs(const std::vector<Matrix<S>>& basis, const Vector<S>& current, int remaining,
               const Tolerance& tol, std::vector<Vector<S>>* vecs,
               std::vector<Matrix<S>>* wits, long* nodes) {
  if (remaining == 0) return true;
  if (--(*nodes) < 0) return false;
  for (const auto& b : basis) {
    Vector<S> next = b * current;
    if (vec_is_zero(next, tol)) continue;
    vecs->push_back(next);
    wits->push_back(b);
    if (chain_dfs(basis, next, remaining - 1, tol, vecs, wits, nodes)) return true;
    vecs->pop_back();
    wits->pop_back();
  }
  return false;
}

}  // namespace detail

// A verified chain of length r (the nilpotency index); no longer chain
// exists. Search is a complete DFS over canonical-basis products applied to
// standard, then seeded random, starting vectors.
template <class S>
QuantumChain<S> max_quantum_chain(const OperatorAlgebra<S>& a, uint64_t seed = 0) {
  auto filt = power_filtration(a);
  int r = filt.nilpotency_index;
  QuantumChain<S> chain;
  if (r <= 1) {
    chain.vectors.push_back(basis_vector<S>(a.n(), 0));
    return chain;
  }
  auto basis = a.basis();
  std::vector<Vector<S>> starts;
  for (int i = 0; i < a.n(); ++i) starts.push_back(basis_vector<S>(a.n(), i));
  Rng rng(seed);
  for (int t = 0; t < 32; ++t) starts.push_back(random_vector<S>(rng, a.n()));
  for (const auto& v : starts) {
    if (vec_is_zero(v, a.tol())) continue;
    std::vector<Vector<S>> vecs{v};
    std::vector<Matrix<S>> wits;
    long nodes = 2000000;
    if (detail::chain_dfs(basis, v, r - 1, a.tol(), &vecs, &wits, &nodes)) {
      chain.vectors = std::move(vecs);
      chain.witnesses = std::move(wits);
      return chain;
    }
  }
  throw Error("max chain: guaranteed chain not found (search anomaly)");
}

// Exhaustive basis-product chain search, as an independent oracle.
template <class S>
int brute_force_max_chain(const OperatorAlgebra<S>& a, int depth_cap = -1) {
  if (a.n() > 6) throw GuardError("brute force chains: n <= 6");
  if (depth_cap < 0) depth_cap = a.n();
  auto basis = a.basis();
  int best = 1;
  std::vector<Vector<S>> starts;
  for (int i = 0; i < a.n(); ++i) starts.push_back(basis_vector<S>(a.n(), i));
  // Depth-first over products, tracking the longest nonzero trajectory.
  struct Frame {
    Vector<S> v;
    int depth;
  };
  for (const auto& s : starts) {
    std::vector<Frame> stack{{s, 1}};
    while (!stack.empty()) {
      Frame f = std::move(stack.back());
      stack.pop_back();
      best = std::max(best, f.depth);
      if (f.depth >= depth_cap) continue;
      for (const auto& b : basis) {
        Vector<S> next = b * f.v;
        if (!vec_is_zero(next, a.tol())) stack.push_back({std::move(next), f.depth + 1});
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Chain pruning and the Dilworth construction.
// ---------------------------------------------------------------------------

// Greedy removal of linearly dependent vectors in deterministic scan order;
// witnesses across removed elements are composed. Empty chains vanish.
template <class S>
std::vector<QuantumChain<S>> prune_chains(const std::vector<QuantumChain<S>>& chains, int n,
                                          const Tolerance& tol = {}) {
  Echelon<S> ech(n, tol);
  std::vector<QuantumChain<S>> out;
  int kept_total = 0;
  for (const auto& c : chains) {
    QuantumChain<S> pruned;
    std::optional<Matrix<S>> pending;  // composition across removed elements
    for (size_t i = 0; i < c.vectors.size(); ++i) {
      Matrix<S> step_in = i > 0 ? c.witnesses[i - 1] : Matrix<S>();
      if (i > 0) pending = pending ? std::optional<Matrix<S>>(step_in * *pending)
                                   : std::optional<Matrix<S>>(step_in);
      if (!ech.insert(c.vectors[i])) continue;
      if (!pruned.vectors.empty()) pruned.witnesses.push_back(*pending);
      pending.reset();
      pruned.vectors.push_back(c.vectors[i]);
      ++kept_total;
    }
    if (!pruned.vectors.empty()) out.push_back(std::move(pruned));
  }
  if (kept_total != n) throw PreconditionError("prune: chains do not span the space");
  return out;
}

namespace detail {

template <class S>
struct DilworthCandidate {
  Vector<S> w;
  std::vector<Matrix<S>> ops;  // B_1..B_i, applied in order
};

// Enumerate (w, B_1..B_i) with proj(B_i...B_1 w) outside F, in deterministic
// order: standard basis vectors first, then seeded random vectors; operator
// sequences depth-first in canonical basis order.
template <class S>
void dilworth_candidates(const OperatorAlgebra<S>& a, int depth, const Matrix<S>& proj,
                         const Echelon<S>& f_span, Rng* rng, int max_candidates,
                         std::vector<DilworthCandidate<S>>* out) {
  auto basis = a.basis();
  std::vector<Vector<S>> starts;
  for (int i = 0; i < a.n(); ++i) starts.push_back(basis_vector<S>(a.n(), i));
  for (int t = 0; t < 24; ++t) starts.push_back(random_vector<S>(*rng, a.n()));

  struct Walker {
    const OperatorAlgebra<S>& alg;
    const Matrix<S>& proj;
    const Echelon<S>& f;
    std::vector<DilworthCandidate<S>>* out;
    int max_candidates;
    long nodes = 200000;

    bool run(const Vector<S>& w, const Vector<S>& current, int remaining,
             std::vector<Matrix<S>>* trail) {
      if (static_cast<int>(out->size()) >= max_candidates) return true;
      if (--nodes < 0) return true;
      if (remaining == 0) {
        Vector<S> p = proj * current;
        Echelon<S> probe = f;
        if (probe.insert(p)) out->push_back({w, *trail});
        return static_cast<int>(out->size()) >= max_candidates;
      }
      for (const auto& b : alg.basis()) {
        Vector<S> next = b * current;
        if (vec_is_zero(next, alg.tol())) continue;
        trail->push_back(b);
        bool done = run(w, next, remaining - 1, trail);
        trail->pop_back();
        if (done) return true;
      }
      return false;
    }
  };

  Walker walker{a, proj, f_span, out, max_candidates};
  for (const auto& w : starts) {
    if (static_cast<int>(out->size()) >= max_candidates) break;
    std::vector<Matrix<S>> trail;
    walker.run(w, w, depth, &trail);
  }
}

}  // namespace detail

// Constructive chain partition of size at most max_i dim(E_i): stage by
// stage the first d_i chains are extended (with small-t perturbations of
// their history) so their stage-i vectors project onto a basis of E_i; the
// spanning family is then pruned to a partition. t is found by trying
// 1, 1/2, 1/4, ... and verifying both the new independence and all earlier
// stage properties; among enumerated candidates the one adding the most new
// directions to the chain system wins.
template <class S>
std::vector<QuantumChain<S>> dilworth_chain_partition(const OperatorAlgebra<S>& a,
                                                      uint64_t seed = 0, int budget = 50) {
  auto filt = power_filtration(a);
  int n = a.n();
  int r = filt.nilpotency_index;
  int k = r - 1;
  // Parts indexed descending: E_i = A^i ominus A^{i+1}, i = 0..k.
  std::vector<Subspace<S>> parts;
  std::vector<Matrix<S>> projs;
  for (int i = 0; i <= k; ++i) {
    parts.push_back(filt.spans[i].orth_difference(filt.spans[i + 1], a.metric));
    projs.push_back(orth_projection(parts.back(), a.metric));
  }
  std::vector<int> dims;
  int d = 0;
  for (const auto& p : parts) {
    dims.push_back(p.dim());
    d = std::max(d, p.dim());
  }

  std::vector<Vector<S>> v(d, zero_vector<S>(n));
  std::vector<std::vector<Matrix<S>>> ops(d, std::vector<Matrix<S>>(k, Matrix<S>::zero(n)));
  for (int j = 0; j < dims[0]; ++j) v[j] = parts[0].basis()[j];

  auto vec_max = [](const Vector<S>& x) {
    double m = 0;
    for (const auto& e : x) m = std::max(m, ScalarTraits<S>::approx_abs(e));
    return m;
  };
  // Relative termination rule: a chain vector counts as zero when it drops
  // below the rank threshold relative to its predecessor. (Exact mode tests
  // literal zero.)
  auto step_vanished = [&](const Vector<S>& next, const Vector<S>& prev) {
    if constexpr (ScalarTraits<S>::exact) {
      return vec_is_zero(next, a.tol());
    } else {
      return vec_max(next) <= a.tol().rank_threshold * std::max(1e-30, vec_max(prev));
    }
  };
  // Scaling chains leaves every rank decision unchanged; keeping entries
  // near unit magnitude protects the numeric zero tests from tiny t factors.
  auto renormalize_chain = [&](int j) {
    if constexpr (!ScalarTraits<S>::exact) {
      double m = vec_max(v[j]);
      if (m > 0) v[j] = vec_scale(v[j], ScalarTraits<S>::from_real(1.0 / m));
      for (int s = 0; s < k; ++s) {
        double mm = ops[j][s].max_abs();
        if (mm > 0) ops[j][s] = ScalarTraits<S>::from_real(1.0 / mm) * ops[j][s];
      }
    }
  };
  auto stage_vector = [&](int j, int upto) {
    Vector<S> x = v[j];
    for (int s = 0; s < upto; ++s) x = ops[j][s] * x;
    return x;
  };
  auto all_chain_vectors = [&](int except_j) {
    std::vector<Vector<S>> out;
    for (int j = 0; j < d; ++j) {
      if (j == except_j) continue;
      if (vec_is_zero(v[j], a.tol())) continue;
      Vector<S> x = v[j];
      out.push_back(x);
      for (int s = 0; s < k; ++s) {
        Vector<S> next = ops[j][s] * x;
        if (step_vanished(next, x)) break;
        out.push_back(next);
        x = std::move(next);
      }
    }
    return out;
  };

  Rng rng(seed);
  for (int stage = 1; stage <= k; ++stage) {
    for (int j = 0; j < dims[stage]; ++j) {
      // Span of the previous chains' stage projections.
      Echelon<S> f(n, a.tol());
      for (int j2 = 0; j2 < j; ++j2) f.insert(projs[stage] * stage_vector(j2, stage));

      std::vector<detail::DilworthCandidate<S>> candidates;
      detail::dilworth_candidates(a, stage, projs[stage], f, &rng, 6, &candidates);
      if (candidates.empty())
        throw Error("dilworth: no candidate direction (construction anomaly)");

      struct Commit {
        Vector<S> v;
        std::vector<Matrix<S>> ops;
        int gain = -1;
      };
      std::optional<Commit> best;
      for (const auto& cand : candidates) {
        // Geometrically decaying t, acceptance by verification.
        for (int halving = 0; halving <= budget; ++halving) {
          S t = ScalarTraits<S>::one();
          for (int h = 0; h < halving; ++h) t = t / S(2);
          Vector<S> vj = vec_add(v[j], vec_scale(cand.w, t));
          std::vector<Matrix<S>> oj = ops[j];
          for (int s = 0; s < stage - 1; ++s) oj[s] = oj[s] + t * cand.ops[s];
          oj[stage - 1] = t * cand.ops[stage - 1];

          auto trial_vector = [&](int upto) {
            Vector<S> x = vj;
            for (int s = 0; s < upto; ++s) x = oj[s] * x;
            return x;
          };
          // (a) the new stage projection extends F.
          Echelon<S> probe = f;
          if (!probe.insert(projs[stage] * trial_vector(stage))) continue;
          // (b) earlier stages where this chain participates keep full rank.
          bool earlier_ok = true;
          for (int s = 0; s < stage && earlier_ok; ++s) {
            if (j >= dims[s]) continue;
            Echelon<S> es(n, a.tol());
            for (int j2 = 0; j2 < dims[s]; ++j2) {
              Vector<S> x = (j2 == j) ? trial_vector(s) : stage_vector(j2, s);
              es.insert(projs[s] * x);
            }
            if (es.dim() != dims[s]) earlier_ok = false;
          }
          if (!earlier_ok) continue;

          // Rank gain of the perturbed chain over the rest of the system.
          Echelon<S> sys(n, a.tol());
          for (const auto& x : all_chain_vectors(j)) sys.insert(x);
          int before = sys.dim();
          Vector<S> x = vj;
          if (!vec_is_zero(x, a.tol())) sys.insert(x);
          for (int s = 0; s < k; ++s) {
            Vector<S> next = oj[s] * x;
            if (step_vanished(next, x)) break;
            sys.insert(next);
            x = std::move(next);
          }
          int gain = sys.dim() - before;
          if (!best || gain > best->gain) best = Commit{vj, oj, gain};
          break;  // largest acceptable t for this candidate
        }
      }
      if (!best) throw Error("dilworth: no acceptable perturbation (construction anomaly)");
      v[j] = best->v;
      ops[j] = best->ops;
      renormalize_chain(j);
    }
  }

  // Assemble chains: maximal non-vanished prefixes, renormalized per step so
  // downstream verification sees well-scaled vectors (witnesses absorb the
  // scale factors; scalar multiples stay inside the algebra).
  std::vector<QuantumChain<S>> chains;
  for (int j = 0; j < d; ++j) {
    if (vec_is_zero(v[j], a.tol())) continue;
    QuantumChain<S> c;
    Vector<S> x = v[j];
    if constexpr (!ScalarTraits<S>::exact)
      x = vec_scale(std::move(x), ScalarTraits<S>::from_real(1.0 / vec_max(x)));
    c.vectors.push_back(x);
    for (int s = 0; s < k; ++s) {
      Vector<S> next = ops[j][s] * x;
      if (step_vanished(next, x)) break;
      Matrix<S> witness = ops[j][s];
      if constexpr (!ScalarTraits<S>::exact) {
        S inv = ScalarTraits<S>::from_real(1.0 / vec_max(next));
        next = vec_scale(std::move(next), inv);
        witness = inv * witness;
      }
      c.witnesses.push_back(std::move(witness));
      c.vectors.push_back(next);
      x = std::move(next);
    }
    chains.push_back(std::move(c));
  }
  auto pruned = prune_chains(chains, n, a.tol());
  for (const auto& c : pruned)
    if (!verify_quantum_chain(a, c.vectors).ok)
      throw Error("dilworth: output chain failed verification");
  return pruned;
}

}  // namespace opalg
