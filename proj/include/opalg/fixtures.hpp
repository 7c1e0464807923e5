#pragma once

// Bundled constructions reproducing the worked examples that the test and
// acceptance suites (and the CLI `fixture` command) share.

#include "opalg/families.hpp"

namespace opalg::fixtures {

// Nilpotent subalgebra of M_8 with a six-dimensional closure, three
// three-way antichain parts and a length-4 chain.
template <class S>
std::vector<Matrix<S>> m8_generators() {
  auto E = [](int i, int j) { return Matrix<S>::unit(8, i - 1, j - 1); };
  std::vector<Matrix<S>> g;
  g.push_back(E(3, 1) + E(6, 1));
  g.push_back(E(2, 3) + E(7, 3) - E(2, 6) + E(4, 6));
  g.push_back(E(5, 7) + E(8, 4) - E(5, 2) + E(8, 2));
  return g;
}

template <class S>
OperatorAlgebra<S> ex6_7(const Tolerance& tol = {}) {
  return close_algebra<S>(8, m8_generators<S>(), /*unital=*/false, tol);
}

// span{E14, E24, E34}: width-3 antichain but a two-chain partition.
template <class S>
OperatorAlgebra<S> ex6_8(const Tolerance& tol = {}) {
  std::vector<Matrix<S>> gens{Matrix<S>::unit(4, 0, 3), Matrix<S>::unit(4, 1, 3),
                              Matrix<S>::unit(4, 2, 3)};
  return close_algebra<S>(4, gens, false, tol);
}

// Antisymmetric algebra on C^4 that cannot be upper triangularized (full
// two-dimensional subobject on span{v1, v2}). Deterministic seed, re-verified
// at construction.
template <class S>
FullSubobjectFixture<S> ex4_11(uint64_t seed = 7, const Tolerance& tol = {}) {
  return make_fullsubex_fixture<S>(seed, tol);
}

}  // namespace opalg::fixtures
