#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "opalg/channels.hpp"
#include "opalg/qposet.hpp"
#include "opalg/triangular.hpp"

namespace opalg {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

enum class Backend { Exact, Numeric };

inline std::string backend_name(Backend b) { return b == Backend::Exact ? "exact" : "numeric"; }

// FNV-1a 64-bit content digest for report input stamps.
inline std::string fnv1a_digest(const std::string& bytes) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Scalars: exact entries as "a/b+c/d i" strings, numeric as [re, im] pairs.
// ---------------------------------------------------------------------------

inline ordered_json scalar_to_json(const GaussianRational& x) { return x.str(); }
inline ordered_json scalar_to_json(const Cplx& x) {
  return ordered_json::array({x.real(), x.imag()});
}

template <class S>
S scalar_from_json(const json& j);

template <>
inline GaussianRational scalar_from_json<GaussianRational>(const json& j) {
  if (!j.is_string()) throw ParseError("exact entries must be rational strings");
  return GaussianRational::parse(j.get<std::string>());
}

template <>
inline Cplx scalar_from_json<Cplx>(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParseError("numeric entries must be [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

// Scans a document for the first scalar leaf to pick the backend.
inline Backend detect_backend(const json& doc) {
  if (doc.is_string()) return Backend::Exact;
  if (doc.is_array()) {
    if (doc.size() == 2 && doc[0].is_number() && doc[1].is_number()) return Backend::Numeric;
    for (const auto& e : doc)
      if (!e.is_number()) return detect_backend(e);
    return Backend::Numeric;
  }
  if (doc.is_object()) {
    for (const auto& key : {"entries", "generators", "kraus", "vectors", "basis", "channels",
                            "matrix", "subspaces"})
      if (doc.contains(key)) return detect_backend(doc[key]);
    for (const auto& [k, v] : doc.items())
      if (v.is_object() || v.is_array() || v.is_string()) return detect_backend(v);
  }
  throw ParseError("cannot infer scalar backend from document");
}

// ---------------------------------------------------------------------------
// Vectors and matrices.
// ---------------------------------------------------------------------------

template <class S>
ordered_json vector_to_json(const Vector<S>& v) {
  ordered_json entries = ordered_json::array();
  for (const auto& x : v) entries.push_back(scalar_to_json(x));
  return ordered_json{{"n", v.size()}, {"entries", std::move(entries)}};
}

template <class S>
Vector<S> vector_from_json(const json& j) {
  if (!j.contains("n") || !j.contains("entries")) throw ParseError("vector: missing fields");
  Vector<S> v;
  for (const auto& e : j["entries"]) v.push_back(scalar_from_json<S>(e));
  if (v.size() != j["n"].get<size_t>()) throw ParseError("vector: length disagrees with n");
  return v;
}

template <class S>
ordered_json matrix_to_json(const Matrix<S>& m) {
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(scalar_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return ordered_json{{"n", m.rows()}, {"entries", std::move(rows)}};
}

template <class S>
Matrix<S> matrix_from_json(const json& j) {
  if (!j.contains("n") || !j.contains("entries")) throw ParseError("matrix: missing fields");
  int n = j["n"].get<int>();
  if (n <= 0) throw ParseError("matrix: dimension must be positive");
  Matrix<S> m(n, n);
  const auto& rows = j["entries"];
  if (static_cast<int>(rows.size()) != n) throw ParseError("matrix: row count disagrees with n");
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != n) throw ParseError("matrix: ragged rows");
    for (int c = 0; c < n; ++c) m(i, c) = scalar_from_json<S>(rows[i][c]);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Subspaces, block bases, preorders.
// ---------------------------------------------------------------------------

template <class S>
ordered_json subspace_to_json(const Subspace<S>& s) {
  ordered_json basis = ordered_json::array();
  for (const auto& v : s.basis()) basis.push_back(vector_to_json(v));
  return ordered_json{{"ambient_dim", s.ambient()}, {"basis", std::move(basis)}};
}

template <class S>
Subspace<S> subspace_from_json(const json& j, const Tolerance& tol = {}) {
  int n = j.at("ambient_dim").get<int>();
  std::vector<Vector<S>> vecs;
  for (const auto& v : j.at("basis")) vecs.push_back(vector_from_json<S>(v));
  return Subspace<S>::span(n, vecs, tol);
}

template <class S>
ordered_json block_basis_to_json(const BlockOrderedBasis<S>& b) {
  ordered_json vecs = ordered_json::array();
  for (const auto& v : b.vectors) vecs.push_back(vector_to_json(v));
  return ordered_json{{"n", b.n()},
                      {"vectors", std::move(vecs)},
                      {"block_sizes", b.block_sizes},
                      {"normalized", b.normalized}};
}

template <class S>
BlockOrderedBasis<S> block_basis_from_json(const json& j) {
  BlockOrderedBasis<S> b;
  for (const auto& v : j.at("vectors")) b.vectors.push_back(vector_from_json<S>(v));
  b.block_sizes = j.at("block_sizes").get<std::vector<int>>();
  b.normalized = j.value("normalized", false);
  b.validate();
  return b;
}

inline ordered_json preorder_to_json(const Preorder& p) {
  ordered_json pairs = ordered_json::array();
  for (int i = 0; i < p.n; ++i)
    for (int j = 0; j < p.n; ++j)
      if (p.rel[i][j] && i != j) pairs.push_back(ordered_json::array({i + 1, j + 1}));
  return ordered_json{{"n", p.n}, {"pairs", std::move(pairs)}};
}

inline Preorder preorder_from_json(const json& j) {
  Preorder p = Preorder::equality(j.at("n").get<int>());
  for (const auto& pr : j.at("pairs")) {
    int a = pr.at(0).get<int>(), b = pr.at(1).get<int>();
    if (a < 1 || a > p.n || b < 1 || b > p.n) throw ParseError("preorder: index out of range");
    p.rel[a - 1][b - 1] = true;
  }
  p.validate();
  return p;
}

// ---------------------------------------------------------------------------
// Algebra documents. generators/unital per the shared format; the optional
// "family" object carries provenance so exact lattice classifications
// survive a round trip through files.
// ---------------------------------------------------------------------------

inline std::string family_kind_name(FamilyProvenance::Kind k) {
  switch (k) {
    case FamilyProvenance::Tn: return "tn";
    case FamilyProvenance::Dv: return "dv";
    case FamilyProvenance::Jv: return "jv";
    case FamilyProvenance::PreorderAlg: return "preorder";
    default: return "generic";
  }
}

template <class S>
ordered_json algebra_to_json(const OperatorAlgebra<S>& a) {
  ordered_json gens = ordered_json::array();
  for (const auto& b : a.basis()) gens.push_back(matrix_to_json(b));
  ordered_json out{{"n", a.n()}, {"unital", a.unital}, {"generators", std::move(gens)}};
  if (a.prov.kind != FamilyProvenance::Generic) {
    ordered_json fam{{"kind", family_kind_name(a.prov.kind)}};
    ordered_json basis = ordered_json::array();
    for (const auto& v : a.family_basis) basis.push_back(vector_to_json(v));
    fam["basis"] = std::move(basis);
    if (a.prov.kind == FamilyProvenance::Jv) fam["block_sizes"] = a.prov.block_sizes;
    if (a.prov.kind == FamilyProvenance::PreorderAlg) {
      ordered_json rel = ordered_json::array();
      for (const auto& row : a.prov.rel) rel.push_back(row);
      fam["rel"] = std::move(rel);
    }
    out["family"] = std::move(fam);
  }
  return out;
}

template <class S>
OperatorAlgebra<S> algebra_from_json(const json& j, const Tolerance& tol = {}) {
  int n = j.at("n").get<int>();
  bool unital = j.at("unital").get<bool>();
  std::vector<Matrix<S>> gens;
  for (const auto& g : j.at("generators")) gens.push_back(matrix_from_json<S>(g));
  auto a = close_algebra<S>(n, gens, unital, tol);
  if (j.contains("family")) {
    const auto& fam = j["family"];
    std::string kind = fam.at("kind").get<std::string>();
    if (kind == "tn") a.prov.kind = FamilyProvenance::Tn;
    else if (kind == "dv") a.prov.kind = FamilyProvenance::Dv;
    else if (kind == "jv") a.prov.kind = FamilyProvenance::Jv;
    else if (kind == "preorder") a.prov.kind = FamilyProvenance::PreorderAlg;
    else a.prov.kind = FamilyProvenance::Generic;
    if (fam.contains("basis"))
      for (const auto& v : fam["basis"]) a.family_basis.push_back(vector_from_json<S>(v));
    if (fam.contains("block_sizes"))
      a.prov.block_sizes = fam["block_sizes"].get<std::vector<int>>();
    if (fam.contains("rel")) {
      a.prov.rel.clear();
      for (const auto& row : fam["rel"]) a.prov.rel.push_back(row.get<std::vector<bool>>());
    }
  }
  return a;
}

// ---------------------------------------------------------------------------
// Channels.
// ---------------------------------------------------------------------------

template <class S>
ordered_json channel_to_json(const KrausChannel<S>& c) {
  ordered_json kraus = ordered_json::array();
  for (const auto& k : c.kraus) kraus.push_back(matrix_to_json(k));
  return ordered_json{{"n", c.n}, {"kraus", std::move(kraus)}};
}

template <class S>
std::vector<KrausChannel<S>> channels_from_json(const json& j, const Tolerance& tol = {}) {
  std::vector<KrausChannel<S>> out;
  auto parse_one = [&](const json& cj) {
    std::vector<Matrix<S>> kraus;
    for (const auto& k : cj.at("kraus")) kraus.push_back(matrix_from_json<S>(k));
    out.push_back(validate_channel<S>(kraus, tol));
  };
  if (j.contains("channels"))
    for (const auto& c : j["channels"]) parse_one(c);
  else
    parse_one(j);
  return out;
}

// Chains and partitions.
template <class S>
ordered_json chain_to_json(const QuantumChain<S>& c) {
  ordered_json vecs = ordered_json::array(), wits = ordered_json::array();
  for (const auto& v : c.vectors) vecs.push_back(vector_to_json(v));
  for (const auto& w : c.witnesses) wits.push_back(matrix_to_json(w));
  return ordered_json{{"length", c.length()}, {"vectors", std::move(vecs)},
                      {"witnesses", std::move(wits)}};
}

template <class S>
ordered_json partition_to_json(const AntichainPartition<S>& p) {
  ordered_json parts = ordered_json::array();
  for (const auto& s : p.parts) parts.push_back(subspace_to_json(s));
  return ordered_json{{"size", p.size()}, {"ordered", p.ordered}, {"parts", std::move(parts)}};
}

}  // namespace opalg
