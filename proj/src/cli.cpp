#include "opalg/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "opalg/fixtures.hpp"
#include "opalg/io.hpp"

namespace opalg::cli {
namespace {

using GQ = GaussianRational;

struct Common {
  std::string backend = "auto";
  uint64_t seed = 0;
  int budget = 50;
  double tolerance = -1;
  double eps_abs = 1e-10, eps_rel = 1e-9, rank_threshold = 1e-8;
  std::string in_path = "-";

  Tolerance tol() const {
    if (tolerance > 0) return Tolerance{tolerance, tolerance, tolerance};
    return Tolerance{eps_abs, eps_rel, rank_threshold};
  }
};

void add_common(CLI::App* cmd, Common* c) {
  cmd->add_option("--backend", c->backend, "exact|numeric|auto (default: auto-detect)");
  cmd->add_option("--seed", c->seed, "seed for randomized searches");
  cmd->add_option("--budget", c->budget, "search budget (iterations)");
  cmd->add_option("--tolerance", c->tolerance, "sets all numeric thresholds at once");
  cmd->add_option("--eps-abs", c->eps_abs, "absolute comparison threshold");
  cmd->add_option("--eps-rel", c->eps_rel, "relative comparison threshold");
  cmd->add_option("--rank-threshold", c->rank_threshold, "pivot/rank cutoff");
  cmd->add_option("--in", c->in_path, "input file (default: stdin)");
}

struct Input {
  std::string source;
  std::string digest;
  json doc;
};

Input read_doc(const std::string& path, std::istream& stdin_) {
  Input in;
  std::string bytes;
  if (path == "-") {
    in.source = "stdin";
    std::ostringstream ss;
    ss << stdin_.rdbuf();
    bytes = ss.str();
  } else {
    in.source = path;
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open input: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    bytes = ss.str();
  }
  in.digest = fnv1a_digest(bytes);
  try {
    in.doc = json::parse(bytes);
  } catch (const std::exception& e) {
    throw ParseError(std::string("input is not valid JSON: ") + e.what());
  }
  return in;
}

Backend pick_backend(const Common& c, const json& doc) {
  if (c.backend == "exact") return Backend::Exact;
  if (c.backend == "numeric") return Backend::Numeric;
  return detect_backend(doc);
}

ordered_json report_header(const std::string& command, const std::vector<Input>& inputs,
                           Backend backend, const Common& c) {
  ordered_json ins = ordered_json::array();
  for (const auto& in : inputs)
    ins.push_back(ordered_json{{"source", in.source}, {"digest", in.digest}});
  Tolerance tol = c.tol();
  return ordered_json{
      {"command", command},
      {"inputs", std::move(ins)},
      {"backend", backend_name(backend)},
      {"seed", c.seed},
      {"budget", c.budget},
      {"tolerance",
       ordered_json{{"eps_abs", tol.eps_abs},
                    {"eps_rel", tol.eps_rel},
                    {"rank_threshold", tol.rank_threshold}}},
  };
}

template <class S>
std::vector<Vector<S>> vectors_from_doc(const json& j) {
  std::vector<Vector<S>> out;
  for (const auto& v : j.at("vectors")) out.push_back(vector_from_json<S>(v));
  return out;
}

template <class S>
bool matrix_upper_triangular_in(const Matrix<S>& m, const std::vector<Vector<S>>& basis,
                                const Tolerance& tol) {
  Matrix<S> mb = matrix_in_basis(m, basis, tol);
  double scale = std::max(1.0, mb.max_abs());
  for (int i = 0; i < mb.rows(); ++i)
    for (int j = 0; j < i; ++j) {
      bool zero = ScalarTraits<S>::exact
                      ? ScalarTraits<S>::is_zero(mb(i, j), tol)
                      : ScalarTraits<S>::approx_abs(mb(i, j)) <= tol.rank_threshold * scale;
      if (!zero) return false;
    }
  return true;
}

// ---------------------------------------------------------------------------
// Analysis commands (templated over the scalar backend).
// ---------------------------------------------------------------------------

template <class S>
std::pair<ordered_json, int> cmd_antisym(const OperatorAlgebra<S>& a) {
  auto rep = is_antisymmetric(a);
  ordered_json v{{"n", a.n()}, {"dim", a.dim()}, {"antisymmetric", rep.antisymmetric},
                 {"method_notes", rep.method_notes}};
  if (rep.witness) v["witness"] = matrix_to_json(*rep.witness);
  return {v, rep.antisymmetric ? 0 : 1};
}

template <class S>
std::pair<ordered_json, int> cmd_hereditary(const OperatorAlgebra<S>& a, const Common& c) {
  auto [lattice, complete] = invariant_lattice(a, c.seed, c.budget);
  auto verdict = is_hereditarily_antisymmetric(a, lattice, complete);
  ordered_json v{{"n", a.n()},
                 {"lattice_size", lattice.size()},
                 {"lattice_complete", complete}};
  int code = 2;
  switch (verdict.status) {
    case Hereditary::Yes:
      v["status"] = "yes";
      code = 0;
      break;
    case Hereditary::No:
      v["status"] = "no";
      code = 1;
      break;
    case Hereditary::Unknown:
      v["status"] = "unknown";
      code = 2;
      break;
  }
  if (verdict.counterexample) {
    const auto& ce = *verdict.counterexample;
    v["counterexample"] = ordered_json{{"e1", subspace_to_json(ce.e1)},
                                       {"e2", subspace_to_json(ce.e2)},
                                       {"witness", matrix_to_json(ce.compressed_witness)}};
  }
  return {v, code};
}

template <class S>
std::pair<ordered_json, int> cmd_triangularize(const OperatorAlgebra<S>& a, const Common& c) {
  std::vector<Subspace<S>> hints;
  if (a.prov.kind != FamilyProvenance::Generic) hints = classify_invariants(a);
  auto res = upper_triangularize(a, hints, c.seed, c.budget);
  ordered_json v{{"n", a.n()}, {"dim", a.dim()}};
  int code = 2;
  if (res.kind == TriangularizationResult<S>::Basis) {
    v["result"] = "basis";
    ordered_json basis = ordered_json::array();
    for (const auto& b : res.basis) basis.push_back(vector_to_json(b));
    v["basis"] = std::move(basis);
    code = 0;
  } else if (res.kind == TriangularizationResult<S>::Obstruction) {
    v["result"] = "obstruction";
    auto comp = compress_to(a, res.obstruction->e);
    v["obstruction"] = ordered_json{{"e1", subspace_to_json(res.obstruction->e1)},
                                    {"e2", subspace_to_json(res.obstruction->e2)},
                                    {"e", subspace_to_json(res.obstruction->e)},
                                    {"compression_dim", comp.alg.dim()}};
    code = 1;
  } else {
    v["result"] = "unknown";
    v["detail"] = "invariant-subspace search budget exhausted";
    code = 2;
  }
  return {v, code};
}

template <class S>
std::pair<ordered_json, int> cmd_jordanesque(const OperatorAlgebra<S>& a, const Common& c) {
  std::vector<Subspace<S>> hints;
  if (a.prov.kind != FamilyProvenance::Generic) hints = classify_invariants(a);
  auto b = jordanesque_basis(a, hints, c.seed, c.budget);
  auto suit = is_suitably_nonorthogonal(b, a.tol());
  ordered_json v{{"n", a.n()},
                 {"basis", block_basis_to_json(b)},
                 {"suitably_nonorthogonal", suit.suitable}};
  if constexpr (!ScalarTraits<S>::exact) v["suitability_margin"] = suit.min_margin;
  return {v, 0};
}

template <class S>
std::pair<ordered_json, int> cmd_idempotent(const Matrix<S>& m,
                                            const std::optional<BlockOrderedBasis<S>>& basis_opt,
                                            const S& lambda, const Tolerance& tol) {
  BlockOrderedBasis<S> b;
  if (basis_opt) {
    b = *basis_opt;
  } else {
    // Finest block-diagonal split of the matrix in the standard basis.
    int n = m.n();
    for (int i = 0; i < n; ++i) b.vectors.push_back(basis_vector<S>(n, i));
    int start = 0;
    for (int cut = 1; cut <= n; ++cut) {
      bool clean = true;
      for (int i = start; i < cut && clean; ++i)
        for (int j = cut; j < n && clean; ++j)
          if (!ScalarTraits<S>::is_zero(m(i, j), tol) || !ScalarTraits<S>::is_zero(m(j, i), tol))
            clean = false;
      if (clean || cut == n) {
        b.block_sizes.push_back(cut - start);
        start = cut;
      }
    }
    b.normalized = true;
  }
  Matrix<S> p = spectral_idempotent_poly(m, b, lambda, tol);
  bool squares = approx_equal(p * p, p, tol);
  bool in_algebra = close_algebra<S>(m.n(), {m}, false, tol).span.contains(p);
  ordered_json v{{"n", m.n()},
                 {"idempotent", matrix_to_json(p)},
                 {"block_sizes", b.block_sizes},
                 {"squares_to_itself", squares},
                 {"in_generated_algebra", in_algebra}};
  return {v, squares && in_algebra ? 0 : 2};
}

template <class S>
std::pair<ordered_json, int> cmd_qposet(const std::string& sub, const OperatorAlgebra<S>& a,
                                        const std::optional<json>& aux, const Common& c) {
  if (!is_nilpotent_algebra(a))
    throw PreconditionError("qposet: the algebra is not nilpotent");
  if (sub == "mirsky") {
    auto chain = max_quantum_chain(a, c.seed);
    auto td = top_down_partition(a);
    auto bu = bottom_up_partition(a);
    int r = power_filtration(a).nilpotency_index;
    bool equal = chain.length() == r && td.size() == r && bu.size() == r;
    ordered_json v{{"nilpotency_index", r},
                   {"max_chain", chain_to_json(chain)},
                   {"top_down_size", td.size()},
                   {"bottom_up_size", bu.size()},
                   {"sizes_equal", equal}};
    return {v, equal ? 0 : 2};
  }
  if (sub == "dilworth") {
    auto chains = dilworth_chain_partition(a, c.seed, c.budget);
    auto filt = power_filtration(a);
    int bound = 0;
    for (size_t i = 0; i + 1 < filt.spans.size(); ++i)
      bound = std::max(bound, filt.spans[i].dim() - filt.spans[i + 1].dim());
    ordered_json cs = ordered_json::array();
    for (const auto& ch : chains) cs.push_back(chain_to_json(ch));
    bool within = static_cast<int>(chains.size()) <= bound;
    ordered_json v{{"size", chains.size()},
                   {"antichain_width_lower_bound", bound},
                   {"size_within_bound", within},
                   {"chains", std::move(cs)}};
    return {v, within ? 0 : 2};
  }
  if (sub == "chains") {
    if (!aux) throw ParseError("qposet chains: --vectors file required");
    auto vecs = vectors_from_doc<S>(*aux);
    auto ver = verify_quantum_chain(a, vecs);
    ordered_json v{{"valid", ver.ok}};
    if (ver.ok)
      v["chain"] = chain_to_json(ver.chain);
    else
      v["failed_step"] = ver.failed_step;
    return {v, ver.ok ? 0 : 1};
  }
  if (sub == "antichains") {
    if (aux) {
      auto e = subspace_from_json<S>(*aux, a.tol());
      bool anti = is_quantum_antichain(a, e);
      ordered_json v{{"antichain", anti}, {"width", e.dim()}};
      return {v, anti ? 0 : 1};
    }
    auto td = top_down_partition(a);
    auto bu = bottom_up_partition(a);
    ordered_json v{{"top_down", partition_to_json(td)}, {"bottom_up", partition_to_json(bu)}};
    return {v, 0};
  }
  throw ParseError("qposet: unknown subcommand " + sub);
}

template <class S>
std::pair<ordered_json, int> cmd_channels(const std::string& sub, const json& doc,
                                          const std::optional<json>& from,
                                          const std::optional<json>& to, int composite,
                                          const Common& c) {
  auto channels = channels_from_json<S>(doc, c.tol());
  if (sub == "validate") {
    ordered_json list = ordered_json::array();
    for (const auto& ch : channels)
      list.push_back(ordered_json{{"n", ch.n},
                                  {"kraus_count", ch.kraus.size()},
                                  {"cptp_residual", ch.cptp_residual}});
    return {ordered_json{{"valid", true}, {"channels", std::move(list)}}, 0};
  }
  auto reach = reachability_algebra<S>(channels, c.tol());
  if (sub == "reach") {
    ordered_json v{{"dim", reach.algebra.dim()},
                   {"algebra", algebra_to_json(reach.algebra)}};
    return {v, 0};
  }
  if (sub == "transition") {
    if (!from || !to) throw ParseError("channels transition: --from and --to files required");
    auto v = vector_from_json<S>(*from);
    auto w = vector_from_json<S>(*to);
    bool possible = composite > 1 ? can_transition_composite(reach, v, w, composite)
                                  : can_transition(reach, v, w);
    return {ordered_json{{"possible", possible}, {"composite", composite}}, possible ? 0 : 1};
  }
  if (sub == "traps") {
    auto [lat, complete] = trap_subspaces(reach, c.seed, c.budget);
    ordered_json subs = ordered_json::array();
    for (const auto& s : lat) subs.push_back(subspace_to_json(s));
    return {ordered_json{{"complete", complete}, {"subspaces", std::move(subs)}}, 0};
  }
  throw ParseError("channels: unknown subcommand " + sub);
}

// ---------------------------------------------------------------------------
// Certificate re-checking (verifier code paths only).
// ---------------------------------------------------------------------------

template <class S>
ordered_json verify_report(const json& report, const Common& c, bool* all_ok) {
  const std::string command = report.at("command").get<std::string>();
  Tolerance tol = c.tol();
  ordered_json checks = ordered_json::array();
  auto add = [&](const std::string& name, bool ok) {
    checks.push_back(ordered_json{{"check", name}, {"ok", ok}});
    *all_ok = *all_ok && ok;
  };
  const json verdicts = report.value("verdicts", json::object());
  const json input_doc = report.value("input_doc", json::object());

  auto load_algebra = [&]() { return algebra_from_json<S>(input_doc, tol); };

  if (command == "antisym") {
    if (!verdicts.at("antisymmetric").get<bool>()) {
      auto a = load_algebra();
      auto w = matrix_from_json<S>(verdicts.at("witness"));
      add("witness_self_adjoint", approx_equal(metric_adjoint(w, a.metric), w, tol));
      add("witness_in_algebra", a.span.contains(w));
      add("witness_not_scalar", !is_scalar_matrix(w, tol));
    } else {
      add("no_certificate_to_check", true);
    }
  } else if (command == "hereditary") {
    if (verdicts.at("status").get<std::string>() == "no") {
      auto a = load_algebra();
      const auto& ce = verdicts.at("counterexample");
      auto e1 = subspace_from_json<S>(ce.at("e1"), tol);
      auto e2 = subspace_from_json<S>(ce.at("e2"), tol);
      auto w = matrix_from_json<S>(ce.at("witness"));
      add("e2_inside_e1", e1.contains(e2));
      add("e1_invariant", is_invariant(a, e1));
      add("e2_invariant", is_invariant(a, e2));
      auto comp = compress_to(a, e1.orth_difference(e2, a.metric));
      add("witness_self_adjoint", approx_equal(metric_adjoint(w, comp.alg.metric), w, tol));
      add("witness_in_compression", comp.alg.span.contains(w));
      add("witness_not_scalar", !is_scalar_matrix(w, tol));
    } else {
      add("no_certificate_to_check", true);
    }
  } else if (command == "triangularize") {
    auto a = load_algebra();
    std::string result = verdicts.at("result").get<std::string>();
    if (result == "basis") {
      std::vector<Vector<S>> basis;
      for (const auto& v : verdicts.at("basis")) basis.push_back(vector_from_json<S>(v));
      bool all_upper = true;
      for (const auto& b : a.basis())
        all_upper = all_upper && matrix_upper_triangular_in(b, basis, tol);
      add("all_elements_upper_triangular", all_upper);
    } else if (result == "obstruction") {
      auto e = subspace_from_json<S>(verdicts.at("obstruction").at("e"), tol);
      auto comp = compress_to(a, e);
      add("full_compression", comp.alg.dim() == e.dim() * e.dim());
      add("dimension_at_least_two", e.dim() >= 2);
    } else {
      add("no_certificate_to_check", true);
    }
  } else if (command == "jordanesque") {
    auto a = load_algebra();
    auto b = block_basis_from_json<S>(verdicts.at("basis"));
    bool all_ok_j = true;
    for (const auto& m : a.basis()) all_ok_j = all_ok_j && jordanesque_check(m, b, tol).ok;
    add("all_elements_jordanesque", all_ok_j);
  } else if (command == "idempotent") {
    auto m = matrix_from_json<S>(input_doc);
    auto p = matrix_from_json<S>(verdicts.at("idempotent"));
    add("squares_to_itself", approx_equal(p * p, p, tol));
    add("commutes", approx_equal(p * m, m * p, tol));
    add("in_generated_algebra", close_algebra<S>(m.n(), {m}, false, tol).span.contains(p));
  } else if (command == "qposet-mirsky") {
    auto a = load_algebra();
    std::vector<Vector<S>> vecs;
    for (const auto& v : verdicts.at("max_chain").at("vectors"))
      vecs.push_back(vector_from_json<S>(v));
    auto ver = verify_quantum_chain(a, vecs);
    add("chain_valid", ver.ok);
    add("chain_length_matches", static_cast<int>(vecs.size()) ==
                                    verdicts.at("nilpotency_index").get<int>());
  } else if (command == "qposet-chains") {
    if (verdicts.at("valid").get<bool>()) {
      auto a = load_algebra();
      std::vector<Vector<S>> vecs;
      for (const auto& v : verdicts.at("chain").at("vectors"))
        vecs.push_back(vector_from_json<S>(v));
      add("chain_valid", verify_quantum_chain(a, vecs).ok);
    } else {
      add("no_certificate_to_check", true);
    }
  } else if (command == "qposet-antichains") {
    auto a = load_algebra();
    if (verdicts.contains("top_down")) {
      for (const auto& key : {"top_down", "bottom_up"}) {
        bool parts_ok = true;
        int total = 0;
        for (const auto& pj : verdicts.at(key).at("parts")) {
          auto part = subspace_from_json<S>(pj, tol);
          parts_ok = parts_ok && is_quantum_antichain(a, part);
          total += part.dim();
        }
        add(std::string(key) + "_parts_are_antichains", parts_ok);
        add(std::string(key) + "_parts_fill_space", total == a.n());
      }
    } else {
      // single-subspace query
      auto e = subspace_from_json<S>(input_doc.at("subspace"), tol);
      add("antichain_claim_matches", is_quantum_antichain(a, e) ==
                                         verdicts.at("antichain").get<bool>());
    }
  } else if (command == "qposet-dilworth") {
    auto a = load_algebra();
    Echelon<S> all(a.n(), tol);
    bool chains_ok = true;
    for (const auto& cj : verdicts.at("chains")) {
      std::vector<Vector<S>> vecs;
      for (const auto& v : cj.at("vectors")) vecs.push_back(vector_from_json<S>(v));
      chains_ok = chains_ok && verify_quantum_chain(a, vecs).ok;
      for (const auto& v : vecs) all.insert(v);
    }
    add("chains_valid", chains_ok);
    add("vectors_form_basis", all.dim() == a.n());
    add("size_within_bound", verdicts.at("size_within_bound").get<bool>());
  } else if (command == "channels-reach") {
    auto channels = channels_from_json<S>(input_doc, tol);
    auto alg = algebra_from_json<S>(verdicts.at("algebra"), tol);
    add("product_stable", is_product_stable(alg));
    bool members = contains_identity(alg);
    for (const auto& ch : channels)
      for (const auto& k : ch.kraus) members = members && alg.span.contains(k);
    add("contains_identity_and_kraus", members);
  } else if (command == "channels-transition") {
    auto channels = channels_from_json<S>(input_doc.at("channels_doc"), tol);
    auto reach = reachability_algebra<S>(channels, tol);
    auto v = vector_from_json<S>(input_doc.at("from"));
    auto w = vector_from_json<S>(input_doc.at("to"));
    int k = verdicts.at("composite").get<int>();
    bool possible = k > 1 ? can_transition_composite(reach, v, w, k)
                          : can_transition(reach, v, w);
    add("transition_claim_matches", possible == verdicts.at("possible").get<bool>());
  } else if (command == "channels-traps") {
    auto channels = channels_from_json<S>(input_doc, tol);
    auto reach = reachability_algebra<S>(channels, tol);
    bool invariant = true;
    for (const auto& sj : verdicts.at("subspaces"))
      invariant = invariant && is_invariant(reach.algebra, subspace_from_json<S>(sj, tol));
    add("all_traps_invariant", invariant);
  } else if (command == "channels-validate") {
    auto channels = channels_from_json<S>(input_doc, tol);  // re-validates CPTP
    add("channels_cptp", !channels.empty());
  } else {
    throw ParseError("verify: no verifier for command " + command);
  }
  return checks;
}

// ---------------------------------------------------------------------------
// Data-producing commands.
// ---------------------------------------------------------------------------

template <class S>
ordered_json build_family(const std::string& kind, int n, const std::optional<json>& basis_doc,
                          const std::optional<json>& preorder_doc, const Tolerance& tol) {
  if (kind == "tn") return algebra_to_json(make_Tn<S>(n, tol));
  if (kind == "dv") {
    if (!basis_doc) throw ParseError("family dv: --basis file required");
    return algebra_to_json(make_Dv<S>(vectors_from_doc<S>(*basis_doc), tol));
  }
  if (kind == "jv") {
    if (!basis_doc) throw ParseError("family jv: --basis block-basis file required");
    return algebra_to_json(make_Jv<S>(block_basis_from_json<S>(*basis_doc), tol));
  }
  if (kind == "preorder") {
    if (!preorder_doc) throw ParseError("family preorder: --preorder file required");
    Preorder p = preorder_from_json(*preorder_doc);
    std::vector<Vector<S>> v;
    if (basis_doc) {
      v = vectors_from_doc<S>(*basis_doc);
    } else {
      for (int i = 0; i < p.n; ++i) v.push_back(basis_vector<S>(p.n, i));
    }
    return algebra_to_json(make_preorder_algebra<S>(p, v, tol));
  }
  throw ParseError("family: unknown kind " + kind);
}

template <class S>
ordered_json build_fixture(const std::string& name, int n, uint64_t seed, const Tolerance& tol) {
  if (name == "ex6-7") return algebra_to_json(fixtures::ex6_7<S>(tol));
  if (name == "ex6-8") return algebra_to_json(fixtures::ex6_8<S>(tol));
  if (name == "ex4-11" || name == "ex4-12") {
    auto fx = fixtures::ex4_11<S>(seed == 0 ? 7 : seed, tol);
    return algebra_to_json(fx.algebra);
  }
  if (name == "tn") return algebra_to_json(make_Tn<S>(n, tol));
  throw ParseError("fixture: unknown name " + name);
}

int emit(const ordered_json& doc, std::ostream& out) {
  out << doc.dump(2) << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  auto started = std::chrono::steady_clock::now();
  Common common;

  CLI::App app{"operator algebra structure toolkit"};
  app.require_subcommand(1);

  // family
  auto* family = app.add_subcommand("family", "construct a structured family algebra");
  std::string family_kind;
  int family_n = 2;
  std::string basis_path, preorder_path;
  family->add_option("kind", family_kind, "tn|dv|jv|preorder")->required();
  family->add_option("--n", family_n, "dimension (tn)");
  family->add_option("--basis", basis_path, "basis / block-basis file");
  family->add_option("--preorder", preorder_path, "preorder file");
  add_common(family, &common);

  // fixture
  auto* fixture = app.add_subcommand("fixture", "emit a bundled example algebra");
  std::string fixture_name;
  int fixture_n = 3;
  fixture->add_option("name", fixture_name, "ex4-11|ex6-7|ex6-8|tn")->required();
  fixture->add_option("--n", fixture_n, "dimension (tn)");
  add_common(fixture, &common);

  // close
  auto* close_cmd = app.add_subcommand("close", "close generators into an algebra file");
  add_common(close_cmd, &common);

  // analyses
  auto* antisym = app.add_subcommand("antisym", "antisymmetry test with witness");
  add_common(antisym, &common);
  auto* hereditary = app.add_subcommand("hereditary", "hereditary antisymmetry verdict");
  add_common(hereditary, &common);
  auto* triangularize = app.add_subcommand("triangularize", "simultaneous upper triangularization");
  add_common(triangularize, &common);
  auto* jordanesque = app.add_subcommand("jordanesque", "block structure basis");
  add_common(jordanesque, &common);

  auto* idempotent = app.add_subcommand("idempotent", "spectral idempotent of a matrix");
  std::string lambda_str = "1";
  std::string idem_basis_path;
  idempotent->add_option("--lambda", lambda_str, "eigenvalue, e.g. \"2\" or \"1/2+0/1 i\"")
      ->required();
  idempotent->add_option("--basis", idem_basis_path, "block-basis file (default: inferred)");
  add_common(idempotent, &common);

  auto* qposet = app.add_subcommand("qposet", "quantum chain/antichain analyses");
  std::string qposet_sub;
  std::string vectors_path, subspace_path;
  qposet->add_option("sub", qposet_sub, "chains|antichains|mirsky|dilworth")->required();
  qposet->add_option("--vectors", vectors_path, "chain vectors file (chains)");
  qposet->add_option("--subspace", subspace_path, "subspace file (antichains)");
  add_common(qposet, &common);

  auto* channels = app.add_subcommand("channels", "Kraus channel analyses");
  std::string channels_sub;
  std::string from_path, to_path;
  int composite = 1;
  channels->add_option("sub", channels_sub, "validate|reach|transition|traps")->required();
  channels->add_option("--from", from_path, "source state vector file");
  channels->add_option("--to", to_path, "target state vector file");
  channels->add_option("--composite", composite, "tensor factor dimension for lifted queries");
  add_common(channels, &common);

  auto* verify = app.add_subcommand("verify", "re-check the certificates in a report");
  add_common(verify, &common);

  std::vector<const char*> argv;
  argv.push_back("opalg");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return 0;
    }
    err << "argument error: " << e.what() << "\n";
    return 2;
  }

  int code = 2;
  try {
    Tolerance tol = common.tol();
    if (family->parsed() || fixture->parsed()) {
      std::optional<json> basis_doc, preorder_doc;
      std::vector<Input> aux;
      if (!basis_path.empty()) {
        aux.push_back(read_doc(basis_path, in));
        basis_doc = aux.back().doc;
      }
      if (!preorder_path.empty()) {
        aux.push_back(read_doc(preorder_path, in));
        preorder_doc = aux.back().doc;
      }
      bool numeric = common.backend == "numeric";
      ordered_json doc;
      if (family->parsed()) {
        doc = numeric ? build_family<Cplx>(family_kind, family_n, basis_doc, preorder_doc, tol)
                      : build_family<GQ>(family_kind, family_n, basis_doc, preorder_doc, tol);
      } else {
        doc = numeric ? build_fixture<Cplx>(fixture_name, fixture_n, common.seed, tol)
                      : build_fixture<GQ>(fixture_name, fixture_n, common.seed, tol);
      }
      code = emit(doc, out);
    } else if (close_cmd->parsed()) {
      Input input = read_doc(common.in_path, in);
      Backend backend = pick_backend(common, input.doc);
      ordered_json doc = backend == Backend::Exact
                             ? algebra_to_json(algebra_from_json<GQ>(input.doc, tol))
                             : algebra_to_json(algebra_from_json<Cplx>(input.doc, tol));
      code = emit(doc, out);
    } else if (verify->parsed()) {
      Input input = read_doc(common.in_path, in);
      Backend backend = input.doc.at("backend").get<std::string>() == "exact" ? Backend::Exact
                                                                              : Backend::Numeric;
      bool all_ok = true;
      ordered_json checks = backend == Backend::Exact
                                ? verify_report<GQ>(input.doc, common, &all_ok)
                                : verify_report<Cplx>(input.doc, common, &all_ok);
      ordered_json rep = report_header("verify", {input}, backend, common);
      rep["verdicts"] = ordered_json{{"verified", all_ok}, {"checks", std::move(checks)}};
      emit(rep, out);
      code = all_ok ? 0 : 1;
    } else {
      // Analysis commands share the input/report scaffolding.
      Input input = read_doc(common.in_path, in);
      std::vector<Input> inputs{input};
      Backend backend = pick_backend(common, input.doc);

      auto finish = [&](const std::string& name, ordered_json verdicts, ordered_json input_doc,
                        int exit_code) {
        ordered_json rep = report_header(name, inputs, backend, common);
        rep["input_doc"] = std::move(input_doc);
        rep["verdicts"] = std::move(verdicts);
        emit(rep, out);
        return exit_code;
      };

      auto dispatch = [&]<class S>() -> int {
        if (antisym->parsed()) {
          auto a = algebra_from_json<S>(input.doc, tol);
          auto [v, c] = cmd_antisym(a);
          return finish("antisym", v, input.doc, c);
        }
        if (hereditary->parsed()) {
          auto a = algebra_from_json<S>(input.doc, tol);
          auto [v, c] = cmd_hereditary(a, common);
          return finish("hereditary", v, input.doc, c);
        }
        if (triangularize->parsed()) {
          auto a = algebra_from_json<S>(input.doc, tol);
          auto [v, c] = cmd_triangularize(a, common);
          return finish("triangularize", v, input.doc, c);
        }
        if (jordanesque->parsed()) {
          auto a = algebra_from_json<S>(input.doc, tol);
          auto [v, c] = cmd_jordanesque(a, common);
          return finish("jordanesque", v, input.doc, c);
        }
        if (idempotent->parsed()) {
          auto m = matrix_from_json<S>(input.doc);
          std::optional<BlockOrderedBasis<S>> basis;
          if (!idem_basis_path.empty()) {
            Input bdoc = read_doc(idem_basis_path, in);
            inputs.push_back(bdoc);
            basis = block_basis_from_json<S>(bdoc.doc);
          }
          S lambda;
          if constexpr (ScalarTraits<S>::exact) {
            lambda = GaussianRational::parse(lambda_str);
          } else {
            lambda = GaussianRational::parse(lambda_str).to_complex();
          }
          auto [v, c] = cmd_idempotent<S>(m, basis, lambda, tol);
          return finish("idempotent", v, input.doc, c);
        }
        if (qposet->parsed()) {
          auto a = algebra_from_json<S>(input.doc, tol);
          std::optional<json> aux;
          if (qposet_sub == "chains" && !vectors_path.empty()) {
            Input vdoc = read_doc(vectors_path, in);
            inputs.push_back(vdoc);
            aux = vdoc.doc;
          }
          if (qposet_sub == "antichains" && !subspace_path.empty()) {
            Input sdoc = read_doc(subspace_path, in);
            inputs.push_back(sdoc);
            aux = sdoc.doc;
          }
          auto [v, c] = cmd_qposet<S>(qposet_sub, a, aux, common);
          if (qposet_sub == "antichains" && aux) {
            // The verifier reads the algebra fields at top level and the
            // queried subspace alongside them.
            json wrapped = input.doc;
            wrapped["subspace"] = *aux;
            return finish("qposet-" + qposet_sub, v, wrapped, c);
          }
          return finish("qposet-" + qposet_sub, v, input.doc, c);
        }
        if (channels->parsed()) {
          std::optional<json> from_doc, to_doc;
          if (!from_path.empty()) {
            Input f = read_doc(from_path, in);
            inputs.push_back(f);
            from_doc = f.doc;
          }
          if (!to_path.empty()) {
            Input t = read_doc(to_path, in);
            inputs.push_back(t);
            to_doc = t.doc;
          }
          auto [v, c] =
              cmd_channels<S>(channels_sub, input.doc, from_doc, to_doc, composite, common);
          json input_doc = input.doc;
          if (channels_sub == "transition")
            input_doc = json{{"channels_doc", input.doc}, {"from", *from_doc}, {"to", *to_doc}};
          return finish("channels-" + channels_sub, v, input_doc, c);
        }
        throw ParseError("no command dispatched");
      };
      code = backend == Backend::Exact ? dispatch.template operator()<GQ>()
                                       : dispatch.template operator()<Cplx>();
    }
  } catch (const AmbiguityError& e) {
    err << "ambiguity: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  auto elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
  err << "elapsed_ms=" << elapsed.count() << "\n";
  return code;
}

}  // namespace opalg::cli
