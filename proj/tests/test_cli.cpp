#include "doctest.h"

#include <fstream>
#include <sstream>

#include "opalg/cli.hpp"
#include "opalg/fixtures.hpp"
#include "opalg/io.hpp"

using namespace opalg;
using GQ = GaussianRational;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::vector<std::string>& args, const std::string& stdin_bytes = "") {
  std::istringstream in(stdin_bytes);
  std::ostringstream out, err;
  int code = cli::run(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::string write_temp(const std::string& name, const std::string& bytes) {
  std::string path = "/tmp/opalg_test_" + name;
  std::ofstream f(path);
  f << bytes;
  return path;
}

}  // namespace

TEST_CASE("matrix documents round-trip bit-exactly in exact mode") {
  Matrix<GQ> m(2, 2);
  m(0, 0) = GQ(1, 3, -2, 7);
  m(0, 1) = GQ(0, 1, 5, 2);
  m(1, 1) = GQ(-4, 1, 0, 1);
  auto j = matrix_to_json(m);
  auto parsed = matrix_from_json<GQ>(json::parse(j.dump()));
  CHECK(approx_equal(parsed, m));
  CHECK(matrix_to_json(parsed).dump() == j.dump());
}

TEST_CASE("numeric documents round-trip through decimal serialization") {
  Matrix<Cplx> m(2, 2);
  m(0, 0) = Cplx(1.0 / 3.0, -0.125);
  m(1, 0) = Cplx(2.7182818284590452, 3.141592653589793);
  auto j = matrix_to_json(m);
  auto parsed = matrix_from_json<Cplx>(json::parse(j.dump()));
  for (int i = 0; i < 2; ++i)
    for (int c = 0; c < 2; ++c) CHECK(parsed(i, c) == m(i, c));  // bit-exact doubles
  CHECK(matrix_to_json(parsed).dump() == j.dump());
}

TEST_CASE("algebra documents preserve provenance") {
  auto tn = make_Tn<GQ>(3);
  auto j = algebra_to_json(tn);
  auto back = algebra_from_json<GQ>(json::parse(j.dump()));
  CHECK(back.prov.kind == FamilyProvenance::Tn);
  CHECK(back.span.equals(tn.span));
  CHECK(back.family_basis.size() == 3);
}

TEST_CASE("family | antisym pipeline and exit codes") {
  auto fam = run_cli({"family", "tn", "--n", "3"});
  REQUIRE(fam.code == 0);
  auto rep = run_cli({"antisym"}, fam.out);
  CHECK(rep.code == 0);
  auto parsed = json::parse(rep.out);
  CHECK(parsed["command"] == "antisym");
  CHECK(parsed["verdicts"]["antisymmetric"] == true);
  CHECK(parsed["backend"] == "exact");

  // A full matrix algebra is a negative verdict: exit 1 with a witness.
  ordered_json full{{"n", 2},
                    {"unital", true},
                    {"generators", ordered_json::array(
                                       {matrix_to_json(Matrix<GQ>::unit(2, 0, 1)),
                                        matrix_to_json(Matrix<GQ>::unit(2, 1, 0))})}};
  auto neg = run_cli({"antisym"}, full.dump());
  CHECK(neg.code == 1);
  CHECK(json::parse(neg.out)["verdicts"].contains("witness"));

  auto garbage = run_cli({"antisym"}, "not json");
  CHECK(garbage.code == 2);
}

TEST_CASE("reports are byte-identical across runs") {
  auto fam = run_cli({"fixture", "ex6-7"});
  auto r1 = run_cli({"qposet", "mirsky", "--seed", "3"}, fam.out);
  auto r2 = run_cli({"qposet", "mirsky", "--seed", "3"}, fam.out);
  CHECK(r1.out == r2.out);
  CHECK(!r1.out.empty());
}

TEST_CASE("hereditary uses family lattices and certifies failures") {
  auto fam = run_cli({"family", "tn", "--n", "3"});
  auto yes = run_cli({"hereditary"}, fam.out);
  CHECK(yes.code == 0);
  CHECK(json::parse(yes.out)["verdicts"]["status"] == "yes");

  // Without provenance the lattice is incomplete: Unknown, exit 2.
  auto doc = json::parse(fam.out);
  doc.erase("family");
  auto unknown = run_cli({"hereditary"}, doc.dump());
  CHECK(unknown.code == 2);
  CHECK(json::parse(unknown.out)["verdicts"]["status"] == "unknown");
}

TEST_CASE("verify re-checks certificates and notices tampering") {
  auto fam = run_cli({"fixture", "ex4-11"});
  auto tri = run_cli({"triangularize"}, fam.out);
  CHECK(tri.code == 1);  // obstruction

  auto ver = run_cli({"verify"}, tri.out);
  CHECK(ver.code == 0);
  CHECK(json::parse(ver.out)["verdicts"]["verified"] == true);

  // Tamper with the obstruction subspace: verification must fail.
  auto doc = json::parse(tri.out);
  doc["verdicts"]["obstruction"]["e"]["basis"].erase(1);
  auto bad = run_cli({"verify"}, doc.dump());
  CHECK(bad.code == 1);
}

TEST_CASE("idempotent command") {
  Matrix<GQ> m(3, 3);
  m(0, 0) = m(1, 1) = GQ(2);
  m(0, 1) = GQ(1);
  m(2, 2) = GQ(3);
  auto res = run_cli({"idempotent", "--lambda", "2"}, matrix_to_json(m).dump());
  REQUIRE(res.code == 0);
  auto rep = json::parse(res.out);
  CHECK(rep["verdicts"]["squares_to_itself"] == true);
  CHECK(rep["verdicts"]["in_generated_algebra"] == true);
  CHECK(rep["verdicts"]["block_sizes"] == std::vector<int>{2, 1});
  auto ver = run_cli({"verify"}, res.out);
  CHECK(ver.code == 0);
}

TEST_CASE("qposet chains command with a vectors file") {
  auto fam = run_cli({"fixture", "ex6-7"});
  ordered_json vectors{{"n", 8}, {"vectors", ordered_json::array()}};
  auto evec = [&](std::initializer_list<int> idx) {
    Vector<GQ> v = zero_vector<GQ>(8);
    for (int i : idx) v[i] = GQ(1);
    return vector_to_json(v);
  };
  vectors["vectors"].push_back(evec({0}));
  vectors["vectors"].push_back(evec({2, 5}));
  vectors["vectors"].push_back(evec({3, 6}));
  vectors["vectors"].push_back(evec({4, 7}));
  auto path = write_temp("chain_vectors.json", vectors.dump());
  auto res = run_cli({"qposet", "chains", "--vectors", path}, fam.out);
  REQUIRE(res.code == 0);
  CHECK(json::parse(res.out)["verdicts"]["valid"] == true);
  auto ver = run_cli({"verify"}, res.out);
  CHECK(ver.code == 0);
}

TEST_CASE("channels commands") {
  // Exact block-diagonal channel on C^4.
  Matrix<GQ> k1(4, 4), k2(4, 4);
  k1(0, 0) = k1(1, 1) = GQ(1);
  k2(2, 2) = k2(3, 3) = GQ(1);
  ordered_json chan{{"n", 4},
                    {"kraus", ordered_json::array({matrix_to_json(k1), matrix_to_json(k2)})}};

  auto val = run_cli({"channels", "validate"}, chan.dump());
  CHECK(val.code == 0);

  auto reach = run_cli({"channels", "reach"}, chan.dump());
  CHECK(reach.code == 0);
  auto ver = run_cli({"verify"}, reach.out);
  CHECK(ver.code == 0);

  auto from = write_temp("from.json", vector_to_json(basis_vector<GQ>(4, 0)).dump());
  auto to = write_temp("to.json", vector_to_json(basis_vector<GQ>(4, 2)).dump());
  auto trans = run_cli({"channels", "transition", "--from", from, "--to", to}, chan.dump());
  CHECK(trans.code == 1);  // cross-block transition impossible
  CHECK(json::parse(trans.out)["verdicts"]["possible"] == false);
  auto tver = run_cli({"verify"}, trans.out);
  CHECK(tver.code == 0);

  auto traps = run_cli({"channels", "traps"}, chan.dump());
  CHECK(traps.code == 0);
  auto trver = run_cli({"verify"}, traps.out);
  CHECK(trver.code == 0);

  // CPTP violation is an error.
  ordered_json bad{{"n", 2},
                   {"kraus", ordered_json::array({matrix_to_json(GQ(2) *
                                                                 Matrix<GQ>::identity(2))})}};
  CHECK(run_cli({"channels", "validate"}, bad.dump()).code == 2);
}

TEST_CASE("fixture outputs match the committed files") {
  for (const std::string name : {"ex4-11", "ex6-7", "ex6-8"}) {
    auto res = run_cli({"fixture", name});
    REQUIRE(res.code == 0);
    std::ifstream f("fixtures/" + name + ".json");
    if (!f) {
      // Running from the build tree: fall back to the source-relative path.
      f.open("../fixtures/" + name + ".json");
    }
    REQUIRE_MESSAGE(f.good(), ("missing committed fixture for " + name).c_str());
    std::ostringstream committed;
    committed << f.rdbuf();
    CHECK(res.out == committed.str());
  }
}
