#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "branchforge/json_io.hpp"
#include "test_util.hpp"

using namespace branchforge;

namespace {

struct RunResult {
  int exit_code = -1;
  Json out;
  std::string raw;
};

int g_run_id = 0;

RunResult run_cli(const std::string& args, const std::string& input) {
  namespace fs = std::filesystem;
  fs::path dir = fs::path("cli_tmp");
  fs::create_directories(dir);
  fs::path in = dir / ("in_" + std::to_string(g_run_id) + ".json");
  fs::path outp = dir / ("out_" + std::to_string(g_run_id) + ".json");
  ++g_run_id;
  {
    std::ofstream f(in);
    f << input;
  }
  std::string cmd = std::string(BRANCHFORGE_BIN) + " " + args + " --input " +
                    in.string() + " > " + outp.string() + " 2> /dev/null";
  int rc = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  std::ifstream f(outp);
  std::stringstream ss;
  ss << f.rdbuf();
  r.raw = ss.str();
  if (!r.raw.empty()) r.out = Json::parse(r.raw, nullptr, false);
  return r;
}

RunResult run_selftest(const std::string& args) {
  namespace fs = std::filesystem;
  fs::path dir = fs::path("cli_tmp");
  fs::create_directories(dir);
  fs::path outp = dir / ("out_" + std::to_string(g_run_id) + ".json");
  ++g_run_id;
  std::string cmd = std::string(BRANCHFORGE_BIN) + " selftest " + args + " > " +
                    outp.string() + " 2> /dev/null";
  int rc = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  std::ifstream f(outp);
  std::stringstream ss;
  ss << f.rdbuf();
  r.raw = ss.str();
  if (!r.raw.empty()) r.out = Json::parse(r.raw, nullptr, false);
  return r;
}

}  // namespace

TEST_CASE("document json round-trip") {
  BranchDocument d;
  d.n = 4;
  d.terms = {{6, Scalar(1)}, {7, Scalar::parse("2-3/4*i")}};
  d.truncation = 30;
  CHECK(document_from_json(document_to_json(d)) == d);

  BranchDocument d2;
  d2.n = 2;
  d2.terms = {{3, Scalar(1)}};
  CHECK(document_from_json(document_to_json(d2)) == d2);

  CHECK_ERRC(document_from_json(Json::parse(R"({"n": 3})")),
             Errc::parse_error);
  CHECK_ERRC(document_from_json(Json::parse(
                 R"({"n": 3, "terms": [[7, "1"]], "extra": 1})")),
             Errc::parse_error);
  CHECK_ERRC(document_from_json(Json::parse(
                 R"({"n": 3, "terms": [[7, "1"], [5, "1"]]})")),
             Errc::parse_error);
  CHECK_ERRC(document_from_json(Json::parse(
                 R"({"n": 3, "terms": [[7, "0"]]})")),
             Errc::parse_error);
  CHECK_ERRC(document_from_json(Json::parse(
                 R"({"n": 3, "terms": [[7, 1]]})")),
             Errc::parse_error);
}

TEST_CASE("cli analyze reports invariants") {
  RunResult r = run_cli("analyze", R"({"n": 2, "terms": [[3, "1"]]})");
  REQUIRE(r.exit_code == 0);
  const Json& inv = r.out.at("invariants");
  CHECK(inv.at("n") == 2);
  CHECK(inv.at("m") == 3);
  CHECK(inv.at("generators") == Json::array({2, 3}));
  CHECK(inv.at("conductor") == 2);
  CHECK(inv.at("lambda") == "infinity");
  CHECK(r.out.at("normal").at("ok") == true);

  RunResult r2 = run_cli("analyze", R"({"n": 4, "terms": [[6, "1"], [7, "1"]]})");
  REQUIRE(r2.exit_code == 0);
  const Json& inv2 = r2.out.at("invariants");
  CHECK(inv2.at("char_exponents") == Json::array({4, 6, 7}));
  CHECK(inv2.at("generators") == Json::array({4, 6, 13}));
  CHECK(inv2.at("conductor") == 16);
  CHECK(inv2.at("gaps") == Json::array({1, 2, 3, 5, 7, 9, 11, 15}));
  CHECK(inv2.at("lambda") == 7);
  CHECK(inv2.at("lambda_set").at("bound") == 20);
}

TEST_CASE("cli analyze handles non-primitive input per flag") {
  const std::string doc = R"({"n": 4, "terms": [[6, "1"], [8, "1"]]})";
  RunResult plain = run_cli("analyze", doc);
  CHECK(plain.exit_code == 2);
  CHECK(plain.out.at("error").at("code") == "SmoothOrDegenerate");
  CHECK(plain.out.at("error").at("internal") == false);

  RunResult prim = run_cli("analyze --primitive", doc);
  REQUIRE(prim.exit_code == 0);
  CHECK(prim.out.at("preprocess").at("primitive_reduction") == 2);
  CHECK(prim.out.at("invariants").at("n") == 2);
  CHECK(prim.out.at("invariants").at("m") == 3);
  CHECK(prim.out.at("invariants").at("generators") == Json::array({2, 3}));
}

TEST_CASE("cli truncation override is visible in the report") {
  RunResult r =
      run_cli("analyze --truncation 40", R"({"n": 2, "terms": [[3, "1"]]})");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.at("invariants").at("truncation") == 40);
}

TEST_CASE("cli reduce emits the normal form with audit") {
  RunResult r = run_cli("reduce", R"({"n": 3, "terms": [[7, "1"], [11, "1"]]})");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.at("steps") == 1);
  const Json& nf = r.out.at("normal_form");
  CHECK(nf.at("n") == 3);
  CHECK(nf.at("m") == 7);
  CHECK(nf.at("lambda") == "infinity");
  CHECK(nf.at("coefficients") == Json::array());
  CHECK(nf.at("document").at("terms") ==
        Json::array({Json::array({7, "1"})}));
  const Json& st = r.out.at("audit").at(0);
  CHECK(st.at("j") == 11);
  CHECK(st.at("beta") == "-7/3");
  CHECK(st.at("s_j") == "3/7");
  CHECK(st.at("probes").size() == 5);

  // Identity reduction: empty audit.
  RunResult r2 = run_cli("reduce", R"({"n": 2, "terms": [[3, "1"]]})");
  REQUIRE(r2.exit_code == 0);
  CHECK(r2.out.at("steps") == 0);
  CHECK(r2.out.at("audit") == Json::array());

  // The t^8 coefficient of (t^4, t^6 + t^7 + t^8) is removable.
  RunResult r3 =
      run_cli("reduce", R"({"n": 4, "terms": [[6, "1"], [7, "1"], [8, "1"]]})");
  REQUIRE(r3.exit_code == 0);
  CHECK(r3.out.at("normal_form").at("coefficients") ==
        Json::array({Json::array({7, "1"})}));
}

TEST_CASE("cli equiv decides and exits accordingly") {
  RunResult eq = run_cli("equiv",
                         R"([{"n": 4, "terms": [[6, "1"], [7, "1"]]},
                             {"n": 4, "terms": [[6, "1"], [7, "2"]]}])");
  CHECK(eq.exit_code == 0);
  CHECK(eq.out.at("equivalent") == true);
  CHECK(eq.out.at("certificate").at("r") == "2");

  RunResult ne = run_cli("equiv",
                         R"({"a": {"n": 2, "terms": [[3, "1"]]},
                             "b": {"n": 2, "terms": [[5, "1"]]}})");
  CHECK(ne.exit_code == 1);
  CHECK(ne.out.at("equivalent") == false);
  CHECK(ne.out.at("certificate").at("reason") == "second generator differs");
  CHECK(ne.out.at("certificate").at("r").is_null());

  RunResult self = run_cli("equiv",
                           R"([{"n": 2, "terms": [[3, "1"]]},
                               {"n": 2, "terms": [[3, "1"]]}])");
  CHECK(self.exit_code == 0);
  CHECK(self.out.at("certificate").at("r") == "1");
}

TEST_CASE("cli rejects malformed input with exit 2") {
  RunResult bad = run_cli("analyze", "this is not json {");
  CHECK(bad.exit_code == 2);
  CHECK(bad.out.at("error").at("code") == "ParseError");

  RunResult missing = run_cli("analyze", R"({"n": 3})");
  CHECK(missing.exit_code == 2);
  CHECK(missing.out.at("error").at("code") == "ParseError");
}

TEST_CASE("cli reports are deterministic modulo timing") {
  const std::string doc = R"({"n": 4, "terms": [[6, "1"], [7, "1"]]})";
  RunResult a = run_cli("analyze", doc);
  RunResult b = run_cli("analyze", doc);
  REQUIRE(a.exit_code == 0);
  REQUIRE(b.exit_code == 0);
  Json ja = a.out;
  Json jb = b.out;
  ja.erase("timing_ms");
  jb.erase("timing_ms");
  CHECK(ja.dump() == jb.dump());
}

TEST_CASE("cli pretty output parses to the same report") {
  const std::string doc = R"({"n": 2, "terms": [[3, "1"]]})";
  RunResult compact = run_cli("analyze", doc);
  RunResult pretty = run_cli("analyze --pretty", doc);
  REQUIRE(compact.exit_code == 0);
  REQUIRE(pretty.exit_code == 0);
  CHECK(pretty.raw.find('\n') != std::string::npos);
  Json ja = compact.out;
  Json jb = pretty.out;
  ja.erase("timing_ms");
  jb.erase("timing_ms");
  CHECK(ja == jb);
}

TEST_CASE("cli selftest runs a small instance budget") {
  RunResult r = run_selftest("--seed 7 --count 1");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.at("passed") == true);
  CHECK(r.out.at("seed") == 7);
  for (const Json& p : r.out.at("properties")) {
    CHECK(p.at("passed") == true);
  }
}
