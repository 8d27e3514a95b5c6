#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "branchforge/json_io.hpp"
#include "branchforge/selftest.hpp"

namespace bf = branchforge;

namespace {

bool log_enabled() {
  const char* v = std::getenv("BRANCHFORGE_LOG");
  return v != nullptr && *v != '\0';
}

void logline(const std::string& s) {
  if (log_enabled()) std::cerr << "[branchforge] " << s << "\n";
}

bf::Json read_json(const std::string& path) {
  try {
    if (path.empty() || path == "-") {
      return bf::Json::parse(std::cin);
    }
    std::ifstream in(path);
    if (!in) {
      bf::fail(bf::Errc::parse_error, "cannot open input file: " + path);
    }
    return bf::Json::parse(in);
  } catch (const bf::Json::parse_error& e) {
    bf::fail(bf::Errc::parse_error, std::string("invalid JSON: ") + e.what());
  }
}

void write_json(const std::string& path, const bf::Json& j, bool pretty) {
  std::string text = pretty ? j.dump(2) : j.dump();
  text += "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) {
    bf::fail(bf::Errc::parse_error, "cannot open output file: " + path);
  }
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "branchforge: exact analytic invariants and normal forms of plane "
      "curve branches"};
  app.require_subcommand(1);

  std::string input = "-";
  std::string output = "-";
  long long truncation = 0;
  bool pretty = false;
  bool json_flag = false;
  bool primitive = false;
  std::uint64_t seed = 1;
  long long count = 10;

  auto add_common = [&](CLI::App* cmd, bool with_input) {
    if (with_input)
      cmd->add_option("--input", input, "input file, - for stdin");
    cmd->add_option("--output", output, "output file, - for stdout");
    cmd->add_flag("--json", json_flag, "compact JSON output (default)");
    cmd->add_flag("--pretty", pretty, "pretty-printed JSON output");
  };
  auto add_branch_opts = [&](CLI::App* cmd) {
    cmd->add_option("--truncation", truncation,
                    "override the working t-truncation");
    cmd->add_flag("--primitive", primitive,
                  "divide out a common gcd of n and all exponents");
  };

  CLI::App* analyze = app.add_subcommand(
      "analyze", "semigroup, contact set and Zariski invariant of a branch");
  add_common(analyze, true);
  add_branch_opts(analyze);

  CLI::App* reduce_cmd = app.add_subcommand(
      "reduce", "eliminate removable terms down to the normal form");
  add_common(reduce_cmd, true);
  add_branch_opts(reduce_cmd);

  CLI::App* equiv = app.add_subcommand(
      "equiv",
      "decide analytic equivalence of two branches "
      "(input: [docA, docB] or {\"a\":..., \"b\":...})");
  add_common(equiv, true);
  add_branch_opts(equiv);

  CLI::App* selftest =
      app.add_subcommand("selftest", "run the seeded property suites");
  add_common(selftest, false);
  selftest->add_option("--seed", seed, "base random seed");
  selftest->add_option("--count", count, "instances per property");

  CLI11_PARSE(app, argc, argv);

  try {
    bf::CommandOptions opt;
    if (truncation > 0) opt.truncation = truncation;
    opt.primitive = primitive;

    if (app.got_subcommand(analyze)) {
      bf::BranchDocument doc = bf::document_from_json(read_json(input));
      logline("analyze: n=" + std::to_string(doc.n) + ", " +
              std::to_string(doc.terms.size()) + " terms");
      write_json(output, bf::analyze_report(doc, opt), pretty);
      return 0;
    }
    if (app.got_subcommand(reduce_cmd)) {
      bf::BranchDocument doc = bf::document_from_json(read_json(input));
      logline("reduce: n=" + std::to_string(doc.n) + ", " +
              std::to_string(doc.terms.size()) + " terms");
      bf::Json rep = bf::reduce_report(doc, opt);
      logline("reduce: " + std::to_string(rep["steps"].get<long long>()) +
              " elimination steps");
      write_json(output, rep, pretty);
      return 0;
    }
    if (app.got_subcommand(equiv)) {
      bf::Json j = read_json(input);
      bf::BranchDocument da, db;
      if (j.is_array() && j.size() == 2) {
        da = bf::document_from_json(j.at(0));
        db = bf::document_from_json(j.at(1));
      } else if (j.is_object() && j.contains("a") && j.contains("b")) {
        da = bf::document_from_json(j.at("a"));
        db = bf::document_from_json(j.at("b"));
      } else {
        bf::fail(bf::Errc::parse_error,
                 "equiv expects [docA, docB] or {\"a\":..., \"b\":...}");
      }
      bool eq = false;
      bf::Json rep = bf::equiv_report(da, db, opt, eq);
      logline(std::string("equiv: ") + (eq ? "equivalent" : "not equivalent"));
      write_json(output, rep, pretty);
      return eq ? 0 : 1;
    }
    if (app.got_subcommand(selftest)) {
      logline("selftest: seed=" + std::to_string(seed) +
              ", count=" + std::to_string(count));
      bool ok = false;
      bf::Json rep = bf::selftest_report(seed, count, ok);
      write_json(output, rep, pretty);
      return ok ? 0 : 4;
    }
  } catch (const bf::BranchError& e) {
    logline(e.what());
    std::cout << bf::error_to_json(e).dump() << "\n";
    return bf::errc_is_internal(e.code()) ? 3 : 2;
  } catch (const std::exception& e) {
    logline(e.what());
    bf::Json ej{{"error",
                 bf::Json{{"code", "InternalError"},
                          {"internal", true},
                          {"message", e.what()}}}};
    std::cout << ej.dump() << "\n";
    return 3;
  }
  return 0;
}
