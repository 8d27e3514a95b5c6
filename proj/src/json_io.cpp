#include "branchforge/json_io.hpp"

#include <chrono>
#include <numeric>

#include "branchforge/errors.hpp"

namespace branchforge {

namespace {

Exp json_exp(const Json& j, const char* what) {
  require(j.is_number_integer(), Errc::parse_error,
          std::string(what) + " must be an integer");
  return j.get<Exp>();
}

class Stopwatch {
 public:
  Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
  long long ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - t0_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

Json scalar_json(const Scalar& s) { return Json(s.str()); }

Json terms_json(const std::vector<std::pair<Exp, Scalar>>& terms) {
  Json a = Json::array();
  for (const auto& [e, c] : terms) a.push_back(Json::array({e, c.str()}));
  return a;
}

Json lambda_json(const std::optional<Exp>& lam) {
  if (lam) return Json(*lam);
  return Json("infinity");
}

// Shared front half of every command: optional gcd reduction, truncation
// override, then preprocess down to a clean branch.
struct Prepared {
  Preprocessed pp;
  Json meta = Json::object();
};

Prepared prepare(const BranchDocument& doc, const CommandOptions& opt) {
  Prepared out;
  Exp n = doc.n;
  std::vector<std::pair<Exp, Scalar>> terms = doc.terms;
  if (opt.primitive) {
    Exp g = n;
    for (const auto& [e, c] : terms) g = std::gcd(g, e);
    if (g > 1) {
      n /= g;
      for (auto& [e, c] : terms) e /= g;
      out.meta["primitive_reduction"] = g;
    }
  }
  std::optional<Exp> trunc = doc.truncation;
  if (opt.truncation) trunc = opt.truncation;
  out.pp = preprocess(n, terms, trunc);
  if (!out.pp.subtracted.empty())
    out.meta["subtracted"] = terms_json(out.pp.subtracted);
  if (!out.pp.y_scale.is_one())
    out.meta["y_scale"] = scalar_json(out.pp.y_scale);
  return out;
}

Json invariants_json(const PuiseuxBranch& b, const LambdaData& ld) {
  Json inv;
  inv["n"] = b.n();
  inv["m"] = b.m();
  inv["char_exponents"] = b.char_exponents();
  const SemigroupData& sg = b.semigroup();
  inv["generators"] = sg.generators;
  inv["conductor"] = sg.conductor;
  inv["gaps"] = sg.gaps;
  inv["lambda_set"] = Json{{"bound", ld.bound}, {"orders", ld.orders}};
  inv["lambda"] = lambda_json(ld.lambda);
  inv["truncation"] = b.truncation();
  return inv;
}

Json normal_check_json(const NormalCheck& ck) {
  Json j;
  j["ok"] = ck.ok;
  if (!ck.ok) {
    j["violation"] = *ck.violation;
    j["detail"] = ck.detail;
  }
  return j;
}

Json normal_form_json(const NormalForm& nf) {
  Json j;
  j["n"] = nf.n;
  j["m"] = nf.m;
  j["lambda"] = lambda_json(nf.lambda);
  Json coeffs = Json::array();
  for (const auto& [e, c] : nf.coefficients)
    coeffs.push_back(Json::array({e, c.str()}));
  j["coefficients"] = coeffs;
  j["document"] = document_to_json(BranchDocument{
      nf.branch.n(),
      {nf.branch.y_terms().begin(), nf.branch.y_terms().end()},
      nf.branch.truncation()});
  return j;
}

Json audit_json(const std::vector<EliminationStep>& audit) {
  Json a = Json::array();
  for (const auto& st : audit) {
    Json s;
    s["j"] = st.j;
    s["omega"] = form_to_json(st.omega);
    s["beta"] = scalar_json(st.beta);
    s["s_j"] = scalar_json(st.s_j);
    Json probes = Json::array();
    for (const auto& [sv, cv] : st.probes)
      probes.push_back(Json::array({sv.str(), cv.str()}));
    s["probes"] = probes;
    a.push_back(std::move(s));
  }
  return a;
}

}  // namespace

BranchDocument document_from_json(const Json& j) {
  require(j.is_object(), Errc::parse_error, "document must be a JSON object");
  for (const auto& [key, val] : j.items()) {
    require(key == "n" || key == "terms" || key == "truncation",
            Errc::parse_error, "unknown document field: " + key);
  }
  require(j.contains("n"), Errc::parse_error, "document lacks \"n\"");
  require(j.contains("terms"), Errc::parse_error, "document lacks \"terms\"");
  BranchDocument d;
  d.n = json_exp(j.at("n"), "n");
  require(d.n >= 1, Errc::parse_error, "n must be positive");
  const Json& ts = j.at("terms");
  require(ts.is_array(), Errc::parse_error, "terms must be an array");
  Exp prev = 0;
  for (const Json& t : ts) {
    require(t.is_array() && t.size() == 2, Errc::parse_error,
            "each term must be [exponent, scalar-string]");
    Exp e = json_exp(t.at(0), "term exponent");
    require(e > prev, Errc::parse_error,
            "term exponents must be positive and strictly increasing");
    prev = e;
    require(t.at(1).is_string(), Errc::parse_error,
            "term coefficient must be a string");
    Scalar c = Scalar::parse(t.at(1).get<std::string>());
    require(!c.is_zero(), Errc::parse_error,
            "term coefficient must be nonzero");
    d.terms.emplace_back(e, c);
  }
  if (j.contains("truncation")) {
    d.truncation = json_exp(j.at("truncation"), "truncation");
    require(*d.truncation > 0, Errc::parse_error,
            "truncation must be positive");
  }
  return d;
}

Json document_to_json(const BranchDocument& d) {
  Json j;
  j["n"] = d.n;
  j["terms"] = terms_json(d.terms);
  if (d.truncation) j["truncation"] = *d.truncation;
  return j;
}

Json document_for_branch(const PuiseuxBranch& b) {
  return document_to_json(BranchDocument{
      b.n(), {b.y_terms().begin(), b.y_terms().end()}, b.truncation()});
}

Json form_to_json(const DifferentialForm& w) {
  auto poly = [](const BivariatePoly& p) {
    Json a = Json::array();
    for (const auto& [ab, c] : p.terms())
      a.push_back(Json::array({ab.first, ab.second, c.str()}));
    return a;
  };
  return Json{{"A", poly(w.A)}, {"B", poly(w.B)}};
}

Json error_to_json(const BranchError& e) {
  return Json{{"error",
               Json{{"code", errc_name(e.code())},
                    {"internal", errc_is_internal(e.code())},
                    {"message", e.what()}}}};
}

Json analyze_report(const BranchDocument& doc, const CommandOptions& opt) {
  Stopwatch sw;
  Json rep;
  rep["command"] = "analyze";
  rep["input"] = document_to_json(doc);
  Prepared pr = prepare(doc, opt);
  if (!pr.meta.empty()) rep["preprocess"] = pr.meta;
  const PuiseuxBranch& b = pr.pp.branch;
  check_semigroup_staircase(b);
  LambdaData ld = lambda_set(b);
  rep["invariants"] = invariants_json(b, ld);
  rep["normal"] = normal_check_json(is_normal(b, ld));
  rep["timing_ms"] = sw.ms();
  return rep;
}

Json reduce_report(const BranchDocument& doc, const CommandOptions& opt) {
  Stopwatch sw;
  Json rep;
  rep["command"] = "reduce";
  rep["input"] = document_to_json(doc);
  Prepared pr = prepare(doc, opt);
  if (!pr.meta.empty()) rep["preprocess"] = pr.meta;
  NormalForm nf = reduce(pr.pp.branch);
  rep["invariants"] = invariants_json(nf.branch, nf.lambda_data);
  rep["normal_form"] = normal_form_json(nf);
  rep["steps"] = nf.audit.size();
  rep["audit"] = audit_json(nf.audit);
  rep["timing_ms"] = sw.ms();
  return rep;
}

Json equiv_report(const BranchDocument& da, const BranchDocument& db,
                  const CommandOptions& opt, bool& equivalent_out) {
  Stopwatch sw;
  Json rep;
  rep["command"] = "equiv";
  Prepared pa = prepare(da, opt);
  Prepared pb = prepare(db, opt);
  NormalForm nfa = reduce(pa.pp.branch);
  NormalForm nfb = reduce(pb.pp.branch);
  rep["a"] = Json{{"input", document_to_json(da)},
                  {"normal_form", normal_form_json(nfa)}};
  rep["b"] = Json{{"input", document_to_json(db)},
                  {"normal_form", normal_form_json(nfb)}};
  EquivalenceCertificate cert = equivalent(nfa, nfb);
  rep["equivalent"] = cert.equivalent;
  Json cj;
  Json cons = Json::array();
  for (const auto& [e, c] : cert.constraints)
    cons.push_back(Json::array({e, c.str()}));
  cj["constraints"] = cons;
  cj["r"] = cert.r ? Json(cert.r->str()) : Json(nullptr);
  if (!cert.equivalent) cj["reason"] = cert.reason;
  rep["certificate"] = cj;
  rep["timing_ms"] = sw.ms();
  equivalent_out = cert.equivalent;
  return rep;
}

}  // namespace branchforge
