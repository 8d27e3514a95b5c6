#include "branchforge/selftest.hpp"

#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "branchforge/errors.hpp"

namespace branchforge {

namespace {

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Scalar pick_nonzero(std::mt19937_64& rng) {
  static const Scalar pool[] = {
      Scalar(1),          Scalar(-1),
      Scalar(2),          Scalar(-2),
      Scalar(3),          Scalar(5),
      Scalar::rational(1, 2), Scalar::rational(-1, 2),
      Scalar::rational(3, 4), Scalar::rational(-2, 3),
      Scalar::i(),        -Scalar::i(),
      Scalar(1) + Scalar::i(), Scalar(1) - Scalar::i(),
      Scalar(2) + Scalar::i(), Scalar::rational(1, 3) * Scalar::i()};
  return pool[rng() % (sizeof(pool) / sizeof(pool[0]))];
}

TruncatedSeries random_series(std::mt19937_64& rng, Exp trunc, Exp minval,
                              Exp nterms) {
  TruncatedSeries r(trunc);
  for (Exp k = 0; k < nterms; ++k) {
    if (minval > trunc) break;
    Exp e = minval + Exp(rng() % std::uint64_t(trunc - minval + 1));
    r.set_coeff(e, pick_nonzero(rng));
  }
  return r;
}

struct FaultGuard {
  ~FaultGuard() { testing::set_taylor_recursion_fault(false); }
};

std::string scalar_mismatch(const char* what, const Scalar& got,
                            const Scalar& want) {
  return std::string(what) + ": got " + got.str() + ", want " + want.str();
}

}  // namespace

PuiseuxBranch random_branch(std::uint64_t seed, Exp conductor_cap) {
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 400; ++attempt) {
    const Exp n = 3 + Exp(rng() % 5);
    const Exp m = n + 1 + Exp(rng() % std::uint64_t(2 * n));
    if (m % n == 0) continue;

    std::map<Exp, Scalar> terms;
    terms[m] = Scalar(1);
    if (std::gcd(n, m) > 1) {
      const Exp d = std::gcd(n, m);
      Exp q = 0;
      for (int tries = 0; tries < 50; ++tries) {
        Exp cand = m + 1 + Exp(rng() % std::uint64_t(2 * m));
        if (std::gcd(d, cand) == 1) {
          q = cand;
          break;
        }
      }
      if (q == 0) continue;
      terms[q] = pick_nonzero(rng);
    }

    Exp c0 = 0;
    try {
      std::vector<std::pair<Exp, Scalar>> v(terms.begin(), terms.end());
      c0 = PuiseuxBranch::create(n, v, std::nullopt).conductor();
    } catch (const BranchError&) {
      continue;
    }
    if (c0 > conductor_cap) continue;

    // Fill the window (m, c0) densely for small conductors, sparsely for
    // large ones so reduction stays within the per-branch time budget.
    const Exp width = c0 - m - 1;
    if (width > 0) {
      const Exp keep = (c0 <= 45) ? width : 8 + Exp(rng() % 7);
      for (Exp e = m + 1; e < c0; ++e) {
        if (terms.count(e)) continue;
        if (Exp(rng() % std::uint64_t(width)) < keep)
          terms[e] = pick_nonzero(rng);
      }
    }
    try {
      std::vector<std::pair<Exp, Scalar>> v(terms.begin(), terms.end());
      PuiseuxBranch b = PuiseuxBranch::create(n, v, std::nullopt);
      if (b.conductor() > conductor_cap) continue;
      // A fill below the last characteristic exponent can shrink the
      // conductor below the window the fills were drawn from; drop any
      // term the final conductor rules out. Exponents >= c are never
      // characteristic, so this leaves the invariants alone.
      const Exp cb = b.conductor();
      std::vector<std::pair<Exp, Scalar>> kept;
      for (const auto& term : v) {
        if (term.first < cb) kept.push_back(term);
      }
      if (kept.size() != v.size())
        b = PuiseuxBranch::create(n, kept, std::nullopt);
      return b;
    } catch (const BranchError&) {
      continue;
    }
  }
  fail(Errc::internal, "random branch generator exhausted its attempts");
}

std::vector<PuiseuxBranch> make_corpus(std::uint64_t seed, long long size,
                                       Exp conductor_cap) {
  std::vector<PuiseuxBranch> out;
  out.reserve(std::size_t(size));
  for (long long i = 0; i < size; ++i)
    out.push_back(random_branch(mix(seed, std::uint64_t(i)), conductor_cap));
  return out;
}

VectorField random_eligible_field(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  VectorField E;
  const Exp kx = Exp(rng() % 3);
  for (Exp t = 0; t < kx; ++t) {
    if (rng() % 2 == 0) {
      E.X1 += BivariatePoly::monomial(pick_nonzero(rng), 2 + Exp(rng() % 2), 0);
    } else {
      E.X1 += BivariatePoly::monomial(pick_nonzero(rng), Exp(rng() % 3),
                                      1 + Exp(rng() % 2));
    }
  }
  const Exp ky = Exp(rng() % 3);
  for (Exp t = 0; t < ky; ++t) {
    Exp k = Exp(rng() % 3);
    Exp l = Exp(rng() % 3);
    if (k + l < 2) l = 2 - k;
    E.Y1 += BivariatePoly::monomial(pick_nonzero(rng), k, l);
  }
  check_flow_eligible(E);
  return E;
}

namespace {

// Each property runs one seeded instance and returns "" on success.
using PropFn = std::function<std::string(std::uint64_t)>;

struct Property {
  std::string name;
  PropFn run;
  bool once = false;  // structural checks that need exactly one instance
};

std::string prop_series_ring_laws(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Exp T = 12 + Exp(rng() % 8);
  TruncatedSeries a = random_series(rng, T, 0, 6);
  TruncatedSeries b = random_series(rng, T, 0, 6);
  TruncatedSeries c = random_series(rng, T, 0, 6);
  if (!(((a + b) * c).truncated(T) == (a * c + b * c).truncated(T)))
    return "distributivity failed";
  if (!(((a * b) * c).truncated(T) == (a * (b * c)).truncated(T)))
    return "associativity failed";
  if (!(a * b == b * a)) return "commutativity failed";
  if (!((a * b).derivative().truncated(T - 1) ==
        (a.derivative() * b + a * b.derivative()).truncated(T - 1)))
    return "Leibniz rule failed";
  return "";
}

std::string prop_series_composition(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Exp T = 10 + Exp(rng() % 6);
  TruncatedSeries f = random_series(rng, T, 0, 5);
  TruncatedSeries g = random_series(rng, T, 1, 5);
  TruncatedSeries h = random_series(rng, T, 1, 5);

  TruncatedSeries lhs = compose(compose(f, g), h);
  TruncatedSeries rhs = compose(f, compose(g, h));
  Exp w = std::min(lhs.truncation(), rhs.truncation());
  if (!(lhs.truncated(w) == rhs.truncated(w)))
    return "composition associativity failed";

  TruncatedSeries g1 = random_series(rng, T, 2, 4);
  g1.set_coeff(1, pick_nonzero(rng));
  TruncatedSeries hi = compositional_inverse(g1);
  TruncatedSeries idl = compose(g1, hi);
  TruncatedSeries idr = compose(hi, g1);
  TruncatedSeries tid = TruncatedSeries::monomial(Scalar(1), 1, T);
  if (!(idl == tid.truncated(idl.truncation()) &&
        idr == tid.truncated(idr.truncation())))
    return "compositional inverse roundtrip failed";

  TruncatedSeries u = TruncatedSeries::one(T) + random_series(rng, T, 1, 4);
  const Exp k = 2 + Exp(rng() % 3);
  TruncatedSeries r = nth_root_of_unit_series(u, k);
  TruncatedSeries rk = r;
  for (Exp t = 1; t < k; ++t) rk = (rk * r).truncated(T);
  if (!(rk == u)) return "nth root failed";
  if (!((u * reciprocal(u)).truncated(T) == TruncatedSeries::one(T)))
    return "reciprocal failed";

  TruncatedSeries e = random_series(rng, T, 1, 4);
  TruncatedSeries sub = TruncatedSeries::monomial(Scalar(1), 1, T) +
                        e.shifted(1).truncated(T);
  TruncatedSeries cp = compose_perturbed(f, e, std::nullopt);
  TruncatedSeries cc = compose(f, sub);
  w = std::min(cp.truncation(), cc.truncation());
  if (!(cp.truncated(w) == cc.truncated(w)))
    return "perturbed composition disagrees with plain composition";
  return "";
}

std::string prop_semigroup_gorenstein(std::uint64_t seed) {
  PuiseuxBranch b = random_branch(seed, 120);
  const SemigroupData& sg = b.semigroup();
  const Exp c = sg.conductor;
  for (Exp s = 0; s < c; ++s) {
    if (sg.member(s) == sg.member(c - 1 - s))
      return "Gorenstein symmetry failed at " + std::to_string(s);
  }
  if (Exp(sg.gaps.size()) * 2 != c) return "gap count is not c/2";
  for (Exp g : sg.generators)
    if (!sg.member(g)) return "generator outside the semigroup";
  if (c > 0 && sg.member(c - 1)) return "c-1 must be a gap";
  std::mt19937_64 rng(mix(seed, 1));
  for (int t = 0; t < 16; ++t) {
    Exp s1 = Exp(rng() % std::uint64_t(c + b.n() + 2));
    Exp s2 = Exp(rng() % std::uint64_t(c + b.n() + 2));
    if (sg.member(s1) && sg.member(s2) && !sg.member(s1 + s2))
      return "semigroup not closed under addition";
  }
  return "";
}

std::string prop_staircase_semigroup(std::uint64_t seed) {
  PuiseuxBranch b = random_branch(seed, 60);
  check_semigroup_staircase(b);
  return "";
}

std::string prop_lambda_witnesses(std::uint64_t seed) {
  PuiseuxBranch b = random_branch(seed, 60);
  LambdaData ld = lambda_set(b);
  const SemigroupData& sg = b.semigroup();
  const Exp n = b.n();
  for (Exp s = 0; s + n <= ld.bound; ++s) {
    if (sg.member(s) && !ld.member(s + n))
      return "S + n escapes the contact set at " + std::to_string(s + n);
  }
  std::optional<Exp> lam;
  for (Exp v : ld.orders) {
    if (!sg.member(v)) {
      lam = v - n;
      break;
    }
  }
  if (lam != ld.lambda) return "lambda disagrees with its definition";
  if (ld.lambda && !(b.m() < *ld.lambda && *ld.lambda < sg.conductor))
    return "finite lambda outside (m, c)";
  for (const auto& [v, w] : ld.witnesses) {
    auto got = pullback_order(b, w);
    if (!got || *got != v)
      return "witness pullback order mismatch at " + std::to_string(v);
  }
  return "";
}

std::string prop_contact_transfer(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PuiseuxBranch br = random_branch(mix(seed, 2), 40);
  VectorField E = random_eligible_field(mix(seed, 3));
  const Exp N = br.truncation();
  TruncatedSeries a = E.X1.eval_on_curve(br.x_series(), br.y_series())
                          .truncated(N - 1);
  TruncatedSeries b = E.Y1.eval_on_curve(br.x_series(), br.y_series())
                          .truncated(N - 1);
  TruncatedSeries p = br.x_series().derivative();
  TruncatedSeries q = br.y_series().derivative();
  TruncatedSeries det = a * q - b * p;

  auto col = colinearity_order(a, b, p, q);
  if (auto dv = det.valuation()) {
    if (!col || col->first != *dv || !(col->second == det.coeff(*dv)))
      return "colinearity order disagrees with the determinant";
  } else if (col) {
    return "colinearity order reported for a vanishing determinant";
  }

  TruncatedSeries A = random_series(rng, N, 0, 4);
  TruncatedSeries B = random_series(rng, N, 0, 4);
  TruncatedSeries lhs = p * (A * a + B * b);
  TruncatedSeries rhs = a * (A * p + B * q) - B * det;
  Exp w = std::min(lhs.truncation(), rhs.truncation());
  if (!(lhs.truncated(w) == rhs.truncated(w)))
    return "contact transfer identity failed";
  return "";
}

std::string prop_flow_picard(std::uint64_t seed) {
  PuiseuxBranch b = random_branch(mix(seed, 4), 25);
  VectorField E = random_eligible_field(mix(seed, 5));
  FlowExpansion f = flow_on_branch(E, b);
  FlowExpansion g = picard_flow_oracle(E, b);
  if (!(f == g)) return "flow and Picard expansions differ";
  if (!(f.coeffs.at(0).first == b.x_series() &&
        f.coeffs.at(0).second == b.y_series()))
    return "flow does not start at the branch";
  return "";
}

std::string prop_mutation_sanity(std::uint64_t) {
  PuiseuxBranch b =
      PuiseuxBranch::create(3, {{7, Scalar(1)}, {8, Scalar(1)}}, std::nullopt);
  VectorField E{BivariatePoly::y(), BivariatePoly::monomial(Scalar(1), 2, 0)};
  if (!(flow_on_branch(E, b) == picard_flow_oracle(E, b)))
    return "clean build already disagrees";
  FaultGuard guard;
  testing::set_taylor_recursion_fault(true);
  FlowExpansion faulted = flow_on_branch(E, b);
  testing::set_taylor_recursion_fault(false);
  if (faulted == picard_flow_oracle(E, b))
    return "sign mutation in the recursion went undetected";
  return "";
}

std::string prop_elimination_audit(std::uint64_t seed) {
  PuiseuxBranch b = random_branch(seed, 40);
  NormalForm nf = reduce(b);
  for (const EliminationStep& st : nf.audit) {
    const Scalar aj = st.before.y_coeff(st.j);
    if (st.beta.is_zero()) return "beta vanished";
    for (const auto& [s, cv] : st.probes) {
      if (!(cv == aj + st.beta * s))
        return scalar_mismatch("probe off the affine law", cv,
                               aj + st.beta * s);
    }
    if (!st.after.y_coeff(st.j).is_zero())
      return "eliminated coefficient is nonzero";
    for (Exp e = 1; e < st.j; ++e) {
      if (!(st.after.y_coeff(e) == st.before.y_coeff(e)))
        return "coefficient below j changed at " + std::to_string(e);
    }
  }
  if (!is_normal(nf.branch, nf.lambda_data).ok)
    return "reduce output fails is_normal";
  return "";
}

std::string prop_invariance_coordinate_change(std::uint64_t seed) {
  PuiseuxBranch b = random_branch(seed, 35);
  auto [b0, img] = random_equivalent_pair(b, mix(seed, 6));
  if (b0.semigroup().generators != img.semigroup().generators)
    return "semigroup generators changed";
  if (b0.conductor() != img.conductor()) return "conductor changed";
  LambdaData la = lambda_set(b0);
  LambdaData lb = lambda_set(img);
  if (la.orders != lb.orders) return "contact set changed";
  if (la.lambda != lb.lambda) return "lambda changed";
  return "";
}

std::string prop_equivalent_pair(std::uint64_t seed) {
  PuiseuxBranch b = random_branch(seed, 35);
  auto [b0, img] = random_equivalent_pair(b, mix(seed, 7));
  NormalForm nfa = reduce(b0);
  NormalForm nfb = reduce(img);
  EquivalenceCertificate cert = equivalent(nfa, nfb);
  if (!cert.equivalent)
    return "equivalent pair rejected: " + cert.reason;
  return "";
}

std::string prop_cross_pair(std::uint64_t seed) {
  PuiseuxBranch b1 = random_branch(mix(seed, 8), 35);
  PuiseuxBranch b2 = random_branch(mix(seed, 9), 35);
  if (b1.semigroup().generators == b2.semigroup().generators) {
    b2 = random_branch(mix(seed, 10), 35);
    if (b1.semigroup().generators == b2.semigroup().generators) return "";
  }
  EquivalenceCertificate cert = equivalent(reduce(b1), reduce(b2));
  if (cert.equivalent)
    return "branches with different semigroups reported equivalent";
  if (cert.reason.empty()) return "negative verdict lacks a reason";
  return "";
}

std::string prop_trichotomy(std::uint64_t seed) {
  PuiseuxBranch b = seed % 3 == 0
                        ? PuiseuxBranch::create(
                              4, {{7, Scalar(1)}}, std::nullopt)
                        : random_branch(seed, 40);
  NormalForm nf = reduce(b);
  if (nf.lambda) {
    if (!(nf.m < *nf.lambda && *nf.lambda < nf.semigroup.conductor))
      return "finite lambda outside (m, c)";
    if (nf.branch.y_coeff(*nf.lambda).is_zero())
      return "lambda coefficient missing from the normal form";
  } else {
    if (nf.branch.y_terms() != std::map<Exp, Scalar>{{nf.m, Scalar(1)}})
      return "infinite lambda but the normal form is not (t^n, t^m)";
  }
  return "";
}

std::string prop_renormalize_exactness(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PuiseuxBranch b = random_branch(mix(seed, 11), 35);
  const Exp N = b.truncation();
  // Substitute a random tangent-to-identity reparametrization and undo it.
  TruncatedSeries g = TruncatedSeries::monomial(Scalar(1), 1, N) +
                      random_series(rng, N, 2, 4);
  TruncatedSeries xs = compose(b.x_series(), g);
  TruncatedSeries ys = compose(b.y_series(), g);
  auto [t_of_u, yn] = renormalize_series(xs, ys);

  TruncatedSeries back = compose(xs, t_of_u);
  TruncatedSeries un =
      TruncatedSeries::monomial(Scalar(1), b.n(), back.truncation());
  if (!(back.truncated(un.truncation()) == un))
    return "x does not return to u^n under the computed reparametrization";

  TruncatedSeries yc = compose(ys, t_of_u);
  Exp w = std::min(yn.truncation(), yc.truncation());
  if (!(yn.truncated(w) == yc.truncated(w)))
    return "renormalized y disagrees with direct composition";

  std::vector<std::pair<Exp, Scalar>> terms;
  for (const auto& [e, cc] : yn.terms())
    if (e < b.conductor() || e == b.m()) terms.emplace_back(e, cc);
  PuiseuxBranch img = PuiseuxBranch::create(b.n(), terms, std::nullopt);
  if (img.char_exponents() != b.char_exponents())
    return "reparametrization changed the characteristic exponents";
  if (img.conductor() != b.conductor())
    return "reparametrization changed the conductor";
  return "";
}

const std::vector<Property>& properties() {
  static const std::vector<Property> props = {
      {"series-ring-laws", prop_series_ring_laws},
      {"series-composition", prop_series_composition},
      {"semigroup-gorenstein", prop_semigroup_gorenstein},
      {"staircase-semigroup", prop_staircase_semigroup},
      {"lambda-witnesses", prop_lambda_witnesses},
      {"contact-transfer", prop_contact_transfer},
      {"flow-picard-agreement", prop_flow_picard},
      {"mutation-sanity", prop_mutation_sanity, true},
      {"elimination-audit", prop_elimination_audit},
      {"invariance-coordinate-change", prop_invariance_coordinate_change},
      {"equivalent-pair-end-to-end", prop_equivalent_pair},
      {"cross-pair-negative", prop_cross_pair},
      {"trichotomy", prop_trichotomy},
      {"renormalize-exactness", prop_renormalize_exactness},
  };
  return props;
}

}  // namespace

std::vector<PropertyResult> run_selftest(std::uint64_t seed, long long count) {
  require(count >= 1, Errc::parse_error, "count must be positive");
  std::vector<PropertyResult> out;
  const auto& props = properties();
  for (std::size_t pi = 0; pi < props.size(); ++pi) {
    const Property& prop = props[pi];
    PropertyResult res;
    res.name = prop.name;
    const long long reps = prop.once ? 1 : count;
    for (long long k = 0; k < reps; ++k) {
      const std::uint64_t iseed = mix(mix(seed, std::uint64_t(pi)), k);
      std::string detail;
      try {
        detail = prop.run(iseed);
      } catch (const BranchError& e) {
        detail = e.what();
      } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
      }
      ++res.instances;
      if (!detail.empty()) {
        res.passed = false;
        std::ostringstream os;
        os << detail << " [property " << prop.name << ", instance " << k
           << ", seed " << seed << "]";
        res.detail = os.str();
        break;
      }
    }
    out.push_back(std::move(res));
  }
  return out;
}

Json selftest_report(std::uint64_t seed, long long count, bool& all_passed) {
  std::vector<PropertyResult> results = run_selftest(seed, count);
  all_passed = true;
  Json rep;
  rep["command"] = "selftest";
  rep["seed"] = seed;
  rep["count"] = count;
  Json props = Json::array();
  for (const PropertyResult& r : results) {
    Json p;
    p["name"] = r.name;
    p["instances"] = r.instances;
    p["passed"] = r.passed;
    if (!r.passed) {
      p["detail"] = r.detail;
      all_passed = false;
    }
    props.push_back(std::move(p));
  }
  rep["properties"] = props;
  rep["passed"] = all_passed;
  return rep;
}

}  // namespace branchforge
