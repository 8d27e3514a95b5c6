#include "branchforge/normalform.hpp"

#include <random>

#include "branchforge/errors.hpp"

namespace branchforge {

PuiseuxBranch truncate_at_conductor(const PuiseuxBranch& b) {
  const Exp c = b.conductor();
  std::vector<std::pair<Exp, Scalar>> terms;
  for (const auto& [e, cc] : b.y_terms()) {
    if (e < c || e == b.m()) terms.emplace_back(e, cc);
  }
  PuiseuxBranch r = PuiseuxBranch::create(b.n(), terms, b.truncation());
  require(r.char_exponents() == b.char_exponents() &&
              r.semigroup().generators == b.semigroup().generators &&
              r.conductor() == c,
          Errc::internal, "conductor truncation changed the semigroup");
  return r;
}

NormalCheck is_normal(const PuiseuxBranch& b, const LambdaData& ld) {
  NormalCheck r;
  const Exp n = b.n();
  const Exp m = b.m();
  const Exp c = b.conductor();
  for (const auto& [e, cc] : b.y_terms()) {
    if (e == m) continue;
    if (e > m && e >= c) {
      r.ok = false;
      r.violation = e;
      r.detail = "support reaches the conductor at exponent " +
                 std::to_string(e);
      return r;
    }
    if (ld.lambda && e == *ld.lambda) continue;
    if (ld.member(e + n)) {
      r.ok = false;
      r.violation = e;
      r.detail = "exponent " + std::to_string(e) +
                 " is removable: " + std::to_string(e + n) +
                 " lies in the contact set";
      return r;
    }
  }
  return r;
}

NormalCheck is_normal(const PuiseuxBranch& b) {
  return is_normal(b, lambda_set(b));
}

NormalForm reduce(const PuiseuxBranch& b) {
  PuiseuxBranch cur = truncate_at_conductor(b);
  check_semigroup_staircase(cur);

  const Exp n = cur.n();
  const Exp m = cur.m();
  const auto chars0 = cur.char_exponents();
  const SemigroupData sg0 = cur.semigroup();
  LambdaData ld = lambda_set(cur);
  const auto orders0 = ld.orders;
  const auto lam0 = ld.lambda;

  std::vector<EliminationStep> audit;
  for (;;) {
    // Smallest exponent the flows can still clear. Coefficients below a
    // cleared exponent never move, so this scan point only advances.
    std::optional<Exp> j;
    for (const auto& [e, cc] : cur.y_terms()) {
      if (e <= m) continue;
      if (lam0 && e == *lam0) continue;
      if (ld.member(e + n)) {
        j = e;
        break;
      }
    }
    if (!j) break;
    require(Exp(audit.size()) <= sg0.conductor, Errc::non_termination,
            "reduction exceeded its step bound");

    EliminationStep st = eliminate_term(cur, ld, *j);
    cur = st.after;
    require(cur.char_exponents() == chars0, Errc::invariant_drift,
            "characteristic exponents changed across an elimination");
    require(cur.semigroup().generators == sg0.generators &&
                cur.conductor() == sg0.conductor,
            Errc::invariant_drift, "semigroup changed across an elimination");
    ld = lambda_set(cur);
    require(ld.orders == orders0 && ld.lambda == lam0, Errc::invariant_drift,
            "contact set changed across an elimination");
    audit.push_back(std::move(st));
  }

  NormalCheck ck = is_normal(cur, ld);
  require(ck.ok, Errc::internal,
          "reduction finished on a non-normal branch: " + ck.detail);
  if (lam0) {
    require(!cur.y_coeff(*lam0).is_zero(), Errc::internal,
            "lambda coefficient vanished in the normal form");
  }

  NormalForm nf;
  nf.n = n;
  nf.m = m;
  nf.lambda = lam0;
  for (const auto& [e, cc] : cur.y_terms()) {
    if (e > m) nf.coefficients.emplace(e, cc);
  }
  nf.branch = cur;
  nf.semigroup = cur.semigroup();
  nf.lambda_data = std::move(ld);
  nf.audit = std::move(audit);
  return nf;
}

namespace {

struct Gcd {
  Exp g, u, v;  // g = u*a + v*b
};

Gcd ext_gcd(Exp a, Exp b) {
  if (b == 0) return {a, 1, 0};
  Gcd s = ext_gcd(b, a % b);
  return {s.g, s.v, s.u - (a / b) * s.v};
}

}  // namespace

EquivalenceCertificate equivalent(const NormalForm& a, const NormalForm& b) {
  EquivalenceCertificate cert;
  if (a.n != b.n) {
    cert.reason = "multiplicity differs";
    return cert;
  }
  if (a.m != b.m) {
    cert.reason = "second generator differs";
    return cert;
  }
  if (a.semigroup.generators != b.semigroup.generators ||
      a.semigroup.conductor != b.semigroup.conductor) {
    cert.reason = "value semigroup differs";
    return cert;
  }
  if (a.lambda_data.orders != b.lambda_data.orders) {
    cert.reason = "contact set differs";
    return cert;
  }
  if (a.lambda != b.lambda) {
    cert.reason = "zariski invariant differs";
    return cert;
  }
  NormalCheck ca = is_normal(a.branch, a.lambda_data);
  require(ca.ok, Errc::not_normal_form, "first argument: " + ca.detail);
  NormalCheck cb = is_normal(b.branch, b.lambda_data);
  require(cb.ok, Errc::not_normal_form, "second argument: " + cb.detail);

  // Remaining freedom is t -> rt; each shared exponent pins r^(i-m).
  // Maintain the running constraint r^g = rho.
  Exp g = 0;
  Scalar rho = Scalar(1);
  std::map<Exp, std::pair<Scalar, Scalar>> both;
  for (const auto& [e, cc] : a.coefficients) both[e].first = cc;
  for (const auto& [e, cc] : b.coefficients) both[e].second = cc;
  for (const auto& [i, pr] : both) {
    if (pr.first.is_zero() != pr.second.is_zero()) {
      cert.reason =
          "coefficient support differs at exponent " + std::to_string(i);
      return cert;
    }
    if (pr.first.is_zero()) continue;
    const Exp e = i - a.m;
    const Scalar c = pr.second / pr.first;
    cert.constraints.emplace_back(e, c);
    if (g == 0) {
      g = e;
      rho = c;
      continue;
    }
    Gcd x = ext_gcd(g, e);
    Scalar rho2 = rho.pow(x.u) * c.pow(x.v);
    if (!(rho2.pow(g / x.g) == rho && rho2.pow(e / x.g) == c)) {
      cert.reason = "scaling constraints clash at exponent " +
                    std::to_string(i);
      return cert;
    }
    g = x.g;
    rho = rho2;
  }
  cert.equivalent = true;
  if (g == 0) {
    cert.r = Scalar(1);
  } else if (g == 1) {
    cert.r = rho;
  }
  return cert;
}

namespace {

Scalar pick_nonzero(std::mt19937_64& rng) {
  static const Scalar pool[] = {
      Scalar(1),          Scalar(-1),
      Scalar(2),          Scalar(-2),
      Scalar(3),          Scalar::rational(1, 2),
      Scalar::rational(-1, 2), Scalar::rational(2, 3),
      Scalar::i(),        -Scalar::i(),
      Scalar(1) + Scalar::i(), Scalar(1) - Scalar::i(),
      Scalar(2) + Scalar::i(), Scalar::rational(1, 2) * Scalar::i()};
  return pool[rng() % (sizeof(pool) / sizeof(pool[0]))];
}

TruncatedSeries param_scale(const TruncatedSeries& f, const Scalar& rho) {
  if (rho.is_one()) return f;
  TruncatedSeries r(f.truncation());
  for (const auto& [e, c] : f.terms()) r.set_coeff(e, c * rho.pow(e));
  return r;
}

}  // namespace

std::pair<PuiseuxBranch, PuiseuxBranch> random_equivalent_pair(
    const PuiseuxBranch& b, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Exp n = b.n();
  const Exp m = b.m();
  const Exp N = b.truncation();
  const Exp c = b.conductor();
  const TruncatedSeries x0 = b.x_series();
  const TruncatedSeries& y0 = b.y_series();

  const Scalar aa = pick_nonzero(rng);
  const Scalar dd = pick_nonzero(rng);
  const Scalar rho = (rng() % 2 == 0) ? pick_nonzero(rng) : Scalar(1);
  require(!aa.is_zero() && !dd.is_zero(), Errc::degenerate_change,
          "unit part of the coordinate change vanishes");

  auto random_m2 = [&]() {
    BivariatePoly P;
    const Exp count = Exp(rng() % 4);
    for (Exp t = 0; t < count; ++t) {
      Exp k = Exp(rng() % 4);
      Exp l = Exp(rng() % 3);
      if (k + l < 2) k = 2 + Exp(rng() % 2);
      P += BivariatePoly::monomial(pick_nonzero(rng), k, l);
    }
    return P;
  };

  TruncatedSeries xs =
      x0.scaled(aa) + random_m2().eval_on_curve(x0, y0).truncated(N);
  TruncatedSeries ys =
      y0.scaled(dd) + random_m2().eval_on_curve(x0, y0).truncated(N);
  xs = param_scale(xs, rho);
  ys = param_scale(ys, rho);

  const Scalar lead = xs.coeff(n);
  require(!lead.is_zero(), Errc::degenerate_change,
          "image x-series lost its order-n term");
  xs = xs.scaled(lead.inverse());

  TruncatedSeries yn = renormalize_series(xs, ys).second;
  std::vector<std::pair<Exp, Scalar>> terms;
  for (const auto& [e, cc] : yn.terms()) {
    if (e < c || e == m) terms.emplace_back(e, cc);
  }
  Preprocessed pp = preprocess(n, terms, std::nullopt);
  require(pp.branch.char_exponents() == b.char_exponents(), Errc::internal,
          "coordinate change altered the equisingularity class");
  return {b, pp.branch};
}

}  // namespace branchforge
