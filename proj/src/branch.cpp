#include "branchforge/branch.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "branchforge/errors.hpp"

namespace branchforge {

namespace {

std::vector<Exp> char_exponent_chain(Exp n, const std::map<Exp, Scalar>& terms) {
  std::vector<Exp> chain{n};
  Exp g = n;
  while (g != 1) {
    Exp next = -1;
    for (const auto& [e, c] : terms) {
      if (e % g != 0) {
        next = e;
        break;
      }
    }
    require(next != -1, Errc::smooth_or_degenerate,
            "non-primitive parametrization: gcd of exponents exceeds 1");
    chain.push_back(next);
    g = std::gcd(g, next);
  }
  return chain;
}

SemigroupData semigroup_from_chars(const std::vector<Exp>& chars) {
  // Generators: gb_0 = beta_0, gb_1 = beta_1,
  // gb_{k+1} = n_k gb_k + beta_{k+1} - beta_k with n_k = e_{k-1}/e_k.
  Exp n = chars[0];
  std::vector<Exp> gens{n};
  std::vector<Exp> e{n};
  for (size_t k = 1; k < chars.size(); ++k) e.push_back(std::gcd(e[k - 1], chars[k]));
  std::vector<Exp> gb{n};
  for (size_t k = 1; k < chars.size(); ++k) {
    if (k == 1) {
      gb.push_back(chars[1]);
    } else {
      Exp nk = e[k - 2] / e[k - 1];
      gb.push_back(nk * gb[k - 1] + chars[k] - chars[k - 1]);
    }
    gens.push_back(gb[k]);
  }
  Exp c = 1 - n;
  for (size_t k = 1; k < chars.size(); ++k) {
    Exp nk = e[k - 1] / e[k];
    c += (nk - 1) * gb[k];
  }

  // Independent gap-scan sieve over the generators, bounded by n*m.
  Exp bound = std::max<Exp>(c + n + 1, chars.size() > 1 ? n * chars[1] : n);
  std::vector<bool> dp(bound + 1, false);
  dp[0] = true;
  for (Exp v = 1; v <= bound; ++v)
    for (Exp g : gens)
      if (v >= g && dp[v - g]) {
        dp[v] = true;
        break;
      }
  Exp last_gap = -1;
  for (Exp v = 0; v <= bound; ++v)
    if (!dp[v]) last_gap = v;
  Exp c_scan = last_gap + 1;
  require(c_scan == c, Errc::internal,
          "conductor formula disagrees with gap-scan sieve");
  require(c == 0 || !dp[c - 1], Errc::internal, "conductor - 1 is a member");

  SemigroupData sg;
  sg.generators = gens;
  sg.conductor = c;
  for (Exp v = 0; v < c; ++v)
    if (!dp[v]) sg.gaps.push_back(v);
  require(Exp(sg.gaps.size()) * 2 == c, Errc::internal,
          "gap count differs from conductor/2");
  for (Exp s = 0; s < c; ++s)
    require(dp[s] != dp[c - 1 - s], Errc::internal,
            "Gorenstein symmetry violated");
  sg.member_table.assign(dp.begin(), dp.begin() + std::min<Exp>(bound, c + n + 1) + 1);
  return sg;
}

}  // namespace

PuiseuxBranch PuiseuxBranch::create(
    Exp n, const std::vector<std::pair<Exp, Scalar>>& terms,
    std::optional<Exp> truncation) {
  require(n >= 2, Errc::smooth_or_degenerate,
          "multiplicity below 2: branch is smooth");
  PuiseuxBranch b;
  b.n_ = n;
  for (const auto& [e, c] : terms) {
    if (c.is_zero()) continue;
    require(e > 0, Errc::bad_valuation, "y-exponent must be positive");
    require(b.y_terms_.emplace(e, c).second, Errc::parse_error,
            "duplicate y-exponent");
  }
  require(!b.y_terms_.empty(), Errc::smooth_or_degenerate,
          "y-component vanishes modulo truncation");
  b.m_ = b.y_terms_.begin()->first;
  require(b.m_ > n, Errc::bad_valuation,
          "minimal y-exponent must exceed the multiplicity");
  require(b.m_ % n != 0, Errc::bad_valuation,
          "minimal y-exponent divisible by n: run preprocess first");
  require(b.y_terms_.begin()->second.is_one(), Errc::bad_leading_coefficient,
          "leading y-coefficient must be 1: run preprocess first");

  b.char_exps_ = char_exponent_chain(n, b.y_terms_);
  b.semigroup_ = semigroup_from_chars(b.char_exps_);
  Exp needed = b.semigroup_.conductor + n + 2;
  b.trunc_ = truncation.value_or(needed);
  require(b.trunc_ >= needed, Errc::truncation_insufficient,
          "truncation below conductor + n + 2");

  // Terms beyond the truncation lie above the conductor and are dropped;
  // they never carry characteristic exponents (those are all < c + n).
  std::erase_if(b.y_terms_, [&](const auto& t) { return t.first > b.trunc_; });
  b.y_series_ = TruncatedSeries(b.trunc_);
  for (const auto& [e, c] : b.y_terms_) b.y_series_.set_coeff(e, c);
  return b;
}

Scalar PuiseuxBranch::y_coeff(Exp i) const {
  auto it = y_terms_.find(i);
  return it == y_terms_.end() ? Scalar(0) : it->second;
}

std::optional<Exp> PuiseuxBranch::value_order(const BivariatePoly& f) const {
  require(f.coeff(0, 0).is_zero(), Errc::nonzero_constant_term,
          "value order requires zero constant term");
  TruncatedSeries r = f.eval_on_curve(x_series(), y_series()).truncated(trunc_);
  return r.valuation();
}

Preprocessed preprocess(Exp n,
                        const std::vector<std::pair<Exp, Scalar>>& raw_terms,
                        std::optional<Exp> truncation) {
  require(n >= 1, Errc::bad_valuation, "multiplicity must be positive");
  require(n >= 2, Errc::smooth_or_degenerate,
          "multiplicity 1: branch is smooth");
  std::map<Exp, Scalar> terms;
  for (const auto& [e, c] : raw_terms) {
    if (c.is_zero()) continue;
    require(e > 0, Errc::bad_valuation, "y-exponent must be positive");
    require(terms.emplace(e, c).second, Errc::parse_error,
            "duplicate y-exponent");
  }
  Preprocessed out;
  while (true) {
    require(!terms.empty(), Errc::smooth_or_degenerate,
            "all y-exponents divisible by n within truncation: "
            "branch is smooth-equivalent");
    auto [e, c] = *terms.begin();
    if (e % n != 0) break;
    out.subtracted.emplace_back(e / n, c);
    terms.erase(terms.begin());
  }
  Exp m = terms.begin()->first;
  require(m > n, Errc::bad_valuation,
          "minimal y-exponent must exceed the multiplicity");
  out.y_scale = terms.begin()->second;
  if (!out.y_scale.is_one()) {
    Scalar inv = out.y_scale.inverse();
    for (auto& [e, c] : terms) c *= inv;
  }
  std::vector<std::pair<Exp, Scalar>> norm(terms.begin(), terms.end());
  out.branch = PuiseuxBranch::create(n, norm, truncation);
  return out;
}

namespace {

// Compositional inverse of U = u(1 + w) with val(w) = d >= 1, computed by
// Newton steps whose composes exploit the perturbation structure. The result
// h = u(1 + e) satisfies U(h) = u exactly modulo the truncation (verified).
TruncatedSeries invert_unit_shift(const TruncatedSeries& U) {
  Exp N = U.truncation();
  TruncatedSeries dev = U - TruncatedSeries::monomial(Scalar(1), 1, N);
  if (dev.is_zero()) return TruncatedSeries::monomial(Scalar(1), 1, N);
  Exp d = *dev.valuation() - 1;
  require(d >= 1, Errc::internal, "unit shift must deviate above order 1");
  TruncatedSeries Up = U.derivative();
  TruncatedSeries h = TruncatedSeries::monomial(Scalar(1), 1, std::min(N, d + 1));
  Exp q = d;  // h agrees with the true inverse modulo u^(q+1)
  int guard = 0;
  while (q < N) {
    require(++guard <= 64, Errc::internal,
            "compositional inverse failed to converge");
    Exp M = std::min(N, 2 * q + 1);
    TruncatedSeries hl(M);
    for (const auto& [e, c] : h.terms()) hl.set_coeff(e, c);
    TruncatedSeries eh = hl.shifted(-1) -
                         TruncatedSeries::one(hl.truncation() - 1);
    TruncatedSeries err =
        compose_perturbed(U.truncated(M), eh, M) -
        TruncatedSeries::monomial(Scalar(1), 1, M);
    TruncatedSeries corr =
        (err * reciprocal(compose_perturbed(Up.truncated(M - 1), eh, M - 1)))
            .truncated(M);
    h = (hl - corr).truncated(M);
    q = M;
  }
  TruncatedSeries eh = h.shifted(-1) - TruncatedSeries::one(N - 1);
  require(compose_perturbed(U, eh, N) ==
              TruncatedSeries::monomial(Scalar(1), 1, N),
          Errc::internal, "compositional inverse verification failed");
  return h;
}

}  // namespace

std::pair<TruncatedSeries, TruncatedSeries> renormalize_series(
    const TruncatedSeries& x, const TruncatedSeries& y) {
  auto vx = x.valuation();
  require(vx.has_value() && *vx >= 1, Errc::bad_valuation,
          "x-component must have positive valuation");
  Exp n = *vx;
  require(x.coeff(n).is_one(), Errc::bad_leading_coefficient,
          "x leading coefficient must be 1: scale first");
  require(y.valuation_or_above() > n, Errc::bad_valuation,
          "y-component must have valuation above n");
  if (x == TruncatedSeries::monomial(Scalar(1), n, x.truncation())) {
    Exp M = std::min(x.truncation(), y.truncation());
    return {TruncatedSeries::monomial(Scalar(1), 1, M), y.truncated(M)};
  }
  TruncatedSeries w = x.shifted(-n);  // unit with constant term 1
  TruncatedSeries r = nth_root_of_unit_series(w, n);
  TruncatedSeries U = r.shifted(1);  // u(t) = t * r(t); x = U^n exactly
  TruncatedSeries t_of_u = invert_unit_shift(U);
  TruncatedSeries e = t_of_u.shifted(-1) -
                      TruncatedSeries::one(t_of_u.truncation() - 1);
  TruncatedSeries y_new = compose_perturbed(y, e);
  return {t_of_u, y_new};
}

PuiseuxBranch renormalize(const TruncatedSeries& x, const TruncatedSeries& y) {
  auto [t_of_u, y_new] = renormalize_series(x, y);
  std::vector<std::pair<Exp, Scalar>> terms(y_new.terms().begin(),
                                            y_new.terms().end());
  return PuiseuxBranch::create(*x.valuation(), terms, y_new.truncation());
}

}  // namespace branchforge
