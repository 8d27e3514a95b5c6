#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "branchforge/bipoly.hpp"
#include "branchforge/series.hpp"

namespace branchforge {

// Numerical semigroup of the branch: minimal generators, conductor, gaps,
// and a membership table covering [0, conductor + n + 1].
struct SemigroupData {
  std::vector<Exp> generators;
  Exp conductor = 0;
  std::vector<Exp> gaps;
  std::vector<bool> member_table;

  bool member(Exp v) const {
    if (v < 0) return false;
    if (v >= Exp(member_table.size())) return true;
    return member_table[v];
  }
};

// The branch (t^n, t^m + sum a_i t^i) with its intrinsic invariants computed
// eagerly at construction. Immutable. The y-component is stored as its exact
// coefficient list; the working truncation N is at least conductor + n + 2.
class PuiseuxBranch {
 public:
  // Empty placeholder; every usable branch comes from create().
  PuiseuxBranch() = default;

  static PuiseuxBranch create(Exp n,
                              const std::vector<std::pair<Exp, Scalar>>& terms,
                              std::optional<Exp> truncation = std::nullopt);

  Exp n() const { return n_; }
  Exp m() const { return m_; }
  Exp truncation() const { return trunc_; }
  Exp conductor() const { return semigroup_.conductor; }

  const std::map<Exp, Scalar>& y_terms() const { return y_terms_; }
  Scalar y_coeff(Exp i) const;

  TruncatedSeries x_series() const {
    return TruncatedSeries::monomial(Scalar(1), n_, trunc_);
  }
  const TruncatedSeries& y_series() const { return y_series_; }

  // (beta_0 = n; beta_1 = m, ..., beta_g) from the gcd chain of exponents.
  const std::vector<Exp>& char_exponents() const { return char_exps_; }
  const SemigroupData& semigroup() const { return semigroup_; }

  // ord_t f(phi(t)); nullopt means f vanishes along the branch modulo t^(N+1)
  // (AboveTruncation).
  std::optional<Exp> value_order(const BivariatePoly& f) const;

  friend bool operator==(const PuiseuxBranch& a, const PuiseuxBranch& b) {
    return a.n_ == b.n_ && a.trunc_ == b.trunc_ && a.y_terms_ == b.y_terms_;
  }
  friend bool operator!=(const PuiseuxBranch& a, const PuiseuxBranch& b) {
    return !(a == b);
  }

 private:
  Exp n_ = 0;
  Exp m_ = 0;
  Exp trunc_ = 0;
  std::map<Exp, Scalar> y_terms_;
  TruncatedSeries y_series_{0};
  std::vector<Exp> char_exps_;
  SemigroupData semigroup_;
};

// Result of normalizing a raw y-series into branch form: the substitution
// y -> y - s(x) that removed n-divisible leading exponents, and the scale
// that made the leading coefficient 1.
struct Preprocessed {
  PuiseuxBranch branch;
  std::vector<std::pair<Exp, Scalar>> subtracted;  // s(x): x-exponent -> coeff
  Scalar y_scale = Scalar(1);                      // original a_m
};

Preprocessed preprocess(Exp n, const std::vector<std::pair<Exp, Scalar>>& raw_terms,
                        std::optional<Exp> truncation = std::nullopt);

// Parameter change t = t(u) with t(u)/u a unit of constant term 1 making
// x(t(u)) = u^n exactly modulo truncation. Returns (t_of_u, y(t(u))).
// Requires val(x) = n with leading coefficient exactly 1 and val(y) > n.
std::pair<TruncatedSeries, TruncatedSeries> renormalize_series(
    const TruncatedSeries& x, const TruncatedSeries& y);

// As above, packaged as a branch (u^n, y(t(u))).
PuiseuxBranch renormalize(const TruncatedSeries& x, const TruncatedSeries& y);

}  // namespace branchforge
