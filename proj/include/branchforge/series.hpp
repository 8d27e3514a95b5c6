#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "branchforge/scalar.hpp"

namespace branchforge {

using Exp = long long;

// Truncated formal power series in one variable t over Q(i), stored sparsely.
// Coefficients are exact for every exponent <= truncation(); exponents above
// the truncation are unknown, not zero. Arithmetic propagates truncations
// with the usual valuation-aware rules, so precision degrades honestly
// instead of silently inventing zeros.
class TruncatedSeries {
 public:
  explicit TruncatedSeries(Exp trunc) : trunc_(trunc) {}

  static TruncatedSeries zero(Exp trunc) { return TruncatedSeries(trunc); }
  static TruncatedSeries one(Exp trunc) {
    return monomial(Scalar(1), 0, trunc);
  }
  static TruncatedSeries monomial(const Scalar& c, Exp e, Exp trunc);
  static TruncatedSeries from_terms(
      const std::vector<std::pair<Exp, Scalar>>& terms, Exp trunc);

  Exp truncation() const { return trunc_; }
  const std::map<Exp, Scalar>& terms() const { return coeff_; }

  bool is_zero() const { return coeff_.empty(); }

  // Valuation of the known part; nullopt means the series vanishes modulo
  // the truncation (its true order, if any, lies above it).
  std::optional<Exp> valuation() const;
  Exp valuation_or_above() const {
    auto v = valuation();
    return v ? *v : trunc_ + 1;
  }

  // Coefficient at e. Asking beyond the truncation is a caller bug.
  const Scalar& coeff(Exp e) const;

  // Sets a coefficient during construction; e must lie within truncation.
  void set_coeff(Exp e, const Scalar& c);

  TruncatedSeries truncated(Exp new_trunc) const;

  // Multiplication by t^k (k may be negative if the valuation allows it).
  TruncatedSeries shifted(Exp k) const;

  TruncatedSeries derivative() const;

  TruncatedSeries operator-() const;
  TruncatedSeries& operator+=(const TruncatedSeries& o);
  TruncatedSeries& operator-=(const TruncatedSeries& o);

  friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b) {
    return a += b;
  }
  friend TruncatedSeries operator-(TruncatedSeries a, const TruncatedSeries& b) {
    return a -= b;
  }
  friend TruncatedSeries operator*(const TruncatedSeries& a,
                                   const TruncatedSeries& b);

  TruncatedSeries scaled(const Scalar& c) const;

  // Structural equality: identical truncation and coefficients.
  friend bool operator==(const TruncatedSeries& a, const TruncatedSeries& b) {
    return a.trunc_ == b.trunc_ && a.coeff_ == b.coeff_;
  }
  friend bool operator!=(const TruncatedSeries& a, const TruncatedSeries& b) {
    return !(a == b);
  }

  // Agreement on the common known window min(truncations).
  bool agrees_with(const TruncatedSeries& o) const;

  std::string str() const;

 private:
  std::map<Exp, Scalar> coeff_;
  Exp trunc_;
};

// outer(inner); inner must have zero constant term.
TruncatedSeries compose(const TruncatedSeries& outer,
                        const TruncatedSeries& inner);

// Inverse under composition of g with valuation exactly 1.
TruncatedSeries compositional_inverse(const TruncatedSeries& g);

// Principal n-th root of a unit series with constant term exactly 1.
TruncatedSeries nth_root_of_unit_series(const TruncatedSeries& u, long long n);

// Multiplicative inverse of a series with nonzero constant term.
TruncatedSeries reciprocal(const TruncatedSeries& u);

// f(u·(1+e(u))) for a perturbation e with positive valuation d, truncated at
// M (default: the widest sound window min(trunc f, trunc e + 1)). Costs only
// O(M/d) series multiplications, which is what makes reparametrizations with
// high-order perturbations cheap.
TruncatedSeries compose_perturbed(const TruncatedSeries& f,
                                  const TruncatedSeries& e,
                                  std::optional<Exp> M = std::nullopt);

}  // namespace branchforge
