#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "branchforge/series.hpp"

namespace branchforge {

// Truncation used for series that are exact (polynomial evaluations,
// constants): far above any order the algorithms ever inspect.
inline constexpr Exp kExactTrunc = Exp(1) << 40;

// Exact polynomial in x, y over Q(i), stored sparsely by (deg_x, deg_y).
class BivariatePoly {
 public:
  BivariatePoly() = default;

  static BivariatePoly monomial(const Scalar& c, Exp a, Exp b);
  static BivariatePoly x() { return monomial(Scalar(1), 1, 0); }
  static BivariatePoly y() { return monomial(Scalar(1), 0, 1); }
  static BivariatePoly constant(const Scalar& c) {
    return monomial(c, 0, 0);
  }

  const std::map<std::pair<Exp, Exp>, Scalar>& terms() const { return coeff_; }
  bool is_zero() const { return coeff_.empty(); }

  Scalar coeff(Exp a, Exp b) const;
  void set_coeff(Exp a, Exp b, const Scalar& c);

  // Max and min total degree of stored monomials; -1 for the zero polynomial.
  Exp total_degree() const;
  Exp low_degree() const;

  // Drops monomials of total degree above cap.
  BivariatePoly truncate_total_degree(Exp cap) const;

  BivariatePoly partial_x() const;
  BivariatePoly partial_y() const;

  BivariatePoly operator-() const;
  BivariatePoly& operator+=(const BivariatePoly& o);
  BivariatePoly& operator-=(const BivariatePoly& o);
  friend BivariatePoly operator+(BivariatePoly a, const BivariatePoly& b) {
    return a += b;
  }
  friend BivariatePoly operator-(BivariatePoly a, const BivariatePoly& b) {
    return a -= b;
  }
  friend BivariatePoly operator*(const BivariatePoly& a,
                                 const BivariatePoly& b);
  BivariatePoly scaled(const Scalar& c) const;

  friend bool operator==(const BivariatePoly& a, const BivariatePoly& b) {
    return a.coeff_ == b.coeff_;
  }
  friend bool operator!=(const BivariatePoly& a, const BivariatePoly& b) {
    return !(a == b);
  }

  // Substitutes the parametrization (xs(t), ys(t)). The result's truncation
  // follows from the operands, so precision loss is visible to the caller.
  TruncatedSeries eval_on_curve(const TruncatedSeries& xs,
                                const TruncatedSeries& ys) const;

  std::string str() const;

 private:
  std::map<std::pair<Exp, Exp>, Scalar> coeff_;
};

}  // namespace branchforge
