#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "branchforge/branch.hpp"

namespace branchforge {

// omega = A dx + B dy.
struct DifferentialForm {
  BivariatePoly A;
  BivariatePoly B;
};

// Lambda = set of contact orders ord_t(phi* omega) + 1, certified up to
// bound = conductor + n (every integer above the bound belongs to Lambda).
struct LambdaData {
  Exp bound = 0;
  std::vector<Exp> orders;                    // sorted, all <= bound
  std::map<Exp, DifferentialForm> witnesses;  // one per order
  std::optional<Exp> lambda;                  // nullopt = Infinity

  bool member(Exp v) const;
};

// ord_t(A(phi) x' + B(phi) y') + 1; nullopt = AboveTruncation.
std::optional<Exp> pullback_order(const PuiseuxBranch& b,
                                  const DifferentialForm& w);

LambdaData lambda_set(const PuiseuxBranch& b);

// min { v in Lambda : v not in S } - n; nullopt = Infinity.
std::optional<Exp> zariski_lambda(const PuiseuxBranch& b);

// A form omega with pullback order exactly j + n satisfying the flow
// preconditions A in (x,y)^2 and ord_x B(x,0) >= 2. Selection order:
// (i) j in S: g dx with ord g(phi) = j; (ii) j + n = p*m: y^(p-1) dy;
// (iii) the staircase witness. The overload taking LambdaData reuses a
// staircase already computed for b.
DifferentialForm witness_form(const PuiseuxBranch& b, Exp j);
DifferentialForm witness_form(const PuiseuxBranch& b, const LambdaData& ld,
                              Exp j);

// Row-echelon over monomial functions x^k y^l: map from attainable order
// ord_t g(phi) <= bound to a witness g. Doubles as the independent
// semigroup oracle.
std::map<Exp, BivariatePoly> function_staircase(const PuiseuxBranch& b,
                                                Exp bound);

// Asserts the function staircase reproduces exactly the semigroup membership
// on [1, conductor + n]. Throws on mismatch.
void check_semigroup_staircase(const PuiseuxBranch& b);

// Colinearity of (a, b) against (p, q): valuation j of a*q - b*p and the
// contact coefficient; nullopt = AboveTruncation.
std::optional<std::pair<Exp, Scalar>> colinearity_order(
    const TruncatedSeries& a, const TruncatedSeries& b,
    const TruncatedSeries& p, const TruncatedSeries& q);

}  // namespace branchforge
