#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "branchforge/contacts.hpp"

namespace branchforge {

// E: x' = X1(x,y), y' = Y1(x,y). Eligibility: Y1 in (x,y)^2 and
// ord_x X1(x,0) >= 2, so the flow perturbs the branch linearly in s at
// order t^j and above.
struct VectorField {
  BivariatePoly X1;
  BivariatePoly Y1;
};

// Throws NotFlowEligible naming the violated condition.
void check_flow_eligible(const VectorField& E);

// Dual field of omega = A dx + B dy: (X1, Y1) = (B, -A), eligibility checked.
VectorField dual_field(const DifferentialForm& w);

// Evaluated Taylor coefficients (X_i(phi), Y_i(phi)) for i >= 1, from the
// recursion X_{i+1} = dX_i/dx * X1 + dX_i/dy * Y1 run on degree-capped
// polynomials (exact below t^N by the eligibility degree argument).
std::vector<std::pair<TruncatedSeries, TruncatedSeries>> ode_taylor_coeffs(
    const VectorField& E, const PuiseuxBranch& b);

// x(t,s) = sum coeffs[i].first * s^i (Taylor-normalized: X_i(phi)/i!),
// likewise y. coeffs[0] is the initial branch exactly.
struct FlowExpansion {
  Exp t_truncation = 0;
  std::vector<std::pair<TruncatedSeries, TruncatedSeries>> coeffs;

  Exp depth() const { return Exp(coeffs.size()) - 1; }
  std::pair<TruncatedSeries, TruncatedSeries> slice(const Scalar& s) const;

  friend bool operator==(const FlowExpansion& a, const FlowExpansion& b) {
    return a.t_truncation == b.t_truncation && a.coeffs == b.coeffs;
  }
};

FlowExpansion flow_on_branch(const VectorField& E, const PuiseuxBranch& b);

// Independent verification path: matches s-coefficients of the integral
// equation z = z0 + int F(z) ds by Picard iteration to a fixpoint. Must
// agree with flow_on_branch exactly; the comparison lives in the test suite,
// never here.
FlowExpansion picard_flow_oracle(const VectorField& E, const PuiseuxBranch& b);

// One term removal: flow of the witness dual field evaluated at
// s_j = -a_j / beta, renormalized back to Puiseux form.
struct EliminationStep {
  Exp j = 0;
  DifferentialForm omega;
  Scalar beta;
  Scalar s_j;
  std::vector<std::pair<Scalar, Scalar>> probes;  // (s, renormalized t^j coeff)
  PuiseuxBranch before;
  PuiseuxBranch after;
};

EliminationStep eliminate_term(const PuiseuxBranch& b, Exp j);
EliminationStep eliminate_term(const PuiseuxBranch& b, const LambdaData& ld,
                               Exp j);

namespace testing {
// Test-only: flips one sign in the Taylor coefficient recursion so the
// flow/Picard agreement suite can prove it has teeth.
void set_taylor_recursion_fault(bool enabled);
}  // namespace testing

}  // namespace branchforge
