#include <doctest.h>

#include <vector>

#include "branchforge/errors.hpp"
#include "branchforge/flows.hpp"
#include "test_util.hpp"

using namespace branchforge;

namespace {

PuiseuxBranch mk(Exp n, std::vector<std::pair<Exp, Scalar>> terms) {
  return PuiseuxBranch::create(n, terms);
}

DifferentialForm form(BivariatePoly A, BivariatePoly B) {
  DifferentialForm w;
  w.A = A;
  w.B = B;
  return w;
}

struct FaultGuard {
  FaultGuard() { testing::set_taylor_recursion_fault(true); }
  ~FaultGuard() { testing::set_taylor_recursion_fault(false); }
};

}  // namespace

TEST_CASE("flow eligibility") {
  // dx: dual field has Y1 = -1, constant term outside (x,y)^2.
  CHECK_ERRC(dual_field(form(BivariatePoly::constant(Scalar(1)), {})),
             Errc::not_flow_eligible);
  // y dx: Y1 = -y has degree 1.
  CHECK_ERRC(dual_field(form(BivariatePoly::y(), {})),
             Errc::not_flow_eligible);
  // x dy: X1 = x has pure-x order 1.
  CHECK_ERRC(dual_field(form({}, BivariatePoly::x())),
             Errc::not_flow_eligible);
  // x^2 dy and (x,y)^2 dx pass.
  CHECK_NOTHROW(dual_field(form({}, BivariatePoly::monomial(Scalar(1), 2, 0))));
  CHECK_NOTHROW(dual_field(form(BivariatePoly::monomial(Scalar(1), 1, 1), {})));
  // x y dy: X1 = xy is fine (mixed monomial, not pure x).
  CHECK_NOTHROW(dual_field(form({}, BivariatePoly::monomial(Scalar(1), 1, 1))));
}

TEST_CASE("taylor coefficients of simple dual flows") {
  PuiseuxBranch b = mk(4, {{6, Scalar(1)}, {7, Scalar(1)}});

  // omega = y dy: E = (y, 0), so X_1(phi) = t^6 + t^7 and X_2 = 0.
  auto tc = ode_taylor_coeffs(dual_field(form({}, BivariatePoly::y())), b);
  REQUIRE(tc.size() == 1);
  CHECK(tc[0].first == b.y_series());
  CHECK(tc[0].second.is_zero());

  // omega = x y dx: E = (0, -xy), an exponential-type flow in y.
  auto tc2 = ode_taylor_coeffs(
      dual_field(form(BivariatePoly::monomial(Scalar(1), 1, 1), {})), b);
  REQUIRE(tc2.size() >= 2);
  CHECK(tc2[0].first.is_zero());
  CHECK(tc2[0].second.valuation() == 10);
  CHECK(tc2[0].second.coeff(10) == Scalar(-1));
  CHECK(tc2[0].second.coeff(11) == Scalar(-1));
  CHECK(tc2[1].second.coeff(14) == Scalar(1));
  CHECK(tc2[1].second.coeff(15) == Scalar(1));
}

TEST_CASE("flow expansion slices and factorial normalization") {
  PuiseuxBranch b = mk(4, {{6, Scalar(1)}, {7, Scalar(1)}});
  VectorField E = dual_field(form(BivariatePoly::monomial(Scalar(1), 1, 1), {}));
  FlowExpansion F = flow_on_branch(E, b);

  // y(t,s) = y0 exp(-s x) on the branch: depth caps at the truncation window.
  CHECK(F.t_truncation == b.truncation());
  CHECK(F.depth() == 4);
  CHECK(F.coeffs[2].second.coeff(14) == Scalar::parse("1/2"));
  CHECK(F.coeffs[3].second.coeff(18) == Scalar::parse("-1/6"));

  auto [x0, y0] = F.slice(Scalar(0));
  CHECK(x0 == b.x_series());
  CHECK(y0 == b.y_series());

  auto [x1, y1] = F.slice(Scalar(1));
  CHECK(x1 == b.x_series());
  CHECK(y1.coeff(10) == Scalar(-1));
  CHECK(y1.coeff(14) == Scalar::parse("1/2"));
}

TEST_CASE("picard oracle on a hand-checked field") {
  // E: x' = 0, y' = -x^2 on the cusp: y(t,s) = t^3 - s t^4.
  PuiseuxBranch b = mk(2, {{3, Scalar(1)}});
  VectorField E;
  E.Y1 = -BivariatePoly::monomial(Scalar(1), 2, 0);
  FlowExpansion P = picard_flow_oracle(E, b);
  REQUIRE(P.depth() == 1);
  CHECK(P.coeffs[0].first == b.x_series());
  CHECK(P.coeffs[0].second == b.y_series());
  CHECK(P.coeffs[1].first.is_zero());
  CHECK(P.coeffs[1].second ==
        TruncatedSeries::monomial(Scalar(-1), 4, b.truncation()));

  CHECK(flow_on_branch(E, b) == P);
}

TEST_CASE("taylor recursion agrees with the picard route") {
  PuiseuxBranch b1 = mk(4, {{6, Scalar(1)}, {7, Scalar(1)}});
  PuiseuxBranch b2 = mk(3, {{7, Scalar(1)}, {8, Scalar(1)}});
  std::vector<VectorField> fields = {
      dual_field(form({}, BivariatePoly::y())),
      dual_field(form(BivariatePoly::monomial(Scalar(1), 1, 1), {})),
      dual_field(form(BivariatePoly::monomial(Scalar(1), 2, 0),
                      BivariatePoly::monomial(Scalar(1), 0, 2))),
  };
  for (const auto& E : fields) {
    CHECK(flow_on_branch(E, b1) == picard_flow_oracle(E, b1));
    CHECK(flow_on_branch(E, b2) == picard_flow_oracle(E, b2));
  }
}

TEST_CASE("recursion fault is visible to the agreement check") {
  PuiseuxBranch b = mk(3, {{7, Scalar(1)}, {8, Scalar(1)}});
  VectorField E;
  E.X1 = BivariatePoly::y();
  E.Y1 = BivariatePoly::monomial(Scalar(1), 2, 0);
  check_flow_eligible(E);

  FlowExpansion clean = flow_on_branch(E, b);
  FlowExpansion oracle = picard_flow_oracle(E, b);
  CHECK(clean == oracle);

  {
    FaultGuard guard;
    FlowExpansion bad = flow_on_branch(E, b);
    CHECK(bad != oracle);
    // The faulted sign enters at the s^2 x-coefficient: X_2 = +-x^2.
    CHECK(bad.coeffs[2].first == -clean.coeffs[2].first);
    // The oracle does not share the faulted recursion.
    CHECK(picard_flow_oracle(E, b) == oracle);
  }
  CHECK(flow_on_branch(E, b) == oracle);
}

TEST_CASE("eliminating the t^11 term of (t^3, t^7 + t^11)") {
  PuiseuxBranch b = mk(3, {{7, Scalar(1)}, {11, Scalar(1)}});
  EliminationStep st = eliminate_term(b, 11);

  CHECK(st.j == 11);
  // 11 + 3 = 2 * 7: the witness is y dy.
  CHECK(st.omega.A.is_zero());
  CHECK(st.omega.B == BivariatePoly::y());
  CHECK(st.beta == Scalar::parse("-7/3"));
  CHECK(st.s_j == Scalar::parse("3/7"));
  CHECK(st.before == b);
  CHECK(st.after == mk(3, {{7, Scalar(1)}}));

  // Probe ledger pins the affine law c(s) = 1 - (7/3) s.
  REQUIRE(st.probes.size() == 5);
  CHECK(st.probes[0] == std::pair{Scalar(0), Scalar(1)});
  CHECK(st.probes[1] == std::pair{Scalar(1), Scalar::parse("-4/3")});
  CHECK(st.probes[2] == std::pair{Scalar(2), Scalar::parse("-11/3")});
  CHECK(st.probes[3] == std::pair{Scalar(-1), Scalar::parse("10/3")});
  CHECK(st.probes[4] == std::pair{Scalar::parse("3/7"), Scalar(0)});
}

TEST_CASE("elimination rejects non-removable targets") {
  PuiseuxBranch b = mk(3, {{7, Scalar(1)}, {8, Scalar(1)}});
  // j = 8 is the Zariski invariant of this branch.
  CHECK_ERRC(eliminate_term(b, 8), Errc::precondition_violated);
  // j = 8 on the cusp-equivalent variant has no contact at 11.
  PuiseuxBranch b2 = mk(3, {{7, Scalar(1)}, {11, Scalar(1)}});
  CHECK_ERRC(eliminate_term(b2, 8), Errc::no_such_contact);
}
