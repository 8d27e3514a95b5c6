#include <doctest.h>

#include "branchforge/errors.hpp"
#include "branchforge/series.hpp"

using namespace branchforge;

namespace {

TruncatedSeries make(Exp trunc, std::initializer_list<std::pair<Exp, long>> t) {
  TruncatedSeries s(trunc);
  for (auto [e, c] : t) s.set_coeff(e, Scalar(c));
  return s;
}

}  // namespace

TEST_CASE("series ring basics") {
  TruncatedSeries a = make(6, {{1, 1}, {3, -2}});
  TruncatedSeries b = make(6, {{0, 1}, {2, 4}});
  TruncatedSeries s = a + b;
  CHECK(s.coeff(0) == Scalar(1));
  CHECK(s.coeff(1) == Scalar(1));
  CHECK(s.coeff(2) == Scalar(4));
  CHECK(s.coeff(3) == Scalar(-2));
  CHECK(a.valuation().value() == 1);
  CHECK(!TruncatedSeries::zero(5).valuation().has_value());
  CHECK(a.derivative().coeff(0) == Scalar(1));
  CHECK(a.derivative().coeff(2) == Scalar(-6));
  CHECK(a.derivative().truncation() == 5);
  CHECK(a.shifted(2).coeff(3) == Scalar(1));
  CHECK(a.shifted(-1).coeff(0) == Scalar(1));
}

TEST_CASE("product truncation follows the min rule") {
  TruncatedSeries a = make(5, {{1, 1}});   // known through t^5
  TruncatedSeries b = make(9, {{2, 3}});   // known through t^9
  TruncatedSeries p = a * b;
  // min(5 + 2, 9 + 1) = 7
  CHECK(p.truncation() == 7);
  CHECK(p.coeff(3) == Scalar(3));
  TruncatedSeries z = TruncatedSeries::zero(4) * b;
  CHECK(z.is_zero());
}

TEST_CASE("series access guards") {
  TruncatedSeries a = make(4, {{1, 1}});
  CHECK_THROWS_AS(a.coeff(5), BranchError);
  CHECK_THROWS_AS(a.set_coeff(5, Scalar(1)), BranchError);
  CHECK_THROWS_AS(a.shifted(-2), BranchError);
}

TEST_CASE("composition") {
  // (t + t^3)^2 = t^2 + 2 t^4 + t^6
  TruncatedSeries f = make(8, {{2, 1}});
  TruncatedSeries g = make(8, {{1, 1}, {3, 1}});
  TruncatedSeries c = compose(f, g);
  CHECK(c.coeff(2) == Scalar(1));
  CHECK(c.coeff(4) == Scalar(2));
  CHECK(c.coeff(6) == Scalar(1));
  CHECK(c.coeff(3) == Scalar(0));

  // Composition window: min(inner trunc, (outer trunc + 1) * val - 1).
  TruncatedSeries f2 = make(4, {{1, 1}});
  TruncatedSeries g2 = make(8, {{2, 1}});
  CHECK(compose(f2, g2).truncation() == 8);
}

TEST_CASE("compositional inverse of t + t^2") {
  TruncatedSeries g = make(3, {{1, 1}, {2, 1}});
  TruncatedSeries h = compositional_inverse(g);
  CHECK(h.truncation() == 3);
  CHECK(h.coeff(1) == Scalar(1));
  CHECK(h.coeff(2) == Scalar(-1));
  CHECK(h.coeff(3) == Scalar(2));
  TruncatedSeries idl = compose(g, h);
  CHECK(idl.coeff(1) == Scalar(1));
  CHECK(idl.coeff(2) == Scalar(0));
  CHECK(idl.coeff(3) == Scalar(0));
  CHECK_THROWS_AS(compositional_inverse(make(3, {{2, 1}})), BranchError);
}

TEST_CASE("square root of 1 + t") {
  TruncatedSeries u = make(3, {{0, 1}, {1, 1}});
  TruncatedSeries r = nth_root_of_unit_series(u, 2);
  CHECK(r.coeff(0) == Scalar(1));
  CHECK(r.coeff(1) == Scalar::rational(1, 2));
  CHECK(r.coeff(2) == Scalar::rational(-1, 8));
  CHECK(r.coeff(3) == Scalar::rational(1, 16));
  CHECK((r * r).truncated(3) == u);
  CHECK_THROWS_AS(nth_root_of_unit_series(make(3, {{0, 2}}), 2), BranchError);
}

TEST_CASE("reciprocal of 1 - t") {
  TruncatedSeries u = make(5, {{0, 1}, {1, -1}});
  TruncatedSeries r = reciprocal(u);
  for (Exp e = 0; e <= 5; ++e) CHECK(r.coeff(e) == Scalar(1));
  CHECK((u * r).truncated(5) == TruncatedSeries::one(5));
  CHECK_THROWS_AS(reciprocal(make(3, {{1, 1}})), BranchError);
}

TEST_CASE("perturbed composition matches plain composition") {
  TruncatedSeries f = make(9, {{2, 1}, {3, -1}, {5, 2}});
  TruncatedSeries e = make(9, {{1, 1}, {2, -3}});
  // t(1+e) = t + t^2 - 3 t^3
  TruncatedSeries sub = make(10, {{1, 1}, {2, 1}, {3, -3}});
  TruncatedSeries cp = compose_perturbed(f, e, std::nullopt);
  TruncatedSeries cc = compose(f, sub);
  Exp w = std::min(cp.truncation(), cc.truncation());
  CHECK(cp.truncated(w) == cc.truncated(w));
}
