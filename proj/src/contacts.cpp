#include "branchforge/contacts.hpp"

#include <algorithm>
#include <sstream>

#include "branchforge/errors.hpp"

namespace branchforge {

namespace {

struct Row {
  TruncatedSeries s;  // pullback (or function value) along the branch
  BivariatePoly wa;   // accumulated combination, dx side (or the function)
  BivariatePoly wb;   // dy side
};

// Reduces rows against earlier pivots; pivots are kept monic and keyed by
// the valuation of their series. Rows whose valuation escapes the bound are
// dropped. Rows must arrive sorted by initial valuation (ties by the
// caller's deterministic ordering).
std::map<Exp, Row> echelon(std::vector<Row>& rows, Exp bound) {
  std::map<Exp, Row> pivots;
  for (Row& r : rows) {
    require(r.s.truncation() >= bound, Errc::internal,
            "staircase row truncated below the bound");
    for (;;) {
      Exp v = r.s.valuation_or_above();
      if (v > bound) break;
      auto it = pivots.find(v);
      if (it == pivots.end()) {
        Scalar lead = r.s.coeff(v).inverse();
        r.s = r.s.scaled(lead);
        r.wa = r.wa.scaled(lead);
        r.wb = r.wb.scaled(lead);
        pivots.emplace(v, std::move(r));
        break;
      }
      Scalar f = r.s.coeff(v);
      r.s -= it->second.s.scaled(f);
      r.wa -= it->second.wa.scaled(f);
      r.wb -= it->second.wb.scaled(f);
    }
  }
  return pivots;
}

std::vector<TruncatedSeries> y_power_table(const PuiseuxBranch& b, Exp lmax) {
  std::vector<TruncatedSeries> yp;
  yp.push_back(TruncatedSeries::one(kExactTrunc));
  for (Exp l = 1; l <= lmax; ++l) yp.push_back(yp.back() * b.y_series());
  return yp;
}

}  // namespace

bool LambdaData::member(Exp v) const {
  if (v > bound) return true;
  return std::binary_search(orders.begin(), orders.end(), v);
}

std::optional<Exp> pullback_order(const PuiseuxBranch& b,
                                  const DifferentialForm& w) {
  TruncatedSeries xd = b.x_series().derivative();
  TruncatedSeries yd = b.y_series().derivative();
  TruncatedSeries p = w.A.eval_on_curve(b.x_series(), b.y_series()) * xd +
                      w.B.eval_on_curve(b.x_series(), b.y_series()) * yd;
  auto v = p.truncated(b.truncation() - 1).valuation();
  if (!v) return std::nullopt;
  return *v + 1;
}

std::map<Exp, BivariatePoly> function_staircase(const PuiseuxBranch& b,
                                                Exp bound) {
  Exp n = b.n(), m = b.m();
  auto yp = y_power_table(b, bound / m);
  std::vector<Row> rows;
  for (Exp l = 0; l * m <= bound; ++l)
    for (Exp k = (l == 0 ? 1 : 0); k * n + l * m <= bound; ++k)
      rows.push_back(Row{yp[l].shifted(k * n).truncated(bound),
                         BivariatePoly::monomial(Scalar(1), k, l),
                         BivariatePoly()});
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& c) {
    return a.s.valuation_or_above() < c.s.valuation_or_above();
  });
  auto pivots = echelon(rows, bound);
  std::map<Exp, BivariatePoly> out;
  for (auto& [v, r] : pivots) out.emplace(v, std::move(r.wa));
  return out;
}

void check_semigroup_staircase(const PuiseuxBranch& b) {
  Exp bound = b.conductor() + b.n();
  auto pivots = function_staircase(b, bound);
  const SemigroupData& sg = b.semigroup();
  for (Exp v = 1; v <= bound; ++v) {
    bool in_pivots = pivots.find(v) != pivots.end();
    require(in_pivots == sg.member(v), Errc::internal,
            "semigroup staircase oracle disagrees with generator recursion");
  }
  for (const auto& [v, g] : pivots)
    require(b.value_order(g) == std::optional<Exp>(v), Errc::internal,
            "staircase witness has wrong value order");
}

LambdaData lambda_set(const PuiseuxBranch& b) {
  Exp n = b.n(), m = b.m(), c = b.conductor();
  Exp bound = c + n;       // certify orders in [1, c+n]
  Exp vbound = bound - 1;  // series valuations
  TruncatedSeries yprime = b.y_series().derivative();
  auto yp = y_power_table(b, std::max<Exp>(c / m, (c + n - m) / m) + 1);

  std::vector<Row> rows;
  for (Exp l = 0; l * m <= c; ++l)
    for (Exp k = 0; k * n + l * m <= c; ++k)
      rows.push_back(Row{
          yp[l].shifted(k * n + n - 1).scaled(Scalar(n)).truncated(vbound),
          BivariatePoly::monomial(Scalar(1), k, l), BivariatePoly()});
  for (Exp l = 0; l * m <= c + n - m; ++l)
    for (Exp k = 0; k * n + l * m <= c + n - m; ++k)
      rows.push_back(Row{(yp[l] * yprime).shifted(k * n).truncated(vbound),
                         BivariatePoly(),
                         BivariatePoly::monomial(Scalar(1), k, l)});
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& c2) {
    return a.s.valuation_or_above() < c2.s.valuation_or_above();
  });
  auto pivots = echelon(rows, vbound);

  LambdaData ld;
  ld.bound = bound;
  for (auto& [v, r] : pivots) {
    ld.orders.push_back(v + 1);
    ld.witnesses.emplace(v + 1, DifferentialForm{std::move(r.wa),
                                                 std::move(r.wb)});
  }

  const SemigroupData& sg = b.semigroup();
  for (Exp s = 0; s + n <= bound; ++s)
    if (sg.member(s))
      require(ld.member(s + n), Errc::internal,
              "semigroup shift s+n missing from Lambda");
  for (Exp v : ld.orders)
    if (!sg.member(v)) {
      ld.lambda = v - n;
      break;
    }
  if (ld.lambda) {
    require(m < *ld.lambda && *ld.lambda < c, Errc::internal,
            "Zariski invariant outside (m, c)");
  }
  return ld;
}

std::optional<Exp> zariski_lambda(const PuiseuxBranch& b) {
  return lambda_set(b).lambda;
}

namespace {

bool a_in_m2(const BivariatePoly& A) {
  return A.is_zero() || A.low_degree() >= 2;
}

bool b_pure_x_ok(const BivariatePoly& B) {
  for (const auto& [ab, c] : B.terms())
    if (ab.second == 0 && ab.first < 2) return false;
  return true;
}

}  // namespace

DifferentialForm witness_form(const PuiseuxBranch& b, const LambdaData& ld,
                              Exp j) {
  Exp n = b.n(), m = b.m(), c = b.conductor();
  require(m < j && j < c, Errc::precondition_violated,
          "witness target outside (m, c)");
  require(!ld.lambda || j != *ld.lambda, Errc::precondition_violated,
          "witness target equals the Zariski invariant");
  require(ld.member(j + n), Errc::no_such_contact,
          "j + n is not a contact order");

  DifferentialForm w;
  if (b.semigroup().member(j)) {
    // Case (i): g dx with ord g(phi) = j; prefer a pure monomial.
    bool found = false;
    for (Exp l = 0; l * m <= j && !found; ++l) {
      Exp rem = j - l * m;
      if (rem % n == 0 && (rem / n) + l >= 2) {
        w.A = BivariatePoly::monomial(Scalar(1), rem / n, l);
        found = true;
      }
    }
    if (!found) {
      auto pivots = function_staircase(b, j);
      auto it = pivots.find(j);
      require(it != pivots.end(), Errc::internal,
              "semigroup member missing from function staircase");
      w.A = it->second;
    }
  } else if ((j + n) % m == 0 && (j + n) / m > 1) {
    // Case (ii): omega = y^(p-1) dy.
    w.B = BivariatePoly::monomial(Scalar(1), 0, (j + n) / m - 1);
  } else {
    // Case (iii): the staircase witness, with the forced-vanishing repair
    // of the (a01, b10) pair when it is free of charge.
    w = ld.witnesses.at(j + n);
    Scalar a01 = w.A.coeff(0, 1);
    Scalar b10 = w.B.coeff(1, 0);
    if (!a01.is_zero() || !b10.is_zero()) {
      DifferentialForm tau;  // y dx - (n/m) x dy, pullback order above m+n
      tau.A = BivariatePoly::monomial(Scalar(1), 0, 1);
      tau.B = BivariatePoly::monomial(-(Scalar(n) / Scalar(m)), 1, 0);
      DifferentialForm cand;
      cand.A = w.A - tau.A.scaled(a01);
      cand.B = w.B - tau.B.scaled(a01);
      if (pullback_order(b, cand) == std::optional<Exp>(j + n)) w = cand;
    }
  }

  require(a_in_m2(w.A), Errc::precondition_violated,
          "witness A is not in (x,y)^2");
  require(b_pure_x_ok(w.B), Errc::precondition_violated,
          "witness B has pure-x part of order below 2");
  require(pullback_order(b, w) == std::optional<Exp>(j + n), Errc::internal,
          "witness pullback order mismatch");
  return w;
}

DifferentialForm witness_form(const PuiseuxBranch& b, Exp j) {
  return witness_form(b, lambda_set(b), j);
}

std::optional<std::pair<Exp, Scalar>> colinearity_order(
    const TruncatedSeries& a, const TruncatedSeries& b,
    const TruncatedSeries& p, const TruncatedSeries& q) {
  TruncatedSeries det = a * q - b * p;
  auto v = det.valuation();
  if (!v) return std::nullopt;
  return std::make_pair(*v, det.coeff(*v));
}

}  // namespace branchforge
