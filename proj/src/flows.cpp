#include "branchforge/flows.hpp"

#include <atomic>
#include <utility>

#include "branchforge/errors.hpp"

namespace branchforge {

namespace {

std::atomic<bool> g_taylor_fault{false};

Exp taylor_degree_cap(Exp N, Exp n) {
  // Monomials of total degree > cap evaluate above t^N on the branch, and
  // the recursion never moves a dropped monomial back below the cap.
  return (N + n) / n + 1;
}

}  // namespace

namespace testing {
void set_taylor_recursion_fault(bool enabled) { g_taylor_fault = enabled; }
}  // namespace testing

void check_flow_eligible(const VectorField& E) {
  for (const auto& [ab, c] : E.Y1.terms()) {
    require(ab.first + ab.second >= 2, Errc::not_flow_eligible,
            "Y1 has a monomial outside (x,y)^2");
  }
  for (const auto& [ab, c] : E.X1.terms()) {
    if (ab.second == 0) {
      require(ab.first >= 2, Errc::not_flow_eligible,
              "X1(x,0) has order < 2 in x");
    }
  }
}

VectorField dual_field(const DifferentialForm& w) {
  VectorField E{w.B, -w.A};
  check_flow_eligible(E);
  return E;
}

std::vector<std::pair<TruncatedSeries, TruncatedSeries>> ode_taylor_coeffs(
    const VectorField& E, const PuiseuxBranch& b) {
  check_flow_eligible(E);
  const Exp N = b.truncation();
  const Exp n = b.n();
  const Exp dcap = taylor_degree_cap(N, n);
  const bool fault = g_taylor_fault.load();

  const BivariatePoly Xc = E.X1.truncate_total_degree(dcap);
  const BivariatePoly Yc = E.Y1.truncate_total_degree(dcap);

  // x(phi) = t^n exactly, so x-powers are shifts; cache y-powers.
  const TruncatedSeries& y0 = b.y_series();
  std::vector<TruncatedSeries> yp{TruncatedSeries::one(kExactTrunc)};
  auto eval = [&](const BivariatePoly& P) {
    TruncatedSeries acc = TruncatedSeries::zero(N);
    for (const auto& [ab, c] : P.terms()) {
      while (Exp(yp.size()) <= ab.second) yp.push_back(yp.back() * y0);
      acc += yp[ab.second].shifted(ab.first * n).truncated(N).scaled(c);
    }
    return acc;
  };

  std::vector<std::pair<TruncatedSeries, TruncatedSeries>> out;
  const Exp guard = 3 * dcap + 8;
  BivariatePoly Xi = Xc;
  BivariatePoly Yi = Yc;
  for (Exp i = 1; !(Xi.is_zero() && Yi.is_zero()); ++i) {
    require(i <= guard, Errc::non_termination,
            "taylor recursion exceeded its degree-count bound");
    TruncatedSeries xe = eval(Xi);
    TruncatedSeries ye = eval(Yi);
    if (auto v = xe.valuation()) {
      require(*v > n, Errc::internal, "ord X_i(phi) <= n in an eligible flow");
    }
    out.emplace_back(std::move(xe), std::move(ye));

    BivariatePoly dXy = Xi.partial_y() * Yc;
    if (fault) dXy = dXy.scaled(Scalar(-1));
    BivariatePoly Xn = Xi.partial_x() * Xc + dXy;
    BivariatePoly Yn = Yi.partial_x() * Xc + Yi.partial_y() * Yc;
    Xi = Xn.truncate_total_degree(dcap);
    Yi = Yn.truncate_total_degree(dcap);
  }
  return out;
}

std::pair<TruncatedSeries, TruncatedSeries> FlowExpansion::slice(
    const Scalar& s) const {
  TruncatedSeries xs = coeffs.at(0).first;
  TruncatedSeries ys = coeffs.at(0).second;
  Scalar p = Scalar(1);
  for (std::size_t i = 1; i < coeffs.size(); ++i) {
    p = p * s;
    xs += coeffs[i].first.scaled(p);
    ys += coeffs[i].second.scaled(p);
  }
  return {std::move(xs), std::move(ys)};
}

namespace {

void trim_expansion(FlowExpansion& F) {
  while (F.coeffs.size() > 1 && F.coeffs.back().first.is_zero() &&
         F.coeffs.back().second.is_zero()) {
    F.coeffs.pop_back();
  }
}

}  // namespace

FlowExpansion flow_on_branch(const VectorField& E, const PuiseuxBranch& b) {
  auto tc = ode_taylor_coeffs(E, b);
  FlowExpansion F;
  F.t_truncation = b.truncation();
  F.coeffs.emplace_back(b.x_series(), b.y_series());
  Scalar invfact = Scalar(1);
  for (std::size_t i = 0; i < tc.size(); ++i) {
    invfact = invfact / Scalar(Exp(i) + 1);
    F.coeffs.emplace_back(tc[i].first.scaled(invfact),
                          tc[i].second.scaled(invfact));
  }
  trim_expansion(F);
  return F;
}

namespace {

// Polynomials in s with truncated-series coefficients, every coefficient
// held at t-truncation N so fixpoint comparison is structural.
using SPoly = std::vector<TruncatedSeries>;

void snorm(SPoly& p) {
  while (!p.empty() && p.back().is_zero()) p.pop_back();
}

SPoly sadd(const SPoly& a, const SPoly& b, Exp N) {
  SPoly r(std::max(a.size(), b.size()), TruncatedSeries::zero(N));
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i < a.size()) r[i] += a[i];
    if (i < b.size()) r[i] += b[i];
  }
  snorm(r);
  return r;
}

SPoly smul(const SPoly& a, const SPoly& b, Exp N, Exp scap) {
  if (a.empty() || b.empty()) return {};
  std::size_t sz =
      std::min(a.size() + b.size() - 1, std::size_t(scap) + 1);
  SPoly r(sz, TruncatedSeries::zero(N));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (i + j >= sz) break;
      r[i + j] += (a[i] * b[j]).truncated(N);
    }
  }
  snorm(r);
  return r;
}

SPoly seval(const BivariatePoly& P, const SPoly& zx, const SPoly& zy, Exp N,
            Exp scap) {
  std::vector<SPoly> px{SPoly{TruncatedSeries::one(N)}};
  std::vector<SPoly> py{SPoly{TruncatedSeries::one(N)}};
  SPoly acc;
  for (const auto& [ab, c] : P.terms()) {
    while (Exp(px.size()) <= ab.first)
      px.push_back(smul(px.back(), zx, N, scap));
    while (Exp(py.size()) <= ab.second)
      py.push_back(smul(py.back(), zy, N, scap));
    SPoly term = smul(px[ab.first], py[ab.second], N, scap);
    for (auto& e : term) e = e.scaled(c);
    acc = sadd(acc, term, N);
  }
  return acc;
}

SPoly sintegrate(const SPoly& f, Exp N, Exp scap) {
  SPoly r(std::min(f.size() + 1, std::size_t(scap) + 1),
          TruncatedSeries::zero(N));
  for (std::size_t i = 0; i + 1 < r.size() && i < f.size(); ++i) {
    r[i + 1] = f[i].scaled(Scalar(1) / Scalar(Exp(i) + 1));
  }
  snorm(r);
  return r;
}

}  // namespace

FlowExpansion picard_flow_oracle(const VectorField& E,
                                 const PuiseuxBranch& b) {
  check_flow_eligible(E);
  const Exp N = b.truncation();
  const Exp scap = 3 * taylor_degree_cap(N, b.n()) + 8;

  const SPoly z0x{b.x_series().truncated(N)};
  const SPoly z0y{b.y_series().truncated(N)};
  SPoly zx = z0x;
  SPoly zy = z0y;
  bool converged = false;
  for (Exp iter = 0; iter <= scap + 2; ++iter) {
    SPoly fx = seval(E.X1, zx, zy, N, scap);
    SPoly fy = seval(E.Y1, zx, zy, N, scap);
    SPoly nx = sadd(z0x, sintegrate(fx, N, scap), N);
    SPoly ny = sadd(z0y, sintegrate(fy, N, scap), N);
    if (nx == zx && ny == zy) {
      converged = true;
      break;
    }
    zx = std::move(nx);
    zy = std::move(ny);
  }
  require(converged, Errc::non_termination,
          "picard iteration failed to reach a fixpoint");

  FlowExpansion F;
  F.t_truncation = N;
  std::size_t depth = std::max(zx.size(), zy.size());
  for (std::size_t i = 0; i < std::max<std::size_t>(depth, 1); ++i) {
    TruncatedSeries cx =
        i < zx.size() ? zx[i] : TruncatedSeries::zero(N);
    TruncatedSeries cy =
        i < zy.size() ? zy[i] : TruncatedSeries::zero(N);
    F.coeffs.emplace_back(std::move(cx), std::move(cy));
  }
  trim_expansion(F);
  return F;
}

EliminationStep eliminate_term(const PuiseuxBranch& b, const LambdaData& ld,
                               Exp j) {
  const Exp n = b.n();
  const Exp m = b.m();
  const Exp N = b.truncation();
  const Exp c = b.semigroup().conductor;
  const Scalar aj = b.y_coeff(j);

  EliminationStep step;
  step.j = j;
  step.omega = witness_form(b, ld, j);
  step.before = b;

  VectorField E = dual_field(step.omega);
  FlowExpansion fx = flow_on_branch(E, b);

  bool xconst = true;
  for (std::size_t i = 1; i < fx.coeffs.size(); ++i) {
    if (!fx.coeffs[i].first.is_zero()) {
      xconst = false;
      break;
    }
  }

  // Renormalized y(t,s) for a given parameter value; when B = 0 the x-series
  // never moves off t^n and the slice is already in Puiseux form.
  auto renorm_y = [&](const Scalar& s) {
    auto [xs, ys] = fx.slice(s);
    if (xconst) return std::move(ys);
    return renormalize_series(xs, ys).second;
  };

  Scalar c0 = renorm_y(Scalar(0)).coeff(j);
  require(c0 == aj, Errc::internal, "flow slice at s=0 differs from input");
  Scalar c1 = renorm_y(Scalar(1)).coeff(j);
  step.beta = c1 - aj;
  require(!step.beta.is_zero(), Errc::zero_beta,
          "witness flow leaves the t^j coefficient fixed");
  Scalar c2 = renorm_y(Scalar(2)).coeff(j);
  require(c2 == aj + step.beta + step.beta, Errc::affine_law_violated,
          "t^j coefficient is not affine in s (probe s=2)");
  Scalar cm1 = renorm_y(Scalar(-1)).coeff(j);
  require(cm1 == aj - step.beta, Errc::affine_law_violated,
          "t^j coefficient is not affine in s (probe s=-1)");

  step.s_j = -(aj / step.beta);
  TruncatedSeries yfin = renorm_y(step.s_j);
  require(yfin.coeff(j).is_zero(), Errc::affine_law_violated,
          "t^j coefficient survives at s_j");
  for (Exp e = 1; e < j; ++e) {
    require(yfin.coeff(e) == b.y_coeff(e), Errc::internal,
            "flow disturbed a coefficient below j");
  }
  step.probes = {{Scalar(0), c0},
                 {Scalar(1), c1},
                 {Scalar(2), c2},
                 {Scalar(-1), cm1},
                 {step.s_j, yfin.coeff(j)}};

  // Everything at or above the conductor is removable by later moves and
  // carries no invariant content; truncate there so the chain stays inside
  // one fixed precision window.
  std::vector<std::pair<Exp, Scalar>> terms;
  for (const auto& [e, cc] : yfin.terms()) {
    if ((e < c || e == m) && !cc.is_zero()) terms.emplace_back(e, cc);
  }
  step.after = PuiseuxBranch::create(n, terms, N);
  return step;
}

EliminationStep eliminate_term(const PuiseuxBranch& b, Exp j) {
  LambdaData ld = lambda_set(b);
  return eliminate_term(b, ld, j);
}

}  // namespace branchforge
