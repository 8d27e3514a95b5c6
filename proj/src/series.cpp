#include "branchforge/series.hpp"

#include <algorithm>
#include <sstream>

#include "branchforge/errors.hpp"

namespace branchforge {

TruncatedSeries TruncatedSeries::monomial(const Scalar& c, Exp e, Exp trunc) {
  TruncatedSeries s(trunc);
  s.set_coeff(e, c);
  return s;
}

TruncatedSeries TruncatedSeries::from_terms(
    const std::vector<std::pair<Exp, Scalar>>& terms, Exp trunc) {
  TruncatedSeries s(trunc);
  for (const auto& [e, c] : terms) {
    require(s.coeff_.find(e) == s.coeff_.end(), Errc::internal,
            "duplicate exponent in series terms");
    s.set_coeff(e, c);
  }
  return s;
}

std::optional<Exp> TruncatedSeries::valuation() const {
  if (coeff_.empty()) return std::nullopt;
  return coeff_.begin()->first;
}

const Scalar& TruncatedSeries::coeff(Exp e) const {
  require(e <= trunc_, Errc::truncation_insufficient,
          "coefficient requested beyond truncation");
  static const Scalar kZero(0);
  auto it = coeff_.find(e);
  return it == coeff_.end() ? kZero : it->second;
}

void TruncatedSeries::set_coeff(Exp e, const Scalar& c) {
  require(e >= 0, Errc::internal, "negative exponent in series");
  require(e <= trunc_, Errc::truncation_insufficient,
          "coefficient set beyond truncation");
  if (c.is_zero())
    coeff_.erase(e);
  else
    coeff_[e] = c;
}

TruncatedSeries TruncatedSeries::truncated(Exp new_trunc) const {
  Exp nt = std::min(new_trunc, trunc_);
  TruncatedSeries r(nt);
  for (const auto& [e, c] : coeff_) {
    if (e > nt) break;
    r.coeff_.emplace(e, c);
  }
  return r;
}

TruncatedSeries TruncatedSeries::shifted(Exp k) const {
  if (k < 0)
    require(coeff_.empty() || coeff_.begin()->first >= -k, Errc::bad_valuation,
            "shift would create negative exponents");
  TruncatedSeries r(trunc_ + k);
  for (const auto& [e, c] : coeff_) r.coeff_.emplace(e + k, c);
  return r;
}

TruncatedSeries TruncatedSeries::derivative() const {
  TruncatedSeries r(trunc_ - 1);
  for (const auto& [e, c] : coeff_) {
    if (e == 0) continue;
    r.coeff_.emplace(e - 1, c * Scalar(e));
  }
  return r;
}

TruncatedSeries TruncatedSeries::operator-() const {
  TruncatedSeries r(trunc_);
  for (const auto& [e, c] : coeff_) r.coeff_.emplace(e, -c);
  return r;
}

TruncatedSeries& TruncatedSeries::operator+=(const TruncatedSeries& o) {
  trunc_ = std::min(trunc_, o.trunc_);
  for (const auto& [e, c] : o.coeff_) {
    if (e > trunc_) break;
    auto it = coeff_.find(e);
    if (it == coeff_.end()) {
      coeff_.emplace(e, c);
    } else {
      it->second += c;
      if (it->second.is_zero()) coeff_.erase(it);
    }
  }
  // Drop own terms that fell above the tightened truncation.
  coeff_.erase(coeff_.upper_bound(trunc_), coeff_.end());
  return *this;
}

TruncatedSeries& TruncatedSeries::operator-=(const TruncatedSeries& o) {
  return *this += -o;
}

TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
  Exp va = a.valuation_or_above();
  Exp vb = b.valuation_or_above();
  Exp nt = std::min(a.trunc_ + vb, b.trunc_ + va);
  TruncatedSeries r(nt);
  for (const auto& [ea, ca] : a.coeff_) {
    if (ea + vb > nt) break;
    for (const auto& [eb, cb] : b.coeff_) {
      Exp e = ea + eb;
      if (e > nt) break;
      auto it = r.coeff_.find(e);
      if (it == r.coeff_.end()) {
        r.coeff_.emplace(e, ca * cb);
      } else {
        it->second += ca * cb;
        if (it->second.is_zero()) r.coeff_.erase(it);
      }
    }
  }
  return r;
}

TruncatedSeries TruncatedSeries::scaled(const Scalar& c) const {
  TruncatedSeries r(trunc_);
  if (c.is_zero()) return r;
  for (const auto& [e, cc] : coeff_) r.coeff_.emplace(e, cc * c);
  return r;
}

bool TruncatedSeries::agrees_with(const TruncatedSeries& o) const {
  Exp w = std::min(trunc_, o.trunc_);
  auto ia = coeff_.begin();
  auto ib = o.coeff_.begin();
  while (true) {
    while (ia != coeff_.end() && ia->first > w) ia = coeff_.end();
    while (ib != o.coeff_.end() && ib->first > w) ib = o.coeff_.end();
    bool ea = ia == coeff_.end();
    bool eb = ib == o.coeff_.end();
    if (ea && eb) return true;
    if (ea != eb) return false;
    if (ia->first != ib->first || ia->second != ib->second) return false;
    ++ia;
    ++ib;
  }
}

std::string TruncatedSeries::str() const {
  std::ostringstream os;
  if (coeff_.empty()) {
    os << "0";
  } else {
    bool first = true;
    for (const auto& [e, c] : coeff_) {
      if (!first) os << " + ";
      first = false;
      os << "(" << c.str() << ")";
      if (e == 1)
        os << "*t";
      else if (e != 0)
        os << "*t^" << e;
    }
  }
  os << " + O(t^" << (trunc_ + 1) << ")";
  return os.str();
}

TruncatedSeries compose(const TruncatedSeries& outer,
                        const TruncatedSeries& inner) {
  require(inner.coeff(0).is_zero(), Errc::nonzero_constant_term,
          "composition requires inner series without constant term");
  Exp v = inner.valuation_or_above();
  Exp no = outer.truncation();
  Exp ni = inner.truncation();
  require(no >= 0 && ni >= 0, Errc::truncation_insufficient,
          "composition of series with empty known window");
  Exp nt = ni;
  if (v <= ni) nt = std::min(ni, (no + 1) * v - 1);
  TruncatedSeries r = TruncatedSeries::zero(nt);
  TruncatedSeries pw = TruncatedSeries::one(nt);
  Exp k = 0;
  for (const auto& [e, c] : outer.terms()) {
    if (pw.is_zero()) break;
    while (k < e) {
      pw = (pw * inner).truncated(nt);
      ++k;
      if (pw.is_zero()) break;
    }
    if (k == e) r += pw.scaled(c);
  }
  return r.truncated(nt);
}

TruncatedSeries reciprocal(const TruncatedSeries& u) {
  const Scalar& u0 = u.coeff(0);
  require(!u0.is_zero(), Errc::zero_constant_term,
          "reciprocal of series with zero constant term");
  Exp n = u.truncation();
  TruncatedSeries r(n);
  Scalar inv0 = u0.inverse();
  r.set_coeff(0, inv0);
  for (Exp k = 1; k <= n; ++k) {
    Scalar acc(0);
    for (const auto& [e, c] : u.terms()) {
      if (e == 0) continue;
      if (e > k) break;
      const Scalar& rk = r.coeff(k - e);
      if (!rk.is_zero()) acc += c * rk;
    }
    if (!acc.is_zero()) r.set_coeff(k, -(acc * inv0));
  }
  return r;
}

TruncatedSeries compositional_inverse(const TruncatedSeries& g) {
  auto v = g.valuation();
  require(v.has_value() && *v == 1, Errc::bad_valuation,
          "compositional inverse requires valuation exactly 1");
  Exp n = g.truncation();
  TruncatedSeries h = TruncatedSeries::monomial(g.coeff(1).inverse(), 1, 1);
  TruncatedSeries gp = g.derivative();
  Exp prec = 1;
  while (prec < n) {
    prec = std::min(n, 2 * prec);
    // Lift the known window; coefficients above the old precision start as 0
    // and are corrected by the Newton step.
    TruncatedSeries hl(prec);
    for (const auto& [e, c] : h.terms()) hl.set_coeff(e, c);
    TruncatedSeries err = compose(g.truncated(prec), hl) -
                          TruncatedSeries::monomial(Scalar(1), 1, prec);
    TruncatedSeries corr =
        err * reciprocal(compose(gp.truncated(prec - 1), hl));
    h = (hl - corr).truncated(prec);
  }
  return h;
}

TruncatedSeries compose_perturbed(const TruncatedSeries& f,
                                  const TruncatedSeries& e,
                                  std::optional<Exp> M_opt) {
  Exp sound = std::min(f.truncation(), e.truncation() + 1);
  Exp M = M_opt.value_or(sound);
  require(M <= sound, Errc::truncation_insufficient,
          "perturbed composition requested beyond sound window");
  TruncatedSeries acc = f.truncated(M);
  if (e.is_zero()) return acc;
  Exp d = *e.valuation();
  require(d >= 1, Errc::bad_valuation,
          "perturbation must have positive valuation");
  // f(u(1+e)) = sum_k D_k(u) e(u)^k with D_k(u) = sum_i f_i C(i,k) u^i.
  TruncatedSeries D = f.truncated(M);
  TruncatedSeries P = TruncatedSeries::one(M);
  for (Exp k = 1; k * d <= M; ++k) {
    TruncatedSeries Dn(M);
    for (const auto& [i, c] : D.terms())
      if (i >= k) Dn.set_coeff(i, c * Scalar(i - k + 1) / Scalar(k));
    D = Dn;
    P = (P * e).truncated(M);
    if (D.is_zero() || P.is_zero()) break;
    acc += D * P;
  }
  return acc.truncated(M);
}

TruncatedSeries nth_root_of_unit_series(const TruncatedSeries& u,
                                        long long n) {
  require(n >= 1, Errc::internal, "root index must be positive");
  require(u.coeff(0).is_one(), Errc::not_unit_one,
          "n-th root requires constant term exactly 1");
  Exp nt = u.truncation();
  TruncatedSeries r(nt);
  r.set_coeff(0, Scalar(1));
  Scalar ns(n);
  // From n*u*r' = u'*r with r(0) = 1.
  for (Exp k = 1; k <= nt; ++k) {
    Scalar acc(0);
    for (const auto& [e, c] : u.terms()) {
      if (e == 0) continue;
      if (e > k) break;
      const Scalar& rk = r.coeff(k - e);
      if (!rk.is_zero()) acc += Scalar(e) * c * rk;
    }
    for (const auto& [e, c] : r.terms()) {
      if (e == 0 || e >= k) continue;
      const Scalar& uk = u.coeff(k - e);
      if (!uk.is_zero()) acc -= ns * Scalar(e) * c * uk;
    }
    if (!acc.is_zero())
      r.set_coeff(k, acc / (ns * Scalar(k)));
  }
  return r;
}

}  // namespace branchforge
