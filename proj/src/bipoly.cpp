#include "branchforge/bipoly.hpp"

#include <algorithm>
#include <sstream>

#include "branchforge/errors.hpp"

namespace branchforge {

BivariatePoly BivariatePoly::monomial(const Scalar& c, Exp a, Exp b) {
  BivariatePoly p;
  p.set_coeff(a, b, c);
  return p;
}

Scalar BivariatePoly::coeff(Exp a, Exp b) const {
  auto it = coeff_.find({a, b});
  return it == coeff_.end() ? Scalar(0) : it->second;
}

void BivariatePoly::set_coeff(Exp a, Exp b, const Scalar& c) {
  require(a >= 0 && b >= 0, Errc::internal,
          "negative exponent in polynomial");
  if (c.is_zero())
    coeff_.erase({a, b});
  else
    coeff_[{a, b}] = c;
}

Exp BivariatePoly::total_degree() const {
  Exp d = -1;
  for (const auto& [ab, c] : coeff_) d = std::max(d, ab.first + ab.second);
  return d;
}

Exp BivariatePoly::low_degree() const {
  if (coeff_.empty()) return -1;
  Exp d = -1;
  for (const auto& [ab, c] : coeff_) {
    Exp t = ab.first + ab.second;
    if (d < 0 || t < d) d = t;
  }
  return d;
}

BivariatePoly BivariatePoly::truncate_total_degree(Exp cap) const {
  BivariatePoly p;
  for (const auto& [ab, c] : coeff_)
    if (ab.first + ab.second <= cap) p.coeff_.emplace(ab, c);
  return p;
}

BivariatePoly BivariatePoly::partial_x() const {
  BivariatePoly p;
  for (const auto& [ab, c] : coeff_) {
    if (ab.first == 0) continue;
    p.coeff_.emplace(std::make_pair(ab.first - 1, ab.second),
                     c * Scalar(ab.first));
  }
  return p;
}

BivariatePoly BivariatePoly::partial_y() const {
  BivariatePoly p;
  for (const auto& [ab, c] : coeff_) {
    if (ab.second == 0) continue;
    p.coeff_.emplace(std::make_pair(ab.first, ab.second - 1),
                     c * Scalar(ab.second));
  }
  return p;
}

BivariatePoly BivariatePoly::operator-() const {
  BivariatePoly p;
  for (const auto& [ab, c] : coeff_) p.coeff_.emplace(ab, -c);
  return p;
}

BivariatePoly& BivariatePoly::operator+=(const BivariatePoly& o) {
  for (const auto& [ab, c] : o.coeff_) {
    auto it = coeff_.find(ab);
    if (it == coeff_.end()) {
      coeff_.emplace(ab, c);
    } else {
      it->second += c;
      if (it->second.is_zero()) coeff_.erase(it);
    }
  }
  return *this;
}

BivariatePoly& BivariatePoly::operator-=(const BivariatePoly& o) {
  return *this += -o;
}

BivariatePoly operator*(const BivariatePoly& a, const BivariatePoly& b) {
  BivariatePoly p;
  for (const auto& [ea, ca] : a.coeff_) {
    for (const auto& [eb, cb] : b.coeff_) {
      std::pair<Exp, Exp> e{ea.first + eb.first, ea.second + eb.second};
      auto it = p.coeff_.find(e);
      if (it == p.coeff_.end()) {
        p.coeff_.emplace(e, ca * cb);
      } else {
        it->second += ca * cb;
        if (it->second.is_zero()) p.coeff_.erase(it);
      }
    }
  }
  return p;
}

BivariatePoly BivariatePoly::scaled(const Scalar& c) const {
  BivariatePoly p;
  if (c.is_zero()) return p;
  for (const auto& [ab, cc] : coeff_) p.coeff_.emplace(ab, cc * c);
  return p;
}

TruncatedSeries BivariatePoly::eval_on_curve(const TruncatedSeries& xs,
                                             const TruncatedSeries& ys) const {
  Exp amax = 0, bmax = 0;
  for (const auto& [ab, c] : coeff_) {
    amax = std::max(amax, ab.first);
    bmax = std::max(bmax, ab.second);
  }
  std::vector<TruncatedSeries> xp, yp;
  xp.reserve(amax + 1);
  yp.reserve(bmax + 1);
  xp.push_back(TruncatedSeries::one(kExactTrunc));
  for (Exp a = 1; a <= amax; ++a) xp.push_back(xp.back() * xs);
  yp.push_back(TruncatedSeries::one(kExactTrunc));
  for (Exp b = 1; b <= bmax; ++b) yp.push_back(yp.back() * ys);
  TruncatedSeries r = TruncatedSeries::zero(kExactTrunc);
  for (const auto& [ab, c] : coeff_)
    r += (xp[ab.first] * yp[ab.second]).scaled(c);
  return r;
}

std::string BivariatePoly::str() const {
  if (coeff_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [ab, c] : coeff_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.str() << ")";
    if (ab.first == 1)
      os << "*x";
    else if (ab.first > 1)
      os << "*x^" << ab.first;
    if (ab.second == 1)
      os << "*y";
    else if (ab.second > 1)
      os << "*y^" << ab.second;
  }
  return os.str();
}

}  // namespace branchforge
