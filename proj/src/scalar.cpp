#include "branchforge/scalar.hpp"

#include <cctype>
#include <ostream>

#include "branchforge/errors.hpp"

namespace branchforge {

Scalar::Scalar(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {
  re_.canonicalize();
  im_.canonicalize();
}

Scalar Scalar::rational(long num, long den) {
  require(den != 0, Errc::division_by_zero, "rational with zero denominator");
  mpq_class q(num, den);
  q.canonicalize();
  return Scalar(q);
}

Scalar Scalar::complex(long re_num, long re_den, long im_num, long im_den) {
  require(re_den != 0 && im_den != 0, Errc::division_by_zero,
          "rational with zero denominator");
  mpq_class r(re_num, re_den), i(im_num, im_den);
  r.canonicalize();
  i.canonicalize();
  return Scalar(r, i);
}

Scalar& Scalar::operator+=(const Scalar& o) {
  re_ += o.re_;
  im_ += o.im_;
  return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) {
  re_ -= o.re_;
  im_ -= o.im_;
  return *this;
}

Scalar& Scalar::operator*=(const Scalar& o) {
  mpq_class r = re_ * o.re_ - im_ * o.im_;
  mpq_class i = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(r);
  im_ = std::move(i);
  return *this;
}

Scalar Scalar::inverse() const {
  require(!is_zero(), Errc::division_by_zero, "inverse of zero scalar");
  mpq_class n = norm2();
  return Scalar(re_ / n, -im_ / n);
}

Scalar& Scalar::operator/=(const Scalar& o) { return *this *= o.inverse(); }

Scalar Scalar::pow(long long e) const {
  if (e < 0) return inverse().pow(-e);
  Scalar acc(1), base = *this;
  while (e > 0) {
    if (e & 1) acc *= base;
    base *= base;
    e >>= 1;
  }
  return acc;
}

namespace {

// Parses a signed rational "p" or "p/q" starting at pos; advances pos.
mpq_class parse_rational(const std::string& s, size_t& pos) {
  size_t start = pos;
  if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
  size_t digits = 0;
  while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
    ++pos;
    ++digits;
  }
  require(digits > 0, Errc::parse_error, "expected digits in scalar '" + s + "'");
  if (pos < s.size() && s[pos] == '/') {
    ++pos;
    size_t den_digits = 0;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      ++pos;
      ++den_digits;
    }
    require(den_digits > 0, Errc::parse_error,
            "expected denominator digits in scalar '" + s + "'");
  }
  std::string tok = s.substr(start, pos - start);
  if (!tok.empty() && tok[0] == '+') tok.erase(0, 1);  // set_str rejects '+'
  mpq_class q;
  require(q.set_str(tok, 10) == 0, Errc::parse_error,
          "bad rational in scalar '" + s + "'");
  require(sgn(q.get_den()) != 0, Errc::parse_error,
          "zero denominator in scalar '" + s + "'");
  q.canonicalize();
  return q;
}

}  // namespace

Scalar Scalar::parse(const std::string& text) {
  require(!text.empty(), Errc::parse_error, "empty scalar string");
  size_t pos = 0;

  // Bare "i" or "-i" / "+i".
  auto bare_i = [&](size_t p) {
    return p + 1 == text.size() && text[p] == 'i';
  };
  if (bare_i(0)) return Scalar::i();
  if ((text[0] == '-' || text[0] == '+') && bare_i(1))
    return text[0] == '-' ? -Scalar::i() : Scalar::i();

  mpq_class first = parse_rational(text, pos);
  if (pos == text.size()) return Scalar(first);

  if (text[pos] == '*') {
    // Pure imaginary "r*i".
    require(pos + 2 == text.size() && text[pos + 1] == 'i', Errc::parse_error,
            "malformed scalar '" + text + "'");
    return Scalar(mpq_class(0), first);
  }

  require(text[pos] == '+' || text[pos] == '-', Errc::parse_error,
          "malformed scalar '" + text + "'");
  if (bare_i(pos + 1)) {
    mpq_class one(text[pos] == '-' ? -1 : 1);
    return Scalar(first, one);
  }
  mpq_class second = parse_rational(text, pos);
  require(pos + 2 == text.size() && text[pos] == '*' && text[pos + 1] == 'i',
          Errc::parse_error, "malformed scalar '" + text + "'");
  return Scalar(first, second);
}

std::string Scalar::str() const {
  if (is_real()) return re_.get_str();
  std::string out;
  if (sgn(re_) != 0) {
    out = re_.get_str();
    out += (sgn(im_) < 0) ? "-" : "+";
    mpq_class a = abs(im_);
    out += a.get_str();
  } else {
    out = im_.get_str();
  }
  out += "*i";
  return out;
}

std::ostream& operator<<(std::ostream& os, const Scalar& s) {
  return os << s.str();
}

}  // namespace branchforge
