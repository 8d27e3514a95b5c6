#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <iosfwd>
#include <string>

namespace branchforge {

// Exact element of Q(i). Both parts are arbitrary-precision rationals held in
// canonical form (lowest terms, positive denominator), so equality is
// structural. No floating point anywhere.
class Scalar {
 public:
  Scalar() : re_(0), im_(0) {}
  Scalar(long v) : re_(v), im_(0) {}         // NOLINT: implicit by design
  Scalar(int v) : re_(v), im_(0) {}          // NOLINT
  Scalar(long long v) : re_(static_cast<long>(v)), im_(0) {}  // NOLINT
  Scalar(mpq_class re, mpq_class im = mpq_class(0));

  static Scalar rational(long num, long den);
  static Scalar complex(long re_num, long re_den, long im_num, long im_den);
  static Scalar i() { return Scalar(mpq_class(0), mpq_class(1)); }

  // Accepts the wire format: "p", "p/q", "p/q+r/s*i", "p/q-r/s*i", "r*i",
  // "i", "-i". Throws BranchError(parse_error) on malformed text.
  static Scalar parse(const std::string& text);

  const mpq_class& re() const { return re_; }
  const mpq_class& im() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }
  bool is_one() const { return re_ == 1 && sgn(im_) == 0; }

  Scalar operator-() const { return Scalar(-re_, -im_); }
  Scalar conj() const { return Scalar(re_, -im_); }

  Scalar& operator+=(const Scalar& o);
  Scalar& operator-=(const Scalar& o);
  Scalar& operator*=(const Scalar& o);
  Scalar& operator/=(const Scalar& o);

  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
  friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }

  friend bool operator==(const Scalar& a, const Scalar& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

  Scalar inverse() const;

  // Integer power, negative exponents allowed for nonzero values.
  Scalar pow(long long e) const;

  // |z|^2 as an exact rational.
  mpq_class norm2() const { return re_ * re_ + im_ * im_; }

  // Wire format, round-trips through parse().
  std::string str() const;

 private:
  mpq_class re_, im_;
};

std::ostream& operator<<(std::ostream& os, const Scalar& s);

}  // namespace branchforge
