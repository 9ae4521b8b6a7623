#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <iosfwd>
#include <string>

namespace malsched {

/// Exact rational scalar. Always canonical: lowest terms, denominator > 0.
/// Every quantity in the solver (speeds, loads, LP entries, duals, makespans)
/// is a Rat; there is no floating-point path anywhere.
class Rat {
public:
  Rat() : v_(0) {}
  Rat(long n) : v_(static_cast<long>(n)) {}  // NOLINT(google-explicit-constructor)
  Rat(long n, long d);
  explicit Rat(const mpq_class& v) : v_(v) { v_.canonicalize(); }

  /// Parses "p", "-p" or "p/q" (arbitrary precision). Throws ValidationError.
  static Rat parse(const std::string& text);

  const mpq_class& raw() const { return v_; }

  Rat operator+(const Rat& o) const { return Rat(mpq_class(v_ + o.v_)); }
  Rat operator-(const Rat& o) const { return Rat(mpq_class(v_ - o.v_)); }
  Rat operator*(const Rat& o) const { return Rat(mpq_class(v_ * o.v_)); }
  Rat operator/(const Rat& o) const;
  Rat operator-() const { return Rat(mpq_class(-v_)); }
  Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
  Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
  Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }
  Rat& operator/=(const Rat& o) { *this = *this / o; return *this; }

  bool operator==(const Rat& o) const { return v_ == o.v_; }
  bool operator!=(const Rat& o) const { return v_ != o.v_; }
  bool operator<(const Rat& o) const { return v_ < o.v_; }
  bool operator<=(const Rat& o) const { return v_ <= o.v_; }
  bool operator>(const Rat& o) const { return v_ > o.v_; }
  bool operator>=(const Rat& o) const { return v_ >= o.v_; }

  int sign() const { return sgn(v_); }
  bool is_zero() const { return sgn(v_) == 0; }
  bool is_integer() const { return v_.get_den() == 1; }

  /// Largest integer <= value, as a Rat.
  Rat floor() const;
  /// floor() for values known to fit in long (demands, class counts).
  long floor_long() const;

  /// Exact power of two, exponent may be negative.
  static Rat pow2(long k);

  /// Canonical text: "p" when integral, else "p/q".
  std::string str() const;
  /// Decimal approximation for human-facing logs only.
  double approx() const { return v_.get_d(); }

private:
  mpq_class v_;
};

std::ostream& operator<<(std::ostream& os, const Rat& r);

}  // namespace malsched
