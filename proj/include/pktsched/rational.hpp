#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace pktsched {

/// Exact rational number in lowest terms with a positive denominator.
///
/// Values whose numerator and denominator fit in int64 are stored inline and
/// combined through 128-bit intermediates; anything larger is promoted to a
/// shared, immutable GMP rational and demoted again as soon as it fits.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t value) : num_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t num, std::int64_t den);
  explicit Rational(const mpq_class& value);

  /// Accepts "n", "n/d" (any sign on n, d != 0) with optional surrounding
  /// whitespace. Throws ValidationError otherwise.
  static Rational parse(std::string_view text);

  /// Always "num/den", e.g. "5/1", "-3/4".
  std::string str() const;
  double to_double() const;
  mpq_class to_mpq() const;

  int sign() const;
  bool is_integer() const;
  bool is_small() const { return !big_; }
  /// Inline numerator and denominator; meaningful only when is_small().
  std::int64_t small_num() const { return num_; }
  std::int64_t small_den() const { return den_; }

  Rational operator-() const;
  Rational reciprocal() const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b);
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

  friend std::ostream& operator<<(std::ostream& os, const Rational& r);

 private:
  static Rational from_wide(__int128 num, __int128 den);
  static Rational from_mpq(mpq_class value);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  std::shared_ptr<const mpq_class> big_;
};

}  // namespace pktsched
