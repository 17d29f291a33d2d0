#include "pktsched/rational.hpp"

#include <cctype>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "pktsched/errors.hpp"

namespace pktsched {
namespace {

using i128 = __int128;
using u128 = unsigned __int128;

constexpr std::int64_t kMin = std::numeric_limits<std::int64_t>::min();
constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();

u128 abs128(i128 v) { return v < 0 ? -static_cast<u128>(v) : static_cast<u128>(v); }

u128 gcd128(u128 a, u128 b) {
  constexpr u128 kLow = std::numeric_limits<std::uint64_t>::max();
  if (a <= kLow && b <= kLow) {
    return std::gcd(static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b));
  }
  while (b != 0) {
    u128 r = a % b;
    a = b;
    b = r;
  }
  return a;
}

bool fits(i128 v) { return v > kMin && v <= kMax; }

mpz_class to_mpz(i128 v) {
  u128 mag = abs128(v);
  mpz_class z = static_cast<unsigned long>(mag >> 64);
  z <<= 64;
  z += static_cast<unsigned long>(mag & std::numeric_limits<std::uint64_t>::max());
  if (v < 0) z = -z;
  return z;
}

bool is_integer_literal(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

mpz_class parse_integer(std::string_view s) {
  std::string digits(s[0] == '+' ? s.substr(1) : s);
  return mpz_class(digits, 10);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  *this = from_wide(num, den);
}

Rational::Rational(const mpq_class& value) { *this = from_mpq(value); }

Rational Rational::from_wide(i128 num, i128 den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  if (den != 1) {
    u128 g = gcd128(abs128(num), static_cast<u128>(den));
    if (g > 1) {
      num /= static_cast<i128>(g);
      den /= static_cast<i128>(g);
    }
  }
  if (fits(num) && fits(den)) {
    Rational r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(den);
    return r;
  }
  return from_mpq(mpq_class(to_mpz(num), to_mpz(den)));
}

Rational Rational::from_mpq(mpq_class value) {
  value.canonicalize();
  const mpz_class& n = value.get_num();
  const mpz_class& d = value.get_den();
  if (n.fits_slong_p() && d.fits_slong_p() && n.get_si() != kMin) {
    Rational r;
    r.num_ = n.get_si();
    r.den_ = d.get_si();
    return r;
  }
  Rational r;
  r.big_ = std::make_shared<const mpq_class>(std::move(value));
  return r;
}

Rational Rational::parse(std::string_view text) {
  std::string_view s = trim(text);
  auto slash = s.find('/');
  std::string_view num_part = trim(s.substr(0, slash));
  std::string_view den_part = slash == std::string_view::npos ? std::string_view("1") : trim(s.substr(slash + 1));
  if (!is_integer_literal(num_part) || !is_integer_literal(den_part)) {
    throw ValidationError("not a rational number: '" + std::string(text) + "'");
  }
  mpz_class num = parse_integer(num_part);
  mpz_class den = parse_integer(den_part);
  if (den == 0) throw ValidationError("zero denominator in '" + std::string(text) + "'");
  return from_mpq(mpq_class(num, den));
}

mpq_class Rational::to_mpq() const {
  if (big_) return *big_;
  return mpq_class(mpz_class(static_cast<long>(num_)), mpz_class(static_cast<long>(den_)));
}

std::string Rational::str() const {
  if (big_) return big_->get_num().get_str() + "/" + big_->get_den().get_str();
  return std::to_string(num_) + "/" + std::to_string(den_);
}

double Rational::to_double() const {
  if (big_) return big_->get_d();
  return static_cast<double>(num_) / static_cast<double>(den_);
}

int Rational::sign() const {
  if (big_) return sgn(*big_);
  return (num_ > 0) - (num_ < 0);
}

bool Rational::is_integer() const {
  if (big_) return big_->get_den() == 1;
  return den_ == 1;
}

Rational Rational::operator-() const {
  if (big_) return from_mpq(-*big_);
  Rational r = *this;
  r.num_ = -num_;
  return r;
}

Rational Rational::reciprocal() const {
  if (sign() == 0) throw std::domain_error("reciprocal of zero");
  if (big_) return from_mpq(1 / *big_);
  return from_wide(den_, num_);
}

Rational operator+(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_) {
    if (a.den_ == b.den_) {
      if (a.den_ == 1) {
        std::int64_t out;
        if (!__builtin_add_overflow(a.num_, b.num_, &out) && out != kMin) return Rational(out);
      }
      return Rational::from_wide(static_cast<i128>(a.num_) + b.num_, a.den_);
    }
    return Rational::from_wide(static_cast<i128>(a.num_) * b.den_ + static_cast<i128>(b.num_) * a.den_,
                               static_cast<i128>(a.den_) * b.den_);
  }
  return Rational::from_mpq(a.to_mpq() + b.to_mpq());
}

Rational operator-(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_) {
    if (a.den_ == b.den_) {
      if (a.den_ == 1) {
        std::int64_t out;
        if (!__builtin_sub_overflow(a.num_, b.num_, &out) && out != kMin) return Rational(out);
      }
      return Rational::from_wide(static_cast<i128>(a.num_) - b.num_, a.den_);
    }
    return Rational::from_wide(static_cast<i128>(a.num_) * b.den_ - static_cast<i128>(b.num_) * a.den_,
                               static_cast<i128>(a.den_) * b.den_);
  }
  return Rational::from_mpq(a.to_mpq() - b.to_mpq());
}

Rational operator*(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_) {
    if (a.den_ == 1 && b.den_ == 1) {
      std::int64_t out;
      if (!__builtin_mul_overflow(a.num_, b.num_, &out) && out != kMin) return Rational(out);
    }
    // Cross-reduce so the products are already in lowest terms.
    std::int64_t g1 = std::gcd(a.num_, b.den_);
    std::int64_t g2 = std::gcd(b.num_, a.den_);
    if (g1 == 0) g1 = 1;
    if (g2 == 0) g2 = 1;
    i128 num = static_cast<i128>(a.num_ / g1) * (b.num_ / g2);
    i128 den = static_cast<i128>(a.den_ / g2) * (b.den_ / g1);
    return Rational::from_wide(num, den);
  }
  return Rational::from_mpq(a.to_mpq() * b.to_mpq());
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.sign() == 0) throw std::domain_error("division by zero");
  return a * b.reciprocal();
}

bool operator==(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_) return a.num_ == b.num_ && a.den_ == b.den_;
  if (a.big_ && b.big_) return *a.big_ == *b.big_;
  return false;  // canonical forms: a big value never equals a small one
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_) {
    if (a.den_ == b.den_) return a.num_ <=> b.num_;
    i128 lhs = static_cast<i128>(a.num_) * b.den_;
    i128 rhs = static_cast<i128>(b.num_) * a.den_;
    return lhs <=> rhs;
  }
  int c = cmp(a.to_mpq(), b.to_mpq());
  return c <=> 0;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace pktsched
