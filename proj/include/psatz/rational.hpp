#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace psatz {

/// Exact rational scalar. Always canonical: lowest terms, positive
/// denominator. This is the coefficient type of the exact computation mode;
/// the float mode uses plain double.
class Rational {
 public:
  Rational() : v_(0) {}
  Rational(int n) : v_(n) {}                 // NOLINT(google-explicit-constructor)
  Rational(long n) : v_(static_cast<signed long>(n)) {}  // NOLINT
  Rational(long num, long den) : v_(num, den) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    v_.canonicalize();
  }
  explicit Rational(mpq_class q) : v_(std::move(q)) { v_.canonicalize(); }
  Rational(const mpz_class& num, const mpz_class& den) : v_(num, den) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    v_.canonicalize();
  }

  /// Parses "p", "p/q", or a decimal like "-3.25" exactly.
  static Rational from_string(std::string_view s);

  bool is_zero() const { return sgn(v_) == 0; }
  int sign() const { return sgn(v_); }
  Rational abs() const { return Rational(mpq_class(::abs(v_))); }

  double to_double() const { return v_.get_d(); }
  mpz_class numerator() const { return v_.get_num(); }
  mpz_class denominator() const { return v_.get_den(); }

  /// Canonical text form: "p" when the denominator is 1, else "p/q".
  std::string str() const { return v_.get_str(); }

  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw std::invalid_argument("Rational: division by zero");
    v_ /= o.v_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.v_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
  friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
  friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
  friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

 private:
  mpq_class v_;
};

inline Rational Rational::from_string(std::string_view s) {
  auto fail = [&] {
    throw std::invalid_argument("Rational: cannot parse '" + std::string(s) + "'");
  };
  if (s.empty()) fail();
  const auto slash = s.find('/');
  if (slash != std::string_view::npos) {
    const std::string num(s.substr(0, slash));
    const std::string den(s.substr(slash + 1));
    if (num.empty() || den.empty()) fail();
    try {
      mpq_class q(num + "/" + den);
      if (q.get_den() == 0) fail();
      q.canonicalize();
      return Rational(std::move(q));
    } catch (const std::invalid_argument&) {
      fail();
    }
  }
  const auto dot = s.find('.');
  if (dot != std::string_view::npos) {
    std::string digits(s.substr(0, dot));
    const std::string_view frac = s.substr(dot + 1);
    if (frac.empty()) fail();
    for (char c : frac) {
      if (c < '0' || c > '9') fail();
      digits.push_back(c);
    }
    try {
      mpz_class num(digits);
      mpz_class den(1);
      for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
      return Rational(num, den);
    } catch (const std::invalid_argument&) {
      fail();
    }
  }
  try {
    return Rational(mpq_class(mpz_class(std::string(s))));
  } catch (const std::invalid_argument&) {
    fail();
  }
  return Rational();  // unreachable
}

/// Nearest multiple of 1/denom to x, exactly (the double is expanded to its
/// exact dyadic value first). Halves round toward +infinity.
inline Rational round_to_denominator(double x, const mpz_class& denom) {
  if (denom <= 0) throw std::invalid_argument("round_to_denominator: denom must be positive");
  mpq_class exact(x);       // exact binary expansion of the double
  mpq_class scaled = exact * mpq_class(denom);
  // floor(scaled + 1/2)
  mpq_class shifted = scaled + mpq_class(1, 2);
  mpz_class n;
  mpz_fdiv_q(n.get_mpz_t(), shifted.get_num().get_mpz_t(), shifted.get_den().get_mpz_t());
  return Rational(n, denom);
}

}  // namespace psatz
