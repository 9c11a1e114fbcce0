#pragma once

#include <complex>
#include <cstdint>
#include <string>

namespace spinsym {

/// Exact rational with 64-bit numerator/denominator. Arithmetic throws
/// std::overflow_error instead of wrapping.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(int64_t num, int64_t den = 1);

  int64_t num() const { return num_; }
  int64_t den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_one() const { return num_ == 1 && den_ == 1; }
  bool is_integer() const { return den_ == 1; }
  int sign() const { return (num_ > 0) - (num_ < 0); }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const;

  /// Parses "12", "-3/4" or a decimal literal like "2.01".
  static Rational parse(const std::string& text);

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational operator-() const;

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend bool operator<(const Rational& a, const Rational& b);

 private:
  int64_t num_ = 0;
  int64_t den_ = 1;
};

/// Exact complex rational re + i*im.
struct CRational {
  Rational re;
  Rational im;

  CRational() = default;
  CRational(Rational r) : re(r) {}
  CRational(int64_t n) : re(n) {}
  CRational(Rational r, Rational i) : re(r), im(i) {}

  bool is_zero() const { return re.is_zero() && im.is_zero(); }
  bool is_one() const { return re.is_one() && im.is_zero(); }
  bool is_real() const { return im.is_zero(); }
  std::complex<double> to_complex() const { return {re.to_double(), im.to_double()}; }
  CRational conj() const { return {re, -im}; }

  friend CRational operator+(const CRational& a, const CRational& b) { return {a.re + b.re, a.im + b.im}; }
  friend CRational operator-(const CRational& a, const CRational& b) { return {a.re - b.re, a.im - b.im}; }
  friend CRational operator*(const CRational& a, const CRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend CRational operator/(const CRational& a, const CRational& b);
  CRational operator-() const { return {-re, -im}; }
  friend bool operator==(const CRational& a, const CRational& b) = default;

  /// Integer power; negative exponents invert.
  CRational pow(int64_t n) const;
};

/// Best rational approximation with bounded denominator (continued fractions).
Rational approximate_rational(double value, int64_t max_den);

}  // namespace spinsym
