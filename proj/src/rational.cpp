#include "spinsym/rational.h"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace spinsym {

namespace {

int64_t checked(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("rational overflow");
  return static_cast<int64_t>(v);
}

Rational make(__int128 num, __int128 den) {
  if (den == 0) throw std::domain_error("rational division by zero");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  __int128 a = num < 0 ? -num : num;
  __int128 b = den;
  while (b != 0) {
    __int128 r = a % b;
    a = b;
    b = r;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  return Rational(checked(num), checked(den));
}

}  // namespace

Rational::Rational(int64_t num, int64_t den) {
  if (den == 0) throw std::domain_error("rational division by zero");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  num_ = num;
  den_ = den;
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(const std::string& text) {
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
  }
  auto dot = text.find('.');
  if (dot == std::string::npos) return Rational(std::stoll(text));
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  int64_t den = 1;
  for (size_t k = dot + 1; k < text.size(); ++k) {
    if (den > INT64_MAX / 10) throw std::overflow_error("decimal literal too long: " + text);
    den *= 10;
  }
  if (digits.empty() || digits == "-") digits += "0";
  return Rational(std::stoll(digits), den);
}

Rational operator+(const Rational& a, const Rational& b) {
  return make(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
              static_cast<__int128>(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  return make(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
  return make(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
}

Rational Rational::operator-() const {
  if (num_ == INT64_MIN) throw std::overflow_error("rational overflow");
  return Rational(-num_, den_);
}

bool operator<(const Rational& a, const Rational& b) {
  return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
}

CRational operator/(const CRational& a, const CRational& b) {
  Rational d = b.re * b.re + b.im * b.im;
  if (d.is_zero()) throw std::domain_error("complex rational division by zero");
  CRational num = a * b.conj();
  return {num.re / d, num.im / d};
}

CRational CRational::pow(int64_t n) const {
  if (n < 0) return CRational(1) / pow(-n);
  CRational result(1);
  CRational base = *this;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

Rational approximate_rational(double value, int64_t max_den) {
  if (!std::isfinite(value)) throw std::domain_error("cannot approximate non-finite value");
  double x = value;
  int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  for (int iter = 0; iter < 64; ++iter) {
    double a = std::floor(x);
    if (std::abs(a) > 1e15) break;
    auto ai = static_cast<int64_t>(a);
    int64_t p2 = ai * p1 + p0;
    int64_t q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    double frac = x - a;
    if (std::abs(frac) < 1e-12) break;
    x = 1.0 / frac;
  }
  if (q1 == 0) return Rational(static_cast<int64_t>(std::llround(value)));
  return Rational(p1, q1);
}

}  // namespace spinsym
