#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qexp/error.hpp"

namespace qexp::sd {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

// Polynomial in N with exact rational coefficients, lowest degree first.
// Always trimmed: the zero polynomial has no coefficients.
class Poly {
 public:
  Poly() = default;
  Poly(BigRational c) {  // NOLINT: constants convert implicitly
    if (c != 0) coeffs_.push_back(std::move(c));
  }
  Poly(int c) : Poly(BigRational(c)) {}  // NOLINT

  static Poly from_coeffs(std::vector<BigRational> c) {
    Poly p;
    p.coeffs_ = std::move(c);
    p.trim();
    return p;
  }

  /// N^k
  static Poly monomial(int k, BigRational c = 1) {
    std::vector<BigRational> v(k + 1, 0);
    v[k] = std::move(c);
    return from_coeffs(std::move(v));
  }

  bool is_zero() const { return coeffs_.empty(); }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }  // -1 for zero
  const BigRational& lead() const { return coeffs_.back(); }
  const std::vector<BigRational>& coeffs() const { return coeffs_; }
  BigRational coeff(int k) const { return k >= 0 && k <= degree() ? coeffs_[k] : BigRational(0); }

  friend bool operator==(const Poly&, const Poly&) = default;

  friend Poly operator+(const Poly& a, const Poly& b) {
    std::vector<BigRational> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) c[i] += a.coeffs_[i];
    for (std::size_t i = 0; i < b.coeffs_.size(); ++i) c[i] += b.coeffs_[i];
    return from_coeffs(std::move(c));
  }
  friend Poly operator-(const Poly& a) {
    Poly r = a;
    for (auto& c : r.coeffs_) c = -c;
    return r;
  }
  friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }
  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<BigRational> c(a.coeffs_.size() + b.coeffs_.size() - 1, 0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return from_coeffs(std::move(c));
  }

  /// Quotient and remainder; divisor must be nonzero.
  static std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b) {
    if (b.is_zero()) throw NumericalError("polynomial division by zero");
    if (a.degree() < b.degree()) return {Poly{}, a};
    std::vector<BigRational> rem = a.coeffs_;
    std::vector<BigRational> quo(a.degree() - b.degree() + 1, 0);
    for (int k = a.degree() - b.degree(); k >= 0; --k) {
      const BigRational f = rem[k + b.degree()] / b.lead();
      quo[k] = f;
      if (f == 0) continue;
      for (int j = 0; j <= b.degree(); ++j) rem[k + j] -= f * b.coeffs_[j];
    }
    rem.resize(b.degree());
    return {from_coeffs(std::move(quo)), from_coeffs(std::move(rem))};
  }

  Poly monic() const {
    if (is_zero()) return {};
    Poly r = *this;
    const BigRational l = lead();
    for (auto& c : r.coeffs_) c /= l;
    return r;
  }

  /// Monic greatest common divisor (zero only if both are zero).
  static Poly gcd(Poly a, Poly b) {
    while (!b.is_zero()) {
      Poly r = divmod(a, b).second;
      a = std::move(b);
      b = std::move(r);
    }
    return a.monic();
  }

  BigRational operator()(const BigRational& x) const {
    BigRational acc = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  double operator()(double x) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + static_cast<double>(*it);
    return acc;
  }

 private:
  void trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
  }

  std::vector<BigRational> coeffs_;
};

/// Integer-coefficient text, highest power first: "N^2 - 1", "-3*N", "2".
inline std::string integer_poly_text(const std::vector<BigInt>& c) {
  std::ostringstream os;
  bool first = true;
  for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) {
    if (c[k] == 0) continue;
    BigInt mag = abs(c[k]);
    if (first) {
      if (c[k] < 0) os << '-';
    } else {
      os << (c[k] < 0 ? " - " : " + ");
    }
    first = false;
    if (k == 0) {
      os << mag;
    } else {
      if (mag != 1) os << mag << '*';
      os << 'N';
      if (k > 1) os << '^' << k;
    }
  }
  if (first) os << '0';
  return os.str();
}

// p(N) / q(N) in lowest terms with monic denominator.
class RationalInN {
 public:
  RationalInN() : num_(), den_(1) {}
  RationalInN(Poly p) : num_(std::move(p)), den_(1) {}  // NOLINT
  RationalInN(int c) : RationalInN(Poly(c)) {}          // NOLINT
  RationalInN(Poly p, Poly q) : num_(std::move(p)), den_(std::move(q)) {
    if (den_.is_zero()) throw NumericalError("rational function with zero denominator");
    normalize();
  }

  static RationalInN N() { return RationalInN(Poly::monomial(1)); }

  /// N^k for any integer k.
  static RationalInN power_of_N(int k) {
    return k >= 0 ? RationalInN(Poly::monomial(k)) : RationalInN(Poly(1), Poly::monomial(-k));
  }

  const Poly& numerator() const { return num_; }
  const Poly& denominator() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_constant() const { return num_.degree() <= 0 && den_.degree() == 0; }

  friend bool operator==(const RationalInN&, const RationalInN&) = default;

  friend RationalInN operator+(const RationalInN& a, const RationalInN& b) {
    if (a.den_ == b.den_) return RationalInN(a.num_ + b.num_, a.den_);
    return RationalInN(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend RationalInN operator-(const RationalInN& a) { return RationalInN(-a.num_, a.den_); }
  friend RationalInN operator-(const RationalInN& a, const RationalInN& b) { return a + (-b); }
  friend RationalInN operator*(const RationalInN& a, const RationalInN& b) {
    return RationalInN(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend RationalInN operator/(const RationalInN& a, const RationalInN& b) {
    if (b.is_zero()) throw NumericalError("rational function division by zero");
    return RationalInN(a.num_ * b.den_, a.den_ * b.num_);
  }
  RationalInN& operator+=(const RationalInN& o) { return *this = *this + o; }
  RationalInN& operator-=(const RationalInN& o) { return *this = *this - o; }

  BigRational operator()(const BigRational& n) const {
    const BigRational d = den_(n);
    if (d == 0) throw NumericalError("rational function has a pole at N = " + n.str());
    return num_(n) / d;
  }
  double operator()(double n) const { return static_cast<double>((*this)(BigRational(n))); }

  /// Canonical text "p(N)/q(N)" with coprime integer coefficients and
  /// positive leading denominator coefficient; multi-term sides are parenthesized.
  std::string to_string() const {
    BigInt l = 1;
    for (const auto& c : num_.coeffs()) l = boost::multiprecision::lcm(l, denominator_of(c));
    for (const auto& c : den_.coeffs()) l = boost::multiprecision::lcm(l, denominator_of(c));
    std::vector<BigInt> p, q;
    for (const auto& c : num_.coeffs()) p.push_back(numerator_of(c * l));
    for (const auto& c : den_.coeffs()) q.push_back(numerator_of(c * l));
    BigInt g = 0;
    for (const auto& c : p) g = boost::multiprecision::gcd(g, c);
    for (const auto& c : q) g = boost::multiprecision::gcd(g, c);
    if (g != 0 && g != 1) {
      for (auto& c : p) c /= g;
      for (auto& c : q) c /= g;
    }
    auto side = [](const std::vector<BigInt>& c) {
      const std::string s = integer_poly_text(c);
      const auto terms = std::count_if(c.begin(), c.end(), [](const BigInt& x) { return x != 0; });
      return terms > 1 ? "(" + s + ")" : s;
    };
    return side(p) + "/" + side(q);
  }

  friend std::ostream& operator<<(std::ostream& os, const RationalInN& r) { return os << r.to_string(); }

 private:
  static BigInt numerator_of(const BigRational& r) { return boost::multiprecision::numerator(r); }
  static BigInt denominator_of(const BigRational& r) { return boost::multiprecision::denominator(r); }

  void normalize() {
    if (num_.is_zero()) {
      den_ = Poly(1);
      return;
    }
    const Poly g = Poly::gcd(num_, den_);
    if (g.degree() > 0) {
      num_ = Poly::divmod(num_, g).first;
      den_ = Poly::divmod(den_, g).first;
    }
    const BigRational l = den_.lead();
    if (l != 1) {
      num_ = num_ * Poly(BigRational(1) / l);
      den_ = den_.monic();
    }
  }

  Poly num_;
  Poly den_;
};

}  // namespace qexp::sd
