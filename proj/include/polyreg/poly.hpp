#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "polyreg/errors.hpp"
#include "polyreg/rational.hpp"

namespace polyreg {

// Dense univariate polynomial, coefficients stored from degree 0 upward.
template <class T>
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(std::initializer_list<T> c) : c_(c) { trim(); }
  explicit Polynomial(std::vector<T> c) : c_(std::move(c)) { trim(); }
  static Polynomial constant(const T& v) { return Polynomial(std::vector<T>{v}); }
  static Polynomial monomial(const T& coeff, std::size_t deg) {
    std::vector<T> c(deg + 1, T(0));
    c[deg] = coeff;
    return Polynomial(std::move(c));
  }

  // -1 for the zero polynomial.
  [[nodiscard]] int degree() const { return static_cast<int>(c_.size()) - 1; }
  [[nodiscard]] bool is_zero() const { return c_.empty(); }
  [[nodiscard]] const std::vector<T>& coeffs() const { return c_; }
  [[nodiscard]] T coeff(std::size_t k) const { return k < c_.size() ? c_[k] : T(0); }
  [[nodiscard]] T leading() const { return c_.empty() ? T(0) : c_.back(); }

  template <class X>
  [[nodiscard]] X operator()(const X& x) const {
    X acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + X(*it);
    return acc;
  }

  [[nodiscard]] bool is_even() const {
    for (std::size_t k = 1; k < c_.size(); k += 2)
      if (c_[k] != 0) return false;
    return true;
  }
  [[nodiscard]] bool is_odd() const {
    for (std::size_t k = 0; k < c_.size(); k += 2)
      if (c_[k] != 0) return false;
    return true;
  }

  [[nodiscard]] Polynomial derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<T> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * T(static_cast<long>(k));
    return Polynomial(std::move(d));
  }

  Polynomial& operator+=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), T(0));
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
    trim();
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), T(0));
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
    trim();
    return *this;
  }
  Polynomial& operator*=(const T& s) {
    for (auto& v : c_) v *= s;
    trim();
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(Polynomial a) { return a *= T(-1); }
  friend Polynomial operator*(Polynomial a, const T& s) { return a *= s; }
  friend Polynomial operator*(const T& s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<T> c(a.c_.size() + b.c_.size() - 1, T(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(c));
  }
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

  // Quotient and remainder; requires an exact field for T.
  [[nodiscard]] std::pair<Polynomial, Polynomial> divmod(const Polynomial& d) const {
    if (d.is_zero()) throw InexactDivision("division by the zero polynomial");
    std::vector<T> r = c_;
    const int dd = d.degree();
    if (degree() < dd) return {Polynomial{}, *this};
    std::vector<T> q(static_cast<std::size_t>(degree() - dd + 1), T(0));
    for (int k = degree(); k >= dd; --k) {
      const T f = r[static_cast<std::size_t>(k)] / d.leading();
      q[static_cast<std::size_t>(k - dd)] = f;
      for (int i = 0; i <= dd; ++i) r[static_cast<std::size_t>(k - dd + i)] -= f * d.c_[static_cast<std::size_t>(i)];
    }
    return {Polynomial(std::move(q)), Polynomial(std::move(r))};
  }

  // Throws InexactDivision on a nonzero remainder.
  [[nodiscard]] Polynomial exact_div(const Polynomial& d) const {
    auto [q, r] = divmod(d);
    if (!r.is_zero()) throw InexactDivision("polynomial division left a remainder");
    return q;
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == T(0)) c_.pop_back();
  }
  std::vector<T> c_;
};

using RatPoly = Polynomial<Rational>;

inline std::string to_string(const RatPoly& p, const std::string& var = "g") {
  if (p.is_zero()) return "0";
  std::string out;
  for (int k = p.degree(); k >= 0; --k) {
    const Rational& c = p.coeffs()[static_cast<std::size_t>(k)];
    if (c == 0) continue;
    if (!out.empty()) out += (c > 0 ? " + " : " - ");
    else if (c < 0) out += "-";
    const Rational a = abs(c);
    if (k == 0 || a != 1) out += a.get_str();
    if (k > 0) out += (a != 1 ? "*" : "") + var + (k > 1 ? "^" + std::to_string(k) : "");
  }
  return out;
}

}  // namespace polyreg
