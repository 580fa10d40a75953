#pragma once

#include <vector>

#include "gsp4/poly.hpp"

namespace gsp4 {

// Element of K(lam, atau, btau, omg)(X): a gcd-reduced fraction of
// multivariate polynomials with the denominator monic in graded-lex order.
// Equality is syntactic on the canonical form.
class Scalar {
 public:
  Scalar() : nu_(), de_(Kelt(Rat(1))) {}
  Scalar(const Kelt& c) : nu_(c), de_(Kelt(Rat(1))) {}
  Scalar(const Rat& r) : Scalar(Kelt(r)) {}
  Scalar(long v) : Scalar(Kelt(v)) {}
  Scalar(const Poly& p) : nu_(p), de_(Kelt(Rat(1))) {}
  Scalar(const Poly& n, const Poly& d) : nu_(n), de_(d) { normalize(); }

  static Scalar var(int v, int e = 1) {
    if (e >= 0) return Scalar(Poly::var(v, e));
    return Scalar(Poly(Kelt(Rat(1))), Poly::var(v, -e));
  }
  static Scalar sqrtq(long q) { return Scalar(Kelt::sqrtq(q)); }
  static Scalar qpow_half(long q, long num_half) {
    return Scalar(Kelt::qhalfpow(q, num_half));
  }

  const Poly& num() const { return nu_; }
  const Poly& den() const { return de_; }

  bool is_zero() const { return nu_.is_zero(); }
  bool is_constant() const { return nu_.is_constant() && de_.is_constant(); }
  Kelt constant_value() const {
    return nu_.constant_value() * de_.constant_value().inverse();
  }

  Scalar operator+(const Scalar& o) const {
    return Scalar(nu_ * o.de_ + o.nu_ * de_, de_ * o.de_);
  }
  Scalar operator-() const {
    Scalar r = *this;
    r.nu_ = -r.nu_;
    return r;
  }
  Scalar operator-(const Scalar& o) const { return *this + (-o); }
  Scalar operator*(const Scalar& o) const {
    return Scalar(nu_ * o.nu_, de_ * o.de_);
  }
  Scalar operator/(const Scalar& o) const {
    if (o.is_zero()) throw std::domain_error("Scalar: division by zero");
    return Scalar(nu_ * o.de_, de_ * o.nu_);
  }
  Scalar& operator+=(const Scalar& o) { *this = *this + o; return *this; }
  Scalar& operator-=(const Scalar& o) { *this = *this - o; return *this; }
  Scalar& operator*=(const Scalar& o) { *this = *this * o; return *this; }
  Scalar& operator/=(const Scalar& o) { *this = *this / o; return *this; }
  bool operator==(const Scalar& o) const {
    return nu_ == o.nu_ && de_ == o.de_;
  }
  bool operator!=(const Scalar& o) const { return !(*this == o); }

  Scalar inverse() const { return Scalar(1) / *this; }
  Scalar pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    Scalar r(1), b = *this;
    while (e) {
      if (e & 1) r *= b;
      b *= b;
      e >>= 1;
    }
    return r;
  }

  // Complex conjugation; only defined on indeterminate-free values.
  Scalar conj() const {
    if (!is_constant())
      throw std::domain_error("Scalar: conj needs an indeterminate-free value");
    return Scalar(constant_value().conj());
  }

  Scalar substituted(const std::map<int, Kelt>& vals) const {
    return Scalar(nu_.substituted(vals), de_.substituted(vals));
  }

  // Cross-multiplication equality (equivalent to == on canonical forms;
  // kept as an independent route for tests).
  bool equals_cross(const Scalar& o) const {
    return (nu_ * o.de_ - o.nu_ * de_).is_zero();
  }

  // c0 / (1 - r X^k) = sum_{l >= 0} c0 r^l X^(k l).
  static Scalar geometric_closed_form(const Scalar& c0, const Scalar& r,
                                      long k) {
    if (k < 1) throw std::domain_error("geometric_closed_form: k >= 1");
    Scalar den = Scalar(1) - r * Scalar::var(V_X, static_cast<int>(k));
    if (den.is_zero())
      throw std::domain_error("geometric_closed_form: degenerate ratio");
    return c0 / den;
  }

  // Power-series coefficients in X through degree n (den(X=0) must be a unit).
  std::vector<Scalar> series_in_x(int n) const {
    int dn = nu_.degree(V_X), dd = de_.degree(V_X);
    std::vector<Scalar> P(std::max(dn, n) + 1, Scalar(0)),
        Q(std::max(dd, n) + 1, Scalar(0));
    for (int i = 0; i <= dn; ++i) P[i] = Scalar(nu_.coeff_of(V_X, i));
    for (int i = 0; i <= dd; ++i) Q[i] = Scalar(de_.coeff_of(V_X, i));
    if (Q[0].is_zero())
      throw std::domain_error("series_in_x: denominator vanishes at X = 0");
    std::vector<Scalar> c(n + 1, Scalar(0));
    for (int i = 0; i <= n; ++i) {
      Scalar s = P[i];
      for (int j = 1; j <= i; ++j) s -= Q[j] * c[i - j];
      c[i] = s / Q[0];
    }
    return c;
  }

  // Rescale so that the denominator has constant term 1 in X (L-factor
  // display normalization); requires den(0) != 0.
  Scalar lfactor_normalized() const {
    Poly q0 = de_.coeff_of(V_X, 0);
    if (q0.is_zero())
      throw std::domain_error("lfactor_normalized: denominator vanishes at 0");
    if (!q0.is_constant()) return *this;  // already canonical; display only
    Kelt c = q0.constant_value().inverse();
    Scalar r = *this;
    r.nu_ = r.nu_.scaled(c);
    r.de_ = r.de_.scaled(c);
    return r;
  }

 private:
  void normalize() {
    if (de_.is_zero()) throw std::domain_error("Scalar: zero denominator");
    if (nu_.is_zero()) {
      de_ = Poly(Kelt(Rat(1)));
      return;
    }
    Poly g = Poly::gcd(nu_, de_);
    if (!g.is_constant() || g.constant_value() != Kelt(Rat(1))) {
      nu_ = *nu_.divided_by(g);
      de_ = *de_.divided_by(g);
    }
    Kelt lc = de_.leading_coeff();
    if (lc != Kelt(Rat(1))) {
      Kelt inv = lc.inverse();
      nu_ = nu_.scaled(inv);
      de_ = de_.scaled(inv);
    }
  }

  Poly nu_, de_;
};

// Spec-level aliases: a RationalFunction is a Scalar that may involve X.
using RationalFunction = Scalar;

}  // namespace gsp4
