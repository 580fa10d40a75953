#pragma once

#include <array>
#include <map>
#include <optional>

#include "gsp4/kelt.hpp"

namespace gsp4 {

// Global indeterminates, in fixed order. X is the rational-function variable
// (X = q^{-s}); the others are Satake/character parameters.
enum Var : int { V_lam = 0, V_atau = 1, V_btau = 2, V_omg = 3, V_X = 4 };
inline constexpr int NVARS = 5;
inline const char* var_name(int v) {
  static const char* names[NVARS] = {"lam", "atau", "btau", "omg", "X"};
  return names[v];
}

using Expv = std::array<int, NVARS>;

inline Expv expv_zero() { return {0, 0, 0, 0, 0}; }
inline Expv expv_of(int v, int e) {
  Expv x = expv_zero();
  x[v] = e;
  return x;
}
inline Expv operator+(const Expv& a, const Expv& b) {
  Expv r;
  for (int i = 0; i < NVARS; ++i) r[i] = a[i] + b[i];
  return r;
}
inline int expv_total(const Expv& a) {
  int t = 0;
  for (int i = 0; i < NVARS; ++i) t += a[i];
  return t;
}

// Graded lexicographic order; the map's last element is the leading monomial.
struct GrlexLess {
  bool operator()(const Expv& a, const Expv& b) const {
    int ta = expv_total(a), tb = expv_total(b);
    if (ta != tb) return ta < tb;
    return a < b;
  }
};

class Poly {
 public:
  using Map = std::map<Expv, Kelt, GrlexLess>;

  Poly() = default;
  Poly(const Kelt& c) { if (!c.is_zero()) t_[expv_zero()] = c; }
  Poly(const Rat& r) : Poly(Kelt(r)) {}
  Poly(long v) : Poly(Kelt(v)) {}

  static Poly var(int v, int e = 1) {
    Poly p;
    if (e == 0) return Poly(Kelt(Rat(1)));
    p.t_[expv_of(v, e)] = Kelt(Rat(1));
    return p;
  }
  static Poly term(const Kelt& c, const Expv& e) {
    Poly p;
    if (!c.is_zero()) p.t_[e] = c;
    return p;
  }

  const Map& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  bool is_constant() const {
    return t_.empty() || (t_.size() == 1 && t_.begin()->first == expv_zero());
  }
  Kelt constant_value() const {
    if (t_.empty()) return Kelt();
    if (!is_constant()) throw std::domain_error("Poly: not constant");
    return t_.begin()->second;
  }
  int degree(int v) const {
    int d = 0;
    for (auto& [e, c] : t_) d = std::max(d, e[v]);
    return d;
  }
  bool has_var(int v) const {
    for (auto& [e, c] : t_)
      if (e[v] > 0) return true;
    return false;
  }
  const Kelt& leading_coeff() const {
    if (t_.empty()) throw std::domain_error("Poly: leading_coeff of 0");
    return t_.rbegin()->second;
  }
  const Expv& leading_exp() const {
    if (t_.empty()) throw std::domain_error("Poly: leading_exp of 0");
    return t_.rbegin()->first;
  }

  Poly operator+(const Poly& o) const {
    Poly r = *this;
    for (auto& [e, c] : o.t_) r.add_term(e, c);
    return r;
  }
  Poly operator-() const {
    Poly r = *this;
    for (auto& [e, c] : r.t_) c = -c;
    return r;
  }
  Poly operator-(const Poly& o) const { return *this + (-o); }
  Poly operator*(const Poly& o) const {
    Poly r;
    for (auto& [e1, c1] : t_)
      for (auto& [e2, c2] : o.t_) r.add_term(e1 + e2, c1 * c2);
    return r;
  }
  Poly& operator+=(const Poly& o) { *this = *this + o; return *this; }
  Poly& operator-=(const Poly& o) { *this = *this - o; return *this; }
  Poly& operator*=(const Poly& o) { *this = *this * o; return *this; }
  bool operator==(const Poly& o) const { return t_ == o.t_; }
  bool operator!=(const Poly& o) const { return !(*this == o); }

  Poly scaled(const Kelt& c) const {
    Poly r;
    for (auto& [e, k] : t_) r.add_term(e, k * c);
    return r;
  }

  // Coefficient of v^i, as a polynomial in the remaining variables.
  Poly coeff_of(int v, int i) const {
    Poly r;
    for (auto& [e, c] : t_) {
      if (e[v] != i) continue;
      Expv e2 = e;
      e2[v] = 0;
      r.add_term(e2, c);
    }
    return r;
  }

  // Exact division; nullopt if o does not divide.
  std::optional<Poly> divided_by(const Poly& o) const {
    if (o.is_zero()) throw std::domain_error("Poly: division by zero");
    Poly rem = *this, quot;
    const Expv& le = o.leading_exp();
    const Kelt lcinv = o.leading_coeff().inverse();
    while (!rem.is_zero()) {
      const Expv& re = rem.leading_exp();
      Expv qe;
      for (int i = 0; i < NVARS; ++i) {
        qe[i] = re[i] - le[i];
        if (qe[i] < 0) return std::nullopt;
      }
      Kelt qc = rem.leading_coeff() * lcinv;
      Poly t = Poly::term(qc, qe);
      quot += t;
      rem -= t * o;
    }
    return quot;
  }

  // Substitute exact values for a subset of variables.
  Poly substituted(const std::map<int, Kelt>& vals) const {
    Poly r;
    for (auto& [e, c] : t_) {
      Kelt k = c;
      Expv e2 = e;
      for (auto& [v, val] : vals) {
        if (e[v] != 0) {
          k *= val.pow(e[v]);
          e2[v] = 0;
        }
      }
      r.add_term(e2, k);
    }
    return r;
  }

  // gcd up to a unit, leading coefficient normalized to 1.
  static Poly gcd(const Poly& A, const Poly& B) {
    Poly g = gcd_raw(A, B);
    if (g.is_zero()) return g;
    return g.scaled(g.leading_coeff().inverse());
  }

 private:
  void add_term(const Expv& e, const Kelt& c) {
    if (c.is_zero()) return;
    auto it = t_.find(e);
    if (it == t_.end()) t_.emplace(e, c);
    else { it->second += c; if (it->second.is_zero()) t_.erase(it); }
  }

  int top_var() const {
    for (int v = NVARS - 1; v >= 0; --v)
      if (has_var(v)) return v;
    return -1;
  }

  // Content with respect to v: gcd of the v-coefficients.
  static Poly content_v(const Poly& A, int v) {
    Poly c;
    for (int i = 0; i <= A.degree(v); ++i) {
      Poly ci = A.coeff_of(v, i);
      if (ci.is_zero()) continue;
      c = c.is_zero() ? ci : gcd_raw(c, ci);
    }
    return c;
  }

  // Pseudo-remainder of A by B with respect to v (deg_v A >= deg_v B > 0
  // not required; loop handles the general case).
  static Poly prem_v(const Poly& A, const Poly& B, int v) {
    int db = B.degree(v);
    Poly lcB = B.coeff_of(v, db);
    Poly R = A;
    while (!R.is_zero() && R.degree(v) >= db) {
      int dr = R.degree(v);
      Poly lt = R.coeff_of(v, dr);
      R = R * lcB - lt * Poly::var(v, dr - db) * B;
    }
    return R;
  }

  static Poly gcd_raw(const Poly& A, const Poly& B) {
    if (A.is_zero()) return B;
    if (B.is_zero()) return A;
    int v = std::max(A.top_var(), B.top_var());
    if (v < 0) return Poly(Kelt(Rat(1)));  // both constants over a field
    if (!A.has_var(v)) return gcd_raw(content_v(B, v), A);
    if (!B.has_var(v)) return gcd_raw(content_v(A, v), B);
    Poly cA = content_v(A, v), cB = content_v(B, v);
    Poly c = gcd_raw(cA, cB);
    Poly A1 = *A.divided_by(cA), B1 = *B.divided_by(cB);
    if (A1.degree(v) < B1.degree(v)) std::swap(A1, B1);
    // primitive PRS
    while (!B1.is_zero()) {
      Poly R = prem_v(A1, B1, v);
      A1 = B1;
      if (R.is_zero()) { B1 = Poly(); break; }
      Poly cR = content_v(R, v);
      B1 = *R.divided_by(cR);
    }
    return c * A1;
  }

  Map t_;
};

}  // namespace gsp4
