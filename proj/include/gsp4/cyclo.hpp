#pragma once

#include <map>
#include <vector>

#include "gsp4/rat.hpp"

namespace gsp4 {

// Exponent of a root of unity: a reduced fraction in Q/Z.
// exp(2*pi*i*n/d) with d > 0, 0 <= n < d, gcd(n,d) = 1 (except 0/1).
struct UnitRootExp {
  long n = 0, d = 1;

  UnitRootExp() = default;
  UnitRootExp(long num, long den) {
    if (den == 0) throw std::domain_error("UnitRootExp: zero denominator");
    if (den < 0) { num = -num; den = -den; }
    num = lmod(num, den);
    long g = lgcd(num, den);
    n = num / g;
    d = den / g;
  }
  UnitRootExp operator+(const UnitRootExp& o) const {
    long g = lgcd(d, o.d);
    long l = d / g * o.d;
    return UnitRootExp(n * (l / d) + o.n * (l / o.d), l);
  }
  UnitRootExp operator-() const { return UnitRootExp(-n, d); }
  UnitRootExp operator*(long k) const { return UnitRootExp(n * k, d); }
  bool operator<(const UnitRootExp& o) const {
    return d != o.d ? d < o.d : n < o.n;
  }
  bool operator==(const UnitRootExp& o) const { return n == o.n && d == o.d; }
};

namespace detail {
struct PP { long p, a, pa; };  // prime power p^a

inline std::vector<PP> factor_small(long d) {
  std::vector<PP> f;
  for (long p = 2; p * p <= d; ++p) {
    if (d % p == 0) {
      long a = 0, pa = 1;
      while (d % p == 0) { d /= p; ++a; pa *= p; }
      f.push_back({p, a, pa});
    }
  }
  if (d > 1) f.push_back({d, 1, d});
  return f;
}
}  // namespace detail

// An element of the union of all cyclotomic fields Q(zeta_n), held in the
// canonical basis whose monomials zeta^e have, for every prime power
// p^a || den(e), CRT component in [0, (p-1)p^(a-1)).
class Cyclo {
 public:
  using Map = std::map<UnitRootExp, Rat>;

  Cyclo() = default;
  Cyclo(const Rat& r) { if (r != 0) c_[UnitRootExp()] = r; }
  Cyclo(long v) : Cyclo(Rat(v)) {}

  static Cyclo root(const UnitRootExp& e) {
    Cyclo z;
    add_term(z.c_, e, Rat(1));
    return z;
  }

  bool is_zero() const { return c_.empty(); }
  bool is_rational() const {
    return c_.empty() || (c_.size() == 1 && c_.begin()->first == UnitRootExp());
  }
  Rat rational_value() const {
    if (c_.empty()) return Rat(0);
    if (!is_rational()) throw std::domain_error("Cyclo: not rational");
    return c_.begin()->second;
  }
  const Map& terms() const { return c_; }

  // True if a single canonical monomial c*zeta^e.
  bool is_monomial() const { return c_.size() == 1; }

  Cyclo operator+(const Cyclo& o) const {
    Cyclo r = *this;
    for (auto& [e, c] : o.c_) {
      auto it = r.c_.find(e);
      if (it == r.c_.end()) r.c_.emplace(e, c);
      else { it->second += c; if (it->second == 0) r.c_.erase(it); }
    }
    return r;
  }
  Cyclo operator-() const {
    Cyclo r = *this;
    for (auto& [e, c] : r.c_) c = -c;
    return r;
  }
  Cyclo operator-(const Cyclo& o) const { return *this + (-o); }
  Cyclo operator*(const Cyclo& o) const {
    Cyclo r;
    for (auto& [e1, c1] : c_)
      for (auto& [e2, c2] : o.c_) add_term(r.c_, e1 + e2, c1 * c2);
    return r;
  }
  Cyclo& operator+=(const Cyclo& o) { *this = *this + o; return *this; }
  Cyclo& operator-=(const Cyclo& o) { *this = *this - o; return *this; }
  Cyclo& operator*=(const Cyclo& o) { *this = *this * o; return *this; }
  bool operator==(const Cyclo& o) const { return c_ == o.c_; }
  bool operator!=(const Cyclo& o) const { return !(*this == o); }

  // Galois action zeta^e -> zeta^(j*e); j must be prime to every term order.
  Cyclo galois(long j) const {
    Cyclo r;
    for (auto& [e, c] : c_) {
      if (lgcd(lmod(j, e.d), e.d) != 1)
        throw std::domain_error("Cyclo::galois: exponent not prime to order");
      add_term(r.c_, e * j, c);
    }
    return r;
  }

  // Complex conjugation.
  Cyclo conj() const {
    Cyclo r;
    for (auto& [e, c] : c_) add_term(r.c_, -e, c);
    return r;
  }

  // lcm of the orders of the monomials in the support.
  long order() const {
    long n = 1;
    for (auto& [e, c] : c_) n = n / lgcd(n, e.d) * e.d;
    return n;
  }

  Cyclo inverse() const {
    if (is_zero()) throw std::domain_error("Cyclo: division by zero");
    if (is_rational()) return Cyclo(Rat(1) / rational_value());
    if (c_.size() == 1) {
      auto& [e, c] = *c_.begin();
      Cyclo r = root(-e);
      for (auto& [e2, c2] : r.c_) c2 /= c;
      return r;
    }
    // General case: product of the nontrivial Galois conjugates, then the
    // field norm (a rational) in the denominator.
    long n = order();
    Cyclo w(Rat(1));
    for (long j = 2; j <= n; ++j) {
      if (lgcd(j, n) != 1) continue;
      w *= galois(j);
    }
    Cyclo nrm = *this * w;
    if (!nrm.is_rational())
      throw std::logic_error("Cyclo::inverse: norm not rational");
    Rat nv = nrm.rational_value();
    if (nv == 0) throw std::domain_error("Cyclo: division by zero (norm 0)");
    for (auto& [e, c] : w.c_) c /= nv;
    return w;
  }

 private:
  // Insert c*zeta^e, rewriting into the canonical basis.
  static void add_term(Map& m, UnitRootExp e, const Rat& c) {
    if (c == 0) return;
    for (auto& pp : detail::factor_small(e.d)) {
      long M = e.d / pp.pa;
      long comp = lmod(e.n * inv_mod(lmod(M, pp.pa), pp.pa), pp.pa);
      long phi = (pp.p - 1) * (pp.pa / pp.p);
      if (comp >= phi) {
        // zeta_{p^a}^comp = -sum_{j=0}^{p-2} zeta_{p^a}^{r + j p^(a-1)}
        long r = comp - phi;
        UnitRootExp rest = e + (-UnitRootExp(comp, pp.pa));
        for (long j = 0; j <= pp.p - 2; ++j)
          add_term(m, rest + UnitRootExp(r + j * (pp.pa / pp.p), pp.pa), -c);
        return;
      }
    }
    auto it = m.find(e);
    if (it == m.end()) m.emplace(e, c);
    else { it->second += c; if (it->second == 0) m.erase(it); }
  }

  Map c_;
};

}  // namespace gsp4
