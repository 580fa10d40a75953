#pragma once

#include "gsp4/cyclo.hpp"

namespace gsp4 {

// Coefficient field element: a + b*sqrt(q) with a, b cyclotomic and the single
// relation sqrt(q)^2 = q. q is carried per element; q = 0 marks "no sqrt(q)
// component yet" and merges freely.
class Kelt {
 public:
  Kelt() = default;
  Kelt(const Rat& r) : a_(r) {}
  Kelt(long v) : a_(Rat(v)) {}
  Kelt(const Cyclo& a) : a_(a) {}
  Kelt(const Cyclo& a, const Cyclo& b, long q) : a_(a), b_(b), q_(q) {
    if (!b_.is_zero() && q_ <= 0)
      throw std::domain_error("Kelt: sqrt component needs a residue size");
    if (b_.is_zero()) q_ = 0;
  }

  static Kelt sqrtq(long q) { return Kelt(Cyclo(), Cyclo(Rat(1)), q); }
  static Kelt root(const UnitRootExp& e) { return Kelt(Cyclo::root(e)); }

  const Cyclo& a() const { return a_; }
  const Cyclo& b() const { return b_; }
  long qbase() const { return q_; }

  bool is_zero() const { return a_.is_zero() && b_.is_zero(); }
  bool is_rational() const { return b_.is_zero() && a_.is_rational(); }
  Rat rational_value() const {
    if (!b_.is_zero()) throw std::domain_error("Kelt: not rational");
    return a_.rational_value();
  }

  Kelt operator+(const Kelt& o) const {
    return Kelt(a_ + o.a_, b_ + o.b_, merge_q(o));
  }
  Kelt operator-() const { return Kelt(-a_, -b_, q_); }
  Kelt operator-(const Kelt& o) const { return *this + (-o); }
  Kelt operator*(const Kelt& o) const {
    long q = merge_q(o);
    if (b_.is_zero() && o.b_.is_zero()) return Kelt(a_ * o.a_);
    Cyclo qa = Cyclo(Rat(q));
    return Kelt(a_ * o.a_ + qa * (b_ * o.b_), a_ * o.b_ + b_ * o.a_, q);
  }
  Kelt& operator+=(const Kelt& o) { *this = *this + o; return *this; }
  Kelt& operator-=(const Kelt& o) { *this = *this - o; return *this; }
  Kelt& operator*=(const Kelt& o) { *this = *this * o; return *this; }
  bool operator==(const Kelt& o) const {
    return a_ == o.a_ && b_ == o.b_;  // canonical forms; q merges when b = 0
  }
  bool operator!=(const Kelt& o) const { return !(*this == o); }

  Kelt inverse() const {
    if (is_zero()) throw std::domain_error("Kelt: division by zero");
    if (b_.is_zero()) return Kelt(a_.inverse());
    // 1/(a + b s) = (a - b s)/(a^2 - q b^2); the denominator vanishes only
    // if a/b happens to equal a cyclotomic square root of q, which never
    // arises from the computations in scope. Guard it as a hard error.
    Cyclo den = a_ * a_ - Cyclo(Rat(q_)) * (b_ * b_);
    if (den.is_zero())
      throw std::domain_error("Kelt: non-invertible element in sqrt(q) tower");
    Cyclo dinv = den.inverse();
    return Kelt(a_ * dinv, -(b_ * dinv), q_);
  }
  Kelt operator/(const Kelt& o) const { return *this * o.inverse(); }

  // Complex conjugation: conjugates the cyclotomic parts, fixes sqrt(q).
  Kelt conj() const { return Kelt(a_.conj(), b_.conj(), q_); }

  Kelt pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    Kelt r(Rat(1)), base = *this;
    while (e) {
      if (e & 1) r *= base;
      base *= base;
      e >>= 1;
    }
    return r;
  }

  // q^(e/2) as an exact element (integral part plus optional sqrt factor).
  static Kelt qhalfpow(long q, long e) {
    long fl = (e >= 0 ? e / 2 : (e - 1) / 2);  // floor(e/2)
    Kelt r(ppow(q, fl));
    if (e - 2 * fl == 1) r *= sqrtq(q);
    return r;
  }

 private:
  long merge_q(const Kelt& o) const {
    if (q_ == 0) return o.q_;
    if (o.q_ == 0) return q_;
    if (q_ != o.q_) throw std::domain_error("Kelt: mixed residue sizes");
    return q_;
  }

  Cyclo a_, b_;
  long q_ = 0;
};

}  // namespace gsp4
