#pragma once

#include <optional>
#include <vector>

#include "gsp4/kelt.hpp"

namespace gsp4 {

// Case marker (L/p): -1 inert, 0 ramified, +1 split.
enum class CaseSym : int { inert = -1, ramified = 0, split = 1 };

struct FieldData;

// Element of the quadratic algebra L, stored as x + y*sqrt(d). In the split
// case sqrt(d) is the fixed rational root sd, and the pair view is
// (x + y*sd, x - y*sd). Multiplication uses the single relation
// (sqrt d)^2 = d, which is case-uniform.
struct LElt {
  Rat x, y;

  LElt() : x(0), y(0) {}
  LElt(const Rat& xx) : x(xx), y(0) {}
  LElt(const Rat& xx, const Rat& yy) : x(xx), y(yy) {}

  bool is_zero() const { return x == 0 && y == 0; }
  bool is_f_elt() const { return y == 0; }
  bool operator==(const LElt& o) const { return x == o.x && y == o.y; }
  bool operator!=(const LElt& o) const { return !(*this == o); }

  LElt operator+(const LElt& o) const { return {x + o.x, y + o.y}; }
  LElt operator-(const LElt& o) const { return {x - o.x, y - o.y}; }
  LElt operator-() const { return {-x, -y}; }
};

struct FieldData {
  long p = 0;     // residue characteristic
  long q = 0;     // residue size (= p here)
  Rat a, b, c;    // the Bessel data, a,b in o, c in o^x
  Rat d;          // b^2 - 4ac
  CaseSym cs = CaseSym::inert;
  long psi_depth = 4;  // max p-power denominator psi accepts

  // split case: the fixed rational square root of d and the two roots of
  // c w^2 + b w + a (the residues where beta_w^0 is not a unit)
  Rat sqrt_d;
  Rat root_plus, root_minus;  // (-b + sqrt_d)/(2c), (-b - sqrt_d)/(2c)

  // ramified case: the unique residue w0 with alpha + w0 in p_L
  long w0 = 0;

  LElt alpha;  // (b + sqrt d)/(2c)

  int legendre() const { return static_cast<int>(cs); }

  // ---- L arithmetic -----------------------------------------------------

  LElt lmul(const LElt& u, const LElt& v) const {
    if (u.y == 0) return {u.x * v.x, u.x * v.y};
    if (v.y == 0) return {u.x * v.x, u.y * v.x};
    return {u.x * v.x + u.y * v.y * d, u.x * v.y + u.y * v.x};
  }
  LElt lconj(const LElt& u) const { return {u.x, -u.y}; }
  Rat lnorm(const LElt& u) const { return u.x * u.x - d * u.y * u.y; }
  Rat ltrace(const LElt& u) const { return 2 * u.x; }
  LElt linv(const LElt& u) const {
    Rat n = lnorm(u);
    if (n == 0) throw std::domain_error("LElt: not invertible");
    return {u.x / n, -u.y / n};
  }
  LElt lpow(const LElt& u, long e) const {
    if (e < 0) return lpow(linv(u), -e);
    LElt r(Rat(1)), b0 = u;
    while (e) {
      if (e & 1) r = lmul(r, b0);
      b0 = lmul(b0, b0);
      e >>= 1;
    }
    return r;
  }

  // split pair view
  std::pair<Rat, Rat> split_pair(const LElt& u) const {
    return {u.x + u.y * sqrt_d, u.x - u.y * sqrt_d};
  }
  LElt from_split_pair(const Rat& z1, const Rat& z2) const {
    return {(z1 + z2) / 2, (z1 - z2) / (2 * sqrt_d)};
  }

  // Coordinates in the integral basis {1, alpha}: z = u + v*alpha.
  std::pair<Rat, Rat> alpha_coords(const LElt& z) const {
    Rat v = 2 * c * z.y;
    Rat u = z.x - z.y * b;
    return {u, v};
  }
  LElt from_alpha_coords(const Rat& u, const Rat& v) const {
    // u + v*(b + sqrt d)/(2c)
    return {u + v * b / (2 * c), v / (2 * c)};
  }

  bool in_oL(const LElt& z) const {
    auto [u, v] = alpha_coords(z);
    return p_integral(u, p) && p_integral(v, p);
  }
  bool in_Pn(const LElt& z, long n) const {
    auto [u, v] = alpha_coords(z);
    return valp(u, p) >= n && valp(v, p) >= n;
  }
  bool in_oL_units(const LElt& z) const {
    return in_oL(z) && !z.is_zero() && valp(lnorm(z), p) == 0;
  }
  // (o^x + P^n) intersected with o_L^x; n = 0 gives the full unit group.
  bool in_ounits_plus_Pn(const LElt& z, long n) const {
    if (n <= 0) return in_oL_units(z);
    auto [u, v] = alpha_coords(z);
    return valp(u, p) == 0 && valp(v, p) >= n;
  }

  // Valuation in multiples of the uniformizer of L (split: the pair of
  // component valuations is handled by callers).
  long lval(const LElt& z) const {
    if (z.is_zero()) return VAL_INF;
    switch (cs) {
      case CaseSym::inert: {
        auto [u, v] = alpha_coords(z);
        return std::min(valp(u, p), valp(v, p));
      }
      case CaseSym::ramified:
        return valp(lnorm(z), p);
      case CaseSym::split:
        throw std::domain_error("lval: split case has a pair of valuations");
    }
    return 0;
  }

  LElt uniformizer_L() const {
    switch (cs) {
      case CaseSym::inert:
        return LElt(Rat(p));
      case CaseSym::ramified:
        return alpha + LElt(Rat(w0));
      case CaseSym::split:
        return from_split_pair(Rat(p), Rat(1));
    }
    return LElt();
  }
};

struct AssumptionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {
inline bool rat_is_square(const Rat& x, Rat& root) {
  if (x <= 0) return false;
  Int n = x.get_num(), d = x.get_den();
  Int rn, rd;
  if (mpz_perfect_square_p(n.get_mpz_t()) == 0) return false;
  if (mpz_perfect_square_p(d.get_mpz_t()) == 0) return false;
  mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
  root = Rat(rn) / Rat(rd);
  return true;
}

inline bool square_mod_p(long r, long p) {  // r a unit residue, p odd
  long e = (p - 1) / 2, acc = 1, b = lmod(r, p);
  for (long i = 0; i < e; ++i) acc = (acc * b) % p;
  return acc == 1;
}

// Is x a square in Q_p (x nonzero rational)?
inline bool is_local_square(const Rat& x, long p) {
  long v = valp(x, p);
  if (v % 2 != 0) return false;
  Rat u = x / ppow(p, v);
  if (p != 2) {
    long r = mpz_get_si(mod_ppow(u, p, 1).get_mpz_t());
    return square_mod_p(r, p);
  }
  long r8 = mpz_get_si(mod_ppow(u, 2, 3).get_mpz_t());
  return r8 == 1;
}
}  // namespace detail

// Validates A1/A2 and fills in the case data.
inline FieldData build_field_data(long p, long a, long b, long c,
                                  long psi_depth = 4) {
  if (!is_prime_small(p)) throw AssumptionError("p must be a (small) prime");
  FieldData fd;
  fd.p = p;
  fd.q = p;
  fd.a = Rat(a);
  fd.b = Rat(b);
  fd.c = Rat(c);
  fd.psi_depth = psi_depth;
  if (!p_unit(fd.c, p))
    throw AssumptionError("A1: c must be a p-unit");
  fd.d = fd.b * fd.b - 4 * fd.a * fd.c;
  if (fd.d == 0) throw AssumptionError("d = b^2 - 4ac must be nonzero");

  long vd = valp(fd.d, p);
  Rat root;
  if (detail::rat_is_square(fd.d, root)) {
    if (vd != 0)
      throw AssumptionError(
          "A2: square d must be a p-unit (even positive valuation rejected)");
    fd.cs = CaseSym::split;
    fd.sqrt_d = root;
    fd.root_plus = (-fd.b + root) / (2 * fd.c);
    fd.root_minus = (-fd.b - root) / (2 * fd.c);
    // distinct mod p automatically since sqrt_d/c is a unit
  } else if (detail::is_local_square(fd.d, p)) {
    throw AssumptionError(
        "d is a square in Q_p but not in Q; exact split arithmetic needs a "
        "rational square root");
  } else if (vd == 0) {
    if (p == 2) {
      long r8 = mpz_get_si(mod_ppow(fd.d, 2, 3).get_mpz_t());
      if (r8 != 5)
        throw AssumptionError("A2: at p = 2 the inert case needs d = 5 mod 8");
    }
    fd.cs = CaseSym::inert;
  } else if (vd == 1) {
    if (p == 2)
      throw AssumptionError("ramified case is restricted to odd p");
    fd.cs = CaseSym::ramified;
  } else {
    throw AssumptionError("A2: d is not a discriminant generator (v_p(d) = " +
                          std::to_string(vd) + ")");
  }

  fd.alpha = LElt(fd.b / (2 * fd.c), Rat(1) / (2 * fd.c));
  if (fd.cs == CaseSym::ramified) {
    // unique residue with alpha + w0 in p_L; for odd p this is -b/(2c) mod p
    Rat w0r = -fd.b / (2 * fd.c);
    fd.w0 = mpz_get_si(mod_ppow(w0r, p, 1).get_mpz_t());
  }
  return fd;
}

// v_p as the spec's fval.
inline long fval(const Rat& x, long p) { return valp(x, p); }

struct LClassFlags {
  bool in_oL = false, in_Pn = false, in_oLunits = false,
       in_ounits_plus_Pn = false;
};

inline LClassFlags l_class(const FieldData& fd, const LElt& z, long n) {
  LClassFlags f;
  f.in_oL = fd.in_oL(z);
  f.in_Pn = fd.in_Pn(z, n);
  f.in_oLunits = fd.in_oL_units(z);
  f.in_ounits_plus_Pn = fd.in_ounits_plus_Pn(z, n);
  return f;
}

// beta_w^m = a*p^(2m) + b*p^m*w + c*w^2 and its unit test.
inline std::pair<Rat, bool> beta_wm(const FieldData& fd, const Rat& w,
                                    long m) {
  Rat pm = ppow(fd.p, m);
  Rat val = fd.a * pm * pm + fd.b * pm * w + fd.c * w * w;
  return {val, p_unit(val, fd.p)};
}

// The special residues at m = 0: w with beta_w^0 not a unit.
inline std::vector<long> special_w_residues(const FieldData& fd) {
  switch (fd.cs) {
    case CaseSym::inert:
      return {};
    case CaseSym::ramified:
      return {fd.w0};
    case CaseSym::split: {
      long r1 = mpz_get_si(mod_ppow(fd.root_plus, fd.p, 1).get_mpz_t());
      long r2 = mpz_get_si(mod_ppow(fd.root_minus, fd.p, 1).get_mpz_t());
      return {r1, r2};
    }
  }
  return {};
}

// Representatives of ((o^x + P^(m-1)) cap o_L^x)/(o^x + P^m), m >= 1.
inline std::vector<LElt> unit_coset_reps(const FieldData& fd, long m) {
  if (m < 1) throw std::domain_error("unit_coset_reps: m >= 1");
  std::vector<LElt> reps;
  Rat pm1 = ppow(fd.p, m - 1);
  auto push_w = [&](long w) {
    reps.push_back(LElt(Rat(w)) + LElt(fd.alpha.x * pm1, fd.alpha.y * pm1));
  };
  if (m >= 2) {
    for (long w = 1; w < fd.p; ++w) push_w(w);
  } else {
    std::vector<long> skip = special_w_residues(fd);
    for (long w = 0; w < fd.p; ++w) {
      bool sk = false;
      for (long s : skip) sk |= (s == w);
      if (!sk) push_w(w);
    }
  }
  reps.push_back(LElt(Rat(1)));
  return reps;
}

}  // namespace gsp4
