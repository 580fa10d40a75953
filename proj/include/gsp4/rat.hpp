#pragma once

#include <gmpxx.h>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace gsp4 {

using Rat = mpq_class;
using Int = mpz_class;

// v_p(0) is represented by this sentinel.
inline constexpr long VAL_INF = std::numeric_limits<long>::max() / 4;

inline Int ipow(long p, long e) {
  Int r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p),
                static_cast<unsigned long>(e));
  return r;
}

// p^e as an exact rational, e may be negative.
inline Rat ppow(long p, long e) {
  if (e >= 0) return Rat(ipow(p, e));
  return Rat(1) / Rat(ipow(p, -e));
}

inline long valp(const Int& n, long p) {
  if (n == 0) return VAL_INF;
  Int m = n;
  long v = 0;
  while (mpz_divisible_ui_p(m.get_mpz_t(), static_cast<unsigned long>(p))) {
    mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(),
                    static_cast<unsigned long>(p));
    ++v;
  }
  return v;
}

inline long valp(const Rat& x, long p) {
  if (x == 0) return VAL_INF;
  return valp(x.get_num(), p) - valp(x.get_den(), p);
}

inline bool p_integral(const Rat& x, long p) { return valp(x, p) >= 0; }
inline bool p_unit(const Rat& x, long p) { return x != 0 && valp(x, p) == 0; }

// x mod p^k for p-integral x, result in [0, p^k).
inline Int mod_ppow(const Rat& x, long p, long k) {
  Int pk = ipow(p, k);
  Int dinv;
  if (mpz_invert(dinv.get_mpz_t(), x.get_den().get_mpz_t(), pk.get_mpz_t()) == 0)
    throw std::domain_error("mod_ppow: denominator not prime to p");
  Int r = (x.get_num() * dinv) % pk;
  if (r < 0) r += pk;
  return r;
}

// The p-fractional part: the unique j/p^k in [0,1) with x - j/p^k p-integral.
// Returns {j, k} with 0 <= j < p^k, gcd(j,p)=1 unless j=0 (then k=0).
inline std::pair<Int, long> frac_part_p(const Rat& x, long p) {
  long v = valp(x, p);
  if (v >= 0) return {Int(0), 0};
  long k = -v;
  Int pk = ipow(p, k);
  // x = n/(d*p^k) with gcd(d,p)=1, gcd(n,p)=1; fractional part j = n*d^{-1} mod p^k
  Rat y = x * Rat(pk);  // p-unit
  Int j = mod_ppow(y, p, k);
  return {j, k};
}

inline long lmod(long a, long m) {
  long r = a % m;
  return r < 0 ? r + m : r;
}

inline long lgcd(long a, long b) {
  a = a < 0 ? -a : a;
  b = b < 0 ? -b : b;
  while (b) { long t = a % b; a = b; b = t; }
  return a;
}

inline long inv_mod(long a, long m) {
  long t = 0, nt = 1, r = m, nr = lmod(a, m);
  while (nr) {
    long q = r / nr;
    long tmp = t - q * nt; t = nt; nt = tmp;
    tmp = r - q * nr; r = nr; nr = tmp;
  }
  if (r != 1) throw std::domain_error("inv_mod: not invertible");
  return lmod(t, m);
}

inline bool is_prime_small(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline std::string rat_str(const Rat& x) { return x.get_str(); }

}  // namespace gsp4
