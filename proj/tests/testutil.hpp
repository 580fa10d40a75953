#pragma once

#include <random>

#include "gsp4/grp.hpp"

namespace gsp4::testutil {

inline Rat rnd_int(std::mt19937_64& rng, long lo, long hi) {
  return Rat(static_cast<long>(lo + rng() % (hi - lo + 1)));
}

inline QMat2 random_gl2o(std::mt19937_64& rng, long p) {
  while (true) {
    QMat2 g(rnd_int(rng, -6, 6), rnd_int(rng, -6, 6), rnd_int(rng, -6, 6),
            rnd_int(rng, -6, 6));
    if (p_unit(g.det(), p)) return g;
  }
}

// Random element of the Iwahori subgroup: a product of conforming generators.
inline Mat4 random_I(std::mt19937_64& rng, const FieldData& fd) {
  Mat4 g = Mat4::ident(fd);
  long p = fd.p;
  int n = 3 + rng() % 5;
  for (int i = 0; i < n; ++i) {
    switch (rng() % 6) {
      case 0: g = g * mat_Ww(fd, rnd_int(rng, -4, 4)); break;
      case 1:
        g = g * mat_UX(fd, rnd_int(rng, -4, 4), rnd_int(rng, -4, 4),
                       rnd_int(rng, -4, 4));
        break;
      case 2:
        g = g * mat_lowerU(fd, Rat(p) * rnd_int(rng, -3, 3),
                           Rat(p) * rnd_int(rng, -3, 3),
                           Rat(p) * rnd_int(rng, -3, 3));
        break;
      case 3: g = g * mat_u1(fd, Rat(p) * rnd_int(rng, -3, 3)); break;
      case 4: {
        long u1 = 1 + rng() % (p - 1 ? p - 1 : 1);
        long u2 = 1 + rng() % (p - 1 ? p - 1 : 1);
        g = g * embed_gl2(fd, QMat2(Rat(u1), Rat(0), Rat(p) * rnd_int(rng, -2, 2),
                                    Rat(u2)));
        break;
      }
      case 5: g = g * mat_u2(fd, Rat(p) * rnd_int(rng, -3, 3)); break;
    }
  }
  if (!in_I(g)) throw std::logic_error("random_I: generator product left I");
  return g;
}

// Random element of K^H.
inline Mat4 random_KH(std::mt19937_64& rng, const FieldData& fd) {
  Mat4 g = Mat4::ident(fd);
  int n = 3 + rng() % 5;
  for (int i = 0; i < n; ++i) {
    switch (rng() % 5) {
      case 0: g = g * mat_s1(fd); break;
      case 1: g = g * mat_s2(fd); break;
      case 2:
        g = g * mat_UX(fd, rnd_int(rng, -4, 4), rnd_int(rng, -4, 4),
                       rnd_int(rng, -4, 4));
        break;
      case 3:
        g = g * mat_lowerU(fd, rnd_int(rng, -4, 4), rnd_int(rng, -4, 4),
                           rnd_int(rng, -4, 4));
        break;
      case 4: g = g * embed_gl2(fd, random_gl2o(rng, fd.p)); break;
    }
  }
  if (!in_KH(g)) throw std::logic_error("random_KH: product left K^H");
  return g;
}

// Random nonzero element of L^x, optionally a unit.
inline LElt random_Lunit(std::mt19937_64& rng, const FieldData& fd) {
  while (true) {
    LElt z(rnd_int(rng, -6, 6), rnd_int(rng, -6, 6));
    if (!fd.in_oL_units(z)) continue;
    return z;
  }
}
inline LElt random_Lx(std::mt19937_64& rng, const FieldData& fd) {
  while (true) {
    LElt z(rnd_int(rng, -9, 9) / ppow(fd.p, rng() % 2),
           rnd_int(rng, -9, 9) / ppow(fd.p, rng() % 2));
    if (z.is_zero() || fd.lnorm(z) == 0) continue;
    return z;
  }
}

}  // namespace gsp4::testutil
