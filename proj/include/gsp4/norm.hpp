#pragma once

#include "gsp4/bessel.hpp"
#include "gsp4/report.hpp"
#include "gsp4/sio.hpp"

namespace gsp4 {

namespace detail {

// The three symmetric fillers of the Siegel unipotent block.
inline Mat4 u_filler(const FieldData& fd, int k) {
  Mat4 m = Mat4::zero(fd);
  if (k == 0) m.e[0][2] = LElt(Rat(1));
  if (k == 1) { m.e[0][3] = LElt(Rat(1)); m.e[1][2] = LElt(Rat(1)); }
  if (k == 2) m.e[1][3] = LElt(Rat(1));
  return m;
}

// int64 variant of the congruence counter; moduli stay below 2^40 and all
// products go through __int128.
inline long long congruence_count3_i64(
    std::array<std::array<long long, 3>, 16>& G,
    std::array<long long, 16>& B, int rows, long p, long E) {
  long long pe = 1;
  for (long i = 0; i < E; ++i) pe *= p;
  auto red = [&](long long x) { x %= pe; return x < 0 ? x + pe : x; };
  auto vcap = [&](long long x) {
    if (x == 0) return E;
    long v = 0;
    while (x % p == 0 && v < E) { x /= p; ++v; }
    return v;
  };
  auto inv_pe = [&](long long u) {
    long long t = 0, nt = 1, r = pe, nr = red(u);
    while (nr) {
      long long qq = r / nr;
      long long tmp = t - qq * nt; t = nt; nt = tmp;
      tmp = r - qq * nr; r = nr; nr = tmp;
    }
    return red(t);
  };
  for (int r = 0; r < rows; ++r) {
    for (auto& x : G[r]) x = red(x);
    B[r] = red(B[r]);
  }
  bool rdone[16] = {false};
  bool cdone[3] = {false, false, false};
  long long count = 1;
  for (int step = 0; step < 3; ++step) {
    long best = E;
    int pr = -1, pc = -1;
    for (int r = 0; r < rows; ++r) {
      if (rdone[r]) continue;
      for (int c = 0; c < 3; ++c) {
        if (cdone[c]) continue;
        long v = vcap(G[r][c]);
        if (v < best) { best = v; pr = r; pc = c; }
      }
    }
    if (pr < 0) break;
    long long pb = 1;
    for (long i = 0; i < best; ++i) pb *= p;
    long long uinv = inv_pe(G[pr][pc] / pb);
    for (int r = 0; r < rows; ++r) {
      if (rdone[r] || r == pr || G[r][pc] == 0) continue;
      long long f = red(static_cast<long long>(
          (__int128)(G[r][pc] / pb) * uinv % pe));
      for (int c = 0; c < 3; ++c) {
        if (cdone[c]) continue;
        G[r][c] = red(static_cast<long long>(
            (G[r][c] - (__int128)f * G[pr][c]) % pe));
      }
      B[r] = red(static_cast<long long>((B[r] - (__int128)f * B[pr]) % pe));
    }
    if (vcap(B[pr]) < best) return 0;
    count *= pb;
    rdone[pr] = true;
    cdone[pc] = true;
  }
  for (int r = 0; r < rows; ++r)
    if (!rdone[r] && B[r] % pe != 0) return 0;
  for (int c = 0; c < 3; ++c)
    if (!cdone[c]) count *= pe;
  return count;
}

// Precomputed integer congruence template for a frame: every Iwahori
// condition on s^{-1} t(x,y) u(X) s is linear in (x, y) and X.
struct FrameCounter {
  long p, E = 0, w;
  int rows = 0;
  // row r: sum_k (x Gx + y Gy)[r][k] n_k = -(x Px[r] + y Py[r]) mod p^E
  std::array<std::array<long long, 3>, 16> Gx{}, Gy{};
  std::array<long long, 16> Px{}, Py{};

  FrameCounter(const FieldData& fd, const CosetAddress& a, long w_in)
      : p(fd.p), w(w_in) {
    Mat4 s = frame_mat(fd, a);
    Mat4 sinv = inverse_sim(s);
    Mat4 E1 = t_embed(fd, LElt(Rat(0), Rat(1) / 2));
    Mat4 S0 = sinv * s, S1 = sinv * E1 * s;
    std::array<Mat4, 3> K0, K1;
    for (int k = 0; k < 3; ++k) {
      K0[k] = sinv * u_filler(fd, k) * s;
      K1[k] = sinv * (E1 * u_filler(fd, k)) * s;
    }
    static const int zpos[6][2] = {{0, 1}, {2, 0}, {2, 1},
                                   {3, 0}, {3, 1}, {3, 2}};
    struct RowData {
      std::array<Rat, 3> gx, gy;
      Rat px, py;
      long me;
    };
    std::vector<RowData> rws;
    long Emax = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        long cij = 0;
        for (auto& zp : zpos)
          if (zp[0] == i && zp[1] == j) cij = 1;
        RowData rd;
        rd.px = S0.qentry(i, j);
        rd.py = S1.qentry(i, j);
        Rat pw = ppow(p, w);
        for (int k = 0; k < 3; ++k) {
          rd.gx[k] = K0[k].qentry(i, j) / pw;
          rd.gy[k] = K1[k].qentry(i, j) / pw;
        }
        long vmin = 0;
        auto upd = [&](const Rat& x) {
          if (x != 0) vmin = std::min(vmin, valp(x, p));
        };
        upd(rd.px); upd(rd.py);
        for (int k = 0; k < 3; ++k) { upd(rd.gx[k]); upd(rd.gy[k]); }
        rd.me = cij - vmin;
        if (rd.me <= 0) continue;
        Rat scale = ppow(p, -vmin);
        rd.px *= scale; rd.py *= scale;
        for (int k = 0; k < 3; ++k) { rd.gx[k] *= scale; rd.gy[k] *= scale; }
        Emax = std::max(Emax, rd.me);
        rws.push_back(rd);
      }
    E = Emax;
    long long pe = 1;
    for (long i = 0; i < E; ++i) pe *= p;
    auto to_i64 = [&](Rat x, long extra) -> long long {
      x *= ppow(p, extra);
      // clear the p-unit denominator by multiplying with its inverse mod p^E
      Int num = x.get_num(), den = x.get_den();
      Int m = ipow(p, E), dinv;
      if (mpz_invert(dinv.get_mpz_t(), den.get_mpz_t(), m.get_mpz_t()) == 0)
        throw std::logic_error("FrameCounter: denominator not prime to p");
      Int r = (num % m) * dinv % m;
      if (r < 0) r += m;
      return mpz_get_si(r.get_mpz_t());
    };
    for (auto& rd : rws) {
      int r = rows++;
      long extra = E - rd.me;
      for (int k = 0; k < 3; ++k) {
        Gx[r][k] = to_i64(rd.gx[k], extra);
        Gy[r][k] = to_i64(rd.gy[k], extra);
      }
      Px[r] = to_i64(rd.px, extra);
      Py[r] = to_i64(rd.py, extra);
    }
  }

  long long ucount(long long x, long long y) const {
    long long pe = 1;
    for (long i = 0; i < E; ++i) pe *= p;
    std::array<std::array<long long, 3>, 16> G;
    std::array<long long, 16> B;
    for (int r = 0; r < rows; ++r) {
      for (int k = 0; k < 3; ++k)
        G[r][k] = static_cast<long long>(
            ((__int128)x * Gx[r][k] + (__int128)y * Gy[r][k]) % pe);
      B[r] = static_cast<long long>(
          -((__int128)x * Px[r] + (__int128)y * Py[r]) % pe);
    }
    return congruence_count3_i64(G, B, rows, p, E);
  }
};

}  // namespace detail

// vol of R cap s I s^{-1} in the coordinates (x, y, X) with the additive
// Haar, normalized below against R cap K^H. Enumerates the T-part over
// (Z/p^NT)^2 and counts the U-part by exact congruence solving.
struct FrameVolume {
  Rat vol;     // set volume in parameter measure
  long t_hits = 0;
};

inline FrameVolume frame_volume(const FieldData& fd, const CosetAddress& a,
                                long NT, long w) {
  detail::FrameCounter fc(fd, a, w);
  long p = fd.p;
  long long pnt = 1;
  for (long i = 0; i < NT; ++i) pnt *= p;
  // N(zeta) = x^2 - d (y/2)^2; require a p-unit
  Rat dq = fd.d;
  long dnum = mpz_get_si(mod_ppow(dq / 4, p, 1).get_mpz_t());
  FrameVolume fv;
  Rat usum(0);
  Int total(0);
  for (long long x = 0; x < pnt; ++x)
    for (long long y = 0; y < pnt; ++y) {
      long nrm = lmod(static_cast<long>((x % p) * (x % p) -
                                        dnum * ((y % p) * (y % p))),
                      p);
      if (nrm == 0) continue;
      long long cnt = fc.ucount(x, y);
      if (cnt == 0) continue;
      ++fv.t_hits;
      total += Int(static_cast<long>(cnt));
    }
  Rat pnt_r(static_cast<long>(pnt));
  fv.vol = Rat(total) * ppow(p, 3 * w - 3 * fc.E) / (pnt_r * pnt_r);
  return fv;
}

// Normalizer: vol of R cap K^H in the same parameter measure: units of o_L
// times the integral X-block.
inline Rat rk_volume(const FieldData& fd, long NT) {
  long p = fd.p;
  Int pnt = ipow(p, NT);
  Int cnt(0);
  for (Int xi(0); xi < pnt; ++xi)
    for (Int yi(0); yi < pnt; ++yi) {
      LElt zeta(Rat(xi), Rat(yi) / 2);
      if (fd.lnorm(zeta) == 0) continue;
      if (fd.in_oL_units(zeta)) cnt += 1;
    }
  return Rat(cnt) / Rat(pnt * pnt);
}

// kappa_s = vol(R cap K^H) / vol(R cap s I s^{-1}); window-stabilized.
inline Rat kappa_for(const FieldData& fd, const CosetAddress& a) {
  long NT = a.m + 2;
  long w = std::max(0L, -a.l) + 2;
  FrameVolume v1 = frame_volume(fd, a, NT, w);
  FrameVolume v2 = frame_volume(fd, a, NT + 1, w + 1);
  if (v1.vol != v2.vol)
    throw std::domain_error("kappa_for: window did not stabilize at " +
                            addr_str(a));
  if (v1.vol == 0)
    throw std::domain_error("kappa_for: empty intersection at " + addr_str(a));
  Rat rk = rk_volume(fd, NT);
  Rat rk2 = rk_volume(fd, NT + 1);
  if (rk != rk2) throw std::domain_error("kappa_for: unit volume unstable");
  return rk / v1.vol;
}

// |x|^2 for a numeric table value.
inline Rat abs2(const Scalar& v) {
  if (v.is_zero()) return Rat(0);
  Kelt k = v.constant_value();
  Kelt n = k * k.conj();
  if (!n.is_rational())
    throw std::domain_error("abs2: value not numeric");
  return n.rational_value();
}

struct NormCheckResult {
  Rat truncated;   // sum over the (Lmax, Mmax) window
  Rat full;        // exact geometric completion
  Rat tail_bound;  // full - truncated
  Rat target;      // closed form divided by vol(I)
  Report rows;
};

// Exact verification of the norm formula: the truncated sum of
// |B(s)|^2 vol(I)/vol(I_s) against the closed form, with the volume ratios
// measured by the stabilized counting oracle and extended geometrically
// (the growth ratios are themselves measured and cross-checked).
inline NormCheckResult norm_check(const BesselCtx& ctx, long Lmax, long Mmax) {
  const FieldData& fd = ctx.fd;
  long q = fd.q, m0 = ctx.lam.m0;
  if (ctx.lam.uval_symbolic)
    throw std::domain_error("norm_check: needs a numeric unitary Lambda");
  NormCheckResult out;
  out.truncated = 0;
  out.full = 0;

  // target: closed form over vol(I)
  Rat leg(fd.legendre());
  if (dim_and_testvector(ctx).dim == 0) {
    out.target = 0;
  } else if (m0 >= 1) {
    out.target = (1 - leg / q) * 2 * ppow(q, 4 * m0 - 3) /
                 ((1 - ppow(q, -1)) * (1 - ppow(q, -3)));
  } else if (fd.cs == CaseSym::ramified) {
    out.target = Rat(2 * ppow(q, 5) + ppow(q, 4) + ppow(q, 2) - 2 * q) /
                 ((1 - ppow(q, -3)) * (1 - ppow(q, -1)));
  } else {
    throw std::domain_error("norm_check: unsupported configuration");
  }

  if (dim_and_testvector(ctx).dim == 0) {
    // identically-zero table; nothing to sum
    bool allzero = true;
    for (auto& a : addresses_in_window(fd, -2, 3, 3))
      allzero = allzero && b_table(ctx, a).is_zero();
    out.rows.push_back(ReportRow::of(allzero, "norm-zero-row", "", "", "0"));
    out.tail_bound = 0;
    return out;
  }

  auto B2 = [&](const CosetAddress& a) { return abs2(b_table(ctx, a)); };

  struct Fam {
    WTag wtag;
    SWord stag;
    long m_lo;      // first m with nonzero rows (fixed 0 for w-frames)
    bool extend_m;  // w-frames live at m = 0 only
  };
  std::vector<Fam> fams;
  for (SWord wd : {SW_1, SW_s2, SW_s2s1, SW_s2s1s2})
    fams.push_back({WTag::none, wd, std::max(0L, m0 - 1), true});
  for (SWord wd : {SW_s1, SW_s1s2, SW_s1s2s1, SW_s1s2s1s2})
    fams.push_back({WTag::none, wd, std::max(1L, m0), true});
  if (fd.cs == CaseSym::ramified && m0 == 0)
    for (SWord wd : {SW_1, SW_s2, SW_s2s1, SW_s2s1s2})
      fams.push_back({WTag::w0, wd, 0, false});

  Rat ql3 = ppow(q, 3);
  for (auto& f : fams) {
    auto addr = [&](long l, long m) {
      return CosetAddress{l, f.extend_m ? m : 0, f.wtag, f.stag};
    };
    long ml = f.m_lo;
    // l >= 0 block
    Rat b00 = B2(addr(0, ml));
    if (b00 != 0) {
      Rat k00 = kappa_for(fd, addr(0, ml));
      Rat k10 = kappa_for(fd, addr(1, ml));
      if (k10 != k00 * ql3)
        throw std::domain_error("norm_check: l-growth is not q^3 at " +
                                addr_str(addr(0, ml)));
      Rat rl = B2(addr(1, ml)) / b00 * ql3;  // per-step l-ratio of the terms
      Rat rm(0);
      if (f.extend_m) {
        Rat k01 = kappa_for(fd, addr(0, ml + 1));
        Rat k02 = kappa_for(fd, addr(0, ml + 2));
        if (k02 * k00 != k01 * k01)
          throw std::domain_error("norm_check: m-growth not geometric at " +
                                  addr_str(addr(0, ml)));
        Rat k11 = kappa_for(fd, addr(1, ml + 1));
        if (k11 * k00 != k01 * k10)
          throw std::domain_error("norm_check: kappa not separable at " +
                                  addr_str(addr(0, ml)));
        rm = B2(addr(0, ml + 1)) / b00 * (k01 / k00);
      }
      Rat t0 = b00 * k00;
      // truncated and full double geometric sums
      Rat sl_full = 1 / (1 - rl), sl_trunc(0), pw(1);
      for (long i = 0; i <= Lmax; ++i) { sl_trunc += pw; pw *= rl; }
      Rat sm_full(1), sm_trunc(1);
      if (f.extend_m) {
        sm_full = 1 / (1 - rm);
        sm_trunc = 0;
        pw = 1;
        for (long j = 0; ml + j <= Mmax; ++j) { sm_trunc += pw; pw *= rm; }
      }
      out.full += t0 * sl_full * sm_full;
      out.truncated += t0 * sl_trunc * sm_trunc;
    }
    // l = -1 column
    Rat bm1 = B2(addr(-1, ml));
    if (bm1 != 0) {
      Rat km1 = kappa_for(fd, addr(-1, ml));
      Rat t0 = bm1 * km1;
      Rat sm_full(1), sm_trunc(1);
      if (f.extend_m) {
        Rat km2 = kappa_for(fd, addr(-1, ml + 1));
        Rat km3 = kappa_for(fd, addr(-1, ml + 2));
        if (km3 * km1 != km2 * km2)
          throw std::domain_error("norm_check: m-growth (l=-1) not geometric");
        Rat rm = B2(addr(-1, ml + 1)) / bm1 * (km2 / km1);
        sm_full = 1 / (1 - rm);
        sm_trunc = 0;
        Rat pw(1);
        for (long j = 0; ml + j <= Mmax; ++j) { sm_trunc += pw; pw *= rm; }
      }
      out.full += t0 * sm_full;
      out.truncated += t0 * sm_trunc;
    }
  }
  out.tail_bound = out.full - out.truncated;
  bool within = (out.target - out.truncated <= out.tail_bound) &&
                (out.truncated <= out.target);
  bool exact = (out.full == out.target);
  out.rows.push_back(ReportRow::of(within, "norm-truncated",
                                   "Lmax=" + std::to_string(Lmax) +
                                       ",Mmax=" + std::to_string(Mmax),
                                   rat_str(out.truncated), rat_str(out.target)));
  out.rows.push_back(ReportRow::of(exact, "norm-full", "",
                                   rat_str(out.full), rat_str(out.target)));
  return out;
}

}  // namespace gsp4
