#pragma once

#include <random>
#include <unordered_set>

#include "gsp4/hecke.hpp"

namespace gsp4 {

// ------------------------------------------------------------- tau data

enum class TauClass {
  unram_ps,                 // alpha x beta, both unramified
  unram_ram_ps,             // alpha unramified, beta ramified
  ram_ram_ps,               // both ramified
  supercuspidal_or_ramSt,   // depth-positive: newform dies above l = 0
  unramSt                   // Omega' St with Omega' unramified
};
inline const char* tau_class_name(TauClass c) {
  switch (c) {
    case TauClass::unram_ps: return "unram_ps";
    case TauClass::unram_ram_ps: return "unram_ram_ps";
    case TauClass::ram_ram_ps: return "ram_ram_ps";
    case TauClass::supercuspidal_or_ramSt: return "supercuspidal_or_ramSt";
    case TauClass::unramSt: return "unramSt";
  }
  return "?";
}

struct TauSpec {
  TauClass cls = TauClass::unram_ps;
  Scalar atau = Scalar::var(V_atau);
  Scalar btau = Scalar::var(V_btau);
  Scalar omg = Scalar::var(V_omg);
  long n = 0;  // conductor exponent

  static TauSpec of(TauClass c) {
    TauSpec t;
    t.cls = c;
    switch (c) {
      case TauClass::unram_ps: t.n = 0; break;
      case TauClass::unram_ram_ps: t.n = 1; break;
      case TauClass::ram_ram_ps: t.n = 2; break;
      case TauClass::supercuspidal_or_ramSt: t.n = 2; break;
      case TauClass::unramSt: t.n = 1; break;
    }
    return t;
  }

  Scalar omega_tau() const {
    if (cls == TauClass::unramSt) return omg * omg;
    return atau * btau;
  }
};

// Conductor-p^n newform values at diag(p^l, 1), normalized to 1 at l = 0.
inline Scalar whittaker_newform(const TauSpec& tau, long q, long l) {
  if (l < 0) throw std::domain_error("whittaker_newform: l >= 0");
  switch (tau.cls) {
    case TauClass::unram_ps: {
      Scalar s(0);
      for (long i = 0; i <= l; ++i) s += tau.atau.pow(l - i) * tau.btau.pow(i);
      return Scalar::qpow_half(q, -l) * s;
    }
    case TauClass::unram_ram_ps:
      return Scalar::qpow_half(q, -l) * tau.omega_tau().pow(l) *
             tau.atau.pow(-l);
    case TauClass::ram_ram_ps:
    case TauClass::supercuspidal_or_ramSt:
      return l == 0 ? Scalar(1) : Scalar(0);
    case TauClass::unramSt:
      return tau.omg.pow(l) * Scalar(ppow(q, -l));
  }
  return Scalar(0);
}

// ------------------------------------------------------------ zeta context

struct ZetaCtx {
  BesselCtx bc;
  TauSpec tau;

  long q() const { return bc.fd.q; }
  // C = (1 - (L/p) q^{-1}) q / ((1+q)^2 (1+q^2))
  Rat Cvol() const {
    long qq = q();
    Rat leg(bc.fd.legendre());
    return (1 - leg / qq) * qq / (Rat(1 + qq) * (1 + qq) * (1 + qq * qq));
  }
};

inline ZetaCtx make_zeta_ctx(const BesselCtx& bc, const TauSpec& tau) {
  ZetaCtx z{bc, tau};
  auto dt = dim_and_testvector(bc);
  if (dt.dim != 1 || dt.testvector == DimTestVector::no)
    throw std::domain_error(
        "zeta: the context must admit the Iwahori-spherical test vector");
  return z;
}

// vol(R(F)\R(F) h(l,0) I) = C q^{3l}
inline Scalar volume_V(const ZetaCtx& z, long l) {
  return Scalar(z.Cvol() * ppow(z.q(), 3 * l));
}

// W^#(eta h(l,0), s) = coef * X^{3l}: coef = q^{-3l/2} omega_tau(p)^{-l} W(l)
inline std::pair<Scalar, long> wsharp_at_frame(const ZetaCtx& z, long l) {
  Scalar coef = Scalar::qpow_half(z.q(), -3 * l) * z.tau.omega_tau().pow(-l) *
                whittaker_newform(z.tau, z.q(), l);
  return {coef, 3 * l};
}

// ------------------------------------------------------- support decision

namespace detail {

// Arithmetic in R = o_L / P, P = p o_L, elements u + v alpha.
struct RRing {
  long p;
  long trn, nmn;  // tr(alpha), N(alpha) mod p  (b/c and a/c mod p)
  struct E {
    long u, v;
    bool operator==(const E& o) const { return u == o.u && v == o.v; }
  };
  E from(const FieldData& fd, const LElt& z) const {
    auto [a, b] = fd.alpha_coords(z);
    return {mpz_get_si(mod_ppow(a, p, 1).get_mpz_t()),
            mpz_get_si(mod_ppow(b, p, 1).get_mpz_t())};
  }
  E add(E a, E b) const { return {lmod(a.u + b.u, p), lmod(a.v + b.v, p)}; }
  E sub(E a, E b) const { return {lmod(a.u - b.u, p), lmod(a.v - b.v, p)}; }
  E mul(E a, E b) const {
    long w = lmod(a.v * b.v, p);
    return {lmod(a.u * b.u - w * nmn, p),
            lmod(a.u * b.v + a.v * b.u + w * trn, p)};
  }
  E conj(E a) const { return {lmod(a.u + a.v * trn, p), lmod(-a.v, p)}; }
  long norm(E a) const {
    return lmod(a.u * a.u + a.u * a.v * trn + a.v * a.v * nmn, p);
  }
  bool is_zero(E a) const { return a.u == 0 && a.v == 0; }
  bool is_unit(E a) const { return norm(a) % p != 0; }
  E inv(E a) const {
    long n = norm(a);
    if (n % p == 0) throw std::domain_error("RRing: not a unit");
    long ni = inv_mod(n, p);
    E c = conj(a);
    return {lmod(c.u * ni, p), lmod(c.v * ni, p)};
  }
};

using RMat = std::array<std::array<RRing::E, 4>, 4>;

inline RMat rmat_from(const RRing& R, const FieldData& fd, const Mat4& g) {
  RMat r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r[i][j] = R.from(fd, g.e[i][j]);
  return r;
}
inline RMat rmat_mul(const RRing& R, const RMat& a, const RMat& b) {
  RMat r{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      RRing::E s{0, 0};
      for (int k = 0; k < 4; ++k) s = R.add(s, R.mul(a[i][k], b[k][j]));
      r[i][j] = s;
    }
  return r;
}

// Is x in M(R) N(R)? Peel the M^(1)-part and the N-part, then check the
// M^(2) shape.
inline bool in_MN_R(const RRing& R, const RMat& x) {
  // first column (zeta, 0, 0, 0), third row (0, 0, *, 0)
  if (!R.is_zero(x[1][0]) || !R.is_zero(x[2][0]) || !R.is_zero(x[3][0]))
    return false;
  if (!R.is_zero(x[2][1]) || !R.is_zero(x[2][3])) return false;
  RRing::E zeta = x[0][0];
  if (!R.is_unit(zeta) || !R.is_unit(x[2][2])) return false;
  // y = M1(zeta)^{-1} x: scale row 1 by zeta^{-1}, row 3 by conj(zeta)
  RMat y = x;
  RRing::E zi = R.inv(zeta), zc = R.conj(zeta);
  for (int j = 0; j < 4; ++j) {
    y[0][j] = R.mul(zi, y[0][j]);
    y[2][j] = R.mul(zc, y[2][j]);
  }
  // n-parameters off row 1 of y = m2 * n
  RRing::E z = y[0][1], yy = y[0][3];
  RRing::E w = R.sub(y[0][2], R.mul(z, R.conj(yy)));
  // y3 = y * n^{-1} = y * nwy(-w,-yy) * nz(-z)
  auto apply_nwy = [&](RMat& mm, RRing::E ww, RRing::E yv) {
    // right-multiply by nwy(ww, yv): col3 += col1*ww + col2*conj(yv); col4 += col1*yv
    for (int i = 0; i < 4; ++i) {
      mm[i][2] = R.add(mm[i][2],
                       R.add(R.mul(mm[i][0], ww), R.mul(mm[i][1], R.conj(yv))));
      mm[i][3] = R.add(mm[i][3], R.mul(mm[i][0], yv));
    }
  };
  auto apply_nz = [&](RMat& mm, RRing::E zv) {
    // right-multiply by nz(zv): col2 += col1*zv; col3 -= col4*conj(zv)
    for (int i = 0; i < 4; ++i) {
      mm[i][1] = R.add(mm[i][1], R.mul(mm[i][0], zv));
      mm[i][2] = R.sub(mm[i][2], R.mul(mm[i][3], R.conj(zv)));
    }
  };
  RMat y3 = y;
  apply_nwy(y3, RRing::E{lmod(-w.u, R.p), lmod(-w.v, R.p)},
            RRing::E{lmod(-yy.u, R.p), lmod(-yy.v, R.p)});
  apply_nz(y3, RRing::E{lmod(-z.u, R.p), lmod(-z.v, R.p)});
  // y3 must have the M^(2) shape: rows/cols supported on {1},{2,4},{3}
  static const int must_zero[10][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 0}, {1, 2},
                                       {2, 0}, {2, 1}, {2, 3}, {3, 0}, {3, 2}};
  if (!(y3[0][0] == RRing::E{1, 0})) return false;
  for (auto& ij : must_zero)
    if (!R.is_zero(y3[ij[0]][ij[1]])) return false;
  return true;
}

}  // namespace detail

// Decides whether eta_m * t lies in the support M N eta I Gamma(P) of W^#,
// by a complete scan of the image of I mod P: the element belongs to the
// support iff g k^{-1} eta^{-1} is in MN mod P for some Iwahori class k.
inline bool wsharp_support(const FieldData& fd, long m, WTag wtag,
                           SWord stag) {
  detail::RRing R;
  R.p = fd.p;
  R.trn = mpz_get_si(mod_ppow(fd.b / fd.c, fd.p, 1).get_mpz_t());
  R.nmn = mpz_get_si(mod_ppow(fd.a / fd.c, fd.p, 1).get_mpz_t());

  // tail matrix t and the query element g = eta_m t
  Mat4 t = Mat4::ident(fd);
  if (wtag != WTag::none)
    t = mat_Ww(fd, wtag_value(fd, wtag)) * mat_s1(fd);
  t = t * sword_mat(fd, stag);
  Mat4 g = mat_eta_m(fd, m) * t;
  detail::RMat gR = detail::rmat_from(R, fd, g);
  detail::RMat etainvR = detail::rmat_from(R, fd, inverse_sim(mat_eta(fd)));

  // enumerate the image of I mod p (pattern subgroup of GSp4(F_p))
  std::vector<Mat4> gens;
  gens.push_back(mat_Ww(fd, Rat(1)));
  gens.push_back(mat_UX(fd, Rat(1), Rat(0), Rat(0)));
  gens.push_back(mat_UX(fd, Rat(0), Rat(1), Rat(0)));
  gens.push_back(mat_UX(fd, Rat(0), Rat(0), Rat(1)));
  if (fd.p > 2) {
    long u = 2;  // primitive root mod 3 and mod 5
    gens.push_back(embed_gl2(fd, QMat2(Rat(u), Rat(0), Rat(0), Rat(1))));
    gens.push_back(embed_gl2(fd, QMat2(Rat(1), Rat(0), Rat(0), Rat(u))));
    gens.push_back(Mat4::diag4(fd, Rat(1), Rat(1), Rat(u), Rat(u)));
  }
  std::vector<detail::M4p> gmats;
  for (auto& gm : gens) gmats.push_back(detail::reduce_mod_p(gm, fd.p));
  auto enc = [&](const detail::M4p& mm) {
    uint64_t lo = 0, hi = 0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 4; ++j) lo = lo * fd.p + mm[i][j];
    for (int i = 2; i < 4; ++i)
      for (int j = 0; j < 4; ++j) hi = hi * fd.p + mm[i][j];
    return (static_cast<uint64_t>(hi) << 32) ^ lo;  // p <= 5: 8 digits fit
  };
  std::unordered_set<uint64_t> seen;
  std::vector<detail::M4p> frontier;
  detail::M4p id{};
  for (int i = 0; i < 4; ++i) id[i][i] = 1;
  seen.insert(enc(id));
  frontier.push_back(id);
  std::vector<detail::M4p> group{id};
  while (!frontier.empty()) {
    std::vector<detail::M4p> next;
    for (auto& x : frontier)
      for (auto& gm : gmats) {
        detail::M4p y = detail::mulp(x, gm, fd.p);
        if (seen.insert(enc(y)).second) {
          next.push_back(y);
          group.push_back(y);
        }
      }
    frontier = std::move(next);
  }
  long qm1 = fd.p - 1;
  if (static_cast<long>(group.size()) !=
      qm1 * qm1 * qm1 * fd.p * fd.p * fd.p * fd.p)
    throw std::logic_error("wsharp_support: Iwahori image has wrong order");

  for (auto& kbar : group) {
    detail::M4p kinv;
    if (!detail::invp(kbar, kinv, fd.p))
      throw std::logic_error("wsharp_support: singular Iwahori class");
    detail::RMat kR{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) kR[i][j] = {kinv[i][j], 0};
    detail::RMat x = detail::rmat_mul(R, detail::rmat_mul(R, gR, kR), etainvR);
    if (detail::in_MN_R(R, x)) return true;
  }
  return false;
}

// ------------------------------------------------------------ closed forms

// Z(s) as an exact rational function in X = q^{-s}.
inline RationalFunction zeta_closed(const ZetaCtx& z) {
  long q = z.q();
  Scalar C(z.Cvol());
  Scalar om(z.bc.omega());
  switch (z.tau.cls) {
    case TauClass::ram_ram_ps:
    case TauClass::supercuspidal_or_ramSt:
      return C;
    case TauClass::unramSt: {
      Scalar ratio = -om * z.tau.omg.pow(-1) * Scalar::qpow_half(q, -5);
      return Scalar::geometric_closed_form(C, ratio, 3);
    }
    case TauClass::unram_ram_ps: {
      Scalar ratio = -om * z.tau.atau.pow(-1) * Scalar(ppow(q, -2));
      return Scalar::geometric_closed_form(C, ratio, 3);
    }
    case TauClass::unram_ps: {
      // partial fractions: sum_l r^l (A^{l+1}-B^{l+1})/(A-B), r = -om q^{-2} X^3
      Scalar A = z.tau.atau.pow(-1), B = z.tau.btau.pow(-1);
      Scalar gA = Scalar::geometric_closed_form(A, -om * Scalar(ppow(q, -2)) * A, 3);
      Scalar gB = Scalar::geometric_closed_form(B, -om * Scalar(ppow(q, -2)) * B, 3);
      return C * (gA - gB) / (A - B);
    }
  }
  return Scalar(0);
}

// L(3s + 1/2, pi x tilde-tau) in X = q^{-s}; q^{-(3s+1/2)} = q^{-1/2} X^3.
inline RationalFunction l_factor(const ZetaCtx& z) {
  long q = z.q();
  Scalar Om(Rat(z.bc.omega_sign));
  Scalar X3 = Scalar::var(V_X, 3);
  switch (z.tau.cls) {
    case TauClass::unram_ps: {
      Scalar f1 = Scalar(1) - Om * z.tau.atau.pow(-1) * Scalar(ppow(q, -2)) * X3;
      Scalar f2 = Scalar(1) - Om * z.tau.btau.pow(-1) * Scalar(ppow(q, -2)) * X3;
      return Scalar(1) / (f1 * f2);
    }
    case TauClass::unram_ram_ps: {
      Scalar f1 = Scalar(1) - Om * z.tau.atau.pow(-1) * Scalar(ppow(q, -2)) * X3;
      return Scalar(1) / f1;
    }
    case TauClass::unramSt: {
      Scalar f1 =
          Scalar(1) - Om * z.tau.omg.pow(-1) * Scalar::qpow_half(q, -3) * X3;
      Scalar f2 =
          Scalar(1) - Om * z.tau.omg.pow(-1) * Scalar::qpow_half(q, -5) * X3;
      return Scalar(1) / (f1 * f2);
    }
    default:
      return Scalar(1);
  }
}

inline RationalFunction y_prime(const ZetaCtx& z) {
  Scalar C(z.Cvol());
  if (z.tau.cls == TauClass::unramSt) {
    Scalar om(z.bc.omega());
    return C * (Scalar(1) +
                om * z.tau.omg.pow(-1) * Scalar::qpow_half(z.q(), -3) *
                    Scalar::var(V_X, 3));
  }
  return C;
}

// The main identity Z(s) = Y'(s) L(3s+1/2), checked as an exact rational
// function identity plus a 12-term truncation against the series expansion.
inline Report verify_integral_theorem(const ZetaCtx& z) {
  Report rep;
  RationalFunction lhs = zeta_closed(z);
  RationalFunction rhs = y_prime(z) * l_factor(z);
  rep.push_back(ReportRow::of(lhs == rhs, "zeta-theorem",
                              tau_class_name(z.tau.cls), scalar_str(lhs),
                              scalar_str(rhs)));
  // truncated sum of the unfolded integral, through degree 36 (l <= 12)
  Scalar partial(0);
  for (long l = 0; l <= 12; ++l) {
    auto [coef, xpow] = wsharp_at_frame(z, l);
    Scalar bval = b_table(z.bc, {l, 0, WTag::none, SW_1});
    partial += coef * bval * volume_V(z, l) * Scalar::var(V_X, static_cast<int>(xpow));
  }
  auto series = lhs.series_in_x(36);
  auto pser = partial.series_in_x(36);
  bool ok = true;
  for (int i = 0; i <= 36; ++i) ok = ok && (series[i] == pser[i]);
  rep.push_back(ReportRow::of(ok, "zeta-truncation",
                              tau_class_name(z.tau.cls),
                              scalar_str(partial), scalar_str(lhs)));
  return rep;
}

// ------------------------------------------- W^# well-definedness guard

// Samples A = eta^{-1} m n eta in I Gamma(P^{n0}) and checks the
// decomposition invariants: c' in P^{n0} and a' conj(zeta)^{-1} in 1 + P^{n0}.
inline Report wsharp_welldef_guard(const BesselCtx& ctx, long n0, int samples,
                                   std::mt19937_64& rng) {
  const FieldData& fd = ctx.fd;
  long p = fd.p;
  auto rint = [&](long lo, long hi) {
    return Rat(static_cast<long>(lo + rng() % (hi - lo + 1)));
  };
  Rat pn = ppow(p, n0);

  // decidable membership test for I Gamma(P^n0)
  auto in_IGamma = [&](const Mat4& A) {
    if (!in_KG(A)) return false;
    // all alpha-coordinates of entries must vanish mod p^n0 (F-valued part)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        auto [u, v] = fd.alpha_coords(A.e[i][j]);
        if (valp(v, p) < n0) return false;
      }
    // Iwahori pattern mod p on the F-part
    static const int zpos[6][2] = {{0, 1}, {2, 0}, {2, 1},
                                   {3, 0}, {3, 1}, {3, 2}};
    for (auto& ij : zpos) {
      auto [u, v] = fd.alpha_coords(A.e[ij[0]][ij[1]]);
      if (valp(u, p) < 1) return false;
    }
    return true;
  };

  Mat4 eta = mat_eta(fd), etainv = inverse_sim(mat_eta(fd));
  int accepted = 0;
  Report rep;
  for (int it = 0; it < samples * 120 && accepted < samples; ++it) {
    // m-part: zeta near o^x + P, GL2-part near K^(0)(p^{n0})
    LElt zeta = LElt(rint(1, p - 1), Rat(0)) +
                LElt(fd.alpha.x * Rat(p) * rint(-1, 1),
                     fd.alpha.y * Rat(p) * rint(-1, 1));
    if (fd.lnorm(zeta) == 0) continue;
    Rat ap = rint(1, p - 1) + pn * rint(-1, 1);
    Rat bp = rint(-2, 2);
    Rat cp = pn * rint(-1, 1);
    Rat dp = rint(1, p - 1) + Rat(p) * rint(-1, 1);
    Rat mu2 = ap * dp - bp * cp;
    if (mu2 == 0) continue;
    // n-part
    LElt zz = LElt(Rat(p) * rint(-1, 1), Rat(p) * rint(-1, 1));
    LElt yy = LElt(rint(-1, 1), rint(-1, 1));
    Rat ww = rint(-2, 2);

    Mat4 mhat(fd);
    mhat.e[0][0] = zeta;
    mhat.e[1][1] = LElt(ap);
    mhat.e[1][3] = LElt(bp);
    mhat.e[2][2] = fd.lmul(LElt(mu2), fd.linv(fd.lconj(zeta)));
    mhat.e[3][1] = LElt(cp);
    mhat.e[3][3] = LElt(dp);
    Mat4 nz = Mat4::ident(fd);
    nz.e[0][1] = zz;
    nz.e[3][2] = -fd.lconj(zz);
    Mat4 nwy = Mat4::ident(fd);
    nwy.e[0][2] = LElt(ww);
    nwy.e[0][3] = yy;
    nwy.e[1][2] = fd.lconj(yy);
    Mat4 A = etainv * mhat * nz * nwy * eta;
    if (!in_IGamma(A)) continue;
    ++accepted;
    // conclusions of the decomposition lemma
    bool c_ok = fd.in_Pn(LElt(cp), n0);
    LElt az = fd.lmul(LElt(ap), fd.linv(fd.lconj(zeta)));
    bool a_ok = fd.in_Pn(az - LElt(Rat(1)), n0);
    if (!c_ok || !a_ok) {
      rep.push_back(ReportRow::fail("wsharp-welldef",
                                    "n0=" + std::to_string(n0),
                                    rat_str(cp), "c' or a' class"));
      return rep;
    }
  }
  if (accepted == 0) {
    rep.push_back(ReportRow::fail("wsharp-welldef-sampler",
                                  "n0=" + std::to_string(n0), "no sample", ""));
    return rep;
  }
  rep.push_back(ReportRow::pass(
      "wsharp-welldef",
      "n0=" + std::to_string(n0) + " n=" + std::to_string(accepted)));
  return rep;
}

}  // namespace gsp4
