#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "gsp4/grp.hpp"
#include "gsp4/scalar.hpp"

namespace gsp4 {

// --------------------------------------------------------------- psi/theta

// psi(x) = exp(2 pi i frac_p(x)), conductor o. Evaluation beyond the
// configured p-power depth is a hard error.
inline Scalar psi_eval(const FieldData& fd, const Rat& x) {
  auto [j, k] = frac_part_p(x, fd.p);
  if (k > fd.psi_depth)
    throw std::domain_error("psi: p-denominator exceeds configured depth");
  long pk = 1;
  for (long i = 0; i < k; ++i) pk *= fd.p;
  return Scalar(Kelt::root(UnitRootExp(mpz_get_si(j.get_mpz_t()), pk)));
}

// theta on U(F): psi(tr(S X)) = psi(a x11 + b x12 + c x22).
inline Scalar theta_eval(const FieldData& fd, const Rat& x11, const Rat& x12,
                         const Rat& x22) {
  return psi_eval(fd, fd.a * x11 + fd.b * x12 + fd.c * x22);
}

// ----------------------------------------------------------------- Lambda

// Character of L^x trivial on F^x: a finite-order part on the quotient
// o_L^x / (o^x (1 + P^m0)), built by enumeration, plus a value on the
// uniformizer (symbolic lam in the split case when requested).
class LambdaSpec {
 public:
  long m0 = 0;
  long group_order = 1;
  long selector = 0;       // finite part = zeta_N ^ (selector * dlog)
  Scalar uval;             // Lambda(varpi_L)
  bool uval_symbolic = false;

  static LambdaSpec trivial(const FieldData& fd) {
    LambdaSpec s;
    s.build(fd, 0, 0);
    s.uval = Scalar(1);
    return s;
  }

  // selector: exponent of the character on the canonical generator.
  void build(const FieldData& fd, long m0_in, long selector_in) {
    fd_ = &fd;
    m0 = m0_in;
    selector = selector_in;
    classes_.clear();
    index_.clear();
    if (m0 == 0) {
      classes_.push_back(LElt(Rat(1)));
      group_order = 1;
      selector = 0;
      dlog_ = {0};
      return;
    }
    long pm = 1;
    for (long i = 0; i < m0; ++i) pm *= fd.p;
    long pm1 = pm * fd.p;
    // enumerate unit representatives by {1,alpha}-coordinates mod p^(m0+1)
    for (long u = 0; u < pm1; ++u)
      for (long v = 0; v < pm1; ++v) {
        LElt z = fd.from_alpha_coords(Rat(u), Rat(v));
        if (!fd.in_oL_units(z)) continue;
        auto key = class_key(z);
        if (index_.count(key)) continue;
        index_[key] = static_cast<int>(classes_.size());
        classes_.push_back(z);
      }
    group_order = static_cast<long>(classes_.size());
    // find a generator (the quotients in scope are cyclic)
    dlog_.assign(classes_.size(), -1);
    bool found = false;
    for (size_t g = 0; g < classes_.size() && !found; ++g) {
      std::vector<long> dl(classes_.size(), -1);
      LElt acc(Rat(1));
      bool ok = true;
      for (long e = 0; e < group_order; ++e) {
        int idx = index_.at(class_key(acc));
        if (dl[idx] != -1) { ok = false; break; }
        dl[idx] = e;
        acc = fd.lmul(acc, classes_[g]);
      }
      if (ok && index_.at(class_key(acc)) == index_.at(class_key(LElt(Rat(1))))) {
        dlog_ = dl;
        found = true;
      }
    }
    if (!found)
      throw std::domain_error("LambdaSpec: unit quotient is not cyclic");
    // minimality of m0: the character must be nontrivial on the classes
    // coming from (o^x + P^(m0-1)) cap o_L^x
    if (selector != 0 || m0 == 0) {
      bool nontrivial = false;
      for (size_t i = 0; i < classes_.size(); ++i) {
        if (!fd.in_ounits_plus_Pn(classes_[i], m0 - 1)) continue;
        if (lmod(selector * dlog_[i], group_order) != 0) nontrivial = true;
      }
      if (m0 >= 1 && !nontrivial)
        throw std::domain_error(
            "LambdaSpec: selector gives conductor below m0 (m0 not minimal)");
    } else if (m0 >= 1) {
      throw std::domain_error("LambdaSpec: selector 0 forces m0 = 0");
    }
  }

  // finite-order value on a unit of o_L
  Cyclo finite_value(const LElt& u) const {
    if (m0 == 0) return Cyclo(Rat(1));
    int idx = index_.at(class_key(u));
    return Cyclo::root(
        UnitRootExp(lmod(selector * dlog_[idx], group_order), group_order));
  }
  long finite_order_of_char() const {
    if (m0 == 0) return 1;
    long g = lgcd(selector, group_order);
    return group_order / (g == 0 ? group_order : g);
  }

  const std::vector<LElt>& classes() const { return classes_; }

 private:
  // canonical label of the class of a unit z modulo o^x (1 + P^m0)
  std::pair<long, long> class_key(const LElt& z) const {
    const FieldData& fd = *fd_;
    if (m0 == 0) return {0, 0};
    long pm = 1;
    for (long i = 0; i < m0; ++i) pm *= fd.p;
    auto [a, b] = fd.alpha_coords(z);
    long ra = mpz_get_si(mod_ppow(a, fd.p, m0).get_mpz_t());
    long rb = mpz_get_si(mod_ppow(b, fd.p, m0).get_mpz_t());
    std::pair<long, long> best{-1, -1};
    for (long u = 1; u < pm; ++u) {
      if (u % fd.p == 0) continue;
      std::pair<long, long> cand{lmod(u * ra, pm), lmod(u * rb, pm)};
      if (best.first < 0 || cand < best) best = cand;
    }
    return best;
  }

  const FieldData* fd_ = nullptr;
  std::vector<LElt> classes_;
  std::map<std::pair<long, long>, int> index_;
  std::vector<long> dlog_;
};

// ------------------------------------------------------------ the context

struct BesselCtx {
  FieldData fd;
  LambdaSpec lam;
  int omega_sign = 1;  // Omega(varpi) in {+1, -1}

  Rat omega() const { return Rat(-omega_sign); }  // omega = -Omega(varpi)

  // Lambda((1,varpi)) as a Scalar (split case; symbolic when lam is)
  Scalar lambda_one_pi() const {
    return Scalar(1) / lam.uval;
  }
};

// Lambda evaluated at any nonzero element of L^x (trivial on F^x).
inline Scalar lambda_eval(const BesselCtx& ctx, const LElt& z) {
  const FieldData& fd = ctx.fd;
  if (z.is_zero() || fd.lnorm(z) == 0)
    throw std::domain_error("lambda_eval: not a unit of L^x");
  long k = 0;
  LElt u;
  switch (fd.cs) {
    case CaseSym::inert: {
      auto [ca, cb] = fd.alpha_coords(z);
      k = std::min(valp(ca, fd.p), valp(cb, fd.p));
      Rat s = ppow(fd.p, -k);
      u = LElt(z.x * s, z.y * s);
      break;
    }
    case CaseSym::ramified: {
      k = valp(fd.lnorm(z), fd.p);
      u = fd.lmul(z, fd.lpow(fd.uniformizer_L(), -k));
      break;
    }
    case CaseSym::split: {
      auto [z1, z2] = fd.split_pair(z);
      long v1 = valp(z1, fd.p), v2 = valp(z2, fd.p);
      k = v1 - v2;
      u = fd.from_split_pair(z1 * ppow(fd.p, -v1), z2 * ppow(fd.p, -v2));
      break;
    }
  }
  if (!fd.in_oL_units(u))
    throw std::logic_error("lambda_eval: unit part is not a unit");
  return ctx.lam.uval.pow(k) * Scalar(Kelt(ctx.lam.finite_value(u)));
}

// --------------------------------------------------- dimension/test vector

struct DimTestVector {
  int dim = 1;
  enum TV { no, yes, conditional } testvector = no;
  std::string condition;  // set when conditional (symbolic lam)
};

inline DimTestVector dim_and_testvector(const BesselCtx& ctx) {
  DimTestVector r;
  const FieldData& fd = ctx.fd;
  bool dim0 = false;
  if (fd.cs == CaseSym::inert) {
    dim0 = (ctx.lam.m0 == 0);  // Lambda trivial and Omega o N trivial
  } else if (fd.cs == CaseSym::ramified) {
    dim0 = (ctx.lam.m0 == 0) &&
           (ctx.lam.uval == Scalar(Rat(ctx.omega_sign)));
  }
  r.dim = dim0 ? 0 : 1;
  if (dim0) {
    r.testvector = DimTestVector::no;
    return r;
  }
  if (ctx.lam.m0 > 1) {
    r.testvector = DimTestVector::no;
    return r;
  }
  if (fd.cs == CaseSym::split && ctx.lam.m0 == 0) {
    // need Lambda((1,varpi)) != Omega(varpi)
    Scalar l1 = ctx.lambda_one_pi();
    if (ctx.lam.uval_symbolic) {
      r.testvector = DimTestVector::conditional;
      r.condition = "lam^-1 != " + std::string(ctx.omega_sign > 0 ? "1" : "-1");
      return r;
    }
    r.testvector = (l1 == Scalar(Rat(ctx.omega_sign))) ? DimTestVector::no
                                                       : DimTestVector::yes;
    return r;
  }
  r.testvector = DimTestVector::yes;
  return r;
}

// --------------------------------------------------------------- addresses

enum class WTag { none, w0, wplus, wminus };

struct CosetAddress {
  long l = 0;
  long m = 0;
  WTag wtag = WTag::none;
  SWord stag = SW_1;

  bool operator==(const CosetAddress& o) const {
    return l == o.l && m == o.m && wtag == o.wtag && stag == o.stag;
  }
};

inline void validate_address(const FieldData& fd, const CosetAddress& a) {
  if (a.m < 0) throw std::domain_error("address: m >= 0");
  if (a.wtag == WTag::none) {
    if (a.m == 0 && !in_W1(a.stag))
      throw std::domain_error("address: m = 0 needs stag in W^(1)");
    return;
  }
  if (a.m != 0) throw std::domain_error("address: w-frames need m = 0");
  if (!in_W1(a.stag))
    throw std::domain_error("address: w-frame tail must lie in W^(1)");
  if (a.wtag == WTag::w0 && fd.cs != CaseSym::ramified)
    throw std::domain_error("address: w0 frame is ramified-only");
  if ((a.wtag == WTag::wplus || a.wtag == WTag::wminus) &&
      fd.cs != CaseSym::split)
    throw std::domain_error("address: w+/w- frames are split-only");
}

inline std::string addr_str(const CosetAddress& a) {
  std::string s = "h(" + std::to_string(a.l) + "," + std::to_string(a.m) + ")";
  if (a.wtag == WTag::w0) s += "\xC2\xB7W" "w0" "\xC2\xB7s1";
  if (a.wtag == WTag::wplus) s += "\xC2\xB7W+\xC2\xB7s1";
  if (a.wtag == WTag::wminus) s += "\xC2\xB7W-\xC2\xB7s1";
  s += "\xC2\xB7";
  s += sword_name(a.stag);
  return s;
}

inline Rat wtag_value(const FieldData& fd, WTag t) {
  switch (t) {
    case WTag::w0: return Rat(fd.w0);
    case WTag::wplus: return fd.root_plus;
    case WTag::wminus: return fd.root_minus;
    default: throw std::domain_error("wtag_value: none");
  }
}

inline Mat4 frame_mat(const FieldData& fd, const CosetAddress& a) {
  validate_address(fd, a);
  Mat4 f = mat_h(fd, a.l, a.m);
  if (a.wtag != WTag::none)
    f = f * mat_Ww(fd, wtag_value(fd, a.wtag)) * mat_s1(fd);
  return f * sword_mat(fd, a.stag);
}

// All addresses of the coset decomposition in the given window.
inline std::vector<CosetAddress> addresses_in_window(const FieldData& fd,
                                                     long lmin, long lmax,
                                                     long mmax) {
  std::vector<CosetAddress> v;
  for (long l = lmin; l <= lmax; ++l) {
    for (long m = 0; m <= mmax; ++m) {
      for (int wi = 0; wi < 8; ++wi) {
        SWord w = static_cast<SWord>(wi);
        if (m == 0 && !in_W1(w)) continue;
        v.push_back({l, m, WTag::none, w});
      }
    }
    for (int wi = 0; wi < 8; ++wi) {
      SWord w = static_cast<SWord>(wi);
      if (!in_W1(w)) continue;
      if (fd.cs == CaseSym::ramified) v.push_back({l, 0, WTag::w0, w});
      if (fd.cs == CaseSym::split) {
        v.push_back({l, 0, WTag::wplus, w});
        v.push_back({l, 0, WTag::wminus, w});
      }
    }
  }
  return v;
}

// ------------------------------------------------------------- value table

// A_{l,m} = q^{-4(m-m0+1)} (-omega q^{-3})^l   (m0 >= 1),
//           q^{-4m}        (-omega q^{-3})^l   (m0 = 0).
inline Scalar table_A(const BesselCtx& ctx, long l, long m) {
  long q = ctx.fd.q, m0 = ctx.lam.m0;
  Rat base = (m0 >= 1) ? ppow(q, -4 * (m - m0 + 1)) : ppow(q, -4 * m);
  Rat r = Rat(ctx.omega_sign);  // -omega = Omega(varpi)
  Rat fac = 1;
  Rat step = r * ppow(q, -3);
  if (l >= 0)
    for (long i = 0; i < l; ++i) fac *= step;
  else
    for (long i = 0; i < -l; ++i) fac /= step;
  return Scalar(base * fac);
}

// The complete value table; normalization C_{m0} = 1 (and B(W+ s1) = 1 in
// the degenerate split branch where C_0 = 0).
inline Scalar b_table(const BesselCtx& ctx, const CosetAddress& a) {
  validate_address(ctx.fd, a);
  const FieldData& fd = ctx.fd;
  long m0 = ctx.lam.m0;
  long q = fd.q;
  Scalar om(ctx.omega());
  if (dim_and_testvector(ctx).dim == 0) return Scalar(0);

  auto A = [&](long l, long m) { return table_A(ctx, l, m); };

  if (a.wtag == WTag::none) {
    long l = a.l, m = a.m;
    bool low_m = (m <= m0 - 2);
    switch (a.stag) {
      case SW_1:
        if (l <= -1 || low_m) return Scalar(0);
        return A(l, m);
      case SW_s2:
        if (l <= -1 || low_m) return Scalar(0);
        return Scalar(Rat(-1, q)) * A(l, m);
      case SW_s2s1:
        if (l <= -1 || low_m) return Scalar(0);
        return Scalar(ppow(q, -2)) * A(l, m);
      case SW_s2s1s2:
        if (l <= -2 || low_m) return Scalar(0);
        if (l == -1) return om * A(0, m);
        return Scalar(-ppow(q, -3)) * A(l, m);
      default: break;
    }
    // s1-words: only valid for m > 0; values vanish below the conductor
    bool low_m1 = (m <= m0 - 1);
    switch (a.stag) {
      case SW_s1:
        if (l <= -1 || low_m1) return Scalar(0);
        return Scalar(Rat(-q)) * A(l, m);
      case SW_s1s2:
        if (l <= -2 || low_m1) return Scalar(0);
        if (l == -1) return -om * Scalar(ppow(q, 3)) * A(0, m);
        return A(l, m);
      case SW_s1s2s1:
        if (l <= -2 || low_m1) return Scalar(0);
        if (l == -1) return om * Scalar(ppow(q, 2)) * A(0, m);
        return Scalar(Rat(-1, q)) * A(l, m);
      case SW_s1s2s1s2:
        if (l <= -2 || low_m1) return Scalar(0);
        if (l == -1) return -om * Scalar(Rat(q)) * A(0, m);
        return Scalar(ppow(q, -2)) * A(l, m);
      default: throw std::logic_error("b_table: unreachable");
    }
  }

  // w-frames vanish identically once the conductor is positive
  if (m0 >= 1) return Scalar(0);
  long l = a.l;

  if (a.wtag == WTag::w0) {
    switch (a.stag) {
      case SW_1:
        if (l <= -1) return Scalar(0);
        return Scalar(Rat(-q)) * A(l, 0);
      case SW_s2:
        if (l <= -2) return Scalar(0);
        return A(l, 0);  // at l = -1 this equals -omega q^3
      case SW_s2s1:
        if (l <= -2) return Scalar(0);
        return om * Scalar(ppow(q, 2)) * A(l + 1, 0);
      case SW_s2s1s2:
        if (l <= -2) return Scalar(0);
        return -om * Scalar(Rat(q)) * A(l + 1, 0);
      default: throw std::logic_error("b_table: unreachable w0");
    }
  }

  // split frames
  Scalar lam1 = ctx.lambda_one_pi();
  bool degenerate =
      !ctx.lam.uval_symbolic && (om * lam1 == Scalar(Rat(-1)));
  Scalar base;
  if (!degenerate) {
    Scalar cfac = Scalar(Rat(q - 1)) / (Scalar(1) + om * lam1);
    switch (a.stag) {
      case SW_1:
        base = (l <= -1) ? Scalar(0) : -cfac * A(l, 0);
        break;
      case SW_s2:
        base = (l <= -1) ? Scalar(0) : cfac * Scalar(Rat(1, q)) * A(l, 0);
        break;
      case SW_s2s1:
        base = (l <= -2) ? Scalar(0) : om * Scalar(Rat(q)) * cfac * A(l + 1, 0);
        break;
      case SW_s2s1s2:
        base = (l <= -2) ? Scalar(0) : -om * cfac * A(l + 1, 0);
        break;
      default: throw std::logic_error("b_table: unreachable split");
    }
    // the W- frame carries the base values; W+ carries omega*lam1 times them
    if (a.wtag == WTag::wminus) return base;
    return om * lam1 * base;
  }
  // degenerate branch: C_0 = 0, anchored at B(W+ s1) = 1
  switch (a.stag) {
    case SW_1:
      base = (l <= -1) ? Scalar(0) : A(l, 0);
      break;
    case SW_s2:
      base = (l <= -1) ? Scalar(0) : Scalar(Rat(-1, q)) * A(l, 0);
      break;
    case SW_s2s1:
      base = (l <= -2) ? Scalar(0) : -om * Scalar(Rat(q)) * A(l + 1, 0);
      break;
    case SW_s2s1s2:
      base = (l <= -2) ? Scalar(0) : om * A(l + 1, 0);
      break;
    default: throw std::logic_error("b_table: unreachable split-deg");
  }
  if (a.wtag == WTag::wplus) return base;
  return -base;  // (omega lam1)^{-1} = -1 here
}

// Plain h(l,m)-rows of the table multiply C_{m0} = 1 except in the
// degenerate split branch, where C_0 = 0.
inline bool plain_rows_vanish(const BesselCtx& ctx) {
  if (dim_and_testvector(ctx).dim == 0) return true;
  if (ctx.fd.cs != CaseSym::split || ctx.lam.m0 != 0) return false;
  if (ctx.lam.uval_symbolic) return false;
  return Scalar(ctx.omega()) * ctx.lambda_one_pi() == Scalar(Rat(-1));
}

// ------------------------------------------------------------------ reduce

struct ReduceResult {
  CosetAddress addr;
  Scalar rvalue;  // (Lambda x theta)(r)
  Mat4 r, k;      // h = r * frame(addr) * k with k in I
  LElt t_zeta;
  Rat x11, x12, x22;  // the U-part of r
};

namespace detail {

inline Rat pair_J(const std::array<Rat, 4>& u, const std::array<Rat, 4>& v) {
  // <u, v> = u J v^T with J = [[0,I],[-I,0]]
  return u[0] * v[2] + u[1] * v[3] - u[2] * v[0] - u[3] * v[1];
}

// Saturated o-basis of the kernel of the bottom strip, followed by a
// symplectic completion; returns k in Sp4(o) with (h k) lower-left = 0.
inline Mat4 iwasawa_siegel_k(const Mat4& h) {
  const FieldData& fd = *h.fd;
  long p = fd.p;
  // kernel of the 2x4 bottom strip
  std::array<std::array<Rat, 4>, 2> V;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 4; ++j) V[i][j] = h.qentry(2 + i, j);
  // Gaussian elimination to echelon form over Q
  int pivcol[2] = {-1, -1};
  {
    int r = 0;
    for (int c = 0; c < 4 && r < 2; ++c) {
      int pr = -1;
      for (int i = r; i < 2; ++i)
        if (V[i][c] != 0) { pr = i; break; }
      if (pr < 0) continue;
      std::swap(V[r], V[pr]);
      Rat inv = Rat(1) / V[r][c];
      for (int j = 0; j < 4; ++j) V[r][j] *= inv;
      for (int i = 0; i < 2; ++i) {
        if (i == r || V[i][c] == 0) continue;
        Rat f = V[i][c];
        for (int j = 0; j < 4; ++j) V[i][j] -= f * V[r][j];
      }
      pivcol[r] = c;
      ++r;
    }
    if (r != 2) throw std::domain_error("iwasawa: bottom strip rank < 2");
  }
  std::array<std::array<Rat, 4>, 2> ker{};
  {
    int kcount = 0;
    for (int c = 0; c < 4; ++c) {
      if (c == pivcol[0] || c == pivcol[1]) continue;
      ker[kcount][c] = 1;
      for (int r = 0; r < 2; ++r) ker[kcount][pivcol[r]] = -V[r][c];
      ++kcount;
    }
  }
  // saturate at p
  auto scale_primitive = [&](std::array<Rat, 4>& row) {
    long mv = VAL_INF;
    for (auto& x : row) mv = std::min(mv, valp(x, p));
    Rat s = ppow(p, -mv);
    for (auto& x : row) x *= s;
  };
  scale_primitive(ker[0]);
  scale_primitive(ker[1]);
  for (int guard = 0; guard < 64; ++guard) {
    // rank mod p
    long a0 = -1, ratio = 0;
    bool dependent = true;
    std::array<long, 4> r0{}, r1{};
    for (int j = 0; j < 4; ++j) {
      r0[j] = mpz_get_si(mod_ppow(ker[0][j], p, 1).get_mpz_t());
      r1[j] = mpz_get_si(mod_ppow(ker[1][j], p, 1).get_mpz_t());
    }
    for (int j = 0; j < 4 && dependent; ++j) {
      if (r0[j] % p != 0) {
        if (a0 < 0) { a0 = j; ratio = lmod(r1[j] * inv_mod(r0[j], p), p); }
        else if (lmod(r1[j] - ratio * r0[j], p) != 0) dependent = false;
      } else if (r1[j] % p != 0) {
        dependent = false;  // r0 zero here but r1 not: independent unless...
        if (a0 < 0) {
          // r0 could be zero so far; swap roles
          std::swap(ker[0], ker[1]);
          dependent = true;
          ratio = 0;
          a0 = -1;
          j = -1;
          for (int t = 0; t < 4; ++t) {
            r0[t] = mpz_get_si(mod_ppow(ker[0][t], p, 1).get_mpz_t());
            r1[t] = mpz_get_si(mod_ppow(ker[1][t], p, 1).get_mpz_t());
          }
        }
      }
    }
    if (!dependent) break;
    for (int j = 0; j < 4; ++j) ker[1][j] -= Rat(ratio) * ker[0][j];
    scale_primitive(ker[1]);
  }
  if (pair_J(ker[0], ker[1]) != 0)
    throw std::logic_error("iwasawa: kernel plane not isotropic");
  // symplectic completion over o
  auto& w1 = ker[0];
  auto& w2 = ker[1];
  auto unit_vec = [&](int i) {
    std::array<Rat, 4> e{};
    e[i] = 1;
    return e;
  };
  auto axpy = [&](std::array<Rat, 4>& y, const Rat& c,
                  const std::array<Rat, 4>& x) {
    for (int j = 0; j < 4; ++j) y[j] += c * x[j];
  };
  std::array<Rat, 4> u1{};
  bool found = false;
  for (int i = 0; i < 4 && !found; ++i) {
    Rat pr = pair_J(w1, unit_vec(i));
    if (p_unit(pr, p)) {
      u1 = unit_vec(i);
      Rat inv = Rat(1) / pr;
      for (auto& x : u1) x *= inv;
      found = true;
    }
  }
  if (!found) throw std::logic_error("iwasawa: w1 not primitive");
  axpy(w2, -pair_J(w2, u1), w1);
  std::array<Rat, 4> u2{};
  found = false;
  for (int i = 0; i < 4 && !found; ++i) {
    Rat pr = pair_J(w2, unit_vec(i));
    if (p_unit(pr, p)) {
      u2 = unit_vec(i);
      Rat inv = Rat(1) / pr;
      for (auto& x : u2) x *= inv;
      found = true;
    }
  }
  if (!found) throw std::logic_error("iwasawa: w2 not primitive");
  axpy(u2, pair_J(u1, u2), w1);
  axpy(u2, -pair_J(w1, u2), u1);
  Mat4 k(fd);
  for (int i = 0; i < 4; ++i) {
    k.e[i][0] = LElt(w1[i]);
    k.e[i][1] = LElt(w2[i]);
    k.e[i][2] = LElt(u1[i]);
    k.e[i][3] = LElt(u2[i]);
  }
  if (!in_KH(k)) throw std::logic_error("iwasawa: completion left K^H");
  Mat4 P = h * k;
  for (int i = 2; i < 4; ++i)
    for (int j = 0; j < 2; ++j)
      if (!(P.e[i][j] == LElt()))
        throw std::logic_error("iwasawa: lower-left block not cleared");
  return k;
}

struct Gl2Reduction {
  LElt z;
  long m = 0;
  QMat2 kstar;
};

// A = mat(z) * diag(p^m, 1) * kstar with kstar in GL2(o); m is the
// conductor exponent of the multiplier order of the column lattice.
inline Gl2Reduction gl2_reduce(const FieldData& fd, const QMat2& A) {
  long p = fd.p;
  if (A.det() == 0) throw std::domain_error("gl2_reduce: singular");
  QMat2 alpha_m(fd.b / fd.c, Rat(1), -fd.a / fd.c, Rat(0));
  QMat2 X = A.inv() * alpha_m * A;
  long m = std::max(
      0L, -std::min({valp(X.e[0][1], p), valp(X.e[1][0], p),
                     valp(X.e[0][0] - X.e[1][1], p)}));
  Rat pm = ppow(p, m);
  for (long c1 = 0; c1 < p; ++c1)
    for (long c2 = 0; c2 < p; ++c2) {
      if (c1 == 0 && c2 == 0) continue;
      Rat v0 = A.e[0][0] * c1 + A.e[0][1] * c2;
      Rat v1 = A.e[1][0] * c1 + A.e[1][1] * c2;
      // z = v1 * 1 + v0 * alpha  (basis (e2, alpha e2) = ((0,1),(1,0)))
      LElt z = LElt(Rat(v1)) + fd.lmul(LElt(v0), fd.alpha);
      if (fd.lnorm(z) == 0) continue;
      QMat2 zm = t_mat2(fd, z);
      if (zm.det() == 0) continue;
      QMat2 ks = QMat2(Rat(1) / pm, Rat(0), Rat(0), Rat(1)) * zm.inv() * A;
      if (ks.in_gl2_o(p)) return {z, m, ks};
    }
  throw std::domain_error("gl2_reduce: no lattice generator found");
}

}  // namespace detail

// Complete reduction h = r * frame(addr) * k with r in R(F), k in I.
// Every step is verified by exact multiplication.
inline ReduceResult reduce(const BesselCtx& ctx, const Mat4& h) {
  const FieldData& fd = ctx.fd;
  long p = fd.p;
  auto mu = similitude_H(h);
  if (!mu) throw std::domain_error("reduce: not in H(F)");

  Mat4 kiw = detail::iwasawa_siegel_k(h);
  Mat4 P = h * kiw;
  Mat4 k0 = inverse_sim(kiw);

  QMat2 A(P.qentry(0, 0), P.qentry(0, 1), P.qentry(1, 0), P.qentry(1, 1));
  auto g2 = detail::gl2_reduce(fd, A);
  long m = g2.m;
  // l is pinned by v(det A) = v(N(z)) + m together with
  // v(mu) = v(N(zeta)) + 2m + l for the normalized zeta.
  long l = valp(A.det(), p) - valp(*mu, p) - m;
  LElt zprime = g2.z;
  {
    Rat s = ppow(p, -(m + l));
    zprime = LElt(zprime.x * s, zprime.y * s);
  }
  // U-part of P: X = Z A^T / lambda
  Rat lam = *mu;
  QMat2 Zb(P.qentry(0, 2), P.qentry(0, 3), P.qentry(1, 2), P.qentry(1, 3));
  QMat2 Xb = Zb * A.transpose();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) Xb.e[i][j] /= lam;
  if (Xb.e[0][1] != Xb.e[1][0])
    throw std::logic_error("reduce: U-part not symmetric");

  Mat4 r = mat_UX(fd, Xb.e[0][0], Xb.e[0][1], Xb.e[1][1]) * t_embed(fd, zprime);
  Mat4 hm = mat_h(fd, l, m);
  // kk := (r * h(l,m))^{-1} h, must land in K^H
  Mat4 kk = inverse_sim(hm) * inverse_sim(r) * h;
  if (!in_KH(kk)) throw std::logic_error("reduce: Levi remainder not in K^H");

  CosetAddress addr;
  Mat4 frame_tail = Mat4::ident(fd);  // part after h(l,m)
  for (int guard = 0;; ++guard) {
    if (guard > 3) throw std::logic_error("reduce: collapse loop diverged");
    CellHit hit = bruhat_cell(kk);
    bool s1type = !in_W1(hit.word);
    Rat x = Rat(s1type ? hit.params[0] : 0);
    Mat4 Wx = mat_Ww(fd, x);
    Mat4 UY = inverse_sim(Wx) * hit.u;
    // absorb h(l,m) Wx U(Y) = U~ h(l,m) Wx
    Mat4 Utilde = hm * Wx * UY * inverse_sim(Wx) * inverse_sim(hm);
    r = r * Utilde;
    if (!s1type) {
      addr = {l, m, WTag::none, hit.word};
      frame_tail = sword_mat(fd, hit.word);
      break;
    }
    SWord sig = strip_s1(hit.word);
    long xr = hit.params[0];
    auto special = special_w_residues(fd);
    bool is_special =
        (m == 0) && std::count(special.begin(), special.end(), xr) > 0;
    if (is_special) {
      WTag tag;
      if (fd.cs == CaseSym::ramified) tag = WTag::w0;
      else {
        long rp = mpz_get_si(mod_ppow(fd.root_plus, p, 1).get_mpz_t());
        tag = (xr == rp) ? WTag::wplus : WTag::wminus;
      }
      addr = {l, 0, tag, sig};
      frame_tail =
          mat_Ww(fd, wtag_value(fd, tag)) * mat_s1(fd) * sword_mat(fd, sig);
      break;
    }
    if (xr == 0 && m > 0) {
      addr = {l, m, WTag::none, hit.word};
      frame_tail = sword_mat(fd, hit.word);
      break;
    }
    // collapse: beta_x^m is a unit here
    auto cw = collapse_witness(fd, l, m, x);
    if (!in_I(cw.k)) throw std::logic_error("reduce: collapse witness not in I");
    r = r * cw.r;
    kk = inverse_sim(cw.k) * sword_mat(fd, sig) * hit.k1;
    if (!in_KH(kk)) throw std::logic_error("reduce: collapse remainder");
  }

  ReduceResult res;
  res.addr = addr;
  // split r = U(X) t(zeta)
  QMat2 g(r.qentry(0, 0), r.qentry(0, 1), r.qentry(1, 0), r.qentry(1, 1));
  auto zeta = t_unembed(fd, g);
  if (!zeta) throw std::logic_error("reduce: r not over the T-line");
  res.t_zeta = *zeta;
  QMat2 ghat(r.qentry(2, 2), r.qentry(2, 3), r.qentry(3, 2), r.qentry(3, 3));
  QMat2 UR(r.qentry(0, 2), r.qentry(0, 3), r.qentry(1, 2), r.qentry(1, 3));
  QMat2 Xu = UR * ghat.inv();
  if (Xu.e[0][1] != Xu.e[1][0])
    throw std::logic_error("reduce: final U-part not symmetric");
  res.x11 = Xu.e[0][0];
  res.x12 = Xu.e[0][1];
  res.x22 = Xu.e[1][1];
  if (!(mat_UX(fd, res.x11, res.x12, res.x22) * t_embed(fd, *zeta) == r))
    throw std::logic_error("reduce: r does not factor as U t");
  res.r = r;

  Mat4 frame = mat_h(fd, addr.l, addr.m) * frame_tail;
  res.k = inverse_sim(frame) * inverse_sim(r) * h;
  if (!in_I(res.k)) throw std::logic_error("reduce: witness not in I");
  if (!(r * frame * res.k == h))
    throw std::logic_error("reduce: witness product mismatch");

  res.rvalue = lambda_eval(ctx, *zeta) *
               theta_eval(fd, res.x11, res.x12, res.x22);
  return res;
}

inline Scalar b_eval(const BesselCtx& ctx, const Mat4& h) {
  ReduceResult rr = reduce(ctx, h);
  return rr.rvalue * b_table(ctx, rr.addr);
}

}  // namespace gsp4
