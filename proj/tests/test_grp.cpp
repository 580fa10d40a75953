#include <catch2/catch_amalgamated.hpp>

#include "gsp4/grp.hpp"
#include "testutil.hpp"

using namespace gsp4;
using gsp4::testutil::random_I;
using gsp4::testutil::random_KH;
using gsp4::testutil::random_Lx;

static FieldData fi() { return build_field_data(3, 1, 0, 1); }
static FieldData fr() { return build_field_data(5, 5, 0, 1); }
static FieldData fs() { return build_field_data(5, 0, 1, 1); }
static FieldData f2() { return build_field_data(2, -1, 1, 1); }

TEST_CASE("similitude values") {
  FieldData f = fi();
  CHECK(similitude_H(mat_J(f)) == Rat(1));
  for (long l = -2; l <= 3; ++l)
    for (long m = 0; m <= 3; ++m)
      CHECK(similitude_H(mat_h(f, l, m)) == ppow(f.p, 2 * m + l));
  CHECK(similitude_H(mat_eta0(f)) == Rat(-3));

  // t_embed: similitude = det = norm of zeta
  std::mt19937_64 rng(3);
  for (const FieldData& fd : {fi(), fr(), fs()}) {
    for (int t = 0; t < 20; ++t) {
      LElt z = random_Lx(rng, fd);
      Mat4 te = t_embed(fd, z);
      CHECK(similitude_H(te) == fd.lnorm(z));
    }
  }
}

TEST_CASE("subgroup membership") {
  FieldData f = fi();
  CHECK(in_I(Mat4::ident(f)));
  CHECK_FALSE(in_I(mat_s1(f)));
  CHECK_FALSE(in_KH(mat_eta0(f)));  // similitude p is not a unit
  CHECK(in_KH(mat_s1(f)));
  CHECK(in_KH(mat_s2(f)));
  CHECK(in_I(mat_Ww(f, Rat(2))));

  // eta lies in K^G when alpha is integral, and Gamma(P^n) detects congruence
  CHECK(in_KG(mat_eta(f)));
  CHECK_FALSE(in_GammaPn(mat_eta(f), 1));
  CHECK(in_GammaPn(mat_eta_m(f, 2), 2));
  CHECK_FALSE(in_GammaPn(mat_eta_m(f, 1), 2));
}

TEST_CASE("named constructors") {
  FieldData f = fs();
  CHECK(mat_h(f, 0, 0) == Mat4::ident(f));
  // T-embedding block form: upper-left [[x+by/2, cy],[-ay, x-by/2]]
  LElt zeta(Rat(3), Rat(1));  // 3 + sqrt(d), i.e. x=3, y-coord 1 -> param y=2
  Mat4 te = t_embed(f, zeta);
  CHECK(te.qentry(0, 0) == Rat(3) + f.b);
  CHECK(te.qentry(0, 1) == 2 * f.c);
  CHECK(te.qentry(1, 0) == -2 * f.a);
  CHECK(te.qentry(1, 1) == Rat(3) - f.b);
  // unembed round trip
  auto z2 = t_unembed(f, t_mat2(f, zeta));
  REQUIRE(z2.has_value());
  CHECK(*z2 == zeta);
}

TEST_CASE("T embedding is multiplicative") {
  std::mt19937_64 rng(17);
  for (const FieldData& fd : {fi(), fr(), fs(), f2()}) {
    for (int t = 0; t < 25; ++t) {
      LElt a = random_Lx(rng, fd), b = random_Lx(rng, fd);
      CHECK(t_embed(fd, a) * t_embed(fd, b) == t_embed(fd, fd.lmul(a, b)));
    }
  }
}

TEST_CASE("matrix identity suite passes for p in {2,3,5}") {
  for (const FieldData& fd : {f2(), fi(), fr(), fs()}) {
    Report rep = matrix_identity_suite(fd, -2, 3, 3);
    size_t fails = count_fail(rep);
    if (fails) {
      for (auto& r : rep)
        if (r.status == "fail")
          WARN(r.check << " " << r.params << "\n lhs=" << r.lhs
                       << "\n rhs=" << r.rhs);
    }
    CHECK(fails == 0);
    CHECK(rep.size() > 100);
  }
}

TEST_CASE("Bruhat cells partition K^H") {
  std::mt19937_64 rng(29);
  for (const FieldData& fd : {fi(), fs(), f2()}) {
    for (int t = 0; t < 40; ++t) {
      Mat4 k = random_KH(rng, fd);
      CellHit hit = bruhat_cell(k);
      // witness is exact: k = u * word * k1 with k1 in I
      CHECK(hit.u * sword_mat(fd, hit.word) * hit.k1 == k);
      CHECK(in_I(hit.k1));
      // membership in exactly one cell: count all (word, params) matches
      int matches = 0;
      detail::M4p kbar = detail::reduce_mod_p(k, fd.p);
      for (int wi = 0; wi < 8; ++wi) {
        SWord w = static_cast<SWord>(wi);
        long total = 1;
        for (int i = 0; i < cell_nparams(w); ++i) total *= fd.p;
        for (long code = 0; code < total; ++code) {
          std::array<long, 4> pr{0, 0, 0, 0};
          long c = code;
          for (int i = 0; i < cell_nparams(w); ++i) { pr[i] = c % fd.p; c /= fd.p; }
          Mat4 us = cell_unipotent(fd, w, pr) * sword_mat(fd, w);
          detail::M4p usbar = detail::reduce_mod_p(us, fd.p);
          detail::M4p usinv;
          if (!detail::invp(usbar, usinv, fd.p)) continue;
          if (detail::iwahori_pattern_p(detail::mulp(usinv, kbar, fd.p)))
            ++matches;
        }
      }
      CHECK(matches == 1);
    }
  }
}

TEST_CASE("random I elements stay in I and are classified trivially") {
  std::mt19937_64 rng(31);
  for (const FieldData& fd : {fi(), fr(), fs()}) {
    for (int t = 0; t < 30; ++t) {
      Mat4 k = random_I(rng, fd);
      CHECK(in_I(k));
      CellHit hit = bruhat_cell(k);
      CHECK(hit.word == SW_1);
    }
  }
}

TEST_CASE("inverse via similitude") {
  std::mt19937_64 rng(37);
  for (const FieldData& fd : {fi(), fs()}) {
    for (int t = 0; t < 20; ++t) {
      Mat4 k = random_KH(rng, fd);
      CHECK(inverse_sim(k) * k == Mat4::ident(fd));
      CHECK(k * inverse_sim(k) == Mat4::ident(fd));
    }
  }
}
