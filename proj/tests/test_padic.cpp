#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "gsp4/padic.hpp"

using namespace gsp4;

TEST_CASE("fval basics") {
  CHECK(fval(Rat(50), 5) == 2);
  CHECK(fval(Rat(-4), 3) == 0);
  CHECK(fval(Rat(0), 7) == VAL_INF);
  CHECK(fval(Rat(3, 25), 5) == -2);
}

TEST_CASE("build_field_data: the three cases") {
  // inert: p=3, (a,b,c)=(1,0,1), d=-4, nonsquare unit mod 3
  FieldData fi = build_field_data(3, 1, 0, 1);
  CHECK(fi.cs == CaseSym::inert);
  // alpha = sqrt(-4)/2, alpha^2 = -1
  LElt a2 = fi.lmul(fi.alpha, fi.alpha);
  CHECK(a2 == LElt(Rat(-1)));

  // ramified: p=5, (5,0,1), d=-20, v_5=1, w0 = -b/(2c) = 0
  FieldData fr = build_field_data(5, 5, 0, 1);
  CHECK(fr.cs == CaseSym::ramified);
  CHECK(fr.w0 == 0);

  // split: p=5, (0,1,1), d=1, roots 0 and -1
  FieldData fs = build_field_data(5, 0, 1, 1);
  CHECK(fs.cs == CaseSym::split);
  CHECK(fs.root_plus == Rat(0));
  CHECK(fs.root_minus == Rat(-1));
  auto pr = fs.split_pair(fs.alpha);
  CHECK(pr.first == Rat(1));
  CHECK(pr.second == Rat(0));

  // p=2 inert via d=5: (a,b,c) = (-1,1,1)
  FieldData f2 = build_field_data(2, -1, 1, 1);
  CHECK(f2.cs == CaseSym::inert);
  CHECK(f2.d == Rat(5));

  // assumption violations
  CHECK_THROWS_AS(build_field_data(5, 1, 0, 5), AssumptionError);   // c not unit
  CHECK_THROWS_AS(build_field_data(5, 25, 0, 1), AssumptionError);  // v(d)=2
  CHECK_THROWS_AS(build_field_data(2, 1, 2, 1), AssumptionError);   // p=2 v(d)=0 d=0 mod 8? b^2-4ac = 0 -> d=0
  CHECK_THROWS_AS(build_field_data(3, -3, 1, 1), AssumptionError);  // d=13 is a square in Q_3, not in Q
}

TEST_CASE("norm, trace, conjugation") {
  FieldData fs = build_field_data(5, 0, 1, 1);
  // split z = (2,3)
  LElt z = fs.from_split_pair(Rat(2), Rat(3));
  CHECK(fs.lnorm(z) == Rat(6));
  CHECK(fs.ltrace(z) == Rat(5));
  auto cj = fs.split_pair(fs.lconj(z));
  CHECK(cj.first == Rat(3));
  CHECK(cj.second == Rat(2));

  FieldData fi = build_field_data(3, 1, 0, 1);
  CHECK(fi.lnorm(fi.alpha) == Rat(1));
  CHECK(fi.ltrace(fi.alpha) == Rat(0));

  // z in F: N = z^2, tr = 2z
  LElt w(Rat(7));
  CHECK(fi.lnorm(w) == Rat(49));
  CHECK(fi.ltrace(w) == Rat(14));

  std::mt19937_64 rng(5);
  for (const FieldData& fd : {fi, fs}) {
    for (int t = 0; t < 50; ++t) {
      LElt u(Rat(static_cast<long>(rng() % 19) - 9),
             Rat(static_cast<long>(rng() % 19) - 9));
      LElt v(Rat(static_cast<long>(rng() % 19) - 9),
             Rat(static_cast<long>(rng() % 19) - 9));
      CHECK(fd.lnorm(fd.lmul(u, v)) == fd.lnorm(u) * fd.lnorm(v));
      CHECK(fd.ltrace(fd.lconj(u)) == fd.ltrace(u));
      CHECK(fd.lmul(u, fd.lconj(u)) == LElt(fd.lnorm(u)));
    }
  }
}

TEST_CASE("integral basis membership and no alpha + x in P") {
  FieldData fi = build_field_data(3, 1, 0, 1);
  FieldData fr = build_field_data(5, 5, 0, 1);
  FieldData fs = build_field_data(5, 0, 1, 1);

  CHECK(l_class(fi, LElt(Rat(1)), 1).in_ounits_plus_Pn);
  // inert: alpha + 1 is a unit, not in o^x + P
  auto f = l_class(fi, fi.alpha + LElt(Rat(1)), 1);
  CHECK(f.in_oLunits);
  CHECK_FALSE(f.in_ounits_plus_Pn);
  // ramified: alpha is integral, not a unit
  auto g = l_class(fr, fr.alpha, 1);
  CHECK(g.in_oL);
  CHECK_FALSE(g.in_oLunits);

  // Lemma: alpha + x avoids P for all residues; unit except at the special w
  for (const FieldData& fd : {fi, fr, fs}) {
    auto special = special_w_residues(fd);
    for (long x = 0; x < fd.p; ++x) {
      CHECK_FALSE(fd.in_Pn(fd.alpha + LElt(Rat(x)), 1));
      bool is_special = false;
      for (long s : special) is_special |= (s == x);
      CHECK(fd.in_oL_units(fd.alpha + LElt(Rat(x))) == !is_special);
      if (fd.cs == CaseSym::ramified && x == fd.w0)
        CHECK(valp(fd.lnorm(fd.alpha + LElt(Rat(x))), fd.p) == 1);
    }
  }
}

TEST_CASE("beta_wm unit criterion") {
  FieldData fi = build_field_data(3, 1, 0, 1);
  FieldData fr = build_field_data(5, 5, 0, 1);
  FieldData fs = build_field_data(5, 0, 1, 1);

  // split m=0: nonunit exactly at w = 0, 4 mod 5
  for (long w = 0; w < 5; ++w) {
    auto [v, u] = beta_wm(fs, Rat(w), 0);
    CHECK(u == (w != 0 && w != 4));
  }
  // inert m=0: always unit
  for (long w = 0; w < 3; ++w) CHECK(beta_wm(fi, Rat(w), 0).second);
  // ramified m=0: nonunit only at w0
  for (long w = 0; w < 5; ++w)
    CHECK(beta_wm(fr, Rat(w), 0).second == (w != fr.w0));
  // m>0: unit iff w a unit
  for (const FieldData& fd : {fi, fr, fs}) {
    for (long m : {1L, 2L}) {
      for (long w = 0; w < fd.p; ++w)
        CHECK(beta_wm(fd, Rat(w), m).second == (w % fd.p != 0));
    }
  }
  // m=1, w=0: value a*p^2, not a unit
  auto [v10, u10] = beta_wm(fi, Rat(0), 1);
  CHECK(v10 == Rat(9));
  CHECK_FALSE(u10);

  // identity beta_w^m = c * N(alpha p^m + w)
  for (const FieldData& fd : {fi, fr, fs}) {
    for (long m : {0L, 1L, 2L}) {
      for (long w = 0; w < fd.p; ++w) {
        Rat pm = ppow(fd.p, m);
        LElt z = LElt(fd.alpha.x * pm, fd.alpha.y * pm) + LElt(Rat(w));
        CHECK(beta_wm(fd, Rat(w), m).first == fd.c * fd.lnorm(z));
      }
    }
  }
}

TEST_CASE("unit coset representatives") {
  FieldData fi = build_field_data(3, 1, 0, 1);
  FieldData fr = build_field_data(5, 5, 0, 1);
  FieldData fs = build_field_data(5, 0, 1, 1);

  CHECK(unit_coset_reps(fi, 1).size() == 4);  // q + 1
  CHECK(unit_coset_reps(fr, 1).size() == 5);  // q
  CHECK(unit_coset_reps(fs, 1).size() == 4);  // q - 1
  for (const FieldData& fd : {fi, fr, fs})
    CHECK(unit_coset_reps(fd, 2).size() == static_cast<size_t>(fd.p));

  // representatives are units and pairwise inequivalent mod o^x + P^m
  for (const FieldData& fd : {fi, fr, fs}) {
    for (long m : {1L, 2L}) {
      auto reps = unit_coset_reps(fd, m);
      for (auto& z : reps) CHECK(fd.in_oL_units(z));
      for (size_t i = 0; i < reps.size(); ++i)
        for (size_t j = i + 1; j < reps.size(); ++j) {
          LElt ratio = fd.lmul(reps[i], fd.linv(reps[j]));
          CHECK_FALSE(fd.in_ounits_plus_Pn(ratio, m));
        }
      // and they do lie in (o^x + P^(m-1))
      for (auto& z : reps) CHECK(fd.in_ounits_plus_Pn(z, m - 1));
    }
  }
}
