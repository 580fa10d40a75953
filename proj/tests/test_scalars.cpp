#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "gsp4/scalar.hpp"
#include "gsp4/sio.hpp"

using namespace gsp4;

TEST_CASE("roots of unity: basic identities") {
  CHECK(Cyclo::root(UnitRootExp(0, 1)) == Cyclo(Rat(1)));
  CHECK(Cyclo::root(UnitRootExp(1, 2)) == Cyclo(Rat(-1)));
  Cyclo i4 = Cyclo::root(UnitRootExp(1, 4));
  CHECK(i4 * i4 == Cyclo(Rat(-1)));
  // multiplicativity: z(e1) z(e2) = z(e1+e2)
  Cyclo z35 = Cyclo::root(UnitRootExp(3, 5));
  Cyclo z45 = Cyclo::root(UnitRootExp(4, 5));
  CHECK(z35 * z45 == Cyclo::root(UnitRootExp(7, 5)));
  // sum of all p-th roots of unity vanishes
  for (long p : {2L, 3L, 5L, 7L}) {
    Cyclo s;
    for (long k = 0; k < p; ++k) s += Cyclo::root(UnitRootExp(k, p));
    CHECK(s.is_zero());
  }
  // and the same at prime powers
  Cyclo s;
  for (long k = 0; k < 9; ++k) s += Cyclo::root(UnitRootExp(k, 9));
  CHECK(s.is_zero());
}

TEST_CASE("conjugation on roots") {
  Cyclo i4 = Cyclo::root(UnitRootExp(1, 4));
  CHECK(i4.conj() == Cyclo::root(UnitRootExp(3, 4)));
  std::mt19937_64 rng(7);
  for (int t = 0; t < 40; ++t) {
    Cyclo z;
    for (int j = 0; j < 3; ++j) {
      long d = 1 + static_cast<long>(rng() % 12);
      long n = static_cast<long>(rng() % d);
      z += Cyclo(Rat(static_cast<long>(rng() % 7) - 3)) *
           Cyclo::root(UnitRootExp(n, d));
    }
    CHECK(z.conj().conj() == z);
    Cyclo w = Cyclo::root(UnitRootExp(1, 3)) - Cyclo(Rat(2));
    CHECK((z * w).conj() == z.conj() * w.conj());
  }
}

TEST_CASE("cyclotomic inversion") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 25; ++t) {
    Cyclo z;
    for (int j = 0; j < 2; ++j) {
      long d = 1 + static_cast<long>(rng() % 8);
      long n = static_cast<long>(rng() % d);
      z += Cyclo(Rat(static_cast<long>(rng() % 5) - 2)) *
           Cyclo::root(UnitRootExp(n, d));
    }
    if (z.is_zero()) continue;
    CHECK(z * z.inverse() == Cyclo(Rat(1)));
  }
  // 1 + zeta_3 = -zeta_3^2 is a unit
  Cyclo u = Cyclo(Rat(1)) + Cyclo::root(UnitRootExp(1, 3));
  CHECK(u * u.inverse() == Cyclo(Rat(1)));
}

TEST_CASE("sqrt(q) relation and conj") {
  Kelt s5 = Kelt::sqrtq(5);
  CHECK(s5 * s5 == Kelt(Rat(5)));
  CHECK((s5 * s5.inverse()) == Kelt(Rat(1)));
  Kelt z = Kelt::root(UnitRootExp(1, 4));
  CHECK(z.conj() == Kelt::root(UnitRootExp(3, 4)));
  Kelt mix = z + s5;
  CHECK(mix.conj() == z.conj() + s5);
  CHECK(mix * mix.inverse() == Kelt(Rat(1)));
  // q^(e/2) bookkeeping
  CHECK(Kelt::qhalfpow(5, 2) == Kelt(Rat(5)));
  CHECK(Kelt::qhalfpow(5, -1) == Kelt(Rat(1, 5)) * Kelt::sqrtq(5));
  CHECK(Kelt::qhalfpow(5, 3) == Kelt(Rat(5)) * Kelt::sqrtq(5));
}

TEST_CASE("polynomial exact division: (atau^2-btau^2)/(atau-btau)") {
  Poly at = Poly::var(V_atau), bt = Poly::var(V_btau);
  Poly n = at * at - bt * bt, d = at - bt;
  auto quo = n.divided_by(d);
  REQUIRE(quo.has_value());
  CHECK(*quo == at + bt);
  Scalar s = Scalar(n, d);
  CHECK(s == Scalar(at + bt));
}

TEST_CASE("scalar field axioms on random tower elements") {
  std::mt19937_64 rng(23);
  auto rnd_scalar = [&]() {
    Poly p;
    for (int j = 0; j < 3; ++j) {
      Expv e = expv_zero();
      e[rng() % 4] = static_cast<int>(rng() % 3);
      Kelt c = Kelt(Rat(static_cast<long>(rng() % 9) - 4)) *
               Kelt::root(UnitRootExp(static_cast<long>(rng() % 4), 4));
      if (rng() % 3 == 0) c *= Kelt::sqrtq(3);
      p += Poly::term(c, e);
    }
    return Scalar(p);
  };
  for (int t = 0; t < 30; ++t) {
    Scalar a = rnd_scalar(), b = rnd_scalar(), c = rnd_scalar();
    CHECK((a + b) + c == a + (b + c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK((a * b) * c == a * (b * c));
    if (!b.is_zero()) CHECK(a / b * b == a);
    CHECK(a.equals_cross(a));
  }
}

TEST_CASE("rational function equality via cross multiplication") {
  Scalar x = Scalar::var(V_X);
  Scalar at = Scalar::var(V_atau);
  Scalar f = (Scalar(1) - x * x) / (Scalar(1) - x);
  CHECK(f == Scalar(1) + x);
  Scalar g = (at * at - Scalar(1)) / (at - Scalar(1));
  CHECK(g.equals_cross(at + Scalar(1)));
}

TEST_CASE("geometric closed form") {
  Scalar r = Scalar::var(V_atau);
  Scalar f = Scalar::geometric_closed_form(Scalar(1), r, 3);
  CHECK(f == Scalar(1) / (Scalar(1) - r * Scalar::var(V_X, 3)));

  // truncation: 8 terms agree with the closed form through degree 21
  auto coef = f.series_in_x(21);
  for (int n = 0; n <= 21; ++n) {
    Scalar expect = (n % 3 == 0) ? r.pow(n / 3) : Scalar(0);
    CHECK(coef[n] == expect);
  }
}

TEST_CASE("series of products") {
  // 1/((1-aX)(1-bX)) has coefficients sum_{i+j=n} a^i b^j
  Scalar a = Scalar::var(V_atau), b = Scalar::var(V_btau);
  Scalar x = Scalar::var(V_X);
  Scalar f = Scalar(1) / ((Scalar(1) - a * x) * (Scalar(1) - b * x));
  auto c = f.series_in_x(5);
  for (int n = 0; n <= 5; ++n) {
    Scalar s(0);
    for (int i = 0; i <= n; ++i) s += a.pow(i) * b.pow(n - i);
    CHECK(c[n] == s);
  }
}

TEST_CASE("canonical serialization round trips") {
  std::mt19937_64 rng(37);
  auto rnd_scalar = [&]() {
    Poly p, q;
    for (int j = 0; j < 3; ++j) {
      Expv e = expv_zero();
      e[rng() % NVARS] = static_cast<int>(rng() % 3);
      Kelt c = Kelt(Rat(static_cast<long>(rng() % 9) - 4)) *
               Kelt::root(UnitRootExp(static_cast<long>(rng() % 8), 8));
      if (rng() % 3 == 0) c *= Kelt::sqrtq(5);
      p += Poly::term(c, e);
      Expv e2 = expv_zero();
      e2[rng() % NVARS] = static_cast<int>(rng() % 2);
      q += Poly::term(Kelt(Rat(static_cast<long>(rng() % 5) + 1)), e2);
    }
    if (q.is_zero()) q = Poly(Kelt(Rat(1)));
    return Scalar(p, q);
  };
  for (int t = 0; t < 60; ++t) {
    Scalar s = rnd_scalar();
    std::string txt = scalar_str(s);
    Scalar back = scalar_parse(txt);
    CHECK(back == s);
    CHECK(scalar_str(back) == txt);
  }
  // a few fixed forms
  for (const char* txt :
       {"0", "1", "-3/2", "1*z[1/4]", "(1 + (1)*rq5)*lam^2*X", "lam",
        "(lam^2 + -1)/(lam + 2)", "atau*btau*X^3 + omg"}) {
    Scalar s = scalar_parse(txt);
    CHECK(scalar_parse(scalar_str(s)) == s);
  }
}

TEST_CASE("substitution of numeric parameter values") {
  Scalar at = Scalar::var(V_atau);
  Scalar f = (at * at - Scalar(1)) / (at - Scalar(1));
  std::map<int, Kelt> v{{V_atau, Kelt(Rat(7))}};
  CHECK(f.substituted(v) == Scalar(Rat(8)));
}
