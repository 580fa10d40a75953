#pragma once

#include <sstream>
#include <string>

#include "gsp4/scalar.hpp"

namespace gsp4 {

// Canonical text form. Grammar (round-trips bit-exactly):
//   scalar   := poly | "(" poly ")/(" poly ")"
//   poly     := "0" | term (" + " term)*          (graded-lex descending)
//   term     := coef ("*" mono)? | mono           (mono alone when coef = 1)
//   coef     := cycterm | "(" kelt ")"            (parens when composite)
//   kelt     := cyclo | cyclo " + (" cyclo ")*rq" <q> | "(" cyclo ")*rq" <q>
//   cyclo    := cycterm (" + " cycterm)*
//   cycterm  := rat | rat "*z[" n "/" d "]"
//   mono     := name("^" e)? ("*" name("^" e)?)*

inline std::string cyclo_str(const Cyclo& c) {
  if (c.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto& [e, r] : c.terms()) {
    if (!first) os << " + ";
    first = false;
    os << r.get_str();
    if (!(e == UnitRootExp())) os << "*z[" << e.n << "/" << e.d << "]";
  }
  return os.str();
}

inline std::string kelt_str(const Kelt& k) {
  if (k.b().is_zero()) return cyclo_str(k.a());
  std::ostringstream os;
  if (!k.a().is_zero()) os << cyclo_str(k.a()) << " + ";
  os << "(" << cyclo_str(k.b()) << ")*rq" << k.qbase();
  return os.str();
}

namespace detail {
inline bool kelt_composite(const Kelt& k) {
  return !k.b().is_zero() || k.a().terms().size() > 1 ||
         (k.a().terms().size() == 1 &&
          !(k.a().terms().begin()->first == UnitRootExp()) );
}
}  // namespace detail

inline std::string poly_str(const Poly& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    if (!first) os << " + ";
    first = false;
    const Expv& e = it->first;
    const Kelt& c = it->second;
    bool has_mono = expv_total(e) > 0;
    bool unit_coef = (c == Kelt(Rat(1)));
    if (!has_mono || !unit_coef) {
      if (detail::kelt_composite(c) && has_mono)
        os << "(" << kelt_str(c) << ")";
      else
        os << kelt_str(c);
      if (has_mono) os << "*";
    }
    if (has_mono) {
      bool fv = true;
      for (int v = 0; v < NVARS; ++v) {
        if (e[v] == 0) continue;
        if (!fv) os << "*";
        fv = false;
        os << var_name(v);
        if (e[v] != 1) os << "^" << e[v];
      }
    }
  }
  return os.str();
}

inline std::string scalar_str(const Scalar& s) {
  if (s.den() == Poly(Kelt(Rat(1)))) return poly_str(s.num());
  return "(" + poly_str(s.num()) + ")/(" + poly_str(s.den()) + ")";
}

// ---------------------------------------------------------------- parsing

class ScalarParser {
 public:
  explicit ScalarParser(const std::string& s) : s_(s) {}

  Scalar parse_scalar() {
    skip_ws();
    if (peek() == '(') {
      size_t save = i_;
      ++i_;
      try {
        Poly n = parse_poly();
        if (match(")/(")) {
          Poly d = parse_poly();
          expect(')');
          end();
          return Scalar(n, d);
        }
      } catch (const std::runtime_error&) {
        // fall through: parenthesized coefficient at top level
      }
      i_ = save;
    }
    Poly p = parse_poly();
    end();
    return Scalar(p);
  }

 private:
  char peek() const { return i_ < s_.size() ? s_[i_] : '\0'; }
  void skip_ws() { while (i_ < s_.size() && s_[i_] == ' ') ++i_; }
  bool match(const std::string& t) {
    if (s_.compare(i_, t.size(), t) == 0) { i_ += t.size(); return true; }
    return false;
  }
  void expect(char c) {
    if (peek() != c) throw std::runtime_error("parse: expected '" + std::string(1, c) + "' at " + std::to_string(i_) + " in " + s_);
    ++i_;
  }
  void end() {
    skip_ws();
    if (i_ != s_.size()) throw std::runtime_error("parse: trailing input in " + s_);
  }

  long parse_long() {
    size_t j = i_;
    if (peek() == '-') ++i_;
    while (isdigit(peek())) ++i_;
    if (i_ == j) throw std::runtime_error("parse: number expected in " + s_);
    return std::stol(s_.substr(j, i_ - j));
  }

  Rat parse_rat() {
    size_t j = i_;
    if (peek() == '-') ++i_;
    if (!isdigit(peek()))
      throw std::runtime_error("parse: number expected in " + s_);
    while (isdigit(peek())) ++i_;
    if (peek() == '/') {
      // only a rational if digits follow
      size_t k = i_ + 1;
      if (k < s_.size() && isdigit(s_[k])) {
        ++i_;
        while (isdigit(peek())) ++i_;
      }
    }
    Rat r(s_.substr(j, i_ - j));
    r.canonicalize();
    return r;
  }

  // One rational, optionally * z[n/d]
  Cyclo parse_cycterm() {
    Rat r = parse_rat();
    if (match("*z[")) {
      long n = parse_long();
      expect('/');
      long d = parse_long();
      expect(']');
      return Cyclo(r) * Cyclo::root(UnitRootExp(n, d));
    }
    return Cyclo(r);
  }

  bool at_cycterm_start() const {
    return isdigit(peek()) || peek() == '-';
  }

  Cyclo parse_cyclo() {
    Cyclo c = parse_cycterm();
    while (true) {
      size_t save = i_;
      if (!match(" + ")) break;
      if (!at_cycterm_start()) { i_ = save; break; }
      c += parse_cycterm();
    }
    return c;
  }

  Kelt parse_kelt() {
    Cyclo a, b;
    long q = 0;
    if (match("(")) {
      Cyclo c = parse_cyclo();
      expect(')');
      if (match("*rq")) { b = c; q = parse_long(); }
      else a = c;  // not expected in canonical output, but accept
    } else {
      a = parse_cyclo();
      if (match(" + (")) {
        b = parse_cyclo();
        expect(')');
        if (!match("*rq")) throw std::runtime_error("parse: rq expected");
        q = parse_long();
      }
    }
    return Kelt(a, b, b.is_zero() ? 0 : q);
  }

  int var_id_at() {
    for (int v = 0; v < NVARS; ++v) {
      std::string n = var_name(v);
      if (s_.compare(i_, n.size(), n) == 0) {
        // longest-match guard: atau vs a...; names are prefix-free here
        return v;
      }
    }
    return -1;
  }

  Poly parse_mono() {
    Poly m(Kelt(Rat(1)));
    bool any = false;
    while (true) {
      int v = var_id_at();
      if (v < 0) break;
      i_ += std::string(var_name(v)).size();
      int e = 1;
      if (peek() == '^') { ++i_; e = static_cast<int>(parse_long()); }
      m *= Poly::var(v, e);
      any = true;
      if (peek() == '*' && i_ + 1 < s_.size() && var_id_at_offset(i_ + 1) >= 0) {
        ++i_;
        continue;
      }
      break;
    }
    if (!any) throw std::runtime_error("parse: monomial expected in " + s_);
    return m;
  }

  int var_id_at_offset(size_t off) const {
    for (int v = 0; v < NVARS; ++v) {
      std::string n = var_name(v);
      if (s_.compare(off, n.size(), n) == 0) return v;
    }
    return -1;
  }

  Poly parse_term() {
    if (var_id_at() >= 0) return parse_mono();  // unit coefficient
    Kelt c;
    if (peek() == '(') {
      size_t save = i_;
      try {
        // bare atom "(cyclo)" or "(cyclo)*rqN"
        c = parse_kelt();
      } catch (const std::runtime_error&) {
        // wrapper "(kelt)"
        i_ = save;
        ++i_;
        c = parse_kelt();
        expect(')');
      }
    } else {
      // bare cycterm, possibly continuing as "a + (b)*rqN"
      Cyclo a = parse_cycterm();
      size_t save = i_;
      c = Kelt(a);
      if (match(" + (")) {
        try {
          Cyclo b = parse_cyclo();
          expect(')');
          if (!match("*rq")) throw std::runtime_error("no rq");
          long q = parse_long();
          c = Kelt(a, b, q);
        } catch (const std::runtime_error&) {
          i_ = save;
          c = Kelt(a);
        }
      }
    }
    if (match("*")) return parse_mono().scaled(c);
    return Poly(c);
  }

  Poly parse_poly() {
    Poly p = parse_term();
    while (true) {
      size_t save = i_;
      if (!match(" + ")) break;
      if (peek() == '\0') { i_ = save; break; }
      p += parse_term();
    }
    return p;
  }

  std::string s_;
  size_t i_ = 0;
};

inline Scalar scalar_parse(const std::string& s) {
  return ScalarParser(s).parse_scalar();
}

}  // namespace gsp4
