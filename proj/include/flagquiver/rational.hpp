#pragma once

// Exact scalar types: arbitrary-precision rationals (GMP) and Gaussian
// rationals a + b i with a, b rational. All core algebra in this library
// runs over these; floating point only enters the vortex solver.

#include <gmpxx.h>

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

namespace flagquiver {

using Rat = mpq_class;

inline Rat rat_of(long num, long den = 1) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

/// "p" or "p/q", canonical (q > 0, gcd 1).
inline std::string rat_to_string(const Rat& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline Rat rat_from_string(const std::string& s) {
  Rat r;
  if (r.set_str(s, 10) != 0)
    throw std::invalid_argument("bad rational literal: " + s);
  r.canonicalize();
  return r;
}

/// Gaussian rational: re + im*i.
struct CRat {
  Rat re, im;

  CRat() : re(0), im(0) {}
  CRat(const Rat& r) : re(r), im(0) {}
  CRat(long n) : re(n), im(0) {}
  CRat(const Rat& r, const Rat& i) : re(r), im(i) {}

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }

  CRat conj() const { return CRat(re, Rat(-im)); }

  CRat operator-() const { return CRat(Rat(-re), Rat(-im)); }
  CRat& operator+=(const CRat& o) { re += o.re; im += o.im; return *this; }
  CRat& operator-=(const CRat& o) { re -= o.re; im -= o.im; return *this; }
  CRat& operator*=(const CRat& o) {
    Rat r = re * o.re - im * o.im;
    Rat i = re * o.im + im * o.re;
    re = r; im = i;
    return *this;
  }
  CRat& operator/=(const CRat& o) {
    Rat n = o.re * o.re + o.im * o.im;
    if (n == 0) throw std::domain_error("division by zero CRat");
    Rat r = (re * o.re + im * o.im) / n;
    Rat i = (im * o.re - re * o.im) / n;
    re = r; im = i;
    return *this;
  }

  friend CRat operator+(CRat a, const CRat& b) { return a += b; }
  friend CRat operator-(CRat a, const CRat& b) { return a -= b; }
  friend CRat operator*(CRat a, const CRat& b) { return a *= b; }
  friend CRat operator/(CRat a, const CRat& b) { return a /= b; }
  friend bool operator==(const CRat& a, const CRat& b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(const CRat& a, const CRat& b) { return !(a == b); }
  friend bool operator<(const CRat& a, const CRat& b) {
    if (a.re != b.re) return a.re < b.re;
    return a.im < b.im;
  }
};

/// Canonical form "a/b+c/d i" (pure real: "a/b"; pure imaginary keeps the
/// real part implicit only when zero: "c/d i").
inline std::string crat_to_string(const CRat& z) {
  if (z.im == 0) return rat_to_string(z.re);
  std::string s;
  if (z.re != 0) {
    s = rat_to_string(z.re);
    if (z.im > 0) s += "+";
  }
  s += rat_to_string(z.im) + " i";
  return s;
}

inline CRat crat_from_string(const std::string& s) {
  auto pos = s.find(" i");
  if (pos == std::string::npos) {
    if (s.find('i') != std::string::npos)
      throw std::invalid_argument("bad complex literal: " + s);
    return CRat(rat_from_string(s));
  }
  std::string body = s.substr(0, pos);
  // split real and imaginary at the last '+'/'-' that is not a leading sign
  // and not inside a fraction.
  size_t split = std::string::npos;
  for (size_t k = body.size(); k-- > 1;) {
    char c = body[k];
    if ((c == '+' || c == '-') && body[k - 1] != '/' && body[k - 1] != '+' && body[k - 1] != '-')
      { split = k; break; }
  }
  if (split == std::string::npos) return CRat(Rat(0), rat_from_string(body));
  Rat re = rat_from_string(body.substr(0, split));
  std::string ims = body.substr(split);
  if (ims == "+") ims = "1"; else if (ims == "-") ims = "-1";
  else if (ims[0] == '+') ims = ims.substr(1);
  return CRat(re, rat_from_string(ims));
}

inline std::ostream& operator<<(std::ostream& os, const CRat& z) {
  return os << crat_to_string(z);
}

inline double rat_to_double(const Rat& r) { return r.get_d(); }

}  // namespace flagquiver
