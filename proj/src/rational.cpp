#include "elts/rational.hpp"

#include "elts/errors.hpp"

#include <cmath>
#include <cstdlib>

namespace elts {

Rational parse_rational(const std::string& text) {
  auto bad = [&] { throw ParseError("not a rational: '" + text + "'"); };
  std::string num = text, den = "1";
  if (auto slash = text.find('/'); slash != std::string::npos) {
    num = text.substr(0, slash);
    den = text.substr(slash + 1);
  }
  auto check_digits = [&](const std::string& s) {
    if (s.empty()) bad();
    std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (start == s.size()) bad();
    for (std::size_t i = start; i < s.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) bad();
  };
  check_digits(num);
  check_digits(den);
  Integer n(num), d(den);
  if (d == 0) bad();
  return Rational(n, d);
}

std::string format_rational(const Rational& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) s += "/" + denominator(r).str();
  return s;
}

Rational exact_rational(double x) {
  if (!std::isfinite(x)) throw Error("non-finite value has no rational form");
  // Decompose x = m * 2^e with integral m.
  int e = 0;
  double m = std::frexp(x, &e);  // |m| in [0.5, 1)
  for (int i = 0; i < 64 && m != std::floor(m); ++i) {
    m *= 2.0;
    --e;
  }
  Integer mant(static_cast<long long>(m));
  Rational r(mant);
  if (e > 0) {
    r *= Rational(Integer(1) << e);
  } else if (e < 0) {
    r /= Rational(Integer(1) << (-e));
  }
  return r;
}

Rational rationalize(double x, std::uint64_t max_den) {
  Rational exact = exact_rational(x);
  if (max_den == 0) return exact;
  Integer bound(max_den);
  if (denominator(exact) <= bound) return exact;

  // Stern-Brocot / continued-fraction best approximation.
  Integer p0 = 0, q0 = 1, p1 = 1, q1 = 0;  // convergents h_{-1}, h_0
  Rational rest = exact;
  bool negative = rest < 0;
  if (negative) rest = -rest;
  while (true) {
    Integer a = numerator(rest) / denominator(rest);
    Integer p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > bound) {
      // Semiconvergent with the largest admissible partial quotient.
      Integer k = (bound - q0) / q1;
      Integer ps = k * p1 + p0, qs = k * q1 + q0;
      Rational target = negative ? -exact : exact;
      Rational cand1(p1, q1), cand2(ps, qs);
      Rational best = cand1;
      if (qs > 0 && abs(cand2 - target) < abs(cand1 - target)) best = cand2;
      return negative ? -best : best;
    }
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    Rational frac = rest - Rational(a);
    if (frac == 0) return negative ? Rational(-p1, q1) : Rational(p1, q1);
    rest = Rational(1) / frac;
  }
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace elts
