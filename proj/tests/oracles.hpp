// Reference computations written independently of the library.
#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

struct Poly {
  double lo, hi;
  std::vector<long double> c;  // ascending powers of s
};

// Keys cubic convolution kernel, piecewise in s over [-2, 2].
inline std::vector<Poly> keys_pieces(double a = -0.5) {
  const long double A = a;
  return {
      {-2, -1, {-4 * A, -8 * A, -5 * A, -A}},
      {-1, 0, {1, 0, -(A + 3), -(A + 2)}},
      {0, 1, {1, 0, -(A + 3), A + 2}},
      {1, 2, {-4 * A, 8 * A, -5 * A, A}},
  };
}

inline long double horner(const std::vector<long double>& c, long double s) {
  long double r = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * s + *it;
  return r;
}

inline std::vector<long double> derivative(const std::vector<long double>& c) {
  std::vector<long double> d;
  for (std::size_t n = 1; n < c.size(); ++n) d.push_back(c[n] * static_cast<long double>(n));
  return d;
}

inline double keys(double t, double a = -0.5) {
  const double u = std::abs(t);
  if (u < 1) return (a + 2) * u * u * u - (a + 3) * u * u + 1;
  if (u < 2) return a * u * u * u - 5 * a * u * u + 8 * a * u - 4 * a;
  return 0.0;
}

// (1/pi) PV integral of phi'(s) / (t - s) in closed form: per piece, split
// p(s) = p(t) + (s - t) q(s) so the singular part integrates to a logarithm.
inline double hilbert_derivative(const std::vector<Poly>& pieces, double t) {
  long double total = 0;
  const long double T = t;
  for (const Poly& pc : pieces) {
    const std::vector<long double> p = derivative(pc.c);
    if (p.empty()) continue;
    // synthetic division of p(s) - p(t) by (s - t)
    const std::size_t m = p.size() - 1;
    std::vector<long double> q(m == 0 ? 1 : m, 0.0L);
    if (m > 0) {
      long double carry = 0;
      for (std::size_t n = m; n >= 1; --n) {
        carry = carry * T + p[n];
        q[n - 1] = carry;
      }
    }
    const long double lo = pc.lo, hi = pc.hi;
    long double qint = 0;
    if (m > 0)
      for (std::size_t n = 0; n < q.size(); ++n)
        qint += q[n] * (std::pow(hi, static_cast<long double>(n + 1)) - std::pow(lo, static_cast<long double>(n + 1))) /
                static_cast<long double>(n + 1);
    const long double dl = std::abs(T - lo), dh = std::abs(T - hi);
    long double logpart = 0;
    if (dl > 0 && dh > 0) logpart = std::log(dl) - std::log(dh);
    else if (dl > 0) logpart = std::log(dl);  // the log singularities cancel between neighbouring pieces
    else if (dh > 0) logpart = -std::log(dh);
    total += horner(p, T) * logpart - qint;
  }
  return static_cast<double>(total / kPi);
}

// Integral of phi'(s + t) phi'(s) over R by Gauss-Legendre on every piece pair.
inline double derivative_autocorrelation(const std::vector<Poly>& pieces, double t) {
  static const std::array<long double, 8> x = {0.0950125098376374L, 0.2816035507792589L, 0.4580167776572274L,
                                               0.6178762444026438L, 0.7554044083550030L, 0.8656312023878318L,
                                               0.9445750230732326L, 0.9894009349916499L};
  static const std::array<long double, 8> w = {0.1894506104550685L, 0.1826034150449236L, 0.1691565193950025L,
                                               0.1495959888165767L, 0.1246289712555339L, 0.0951585116824928L,
                                               0.0622535239386479L, 0.0271524594117541L};
  long double sum = 0;
  for (const Poly& a : pieces)
    for (const Poly& b : pieces) {
      const long double lo = std::max<long double>(b.lo, a.lo - t), hi = std::min<long double>(b.hi, a.hi - t);
      if (!(hi > lo)) continue;
      const auto da = derivative(a.c), db = derivative(b.c);
      const long double mid = 0.5L * (lo + hi), half = 0.5L * (hi - lo);
      for (std::size_t i = 0; i < x.size(); ++i)
        for (int sgn : {-1, 1}) {
          const long double s = mid + sgn * half * x[i];
          sum += w[i] * half * horner(da, s + t) * horner(db, s);
        }
    }
  return static_cast<double>(sum);
}

}  // namespace oracle
