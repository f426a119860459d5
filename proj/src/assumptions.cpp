#include "lra/assumptions.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <numbers>

#include "lra/error.hpp"

namespace lra {

using big = boost::multiprecision::cpp_bin_float_50;

namespace {

ContinuedFraction expand(big x, int depth) {
  if (depth < 1) fail(ErrorCode::InvalidArgument, "continued fraction depth must be positive");
  ContinuedFraction cf;
  big q_prev = 0, q = 1;
  const big tiny("1e-40");
  // x is known to double precision only; quotients past q^2 ~ 2^52 describe rounding, not x
  const big q_limit = big(4503599627370496.0);
  for (int n = 0; n < depth; ++n) {
    big a = floor(x);
    if (x - a > 1 - tiny) a += 1;  // 2.999... from a rounded reciprocal
    if (a > big(1e18)) break;
    const long long ai = a.convert_to<long long>();
    cf.quotients.push_back(ai);
    if (n > 0) {
      const big q_next = big(ai) * q + q_prev;
      q_prev = q;
      q = q_next;
    }
    cf.denominators.push_back(q.convert_to<double>());
    const big frac = x - a;
    if (abs(frac) < tiny) {
      cf.terminated = true;
      break;
    }
    if (q * q > q_limit) break;
    x = 1 / frac;
  }
  return cf;
}

}  // namespace

ContinuedFraction continued_fraction(double x, int depth) {
  if (!std::isfinite(x) || x < 0.0) fail(ErrorCode::InvalidArgument, "continued fraction needs a finite x >= 0");
  return expand(big(x), depth);
}

ContinuedFraction continued_fraction_of_norm(double kappa, Vec2 x0, int depth) {
  const big v = big(kappa) * sqrt(big(x0.x) * big(x0.x) + big(x0.y) * big(x0.y));
  return expand(v, depth);
}

std::optional<double> estimate_type_nu(const ContinuedFraction& cf) {
  std::vector<double> q;
  for (double d : cf.denominators)
    if (d >= 2.0) q.push_back(d);
  if (q.size() < 4) return std::nullopt;
  double nu = 0.0;
  for (std::size_t n = q.size() / 2; n + 1 < q.size(); ++n) nu = std::max(nu, std::log(q[n + 1]) / std::log(q[n]));
  return nu;
}

AssumptionReport check_assumptions(const GridSpec& grid, Vec2 x0, const VarianceField& field, int depth) {
  if (depth < 10) fail(ErrorCode::InvalidArgument, "continued fraction depth must be at least 10");
  AssumptionReport r;
  r.kappa_x0_norm = grid.kappa * std::hypot(x0.x, x0.y);
  const ContinuedFraction cf = continued_fraction_of_norm(grid.kappa, x0, depth);
  r.continued_fraction_quotients = cf.quotients;
  r.estimated_type_nu = cf.terminated ? std::nullopt : estimate_type_nu(cf);
  bool huge = false;
  for (std::size_t i = 1; i < cf.quotients.size(); ++i) huge = huge || cf.quotients[i] > 1000000;
  r.rational_flag = cf.terminated || huge;
  if (r.rational_flag)
    r.warnings.push_back("kappa*|x0| is rational or nearly rational; the irrationality assumption on x0 fails");
  if (!r.estimated_type_nu && !cf.terminated)
    r.warnings.push_back("irrationality type estimate is inconclusive");

  // longest run of sampled alpha with sigma^2(alpha, alpha . x0) > 0
  const int samples = 4096;
  int best_len = 0, best_start = 0, run = 0;
  for (int i = 0; i < 2 * samples; ++i) {
    const double a = 2.0 * std::numbers::pi * (i % samples) / samples;
    const double v = field(a, std::cos(a) * x0.x + std::sin(a) * x0.y);
    if (v > 0.0) {
      ++run;
      if (run > best_len && run <= samples) {
        best_len = run;
        best_start = i - run + 1;
      }
    } else {
      run = 0;
    }
  }
  r.sigma_positivity = best_len >= 2;
  if (r.sigma_positivity) {
    r.witness_alpha_lo = 2.0 * std::numbers::pi * best_start / samples;
    r.witness_alpha_hi = 2.0 * std::numbers::pi * (best_start + best_len - 1) / samples;
  } else {
    r.warnings.push_back("sigma^2 vanishes along the trajectory alpha -> (alpha, alpha . x0)");
  }
  return r;
}

}  // namespace lra
