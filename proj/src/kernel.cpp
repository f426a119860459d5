#include "lra/kernel.hpp"

#include <algorithm>
#include <bit>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

#include "lra/error.hpp"

namespace lra {

double poly_eval(std::span<const double> c, double t) {
  double r = 0.0;
  for (std::size_t n = c.size(); n-- > 0;) r = r * t + c[n];
  return r;
}

std::vector<double> poly_derivative(std::span<const double> c) {
  std::vector<double> d;
  for (std::size_t n = 1; n < c.size(); ++n) d.push_back(static_cast<double>(n) * c[n]);
  if (d.empty()) d.push_back(0.0);
  return d;
}

namespace {

std::vector<double> nth_derivative(std::span<const double> c, int order) {
  std::vector<double> d(c.begin(), c.end());
  for (int i = 0; i < order; ++i) d = poly_derivative(d);
  return d;
}

double poly_integral(std::span<const double> c, double a, double b) {
  double r = 0.0;
  for (std::size_t n = 0; n < c.size(); ++n) {
    const double p = static_cast<double>(n + 1);
    r += c[n] * (std::pow(b, p) - std::pow(a, p)) / p;
  }
  return r;
}

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t word) {
  for (int i = 0; i < 8; ++i) {
    h ^= (word >> (8 * i)) & 0xffu;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Integral of P(t) e^{-i lambda t} over [a, b] by repeated integration by parts.
std::complex<double> piece_fourier_closed(const Piece& piece, double lambda) {
  const std::complex<double> mil(0.0, -lambda);
  std::vector<double> d = piece.coeffs;
  std::complex<double> acc(0.0, 0.0);
  std::complex<double> denom = mil;
  const std::complex<double> eb = std::exp(mil * piece.hi);
  const std::complex<double> ea = std::exp(mil * piece.lo);
  double sign = 1.0;
  for (std::size_t n = 0; n < piece.coeffs.size(); ++n) {
    acc += sign * (poly_eval(d, piece.hi) * eb - poly_eval(d, piece.lo) * ea) / denom;
    d = poly_derivative(d);
    denom *= mil;
    sign = -sign;
  }
  return acc;
}

std::complex<double> piece_fourier_gauss(const Piece& piece, double lambda) {
  using Rule = boost::math::quadrature::gauss<double, 30>;
  const double mid = 0.5 * (piece.lo + piece.hi);
  const double half = 0.5 * (piece.hi - piece.lo);
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  std::complex<double> acc(0.0, 0.0);
  auto term = [&](double t, double wt) {
    acc += wt * poly_eval(piece.coeffs, t) * std::complex<double>(std::cos(lambda * t), -std::sin(lambda * t));
  };
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) {
      term(mid, w[i]);
    } else {
      term(mid + half * x[i], w[i]);
      term(mid - half * x[i], w[i]);
    }
  }
  return acc * half;
}

}  // namespace

Kernel::Kernel(std::string name, std::vector<Piece> pieces) : name_(std::move(name)), pieces_(std::move(pieces)) {
  if (pieces_.empty()) fail(ErrorCode::InvalidArgument, "kernel needs at least one piece");
  std::sort(pieces_.begin(), pieces_.end(), [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const Piece& p = pieces_[i];
    if (!(std::isfinite(p.lo) && std::isfinite(p.hi) && p.lo < p.hi))
      fail(ErrorCode::InvalidArgument, "kernel piece has an empty or non-finite interval");
    if (p.coeffs.empty() || p.coeffs.size() > 12) fail(ErrorCode::InvalidArgument, "kernel piece needs 1 to 12 coefficients");
    for (double c : p.coeffs)
      if (!std::isfinite(c)) fail(ErrorCode::InvalidArgument, "kernel coefficient is not finite");
    if (i > 0 && p.lo < pieces_[i - 1].hi) fail(ErrorCode::InvalidArgument, "kernel pieces overlap");
    degree_ = std::max(degree_, static_cast<int>(p.coeffs.size()) - 1);
    support_radius_ = std::max({support_radius_, std::abs(p.lo), std::abs(p.hi)});
  }

  if (std::abs(mass() - 1.0) > 1e-12) fail(ErrorCode::InvalidArgument, "kernel must have unit mass");

  std::vector<double> at;
  for (const Piece& p : pieces_) {
    at.push_back(p.lo);
    at.push_back(p.hi);
  }
  std::sort(at.begin(), at.end());
  at.erase(std::unique(at.begin(), at.end()), at.end());
  double scale = 0.0;
  for (const Piece& p : pieces_)
    for (double c : p.coeffs) scale = std::max(scale, std::abs(c));
  int first_jump = degree_ + 1;
  for (double b : at) {
    Breakpoint bp{b, std::vector<double>(degree_ + 1, 0.0)};
    for (const Piece& p : pieces_) {
      for (int n = 0; n <= degree_; ++n) {
        const double v = poly_eval(nth_derivative(p.coeffs, n), b);
        if (p.lo == b) bp.jumps[n] += v;
        if (p.hi == b) bp.jumps[n] -= v;
      }
    }
    for (int n = 0; n <= degree_; ++n) {
      if (std::abs(bp.jumps[n]) <= 1e-12 * scale) bp.jumps[n] = 0.0;
      if (bp.jumps[n] != 0.0) first_jump = std::min(first_jump, n);
    }
    breakpoints_.push_back(std::move(bp));
  }
  smoothness_M_ = first_jump - 1;

  even_ = true;
  for (int i = 0; i <= 256 && even_; ++i) {
    const double t = support_radius_ * (i + 0.37) / 257.0;
    if (std::abs(eval(t) - eval(-t)) > 1e-12) even_ = false;
  }

  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const Piece& p : pieces_) {
    h = fnv1a(h, std::bit_cast<std::uint64_t>(p.lo));
    h = fnv1a(h, std::bit_cast<std::uint64_t>(p.hi));
    for (double c : p.coeffs) h = fnv1a(h, std::bit_cast<std::uint64_t>(c));
  }
  fingerprint_ = h;
}

double Kernel::eval(double t, int derivative_order) const {
  if (derivative_order < 0 || derivative_order > 3)
    fail(ErrorCode::InvalidArgument, "derivative order must be 0, 1, 2 or 3");
  for (const Piece& p : pieces_) {
    if (t >= p.lo && t < p.hi) {
      if (derivative_order == 0) return poly_eval(p.coeffs, t);
      return poly_eval(nth_derivative(p.coeffs, derivative_order), t);
    }
  }
  return 0.0;
}

double Kernel::mass() const {
  double m = 0.0;
  for (const Piece& p : pieces_) m += poly_integral(p.coeffs, p.lo, p.hi);
  return m;
}

std::complex<double> Kernel::spectrum(double lambda) const {
  std::complex<double> acc(0.0, 0.0);
  for (const Piece& p : pieces_) {
    if (std::abs(lambda) * (p.hi - p.lo) <= 20.0)
      acc += piece_fourier_gauss(p, lambda);
    else
      acc += piece_fourier_closed(p, lambda);
  }
  if (even_) acc.imag(0.0);
  return acc;
}

Kernel make_keys_kernel(double a) {
  // |t| <= 1: (a+2)|t|^3 - (a+3)|t|^2 + 1 ; 1 < |t| < 2: a|t|^3 - 5a|t|^2 + 8a|t| - 4a
  std::vector<Piece> p;
  p.push_back({-2.0, -1.0, {-4.0 * a, -8.0 * a, -5.0 * a, -a}});
  p.push_back({-1.0, 0.0, {1.0, 0.0, -(a + 3.0), -(a + 2.0)}});
  p.push_back({0.0, 1.0, {1.0, 0.0, -(a + 3.0), a + 2.0}});
  p.push_back({1.0, 2.0, {-4.0 * a, 8.0 * a, -5.0 * a, a}});
  return Kernel("keys", std::move(p));
}

Kernel make_bspline3_kernel() {
  std::vector<Piece> p;
  p.push_back({-2.0, -1.0, {8.0 / 6.0, 12.0 / 6.0, 6.0 / 6.0, 1.0 / 6.0}});
  p.push_back({-1.0, 0.0, {4.0 / 6.0, 0.0, -1.0, -0.5}});
  p.push_back({0.0, 1.0, {4.0 / 6.0, 0.0, -1.0, 0.5}});
  p.push_back({1.0, 2.0, {8.0 / 6.0, -12.0 / 6.0, 6.0 / 6.0, -1.0 / 6.0}});
  return Kernel("bspline3", std::move(p));
}

}  // namespace lra
