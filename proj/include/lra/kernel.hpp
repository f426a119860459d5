#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lra {

// One polynomial piece: phi(t) = sum_n coeffs[n] * t^n on [lo, hi).
struct Piece {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> coeffs;
};

// Jumps of phi^(n) at one breakpoint, n = 0..degree.
struct Breakpoint {
  double at = 0.0;
  std::vector<double> jumps;
};

class Kernel {
 public:
  Kernel(std::string name, std::vector<Piece> pieces);

  double eval(double t, int derivative_order = 0) const;
  std::complex<double> spectrum(double lambda) const;

  const std::string& name() const { return name_; }
  std::span<const Piece> pieces() const { return pieces_; }
  const std::vector<Breakpoint>& breakpoints() const { return breakpoints_; }
  double support_radius() const { return support_radius_; }
  int smoothness_M() const { return smoothness_M_; }
  int degree() const { return degree_; }
  bool is_even() const { return even_; }
  double mass() const;
  // Stable hash of the piece data, used as the cache identity.
  std::uint64_t fingerprint() const { return fingerprint_; }

 private:
  std::string name_;
  std::vector<Piece> pieces_;
  std::vector<Breakpoint> breakpoints_;
  double support_radius_ = 0.0;
  int smoothness_M_ = 0;
  int degree_ = 0;
  bool even_ = false;
  std::uint64_t fingerprint_ = 0;
};

// Keys cubic convolution kernel, support [-2, 2].
Kernel make_keys_kernel(double a = -0.5);
// Centered cubic B-spline, support [-2, 2].
Kernel make_bspline3_kernel();

// Polynomial helpers shared with the table builders.
double poly_eval(std::span<const double> c, double t);
std::vector<double> poly_derivative(std::span<const double> c);

}  // namespace lra
