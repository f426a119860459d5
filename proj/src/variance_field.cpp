#include "lra/variance_field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lra/error.hpp"

namespace lra {

namespace {

// Keys weights for offsets -1, 0, 1, 2 at fractional position u in [0, 1).
void cubic_weights(double u, double w[4]) {
  const double u2 = u * u, u3 = u2 * u;
  w[0] = -0.5 * u3 + u2 - 0.5 * u;
  w[1] = 1.5 * u3 - 2.5 * u2 + 1.0;
  w[2] = -1.5 * u3 + 2.0 * u2 + 0.5 * u;
  w[3] = 0.5 * u3 - 0.5 * u2;
}

}  // namespace

VarianceField VarianceField::product_sinusoidal(double scale, double amp_alpha, double amp_p, double freq_p) {
  if (!(scale >= 0.0) || !std::isfinite(scale)) fail(ErrorCode::InvalidArgument, "variance scale must be >= 0");
  if (!(std::abs(amp_alpha) <= 1.0) || !(std::abs(amp_p) <= 1.0))
    fail(ErrorCode::InvalidArgument, "sinusoid amplitudes must lie in [-1, 1] to keep sigma^2 >= 0");
  if (!std::isfinite(freq_p)) fail(ErrorCode::InvalidArgument, "sinusoid frequency must be finite");
  VarianceField f;
  f.kind_ = Kind::ProductSinusoidal;
  f.scale_ = scale;
  f.amp_alpha_ = amp_alpha;
  f.amp_p_ = amp_p;
  f.freq_p_ = freq_p;
  return f;
}

VarianceField VarianceField::constant(double value) {
  if (!(value >= 0.0) || !std::isfinite(value)) fail(ErrorCode::InvalidArgument, "constant variance must be >= 0");
  VarianceField f;
  f.kind_ = Kind::Constant;
  f.scale_ = value;
  return f;
}

VarianceField VarianceField::tabulated(std::size_t alpha_count, double p_min, double p_max, std::size_t p_count,
                                       std::vector<double> values) {
  if (alpha_count < 4 || p_count < 4) fail(ErrorCode::InvalidArgument, "tabulated variance needs at least 4x4 samples");
  if (!(p_max > p_min)) fail(ErrorCode::InvalidArgument, "tabulated variance needs p_max > p_min");
  if (values.size() != alpha_count * p_count)
    fail(ErrorCode::InvalidArgument, "tabulated variance value count does not match its grid");
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v)) fail(ErrorCode::InvalidArgument, "tabulated variance has a negative value");
  VarianceField f;
  f.kind_ = Kind::Tabulated;
  f.alpha_count_ = alpha_count;
  f.p_count_ = p_count;
  f.p_min_ = p_min;
  f.p_max_ = p_max;
  f.values_ = std::move(values);
  return f;
}

double VarianceField::operator()(double alpha, double p) const {
  switch (kind_) {
    case Kind::Constant:
      return scale_;
    case Kind::ProductSinusoidal:
      return scale_ * (1.0 + amp_alpha_ * std::sin(alpha)) * (1.0 + amp_p_ * std::sin(freq_p_ * p));
    case Kind::Tabulated: {
      const double ta = alpha / (2.0 * std::numbers::pi) * static_cast<double>(alpha_count_);
      const double fa = std::floor(ta);
      const long ia = static_cast<long>(fa);
      const double pc = std::clamp(p, p_min_, p_max_);
      const double tp = (pc - p_min_) / (p_max_ - p_min_) * static_cast<double>(p_count_ - 1);
      const long ip = std::min(static_cast<long>(std::floor(tp)), static_cast<long>(p_count_) - 2);
      double wa[4], wp[4];
      cubic_weights(ta - fa, wa);
      cubic_weights(tp - static_cast<double>(ip), wp);
      const long na = static_cast<long>(alpha_count_), np = static_cast<long>(p_count_);
      double acc = 0.0;
      for (int a = 0; a < 4; ++a) {
        const long row = (((ia + a - 1) % na) + na) % na;
        for (int b = 0; b < 4; ++b) {
          // reflect at the p ends so the interpolant stays C^1 up to the boundary
          long col = ip + b - 1;
          if (col < 0) col = -col;
          if (col >= np) col = 2 * (np - 1) - col;
          acc += wa[a] * wp[b] * values_[static_cast<std::size_t>(row * np + col)];
        }
      }
      return std::max(acc, 0.0);
    }
  }
  return 0.0;
}

const std::string& VarianceField::kind_name() const {
  static const std::string names[] = {"product_sinusoidal", "constant", "tabulated"};
  return names[static_cast<int>(kind_)];
}

double VarianceField::upper_bound() const {
  switch (kind_) {
    case Kind::Constant:
      return scale_;
    case Kind::ProductSinusoidal:
      return scale_ * (1.0 + std::abs(amp_alpha_)) * (1.0 + std::abs(amp_p_));
    case Kind::Tabulated:
      // cubic convolution overshoot is bounded by the sum of |weights| <= 1.25 per axis
      return 1.5625 * *std::max_element(values_.begin(), values_.end());
  }
  return 0.0;
}

VarianceField make_reference_sigma2() {
  return VarianceField::product_sinusoidal(1.0 / 3.0, 0.5, 0.5, std::numbers::pi);
}

}  // namespace lra
