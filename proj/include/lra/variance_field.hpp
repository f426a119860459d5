#pragma once

#include <string>
#include <vector>

namespace lra {

// sigma^2(alpha, p) >= 0, C^1 in both arguments.
class VarianceField {
 public:
  enum class Kind { ProductSinusoidal, Constant, Tabulated };

  // scale * (1 + amp_alpha sin alpha) * (1 + amp_p sin(freq_p p))
  static VarianceField product_sinusoidal(double scale, double amp_alpha, double amp_p, double freq_p);
  static VarianceField constant(double value);
  // Samples on a uniform alpha grid over [0, 2 pi) (periodic) times a uniform p grid over
  // [p_min, p_max], row-major in alpha. Cubic convolution interpolation in both directions.
  static VarianceField tabulated(std::size_t alpha_count, double p_min, double p_max, std::size_t p_count,
                                 std::vector<double> values);

  double operator()(double alpha, double p) const;

  Kind kind() const { return kind_; }
  const std::string& kind_name() const;
  double scale() const { return scale_; }
  double amp_alpha() const { return amp_alpha_; }
  double amp_p() const { return amp_p_; }
  double freq_p() const { return freq_p_; }
  std::size_t alpha_count() const { return alpha_count_; }
  std::size_t p_count() const { return p_count_; }
  double p_min() const { return p_min_; }
  double p_max() const { return p_max_; }
  const std::vector<double>& values() const { return values_; }
  // A bound on sigma^2 over its whole domain.
  double upper_bound() const;

 private:
  VarianceField() = default;
  Kind kind_ = Kind::Constant;
  double scale_ = 0.0, amp_alpha_ = 0.0, amp_p_ = 0.0, freq_p_ = 0.0;
  std::size_t alpha_count_ = 0, p_count_ = 0;
  double p_min_ = 0.0, p_max_ = 0.0;
  std::vector<double> values_;
};

// (1/3)(1 + sin(alpha)/2)(1 + sin(pi p)/2)
VarianceField make_reference_sigma2();

}  // namespace lra
