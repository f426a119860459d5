#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lra/geometry.hpp"
#include "lra/variance_field.hpp"

namespace lra {

enum class Distribution { Uniform, Gaussian };

std::string to_string(Distribution d);
Distribution distribution_from_string(const std::string& s);

// Multiplier turning a standard variate into an entry of the given variance.
double noise_scale(Distribution d, double variance);
// E|eta|^3 for an entry of the given variance.
double abs_third_moment(Distribution d, double variance);

// Standard variate (uniform on [-1, 1) or N(0, 1)) for grid position (k_pos, j_pos) under seed.
double standard_variate(std::uint64_t seed, std::uint32_t k_pos, std::uint32_t j_pos, Distribution d);
// Seed of ensemble sample s.
std::uint64_t derive_sample_seed(std::uint64_t master_seed, std::uint64_t sample);

// Row-major: angle position then detector position.
struct Sinogram {
  std::size_t angle_count = 0;
  std::size_t detector_count = 0;
  std::vector<double> values;

  Sinogram() = default;
  Sinogram(std::size_t angles, std::size_t detectors) : angle_count(angles), detector_count(detectors),
                                                         values(angles * detectors, 0.0) {}
  explicit Sinogram(const GridSpec& g) : Sinogram(g.angle_count(), g.detector_count()) {}
  double& at(std::size_t k_pos, std::size_t j_pos) { return values[k_pos * detector_count + j_pos]; }
  double at(std::size_t k_pos, std::size_t j_pos) const { return values[k_pos * detector_count + j_pos]; }
};

struct NoiseDraw {
  Sinogram sinogram;
  std::uint64_t seed = 0;
  Distribution distribution = Distribution::Uniform;
};

// Per-entry variance sigma^2(alpha_k, p_j) * dalpha; throws on a negative sample.
double entry_variance(const GridSpec& grid, const VarianceField& field, int k, int j);

NoiseDraw draw_noise(const GridSpec& grid, const VarianceField& field, Distribution d, std::uint64_t seed);

struct ThirdMomentReport {
  Distribution distribution = Distribution::Uniform;
  double delta_alpha = 0.0;
  double constant_c = 0.0;  // bound E|eta|^3 <= c dalpha^{3/2}
  double max_ratio = 0.0;   // max over the grid of E|eta|^3 / dalpha^{3/2}
  bool holds = false;
};

ThirdMomentReport third_moment_bound_check(const GridSpec& grid, const VarianceField& field, Distribution d);

// <stem>.bin (little-endian float64, row-major) and <stem>.json sidecar.
void export_sinogram(const std::string& stem, const NoiseDraw& draw, const GridSpec& grid, const VarianceField& field);

}  // namespace lra
