#include "lra/noise.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>

#include "lra/error.hpp"
#include "lra/philox.hpp"
#include "lra/serialize.hpp"

namespace lra {

std::string to_string(Distribution d) { return d == Distribution::Uniform ? "uniform" : "gaussian"; }

Distribution distribution_from_string(const std::string& s) {
  if (s == "uniform") return Distribution::Uniform;
  if (s == "gaussian") return Distribution::Gaussian;
  fail(ErrorCode::Config, "unknown distribution '" + s + "' (expected uniform or gaussian)");
}

double noise_scale(Distribution d, double variance) {
  return d == Distribution::Uniform ? std::sqrt(3.0 * variance) : std::sqrt(variance);
}

double abs_third_moment(Distribution d, double variance) {
  if (d == Distribution::Uniform) return std::pow(3.0 * variance, 1.5) / 4.0;
  return 2.0 * std::sqrt(2.0 / std::numbers::pi) * std::pow(variance, 1.5);
}

double standard_variate(std::uint64_t seed, std::uint32_t k_pos, std::uint32_t j_pos, Distribution d) {
  const Philox4x32::Counter w = Philox4x32::generate(
      {k_pos, j_pos, 0u, 0u}, {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  if (d == Distribution::Uniform) return 2.0 * unit_from_words(w[0], w[1]) - 1.0;
  const double u1 = 1.0 - unit_from_words(w[0], w[1]);  // (0, 1]
  const double u2 = unit_from_words(w[2], w[3]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_sample_seed(std::uint64_t master_seed, std::uint64_t sample) {
  return splitmix64(master_seed ^ splitmix64(sample));
}

double entry_variance(const GridSpec& grid, const VarianceField& field, int k, int j) {
  const double s2 = field(grid.alpha(k), grid.p(j));
  if (!(s2 >= 0.0)) fail(ErrorCode::Domain, "variance field is negative on the grid");
  return s2 * grid.delta_alpha();
}

NoiseDraw draw_noise(const GridSpec& grid, const VarianceField& field, Distribution d, std::uint64_t seed) {
  NoiseDraw out{Sinogram(grid), seed, d};
  for (int k = grid.angle_min_index; k <= grid.angle_max_index; ++k) {
    const auto kp = static_cast<std::uint32_t>(k - grid.angle_min_index);
    for (int j = grid.detector_min_index; j <= grid.detector_max_index; ++j) {
      const auto jp = static_cast<std::uint32_t>(j - grid.detector_min_index);
      const double sd = noise_scale(d, entry_variance(grid, field, k, j));
      out.sinogram.at(kp, jp) = sd == 0.0 ? 0.0 : standard_variate(seed, kp, jp, d) * sd;
    }
  }
  return out;
}

ThirdMomentReport third_moment_bound_check(const GridSpec& grid, const VarianceField& field, Distribution d) {
  ThirdMomentReport r;
  r.distribution = d;
  r.delta_alpha = grid.delta_alpha();
  const double da32 = std::pow(r.delta_alpha, 1.5);
  r.constant_c = abs_third_moment(d, field.upper_bound());
  for (int k = grid.angle_min_index; k <= grid.angle_max_index; ++k)
    for (int j = grid.detector_min_index; j <= grid.detector_max_index; ++j)
      r.max_ratio = std::max(r.max_ratio, abs_third_moment(d, entry_variance(grid, field, k, j)) / da32);
  r.holds = r.max_ratio <= r.constant_c * (1.0 + 1e-12);
  return r;
}

void export_sinogram(const std::string& stem, const NoiseDraw& draw, const GridSpec& grid, const VarianceField& field) {
  std::ofstream bin(stem + ".bin", std::ios::binary);
  if (!bin) fail(ErrorCode::Io, "cannot open " + stem + ".bin for writing");
  for (double v : draw.sinogram.values) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    bin.write(reinterpret_cast<const char*>(&bits), sizeof bits);
  }
  if (!bin) fail(ErrorCode::Io, "write failed for " + stem + ".bin");
  nlohmann::ordered_json side;
  side["schema"] = 1;
  side["format"] = "float64-le row-major (angle, detector)";
  side["angle_count"] = draw.sinogram.angle_count;
  side["detector_count"] = draw.sinogram.detector_count;
  side["seed"] = draw.seed;
  side["distribution"] = to_string(draw.distribution);
  side["grid"] = to_json(grid);
  side["variance_field"] = to_json(field);
  std::ofstream js(stem + ".json");
  if (!js) fail(ErrorCode::Io, "cannot open " + stem + ".json for writing");
  js << side.dump(2) << '\n';
}

}  // namespace lra
