#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lra/geometry.hpp"
#include "lra/kernel_tables.hpp"
#include "lra/noise.hpp"

namespace lra {

struct ReconstructionResult {
  std::vector<Vec2> points;   // physical points
  std::vector<Vec2> offsets;  // patch offsets (local reconstructions only)
  std::vector<double> values;
  std::size_t width = 0;  // image layout, zero for local results
  std::size_t height = 0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::string field;
  std::string kernel;
};

struct Region {
  double x_min = -1.0, x_max = 1.0;
  double y_min = -1.0, y_max = 1.0;
};

// dalpha / (4 pi epsilon)
double fbp_prefactor(const GridSpec& grid);

// Precomputed weights H phi'(a_k - j + alpha_k . chi) for every (k, j) the patch uses.
// window = 0 keeps the whole detector; window > 0 keeps |a_k - j + alpha_k . chi| <= window.
class LocalReconstructor {
 public:
  LocalReconstructor(const GridSpec& grid, const LocalPatch& patch, const FilteredKernelTable& fk, double window = 0.0);

  std::size_t patch_size() const { return K_; }
  std::size_t term_count() const { return weights_.size() / K_; }
  void apply(const Sinogram& s, double* out) const;

  // Draw-and-reconstruct in one pass, bit-identical to apply(draw_noise(grid, field, d, seed).sinogram).
  void attach_noise(const VarianceField& field, Distribution d);
  void sample(std::uint64_t seed, double* out) const;

 private:
  struct Row {
    std::uint32_t k_pos;
    std::uint32_t j_pos;  // first detector position
    std::uint32_t count;
    std::size_t start;  // term index of the first entry
  };
  template <class Source>
  void accumulate(Source eta, double* out) const;

  GridSpec grid_;
  std::size_t K_ = 0;
  std::vector<Row> rows_;
  std::vector<double> weights_;  // term-major, K per term
  std::vector<double> scales_;   // per term
  Distribution dist_ = Distribution::Uniform;
  double prefactor_ = 0.0;
};

ReconstructionResult reconstruct_local(const NoiseDraw& noise, const LocalPatch& patch, const GridSpec& grid,
                                       const FilteredKernelTable& fk, double window = 0.0);

// Pixel centers, row-major, first pixel at (x_min, y_max). Same window rule as above.
ReconstructionResult reconstruct_image(const Sinogram& sinogram, const Region& region, std::size_t resolution,
                                       const GridSpec& grid, const FilteredKernelTable& fk, double window = 0.0,
                                       unsigned threads = 1);

// Chord lengths of a unit-density disk.
Sinogram radon_disk(Vec2 center, double radius, const GridSpec& grid);

}  // namespace lra
