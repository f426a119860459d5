#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lra/ensemble.hpp"
#include "lra/geometry.hpp"
#include "lra/kernel.hpp"
#include "lra/noise.hpp"
#include "lra/serialize.hpp"

namespace lra {

struct KernelSpec {
  std::string kind = "keys";  // keys | bspline3 | pieces
  double a = -0.5;            // keys only
  Json document;              // pieces only: a kernel JSON document
  bool operator==(const KernelSpec&) const = default;
};

struct ExperimentConfig {
  std::optional<double> epsilon;
  std::optional<int> j_m;
  double kappa = 2.0 * 3.141592653589793;
  double P = 1.0;
  std::optional<double> p_bar;
  AngleConvention convention = AngleConvention::FullTurn;

  Vec2 x0;
  std::vector<Vec2> offsets;
  Json variance_field = Json{{"kind", "reference"}};
  Distribution distribution = Distribution::Uniform;
  KernelSpec kernel;
  double table_step = 1e-3;
  double table_half_range = 24.0;
  std::string table_file;  // optional table snapshot to check or use

  std::size_t n_samples = 10000;
  std::uint64_t master_seed = 1;
  unsigned threads = 0;
  double window = 0.0;
  int quadrature_nodes = 4096;
  int histogram_bins = 16;
  double histogram_half_width = 0.0;  // 0: 4 sqrt(C(0))
  Thresholds thresholds;

  std::size_t image_resolution = 128;
  double image_window = 24.0;  // detector steps per side, 0: full detector

  std::vector<int> sweep_j_m;
  std::vector<double> sweep_epsilon;
  std::size_t sweep_n_samples = 0;  // 0: n_samples
  double sweep_coarse_epsilon = 0.1;
  double sweep_min_coarse_error = 0.2;
  double sweep_min_rank_correlation = 0.8;

  bool export_sinogram = false;
  bool plots = false;
  std::string output_dir = "lra-out";

  double resolved_epsilon() const;
  std::vector<double> resolved_sweep() const;
  bool operator==(const ExperimentConfig&) const;
};

ExperimentConfig config_from_json(const Json& j);
Json to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::string& path);

Kernel make_kernel(const KernelSpec& spec);
GridSpec make_grid(const ExperimentConfig& c);
LocalPatch make_patch(const ExperimentConfig& c);
VarianceField make_field(const ExperimentConfig& c);

}  // namespace lra
