#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lra/geometry.hpp"
#include "lra/kernel_tables.hpp"
#include "lra/noise.hpp"
#include "lra/theory.hpp"

namespace lra {

struct HistogramSpec {
  int bins = 16;
  double half_width = 0.0;  // <= 0: 4 * largest sample standard deviation
};

// counts[iy * bins + ix], bin i covers [-h + i w, -h + (i + 1) w); outliers go to the edge bins.
struct Histogram2D {
  int bins = 0;
  double half_width = 0.0;
  std::vector<std::uint64_t> counts;
  double bin_width() const { return 2.0 * half_width / bins; }
  double center(int i) const { return -half_width + (i + 0.5) * bin_width(); }
};

struct EnsembleOptions {
  double window = 0.0;   // 0 = whole detector
  unsigned threads = 0;  // 0 = hardware concurrency
  HistogramSpec histogram;
};

struct EnsembleStats {
  std::size_t n_samples = 0;
  Eigen::VectorXd sample_mean;
  Eigen::MatrixXd sample_cov;
  std::optional<Histogram2D> histogram;
  std::string config_fingerprint;
  std::uint64_t master_seed = 0;
};

using SeedSchedule = std::function<std::uint64_t(std::uint64_t sample)>;

EnsembleStats run_ensemble(std::size_t n, const GridSpec& grid, const LocalPatch& patch, const VarianceField& field,
                           Distribution d, const FilteredKernelTable& fk, std::uint64_t master_seed,
                           const EnsembleOptions& options = {});
// As above with explicit per-sample seeds.
EnsembleStats run_ensemble_seeded(std::size_t n, const GridSpec& grid, const LocalPatch& patch,
                                  const VarianceField& field, Distribution d, const FilteredKernelTable& fk,
                                  const SeedSchedule& seeds, const EnsembleOptions& options = {});

// Bivariate zero-mean normal density at the bin centers, indexed like Histogram2D::counts.
std::vector<double> gaussian_pdf_on_grid(const Eigen::MatrixXd& cov, int bins, double half_width);
std::vector<double> gaussian_pdf_on_grid(const PredictedCovariance& pred, int bins, double half_width);
std::vector<double> histogram_density(const Histogram2D& h, std::size_t n);

struct Thresholds {
  double cov_error = 0.07;
  double pdf_error = 0.12;
};

struct ComparisonReport {
  double cov_error_frobenius = 0.0;
  std::optional<double> pdf_error_l2;  // two-point patches only
  double mean_norm = 0.0;
  double mean_bound = 0.0;  // 4 sqrt(C(0) / n)
  bool cov_pass = false;
  bool pdf_pass = true;
  bool mean_pass = false;
  bool pass() const { return cov_pass && pdf_pass; }
};

ComparisonReport compare(const EnsembleStats& stats, const PredictedCovariance& pred, const Thresholds& thresholds);
ComparisonReport compare(const EnsembleStats& stats, const Eigen::MatrixXd& pred, const Thresholds& thresholds);

struct SweepBase {
  double kappa = 2.0 * 3.141592653589793;
  double P = 1.0;
  AngleConvention convention = AngleConvention::FullTurn;
  Vec2 x0;
  std::vector<Vec2> offsets;
  const VarianceField* field = nullptr;
  Distribution distribution = Distribution::Uniform;
  const FilteredKernelTable* fk = nullptr;
  const PredictedCovariance* prediction = nullptr;
  std::uint64_t master_seed = 0;
  EnsembleOptions options;
  Thresholds thresholds;
};

struct SweepRow {
  double epsilon = 0.0;
  std::size_t n = 0;
  double cov_error = 0.0;
  double pdf_error = 0.0;  // NaN for patches other than two points
  double mean_norm = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double rank_correlation = 0.0;  // Spearman of (epsilon, cov_error)
};

SweepResult epsilon_sweep(const std::vector<double>& eps_list, std::size_t n, const SweepBase& base);

// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace lra
