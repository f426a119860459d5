#pragma once

#include <memory>
#include <vector>

#include "lra/kernel.hpp"

namespace lra {

// Uniform samples on [-half_range, half_range], 4-point Lagrange interpolation between
// nodes, tail_coefficient / t^2 beyond the range (zero tail for compact tables).
class KernelTable {
 public:
  KernelTable() = default;
  KernelTable(double grid_step, double half_range, std::vector<double> values, double tail_coefficient);

  double value(double t) const;
  double grid_step() const { return step_; }
  double half_range() const { return range_; }
  double tail_coefficient() const { return tail_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t node_count() const { return values_.size(); }
  double node(std::size_t i) const { return -range_ + static_cast<double>(i) * step_; }

 private:
  double step_ = 1.0;
  double range_ = 0.0;
  double inv_step_ = 1.0;
  double tail_ = 0.0;
  std::vector<double> values_;
};

// Near a kernel breakpoint b, H phi' behaves like (c1 x + c2 x^2) log|x| with x = t - b,
// c1 = jump(phi'') / pi and c2 = jump(phi''') / (2 pi).
struct SingularTerm {
  double at = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};

inline constexpr double kSingularCutoff = 0.25;

// (c1 x + c2 x^2) log|x| times a C^3 bump of radius kSingularCutoff.
double singular_part(const SingularTerm& s, double t);

struct FilteredKernelTable {
  KernelTable table;
  std::uint64_t kernel_fingerprint = 0;
  // Largest node-wise change between the two quadrature refinement levels.
  double refinement_change = 0.0;
  std::vector<SingularTerm> singular;
  // table minus the singular parts; interpolated within kSingularCutoff of a breakpoint
  KernelTable residual;
  double reach = 0.0;

  // Sets singular and rebuilds residual from table.
  void attach_singular_terms(std::vector<SingularTerm> terms);
  double value(double t) const;
};

std::vector<SingularTerm> singular_terms(const Kernel& k);

struct Autocorrelation {
  KernelTable table;
  double exact_support_radius = 0.0;
  // Pieces of phi'; value() integrates their products exactly.
  std::vector<Piece> derivative_pieces;
  double value(double t) const;
};

inline constexpr double kDefaultGridStep = 1e-3;
inline constexpr double kDefaultHalfRange = 24.0;

FilteredKernelTable build_filtered_kernel(const Kernel& k, double grid_step = kDefaultGridStep,
                                          double half_range = kDefaultHalfRange);
// Same as build_filtered_kernel, memoised per (kernel fingerprint, step, range).
std::shared_ptr<const FilteredKernelTable> filtered_kernel_cached(const Kernel& k, double grid_step = kDefaultGridStep,
                                                                  double half_range = kDefaultHalfRange);

// H phi' at a single point, by the same spectral quadrature the table uses.
double filtered_kernel_point(const Kernel& k, double t);

Autocorrelation build_autocorrelation(const Kernel& k, double grid_step = kDefaultGridStep);
std::shared_ptr<const Autocorrelation> autocorrelation_cached(const Kernel& k, double grid_step = kDefaultGridStep);

// (f * g)(t) = integral f(t+s) g(s) ds at table resolution, including tails when present.
double cross_correlate(const KernelTable& f, const KernelTable& g, double t);

}  // namespace lra
