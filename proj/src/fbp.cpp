#include "lra/fbp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "lra/error.hpp"

namespace lra {

double fbp_prefactor(const GridSpec& grid) {
  return grid.delta_alpha() / (4.0 * std::numbers::pi * grid.epsilon);
}

namespace {

void check_sinogram(const Sinogram& s, const GridSpec& g) {
  if (s.angle_count != g.angle_count() || s.detector_count != g.detector_count() ||
      s.values.size() != s.angle_count * s.detector_count)
    fail(ErrorCode::InvalidArgument, "sinogram dimensions do not match the grid");
}

// Detector index range touched from fractional position s, clipped to the detector.
std::pair<int, int> j_range(const GridSpec& g, double s_lo, double s_hi, double window) {
  if (window <= 0.0) return {g.detector_min_index, g.detector_max_index};
  const int lo = std::max(g.detector_min_index, static_cast<int>(std::ceil(s_lo - window)));
  const int hi = std::min(g.detector_max_index, static_cast<int>(std::floor(s_hi + window)));
  return {lo, hi};
}

}  // namespace

LocalReconstructor::LocalReconstructor(const GridSpec& grid, const LocalPatch& patch, const FilteredKernelTable& fk,
                                       double window)
    : grid_(grid), K_(patch.size()), prefactor_(fbp_prefactor(grid)) {
  if (patch.epsilon != grid.epsilon) fail(ErrorCode::InvalidArgument, "patch epsilon does not match grid epsilon");
  if (window < 0.0) fail(ErrorCode::InvalidArgument, "window must be >= 0");
  std::vector<double> shift(K_);
  for (int k = grid.angle_min_index; k <= grid.angle_max_index; ++k) {
    const double a = a_k_of(grid, patch.x0, k);
    const Vec2 dir = direction(grid.alpha(k));
    double lo = a, hi = a;
    for (std::size_t i = 0; i < K_; ++i) {
      shift[i] = a + dot(dir, patch.offsets[i]);
      lo = std::min(lo, shift[i]);
      hi = std::max(hi, shift[i]);
    }
    const auto [j0, j1] = j_range(grid, lo, hi, window);
    if (j1 < j0) continue;
    Row row{static_cast<std::uint32_t>(k - grid.angle_min_index),
            static_cast<std::uint32_t>(j0 - grid.detector_min_index), static_cast<std::uint32_t>(j1 - j0 + 1),
            weights_.size() / K_};
    for (int j = j0; j <= j1; ++j) {
      for (std::size_t i = 0; i < K_; ++i) {
        const double t = shift[i] - j;
        weights_.push_back(window > 0.0 && std::abs(t) > window ? 0.0 : fk.value(t));
      }
    }
    rows_.push_back(row);
  }
}

template <class Source>
void LocalReconstructor::accumulate(Source eta, double* out) const {
  double acc[16];
  std::vector<double> big;
  double* a = acc;
  if (K_ > 16) {
    big.assign(K_, 0.0);
    a = big.data();
  } else {
    std::fill(acc, acc + K_, 0.0);
  }
  for (const Row& r : rows_) {
    const double* w = weights_.data() + r.start * K_;
    for (std::uint32_t n = 0; n < r.count; ++n) {
      const double e = eta(r.k_pos, r.j_pos + n, r.start + n);
      for (std::size_t i = 0; i < K_; ++i) a[i] += w[i] * e;
      w += K_;
    }
  }
  for (std::size_t i = 0; i < K_; ++i) out[i] = prefactor_ * a[i];
}

void LocalReconstructor::apply(const Sinogram& s, double* out) const {
  check_sinogram(s, grid_);
  accumulate([&](std::uint32_t k, std::uint32_t j, std::size_t) { return s.at(k, j); }, out);
}

void LocalReconstructor::attach_noise(const VarianceField& field, Distribution d) {
  dist_ = d;
  scales_.assign(term_count(), 0.0);
  for (const Row& r : rows_) {
    const int k = static_cast<int>(r.k_pos) + grid_.angle_min_index;
    for (std::uint32_t n = 0; n < r.count; ++n) {
      const int j = static_cast<int>(r.j_pos + n) + grid_.detector_min_index;
      scales_[r.start + n] = noise_scale(d, entry_variance(grid_, field, k, j));
    }
  }
}

void LocalReconstructor::sample(std::uint64_t seed, double* out) const {
  if (scales_.size() != term_count()) fail(ErrorCode::InvalidArgument, "attach_noise must be called before sample");
  accumulate(
      [&](std::uint32_t k, std::uint32_t j, std::size_t t) {
        const double sd = scales_[t];
        return sd == 0.0 ? 0.0 : standard_variate(seed, k, j, dist_) * sd;
      },
      out);
}

ReconstructionResult reconstruct_local(const NoiseDraw& noise, const LocalPatch& patch, const GridSpec& grid,
                                       const FilteredKernelTable& fk, double window) {
  const LocalReconstructor rec(grid, patch, fk, window);
  ReconstructionResult r;
  r.values.resize(patch.size());
  rec.apply(noise.sinogram, r.values.data());
  r.offsets = patch.offsets;
  for (std::size_t i = 0; i < patch.size(); ++i) r.points.push_back(patch.physical(i));
  r.epsilon = grid.epsilon;
  r.seed = noise.seed;
  return r;
}

ReconstructionResult reconstruct_image(const Sinogram& sinogram, const Region& region, std::size_t resolution,
                                       const GridSpec& grid, const FilteredKernelTable& fk, double window,
                                       unsigned threads) {
  check_sinogram(sinogram, grid);
  if (resolution == 0) fail(ErrorCode::InvalidArgument, "image resolution must be positive");
  if (!(region.x_max > region.x_min) || !(region.y_max > region.y_min))
    fail(ErrorCode::InvalidArgument, "image region is empty");
  const double tol = 1e-12 * grid.P;
  if (region.x_min < -grid.P - tol || region.x_max > grid.P + tol || region.y_min < -grid.P - tol ||
      region.y_max > grid.P + tol)
    fail(ErrorCode::InvalidArgument, "image region extends beyond the detector coverage [-P, P]^2");
  if (window < 0.0) fail(ErrorCode::InvalidArgument, "window must be >= 0");

  ReconstructionResult r;
  r.width = r.height = resolution;
  r.epsilon = grid.epsilon;
  const double dx = (region.x_max - region.x_min) / static_cast<double>(resolution);
  const double dy = (region.y_max - region.y_min) / static_cast<double>(resolution);
  for (std::size_t row = 0; row < resolution; ++row)
    for (std::size_t col = 0; col < resolution; ++col)
      r.points.push_back({region.x_min + (static_cast<double>(col) + 0.5) * dx,
                          region.y_max - (static_cast<double>(row) + 0.5) * dy});
  r.values.assign(r.points.size(), 0.0);

  std::vector<Vec2> dirs;
  for (int k = grid.angle_min_index; k <= grid.angle_max_index; ++k) dirs.push_back(direction(grid.alpha(k)));
  const double pre = fbp_prefactor(grid);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      double acc = 0.0;
      for (std::size_t kp = 0; kp < dirs.size(); ++kp) {
        const double s = (dot(dirs[kp], r.points[p]) - grid.p_bar) / grid.epsilon;
        const auto [j0, j1] = j_range(grid, s, s, window);
        const double* row = sinogram.values.data() + kp * sinogram.detector_count;
        for (int j = j0; j <= j1; ++j) acc += fk.value(s - j) * row[j - grid.detector_min_index];
      }
      r.values[p] = pre * acc;
    }
  };
  const std::size_t n = r.points.size();
  const unsigned T = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < T; ++t) pool.emplace_back(work, n * t / T, n * (t + 1) / T);
  work(0, n / T);
  for (auto& th : pool) th.join();
  return r;
}

Sinogram radon_disk(Vec2 center, double radius, const GridSpec& grid) {
  if (!(radius > 0.0)) fail(ErrorCode::InvalidArgument, "disk radius must be positive");
  if (std::hypot(center.x, center.y) + radius > grid.P * (1.0 + 1e-12))
    fail(ErrorCode::InvalidArgument, "disk must lie inside the detector coverage");
  Sinogram s(grid);
  for (int k = grid.angle_min_index; k <= grid.angle_max_index; ++k) {
    const double c = dot(direction(grid.alpha(k)), center);
    for (int j = grid.detector_min_index; j <= grid.detector_max_index; ++j) {
      const double d = c - grid.p(j);
      s.at(static_cast<std::size_t>(k - grid.angle_min_index), static_cast<std::size_t>(j - grid.detector_min_index)) =
          std::abs(d) < radius ? 2.0 * std::sqrt(radius * radius - d * d) : 0.0;
    }
  }
  return s;
}

}  // namespace lra
