#include "lra/ensemble.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <thread>

#include "lra/error.hpp"
#include "lra/fbp.hpp"

namespace lra {

namespace {

std::string fingerprint(const GridSpec& g, const LocalPatch& patch, const VarianceField& field, Distribution d,
                        std::size_t n, const EnsembleOptions& o) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&](std::uint64_t w) {
    for (int i = 0; i < 8; ++i) {
      h ^= (w >> (8 * i)) & 0xffu;
      h *= 0x100000001b3ull;
    }
  };
  auto mixd = [&](double v) { mix(std::bit_cast<std::uint64_t>(v)); };
  mixd(g.epsilon);
  mixd(g.kappa);
  mixd(g.p_bar);
  mixd(g.P);
  mix(static_cast<std::uint64_t>(g.convention));
  mixd(patch.x0.x);
  mixd(patch.x0.y);
  for (const Vec2& v : patch.offsets) {
    mixd(v.x);
    mixd(v.y);
  }
  mix(static_cast<std::uint64_t>(field.kind()));
  mixd(field.scale());
  mixd(field.amp_alpha());
  mixd(field.amp_p());
  mixd(field.freq_p());
  for (double v : field.values()) mixd(v);
  mix(static_cast<std::uint64_t>(d));
  mix(n);
  mixd(o.window);
  std::ostringstream s;
  s << std::hex << h;
  std::string out = s.str();
  return std::string(16 - out.size(), '0') + out;
}

int bin_index(double v, double half_width, int bins) {
  const double w = 2.0 * half_width / bins;
  const double x = std::floor((v + half_width) / w);
  if (!(x >= 0.0)) return 0;
  if (x >= bins) return bins - 1;
  return static_cast<int>(x);
}

}  // namespace

EnsembleStats run_ensemble(std::size_t n, const GridSpec& grid, const LocalPatch& patch, const VarianceField& field,
                           Distribution d, const FilteredKernelTable& fk, std::uint64_t master_seed,
                           const EnsembleOptions& options) {
  EnsembleStats s = run_ensemble_seeded(
      n, grid, patch, field, d, fk, [master_seed](std::uint64_t i) { return derive_sample_seed(master_seed, i); },
      options);
  s.master_seed = master_seed;
  return s;
}

EnsembleStats run_ensemble_seeded(std::size_t n, const GridSpec& grid, const LocalPatch& patch,
                                  const VarianceField& field, Distribution d, const FilteredKernelTable& fk,
                                  const SeedSchedule& seeds, const EnsembleOptions& options) {
  if (n < 2) fail(ErrorCode::InvalidArgument, "ensemble needs at least 2 samples");
  if (options.histogram.bins < 1) fail(ErrorCode::InvalidArgument, "histogram needs at least one bin");
  LocalReconstructor rec(grid, patch, fk, options.window);
  rec.attach_noise(field, d);
  const std::size_t K = patch.size();

  std::vector<double> samples(n * K);
  unsigned T = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  T = static_cast<unsigned>(std::min<std::size_t>(T, n));
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) rec.sample(seeds(s), samples.data() + s * K);
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < T; ++t) pool.emplace_back(work, n * t / T, n * (t + 1) / T);
  work(0, n / T);
  for (auto& th : pool) th.join();

  EnsembleStats st;
  st.n_samples = n;
  st.config_fingerprint = fingerprint(grid, patch, field, d, n, options);
  st.sample_mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(K));
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t i = 0; i < K; ++i) st.sample_mean(i) += samples[s * K + i];
  st.sample_mean /= static_cast<double>(n);
  st.sample_cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(K));
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t i = 0; i < K; ++i) {
      const double di = samples[s * K + i] - st.sample_mean(i);
      for (std::size_t j = i; j < K; ++j) st.sample_cov(i, j) += di * (samples[s * K + j] - st.sample_mean(j));
    }
  st.sample_cov /= static_cast<double>(n - 1);
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = 0; j < i; ++j) st.sample_cov(i, j) = st.sample_cov(j, i);

  if (K == 2) {
    Histogram2D h;
    h.bins = options.histogram.bins;
    h.half_width = options.histogram.half_width;
    if (!(h.half_width > 0.0)) h.half_width = 4.0 * std::sqrt(std::max(st.sample_cov(0, 0), st.sample_cov(1, 1)));
    if (!(h.half_width > 0.0)) h.half_width = 1.0;
    h.counts.assign(static_cast<std::size_t>(h.bins) * h.bins, 0);
    for (std::size_t s = 0; s < n; ++s) {
      const int ix = bin_index(samples[s * 2], h.half_width, h.bins);
      const int iy = bin_index(samples[s * 2 + 1], h.half_width, h.bins);
      ++h.counts[static_cast<std::size_t>(iy) * h.bins + ix];
    }
    st.histogram = std::move(h);
  }
  return st;
}

std::vector<double> gaussian_pdf_on_grid(const Eigen::MatrixXd& cov, int bins, double half_width) {
  if (cov.rows() != 2 || cov.cols() != 2) fail(ErrorCode::InvalidArgument, "pdf grid needs a 2x2 covariance");
  if (bins < 1 || !(half_width > 0.0)) fail(ErrorCode::InvalidArgument, "pdf grid needs bins >= 1 and a positive range");
  const double det = cov(0, 0) * cov(1, 1) - cov(0, 1) * cov(1, 0);
  if (!(det > 1e-14 * cov.squaredNorm())) fail(ErrorCode::Domain, "covariance is singular");
  const Eigen::Matrix2d inv = Eigen::Matrix2d(cov).inverse();
  const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(det));
  const double w = 2.0 * half_width / bins;
  std::vector<double> out(static_cast<std::size_t>(bins) * bins);
  for (int iy = 0; iy < bins; ++iy)
    for (int ix = 0; ix < bins; ++ix) {
      const Eigen::Vector2d x(-half_width + (ix + 0.5) * w, -half_width + (iy + 0.5) * w);
      out[static_cast<std::size_t>(iy) * bins + ix] = norm * std::exp(-0.5 * x.dot(inv * x));
    }
  return out;
}

std::vector<double> gaussian_pdf_on_grid(const PredictedCovariance& pred, int bins, double half_width) {
  return gaussian_pdf_on_grid(pred.matrix, bins, half_width);
}

std::vector<double> histogram_density(const Histogram2D& h, std::size_t n) {
  const double w = h.bin_width();
  std::vector<double> out(h.counts.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<double>(h.counts[i]) / (static_cast<double>(n) * w * w);
  return out;
}

ComparisonReport compare(const EnsembleStats& stats, const Eigen::MatrixXd& pred, const Thresholds& thresholds) {
  if (pred.rows() != stats.sample_cov.rows() || pred.cols() != stats.sample_cov.cols())
    fail(ErrorCode::InvalidArgument, "prediction and ensemble dimensions differ");
  ComparisonReport r;
  const double ref = stats.sample_cov.norm();
  r.cov_error_frobenius = ref > 0.0 ? (pred - stats.sample_cov).norm() / ref
                                    : ((pred - stats.sample_cov).norm() == 0.0 ? 0.0
                                                                                : std::numeric_limits<double>::infinity());
  r.cov_pass = r.cov_error_frobenius <= thresholds.cov_error;
  r.mean_norm = stats.sample_mean.norm();
  r.mean_bound = 4.0 * std::sqrt(pred.diagonal().maxCoeff() / static_cast<double>(stats.n_samples));
  r.mean_pass = stats.sample_mean.cwiseAbs().maxCoeff() <= r.mean_bound;
  if (stats.histogram && pred.rows() == 2) {
    const Histogram2D& h = *stats.histogram;
    const std::vector<double> po = histogram_density(h, stats.n_samples);
    const std::vector<double> p = gaussian_pdf_on_grid(pred, h.bins, h.half_width);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < po.size(); ++i) {
      num += (po[i] - p[i]) * (po[i] - p[i]);
      den += po[i] * po[i];
    }
    r.pdf_error_l2 = den > 0.0 ? std::sqrt(num / den) : std::numeric_limits<double>::infinity();
    r.pdf_pass = *r.pdf_error_l2 <= thresholds.pdf_error;
  }
  return r;
}

ComparisonReport compare(const EnsembleStats& stats, const PredictedCovariance& pred, const Thresholds& thresholds) {
  return compare(stats, pred.matrix, thresholds);
}

SweepResult epsilon_sweep(const std::vector<double>& eps_list, std::size_t n, const SweepBase& base) {
  if (!base.field || !base.fk || !base.prediction) fail(ErrorCode::InvalidArgument, "sweep base is incomplete");
  SweepResult out;
  std::vector<double> eps, err;
  for (double e : eps_list) {
    const GridSpec grid = build_grid(e, base.kappa, std::nullopt, base.P, base.convention);
    const LocalPatch patch(base.x0, base.offsets, e);
    EnsembleOptions opt = base.options;
    if (!(opt.histogram.half_width > 0.0)) opt.histogram.half_width = 4.0 * std::sqrt(base.prediction->c0);
    const EnsembleStats st = run_ensemble(n, grid, patch, *base.field, base.distribution, *base.fk, base.master_seed, opt);
    const ComparisonReport c = compare(st, *base.prediction, base.thresholds);
    out.rows.push_back({e, n, c.cov_error_frobenius, c.pdf_error_l2.value_or(std::nan("")), c.mean_norm});
    eps.push_back(e);
    err.push_back(c.cov_error_frobenius);
  }
  out.rank_correlation = eps.size() >= 2 ? spearman(eps, err) : std::nan("");
  return out;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) fail(ErrorCode::InvalidArgument, "rank correlation needs two equal series");
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t m = i; m <= j; ++m) r[idx[m]] = avg;
      i = j + 1;
    }
    return r;
  };
  const std::vector<double> rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace lra
