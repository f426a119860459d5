#include "lra/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lra/error.hpp"
#include "lra/fbp.hpp"

namespace lra {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_nodes(int nodes) {
  if (nodes < 256) fail(ErrorCode::InvalidArgument, "quadrature needs at least 256 nodes");
}

void check_theta(const std::vector<Vec2>& offsets, const std::vector<double>& theta) {
  if (offsets.empty() || theta.size() != offsets.size())
    fail(ErrorCode::InvalidArgument, "theta must have one weight per offset");
  if (std::all_of(theta.begin(), theta.end(), [](double t) { return t == 0.0; }))
    fail(ErrorCode::InvalidArgument, "theta must be nonzero");
  LocalPatch check({0.0, 0.0}, offsets, 1.0);
}

// c^2 sum_{|j|>J} (s - j)^{-p}, bounded by integrals from J + 1/2; infinite when the
// truncated terms are not all in the c/t^2 regime.
double tail_bound(double s, int J, double c, double range, int p) {
  const double lo = J + 0.5 - std::abs(s);
  if (lo < range + 1.0) return std::numeric_limits<double>::infinity();
  const double hi = J + 0.5 + std::abs(s);
  const double q = p - 1.0;
  return 1.001 * std::pow(std::abs(c), p / 2.0) * (std::pow(lo, -q) + std::pow(hi, -q)) / q;
}

}  // namespace

double predicted_cov_scalar(Vec2 v, Vec2 x0, const VarianceField& field, const Autocorrelation& ac, double kappa,
                            int nodes) {
  check_nodes(nodes);
  double acc = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double a = kTwoPi * i / nodes;
    const Vec2 d = direction(a);
    acc += field(a, dot(d, x0)) * ac.value(dot(d, v));
  }
  const double f = kappa / (4.0 * std::numbers::pi);
  return f * f * acc * kTwoPi / nodes;
}

double sigma2_trajectory_integral(Vec2 x0, const VarianceField& field, int nodes) {
  check_nodes(nodes);
  double acc = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double a = kTwoPi * i / nodes;
    acc += field(a, dot(direction(a), x0));
  }
  return acc * kTwoPi / nodes;
}

PredictedCovariance predicted_cov_matrix(const LocalPatch& patch, const VarianceField& field, const Autocorrelation& ac,
                                         double kappa, int nodes) {
  check_nodes(nodes);
  PredictedCovariance p;
  p.x0 = patch.x0;
  p.offsets = patch.offsets;
  p.nodes = nodes;
  const std::size_t K = patch.size();
  p.matrix.resize(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(K));
  p.c0 = predicted_cov_scalar({0.0, 0.0}, patch.x0, field, ac, kappa, nodes);
  p.quadrature_error = std::abs(p.c0 - predicted_cov_scalar({0.0, 0.0}, patch.x0, field, ac, kappa, nodes / 2));
  for (std::size_t i = 0; i < K; ++i) {
    p.matrix(i, i) = p.c0;
    for (std::size_t j = i + 1; j < K; ++j) {
      const Vec2 v = patch.offsets[i] - patch.offsets[j];
      const double c = predicted_cov_scalar(v, patch.x0, field, ac, kappa, nodes);
      const double coarse = predicted_cov_scalar(v, patch.x0, field, ac, kappa, nodes / 2);
      p.quadrature_error = std::max(p.quadrature_error, std::abs(c - coarse));
      p.matrix(i, j) = p.matrix(j, i) = c;
    }
  }
  return p;
}

bool is_psd(const Eigen::MatrixXd& m, double rel_tol) {
  if (m.rows() == 0) return true;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double top = std::max(ev.maxCoeff(), 0.0);
  return ev.minCoeff() >= -rel_tol * top;
}

LatticeSumProbe psi_sum(double a, double b, const FilteredKernelTable& fk, int J) {
  if (J < 50) fail(ErrorCode::InvalidArgument, "lattice truncation J must be at least 50");
  LatticeSumProbe p;
  p.a = a;
  p.b = b;
  p.J = J;
  for (int j = -J; j <= J; ++j) {
    const double w = std::abs(fk.value(a - j + b));
    p.psi_value += w * w;
    p.Psi_value += w * w * w;
  }
  const double c = fk.table.tail_coefficient();
  const double R = fk.table.half_range();
  p.psi_tail_bound = tail_bound(a + b, J, c, R, 4);
  p.Psi_tail_bound = tail_bound(a + b, J, c, R, 6);
  return p;
}

double big_psi_sum(double a, double b, const FilteredKernelTable& fk, int J) { return psi_sum(a, b, fk, J).Psi_value; }

double d_epsilon(const GridSpec& grid, Vec2 x0, Vec2 chx, const VarianceField& field, const FilteredKernelTable& fk,
                 int J) {
  double acc = 0.0;
  for (int k = grid.angle_min_index; k <= grid.angle_max_index; ++k) {
    const double alpha = grid.alpha(k);
    const Vec2 d = direction(alpha);
    const double s2 = field(alpha, dot(d, x0));
    if (s2 == 0.0) continue;
    // psi is 1-periodic in a, so only a_k mod 1 matters
    const double a = a_k_of(grid, x0, k);
    acc += psi_sum(a - std::floor(a), dot(d, chx), fk, J).psi_value * s2;
  }
  return grid.delta_alpha() * acc;
}

double d_epsilon_limit(Vec2 x0, const VarianceField& field, double parseval_constant, int nodes) {
  return parseval_constant * sigma2_trajectory_integral(x0, field, nodes);
}

double lyapunov_ratio_multi(const GridSpec& grid, Vec2 x0, const std::vector<Vec2>& offsets,
                            const std::vector<double>& theta, const VarianceField& field,
                            const FilteredKernelTable& fk, Distribution d) {
  check_theta(offsets, theta);
  double num = 0.0, den = 0.0;
  std::vector<double> shift(offsets.size());
  for (int k = grid.angle_min_index; k <= grid.angle_max_index; ++k) {
    const double a = a_k_of(grid, x0, k);
    const Vec2 dir = direction(grid.alpha(k));
    for (std::size_t i = 0; i < offsets.size(); ++i) shift[i] = a + dot(dir, offsets[i]);
    for (int j = grid.detector_min_index; j <= grid.detector_max_index; ++j) {
      const double v = entry_variance(grid, field, k, j);
      if (v == 0.0) continue;
      double w = 0.0;
      for (std::size_t i = 0; i < offsets.size(); ++i) w += theta[i] * fk.value(shift[i] - j);
      const double aw = std::abs(w);
      num += aw * aw * aw * abs_third_moment(d, v);
      den += aw * aw * v;
    }
  }
  if (!(den > 0.0)) fail(ErrorCode::Domain, "Lyapunov denominator vanishes (sigma^2 is zero along the sum)");
  return num / std::pow(den, 1.5);
}

double lyapunov_ratio(const GridSpec& grid, Vec2 x0, Vec2 chx, const VarianceField& field,
                      const FilteredKernelTable& fk, Distribution d) {
  return lyapunov_ratio_multi(grid, x0, {chx}, {1.0}, field, fk, d);
}

SecondMoment second_moment_multi(const GridSpec& grid, Vec2 x0, const std::vector<Vec2>& offsets,
                                 const std::vector<double>& theta, const VarianceField& field,
                                 const FilteredKernelTable& fk) {
  check_theta(offsets, theta);
  SecondMoment m;
  std::vector<double> shift(offsets.size());
  for (int k = grid.angle_min_index; k <= grid.angle_max_index; ++k) {
    const double alpha = grid.alpha(k);
    const double a = a_k_of(grid, x0, k);
    const Vec2 dir = direction(alpha);
    const double frozen = field(alpha, dot(dir, x0));
    for (std::size_t i = 0; i < offsets.size(); ++i) shift[i] = a + dot(dir, offsets[i]);
    double ex = 0.0, fr = 0.0;
    for (int j = grid.detector_min_index; j <= grid.detector_max_index; ++j) {
      double w = 0.0;
      for (std::size_t i = 0; i < offsets.size(); ++i) w += theta[i] * fk.value(shift[i] - j);
      ex += w * w * field(alpha, grid.p(j));
      fr += w * w;
    }
    m.exact += ex;
    m.frozen += fr * frozen;
  }
  const double pre = fbp_prefactor(grid);
  const double scale = pre * pre * grid.delta_alpha();
  m.exact *= scale;
  m.frozen *= scale;
  return m;
}

Eigen::MatrixXd discrete_covariance(const GridSpec& grid, Vec2 x0, const std::vector<Vec2>& offsets,
                                    const VarianceField& field, const FilteredKernelTable& fk, double window) {
  LocalPatch check(x0, offsets, grid.epsilon);
  const std::size_t K = offsets.size();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(K));
  std::vector<double> w(K);
  const double pre = fbp_prefactor(grid);
  for (int k = grid.angle_min_index; k <= grid.angle_max_index; ++k) {
    const double a = a_k_of(grid, x0, k);
    const Vec2 dir = direction(grid.alpha(k));
    for (int j = grid.detector_min_index; j <= grid.detector_max_index; ++j) {
      bool any = false;
      for (std::size_t i = 0; i < K; ++i) {
        const double t = a + dot(dir, offsets[i]) - j;
        w[i] = window > 0.0 && std::abs(t) > window ? 0.0 : fk.value(t);
        any = any || w[i] != 0.0;
      }
      if (!any) continue;
      const double v = entry_variance(grid, field, k, j);
      for (std::size_t r = 0; r < K; ++r)
        for (std::size_t s = 0; s < K; ++s) c(r, s) += w[r] * w[s] * v;
    }
  }
  return pre * pre * c;
}

PowerFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) fail(ErrorCode::InvalidArgument, "fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) fail(ErrorCode::Domain, "log-log fit needs positive data");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  PowerFit f;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

}  // namespace lra
