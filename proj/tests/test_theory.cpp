#include <doctest.h>

#include <random>

#include "lra/error.hpp"
#include "lra/kernel_checks.hpp"
#include "lra/theory.hpp"
#include "lra/variance_field.hpp"
#include "oracles.hpp"

using namespace lra;

namespace {
constexpr double kTwoPi = 2.0 * oracle::kPi;
const Vec2 kX0{0.3535533905932738, 0.4330127018922193};
const Vec2 kChi{0.7071067811865476, 0.7071067811865476};

const Kernel& keys() {
  static const Kernel k = make_keys_kernel();
  return k;
}
const FilteredKernelTable& fk() { return *filtered_kernel_cached(keys()); }
const Autocorrelation& ac() { return *autocorrelation_cached(keys()); }

double sigma2(double a, double p) { return (1.0 + 0.5 * std::sin(a)) * (1.0 + 0.5 * std::sin(oracle::kPi * p)) / 3.0; }

// trapezoid rule written against the test-side autocorrelation
double covariance_oracle(Vec2 v, int nodes) {
  static const auto pieces = oracle::keys_pieces();
  double s = 0.0;
  for (int n = 0; n < nodes; ++n) {
    const double a = kTwoPi * n / nodes, c = std::cos(a), d = std::sin(a);
    s += sigma2(a, c * kX0.x + d * kX0.y) * oracle::derivative_autocorrelation(pieces, c * v.x + d * v.y);
  }
  const double pre = kTwoPi / (4.0 * oracle::kPi);
  return pre * pre * s * kTwoPi / nodes;
}
}  // namespace

TEST_CASE("covariance at zero factorizes") {
  const auto f = make_reference_sigma2();
  const double c0 = predicted_cov_scalar({0.0, 0.0}, kX0, f, ac(), kTwoPi);
  const double fact = 0.25 * ac().value(0.0) * sigma2_trajectory_integral(kX0, f);
  CHECK(std::abs(c0 - fact) < 1e-10);
}

TEST_CASE("reference covariance values") {
  const auto f = make_reference_sigma2();
  const double c0 = predicted_cov_scalar({0.0, 0.0}, kX0, f, ac(), kTwoPi);
  CHECK(c0 == doctest::Approx(1.36).epsilon(0.01));
  CHECK(std::abs(predicted_cov_scalar(5.0 * kChi, kX0, f, ac(), kTwoPi) + 0.002) <= 0.003);
  const PredictedCovariance near =
      predicted_cov_matrix(LocalPatch(kX0, {{0.0, 0.0}, 0.5 * kChi}, 1e-3), f, ac(), kTwoPi);
  CHECK(near.matrix(0, 0) == doctest::Approx(1.36).epsilon(0.01));
  CHECK(near.matrix(1, 1) == doctest::Approx(1.36).epsilon(0.01));
  CHECK(near.matrix(0, 1) == doctest::Approx(0.86).epsilon(0.01));
  CHECK(near.matrix(1, 0) == near.matrix(0, 1));
  CHECK(near.quadrature_error < 1e-10);
  CHECK(near.c0 == c0);
}

TEST_CASE("predictor against an independent quadrature") {
  const auto f = make_reference_sigma2();
  for (Vec2 v : {Vec2{0.0, 0.0}, 0.5 * kChi, Vec2{1.7, -0.4}, 5.0 * kChi})
    CHECK(std::abs(predicted_cov_scalar(v, kX0, f, ac(), kTwoPi) - covariance_oracle(v, 1024)) < 1e-9);
}

TEST_CASE("predictor symmetry and bounds") {
  const auto f = make_reference_sigma2();
  const auto flat = VarianceField::constant(0.5);
  const double c0 = predicted_cov_scalar({0.0, 0.0}, kX0, f, ac(), kTwoPi, 512);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  for (int i = 0; i < 100; ++i) {
    const Vec2 v{u(rng), u(rng)};
    const double a = predicted_cov_scalar(v, kX0, f, ac(), kTwoPi, 512);
    REQUIRE(a == doctest::Approx(predicted_cov_scalar({-v.x, -v.y}, kX0, f, ac(), kTwoPi, 512)).epsilon(1e-12));
    REQUIRE(std::abs(a) <= c0);
    // a constant field gives a radial covariance
    const double r = std::hypot(v.x, v.y);
    REQUIRE(std::abs(predicted_cov_scalar(v, kX0, flat, ac(), kTwoPi, 4096) -
                     predicted_cov_scalar({r, 0.0}, kX0, flat, ac(), kTwoPi, 4096)) < 1e-6);
  }
}

TEST_CASE("covariance matrices") {
  const auto f = make_reference_sigma2();
  const PredictedCovariance one = predicted_cov_matrix(LocalPatch(kX0, {{0.3, 0.1}}, 1e-3), f, ac(), kTwoPi);
  CHECK(one.matrix.rows() == 1);
  CHECK(one.matrix(0, 0) == doctest::Approx(one.c0).epsilon(1e-14));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Vec2> off;
    for (int i = 0; i < 6; ++i) off.push_back({u(rng), u(rng)});
    const PredictedCovariance m = predicted_cov_matrix(LocalPatch(kX0, off, 1e-3), f, ac(), kTwoPi, 1024);
    REQUIRE(is_psd(m.matrix));
    REQUIRE((m.matrix - m.matrix.transpose()).norm() == 0.0);
    std::vector<Vec2> moved;
    for (const Vec2& o : off) moved.push_back(o + Vec2{0.37, -1.1});
    const PredictedCovariance n = predicted_cov_matrix(LocalPatch(kX0, moved, 1e-3), f, ac(), kTwoPi, 1024);
    REQUIRE((m.matrix - n.matrix).cwiseAbs().maxCoeff() < 1e-12);
  }
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;
  CHECK_FALSE(is_psd(bad));
}

TEST_CASE("lattice sums") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int i = 0; i < 100; ++i) {
    const double a = u(rng), b = u(rng) / 10.0;
    const LatticeSumProbe p0 = psi_sum(a, b, fk()), p1 = psi_sum(a + 1.0, b, fk());
    REQUIRE(p0.psi_value >= 0.0);
    REQUIRE(p0.Psi_value >= 0.0);
    REQUIRE(std::abs(p1.psi_value - p0.psi_value) <= p0.psi_tail_bound + p1.psi_tail_bound + 1e-12);
    REQUIRE(std::abs(p1.Psi_value - p0.Psi_value) <= p0.Psi_tail_bound + p1.Psi_tail_bound + 1e-12);
    const double big = big_psi_sum(a, b, fk(), 400);
    REQUIRE(std::abs(big - p0.Psi_value) <= p0.Psi_tail_bound + 1e-12);
    REQUIRE(std::isfinite(big));
  }
  CHECK_THROWS_AS(psi_sum(0.0, 0.0, fk(), 10), Error);
}

TEST_CASE("mean of psi over one period") {
  const double C = parseval_constant(keys());
  for (double b : {0.0, 0.17, -0.5, 1.3, 2.71}) {
    const int n = 2000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += psi_sum((i + 0.5) / n, b, fk()).psi_value;
    CHECK(std::abs(s / n - C) < 1e-4);
  }
}

TEST_CASE("d_epsilon") {
  const GridSpec g = build_grid(1.0 / 200, kTwoPi, std::nullopt, 1.0);
  CHECK(d_epsilon(g, kX0, {0.0, 0.0}, VarianceField::constant(0.0), fk()) == 0.0);
  const auto f = make_reference_sigma2();
  const double C = parseval_constant(keys());
  const double limit = d_epsilon_limit(kX0, f, C);
  CHECK(limit == doctest::Approx(C * sigma2_trajectory_integral(kX0, f)).epsilon(1e-14));
  CHECK(limit > 0.0);
  const double d = d_epsilon(g, kX0, {0.0, 0.0}, f, fk());
  CHECK(d > 0.0);
  CHECK(std::abs(d - limit) / limit < 0.2);
}

TEST_CASE("lyapunov ratio") {
  const auto f = make_reference_sigma2();
  const GridSpec g = build_grid(1e-3, kTwoPi, std::nullopt, 1.0);
  const double r = lyapunov_ratio(g, kX0, {0.0, 0.0}, f, fk(), Distribution::Uniform);
  CHECK(std::isfinite(r));
  CHECK(r > 0.0);
  const GridSpec h = build_grid(1.0 / 100, kTwoPi, std::nullopt, 1.0);
  const double a = lyapunov_ratio(h, kX0, {0.2, 0.1}, VarianceField::constant(0.4), fk(), Distribution::Gaussian);
  const double b = lyapunov_ratio(h, kX0, {0.2, 0.1}, VarianceField::constant(0.8), fk(), Distribution::Gaussian);
  CHECK(a == doctest::Approx(b).epsilon(1e-13));
  for (Distribution d : {Distribution::Uniform, Distribution::Gaussian})
    CHECK(lyapunov_ratio_multi(h, kX0, {{0.2, 0.1}}, {1.0}, f, fk(), d) ==
          lyapunov_ratio(h, kX0, {0.2, 0.1}, f, fk(), d));
  CHECK_THROWS_AS(lyapunov_ratio(h, kX0, {0.0, 0.0}, VarianceField::constant(0.0), fk(), Distribution::Uniform),
                  Error);
  CHECK_THROWS_AS(lyapunov_ratio_multi(h, kX0, {{0.0, 0.0}, kChi}, {0.0, 0.0}, f, fk(), Distribution::Uniform), Error);
}

TEST_CASE("lyapunov rate for gaussian noise") {
  const auto f = make_reference_sigma2();
  std::vector<double> eps, ratio;
  for (int m : {50, 100, 200, 400, 800, 1600}) {
    const GridSpec g = build_grid(1.0 / m, kTwoPi, std::nullopt, 1.0);
    eps.push_back(g.epsilon);
    ratio.push_back(lyapunov_ratio(g, kX0, {0.0, 0.0}, f, fk(), Distribution::Gaussian));
  }
  const PowerFit fit = fit_loglog(eps, ratio);
  CHECK(fit.slope >= 0.35);
  CHECK(fit.slope <= 0.65);
}

TEST_CASE("second moments") {
  const auto f = make_reference_sigma2();
  const std::vector<Vec2> off{{0.0, 0.0}, 0.5 * kChi};
  const GridSpec g = build_grid(1e-3, kTwoPi, std::nullopt, 1.0);
  const SecondMoment z = second_moment_multi(g, kX0, off, {1.0, -1.0}, VarianceField::constant(0.0), fk());
  CHECK(z.exact == 0.0);
  CHECK(z.frozen == 0.0);
  const SecondMoment m = second_moment_multi(g, kX0, off, {1.0, -1.0}, f, fk());
  const PredictedCovariance pred = predicted_cov_matrix(LocalPatch(kX0, off, g.epsilon), f, ac(), kTwoPi);
  const double q = pred.matrix(0, 0) + pred.matrix(1, 1) - 2.0 * pred.matrix(0, 1);
  CHECK(std::abs(m.exact / q - 1.0) < 0.02);

  const GridSpec h = build_grid(1.0 / 100, kTwoPi, std::nullopt, 1.0);
  const Eigen::MatrixXd dc = discrete_covariance(h, kX0, off, f, fk());
  CHECK(dc(0, 0) == doctest::Approx(second_moment_multi(h, kX0, off, {1.0, 0.0}, f, fk()).exact).epsilon(1e-12));
  CHECK(dc(1, 1) == doctest::Approx(second_moment_multi(h, kX0, off, {0.0, 1.0}, f, fk()).exact).epsilon(1e-12));
  const double mixed = second_moment_multi(h, kX0, off, {1.0, 1.0}, f, fk()).exact;
  CHECK(dc(0, 1) == doctest::Approx(0.5 * (mixed - dc(0, 0) - dc(1, 1))).epsilon(1e-10));
}

TEST_CASE("denominators stay away from zero") {
  const auto f = make_reference_sigma2();
  const std::vector<Vec2> off{{0.0, 0.0}, 0.5 * kChi};
  const GridSpec g = build_grid(1.0 / 200, kTwoPi, std::nullopt, 1.0);
  const Eigen::MatrixXd dc = discrete_covariance(g, kX0, off, f, fk());
  const double floor = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(dc).eigenvalues().minCoeff();
  CHECK(floor > 0.1);
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n;
  for (int i = 0; i < 20; ++i) {
    double t0 = n(rng), t1 = n(rng);
    const double norm = std::hypot(t0, t1);
    t0 /= norm;
    t1 /= norm;
    REQUIRE(second_moment_multi(g, kX0, off, {t0, t1}, f, fk()).exact >= floor * (1.0 - 1e-9));
  }
}

TEST_CASE("power fits") {
  std::vector<double> x{0.1, 0.2, 0.4, 0.8}, y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 0.7));
  const PowerFit p = fit_loglog(x, y);
  CHECK(p.slope == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(std::exp(p.intercept) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK_THROWS_AS(fit_loglog({1.0}, {1.0}), Error);
  CHECK_THROWS_AS(fit_loglog({1.0, 2.0}, {1.0, -1.0}), Error);
}
