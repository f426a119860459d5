#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <random>

#include "lra/assumptions.hpp"
#include "lra/error.hpp"
#include "lra/geometry.hpp"
#include "lra/variance_field.hpp"
#include "oracles.hpp"

using namespace lra;

namespace {
const Vec2 kX0{0.3535533905932738, 0.4330127018922193};
constexpr double kTwoPi = 2.0 * oracle::kPi;
}  // namespace

TEST_CASE("grid for the reference experiment") {
  const GridSpec g = build_grid(1e-3, kTwoPi, std::nullopt, 1.0);
  CHECK(g.angle_count() == 1000);
  CHECK(g.detector_count() == 2001);
  CHECK(g.p_bar == doctest::Approx(-1.001).epsilon(1e-15));
  CHECK(g.p(g.detector_min_index) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(g.p(g.detector_max_index) == doctest::Approx(1.0).epsilon(1e-12));
  for (int k = g.angle_min_index; k <= g.angle_max_index; k += 97)
    CHECK(g.alpha(k) == doctest::Approx(kTwoPi * k / 1000.0).epsilon(1e-14));
  CHECK(g.alpha(g.angle_max_index) == doctest::Approx(kTwoPi).epsilon(1e-14));
}

TEST_CASE("coarseness guard") {
  CHECK_THROWS_AS(build_grid(0.5, kTwoPi, std::nullopt, 1.0), Error);
  CHECK_THROWS_AS(build_grid(-1e-3, kTwoPi, std::nullopt, 1.0), Error);
  CHECK_NOTHROW(build_grid(0.125, kTwoPi, std::nullopt, 1.0));
}

TEST_CASE("kappa is stored exactly") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ue(1e-4, 0.1), uk(0.5, 7.0);
  for (int i = 0; i < 100; ++i) {
    const double e = ue(rng), k = uk(rng);
    if (k * e > 0.75) continue;
    const GridSpec g = build_grid(e, k, 0.0, 1.0);
    REQUIRE(g.kappa == k);
    REQUIRE(g.delta_alpha() / g.epsilon == doctest::Approx(k).epsilon(4e-16));
  }
}

TEST_CASE("grids are reproducible") {
  const GridSpec a = build_grid(1.0 / 300, kTwoPi, std::nullopt, 1.0, AngleConvention::Centered);
  const GridSpec b = build_grid(1.0 / 300, kTwoPi, std::nullopt, 1.0, AngleConvention::Centered);
  REQUIRE(a.angle_count() == b.angle_count());
  for (int k = a.angle_min_index; k <= a.angle_max_index; ++k) REQUIRE(a.alpha(k) == b.alpha(k));
  for (int j = a.detector_min_index; j <= a.detector_max_index; ++j) REQUIRE(a.p(j) == b.p(j));
}

TEST_CASE("centered convention covers one turn") {
  const GridSpec g = build_grid(1e-2, kTwoPi, std::nullopt, 1.0, AngleConvention::Centered);
  CHECK(g.angle_count() == 100);
  CHECK(g.alpha(g.angle_min_index) > -oracle::kPi);
  CHECK(g.alpha(g.angle_max_index) <= oracle::kPi + 1e-12);
  CHECK(angle_convention_from_string("centered") == AngleConvention::Centered);
  CHECK_THROWS_AS(angle_convention_from_string("half"), Error);
}

TEST_CASE("a_k") {
  const GridSpec zero = build_grid(0.1, kTwoPi, 0.0, 1.0);
  for (int k = zero.angle_min_index; k <= zero.angle_max_index; ++k) REQUIRE(a_k_of(zero, {0.0, 0.0}, k) == 0.0);
  GridSpec g = build_grid(0.1, 1.0, 0.0, 2.0);
  // alpha_k = 0 at k = 0 for any grid
  CHECK(a_k_of(g, {1.0, 0.0}, 0) == doctest::Approx(10.0).epsilon(1e-15));

  using big = boost::multiprecision::cpp_bin_float_50;
  const GridSpec g3 = build_grid(1e-3, kTwoPi, std::nullopt, 1.0);
  const big pi = boost::math::constants::pi<big>();
  const big alpha = 2 * pi * 137 / 1000;
  const big eps = big(1) / 1000;
  const big x = sqrt(big(2)) / 4, y = sqrt(big(3)) / 4;
  const big ref = (cos(alpha) * x + sin(alpha) * y - (-1 - eps)) / eps;
  CHECK(std::abs(a_k_of(g3, kX0, 137) - ref.convert_to<double>()) < 1e-9);
}

TEST_CASE("a_k shift consistency") {
  const GridSpec g = build_grid(1e-3, kTwoPi, std::nullopt, 1.0);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-7.0, 7.0);
  for (int i = 0; i < 200; ++i) {
    const Vec2 chi{u(rng), u(rng)};
    if (std::hypot(chi.x, chi.y) > 10.0) continue;
    const int k = 1 + static_cast<int>(rng() % 1000);
    const double lhs = a_k_of(g, kX0, k) + dot(direction(g.alpha(k)), chi);
    const double rhs = a_k_of(g, kX0 + g.epsilon * chi, k);
    REQUIRE(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("local patch") {
  const LocalPatch p(kX0, {{0.0, 0.0}, {1.0, 1.0}}, 0.01);
  CHECK(p.physical(1).x == doctest::Approx(kX0.x + 0.01));
  CHECK_THROWS_AS(LocalPatch(kX0, {{0.5, 0.5}, {0.5, 0.5}}, 0.01), Error);
  CHECK_THROWS_AS(LocalPatch(kX0, {}, 0.01), Error);
}

TEST_CASE("assumptions at the reference point") {
  const GridSpec g = build_grid(1e-3, kTwoPi, std::nullopt, 1.0);
  const AssumptionReport r = check_assumptions(g, kX0, make_reference_sigma2());
  CHECK_FALSE(r.rational_flag);
  CHECK(r.sigma_positivity);
  CHECK(r.witness_alpha_hi > r.witness_alpha_lo);
  CHECK(r.kappa_x0_norm == doctest::Approx(kTwoPi * std::sqrt(5.0) / 4.0).epsilon(1e-14));
  CHECK(r.continued_fraction_quotients.size() >= 10);
  CHECK(r.continued_fraction_quotients[0] == 3);
}

TEST_CASE("rational norm raises the flag") {
  const GridSpec g = build_grid(1e-2, 1.0, std::nullopt, 4.0);
  const AssumptionReport r = check_assumptions(g, {3.0, 0.0}, make_reference_sigma2());
  CHECK(r.rational_flag);
  CHECK_FALSE(r.warnings.empty());
  for (double q : {0.5, 2.25, 1.2, 7.0 / 8.0}) {
    const AssumptionReport s = check_assumptions(g, {q, 0.0}, make_reference_sigma2());
    CHECK(s.rational_flag);
  }
}

TEST_CASE("continued fractions") {
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  const ContinuedFraction cf = continued_fraction(golden, 30);
  for (long long a : cf.quotients) CHECK(a == 1);
  const auto nu = estimate_type_nu(cf);
  REQUIRE(nu.has_value());
  CHECK(*nu == doctest::Approx(1.0).epsilon(0.1));
  const ContinuedFraction sq2 = continued_fraction(std::sqrt(2.0), 20);
  CHECK(sq2.quotients[0] == 1);
  for (std::size_t i = 1; i < sq2.quotients.size(); ++i) CHECK(sq2.quotients[i] == 2);
  const ContinuedFraction r = continued_fraction(0.75, 20);
  CHECK(r.terminated);
  CHECK(r.quotients == std::vector<long long>{0, 1, 3});
  CHECK_FALSE(estimate_type_nu(r).has_value());
}

TEST_CASE("zero field fails the positivity check") {
  const GridSpec g = build_grid(1e-2, kTwoPi, std::nullopt, 1.0);
  const AssumptionReport r = check_assumptions(g, kX0, VarianceField::constant(0.0));
  CHECK_FALSE(r.sigma_positivity);
}
