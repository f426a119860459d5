#include <doctest.h>

#include <random>

#include "lra/error.hpp"
#include "lra/kernel_checks.hpp"
#include "lra/kernel_tables.hpp"
#include "lra/serialize.hpp"
#include "oracles.hpp"

using namespace lra;

namespace {
const Kernel& keys() {
  static const Kernel k = make_keys_kernel();
  return k;
}
const FilteredKernelTable& fk() { return *filtered_kernel_cached(keys()); }
const Autocorrelation& ac() { return *autocorrelation_cached(keys()); }
}  // namespace

TEST_CASE("filtered kernel matches the closed-form logarithmic oracle") {
  const auto pieces = oracle::keys_pieces();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const double t = u(rng);
    worst = std::max(worst, std::abs(fk().value(t) - oracle::hilbert_derivative(pieces, t)));
  }
  CHECK(worst < 1e-6);
  for (double t : {0.0, 0.25, 1.0, 3.0})
    CHECK(fk().value(t) == doctest::Approx(oracle::hilbert_derivative(pieces, t)).epsilon(1e-9));
}

TEST_CASE("filtered kernel is accurate next to the kernel breakpoints") {
  const auto pieces = oracle::keys_pieces();
  double worst = 0.0;
  for (double b : {-2.0, -1.0, 0.0, 1.0, 2.0})
    for (double d : {1e-7, 3e-5, 2e-4, 5e-4, 9e-4, 1.3e-3, 4e-3, 0.02, 0.2, 0.26})
      for (double t : {b - d, b + d}) worst = std::max(worst, std::abs(fk().value(t) - oracle::hilbert_derivative(pieces, t)));
  CHECK(worst < 1e-7);
  CHECK(fk().singular.size() == 5);
  CHECK(fk().value(-1.0003) == fk().value(1.0003));
}

TEST_CASE("principal value oracle") {
  const auto pieces = oracle::keys_pieces();
  for (double t : {0.25, 1.0, 3.0}) {
    CHECK(std::abs(pv_hilbert_derivative(keys(), t) - oracle::hilbert_derivative(pieces, t)) < 1e-6);
    CHECK(std::abs(fk().value(t) - pv_hilbert_derivative(keys(), t)) < 1e-6);
  }
}

TEST_CASE("table shape") {
  const auto& t = fk().table;
  CHECK(t.grid_step() == 1e-3);
  CHECK(t.half_range() == 24.0);
  CHECK(fk().kernel_fingerprint == keys().fingerprint());
  for (std::size_t i = 0; i < t.node_count() / 2; ++i) REQUIRE(t.values()[i] == t.values()[t.node_count() - 1 - i]);
  CHECK(t.tail_coefficient() == doctest::Approx(-1.0 / oracle::kPi).epsilon(1e-4));
  // continuity across the tail boundary
  CHECK(std::abs(fk().value(23.9999) - fk().value(24.0001)) < 1e-6);
}

TEST_CASE("grid refinement changes the table by less than 1e-8") {
  const FilteredKernelTable fine = build_filtered_kernel(keys(), 5e-4, 24.0);
  for (double t : {0.0, 0.1234, 0.5, 1.0, 1.7, 3.0, 10.0}) CHECK(std::abs(fine.value(t) - fk().value(t)) < 1e-8);
}

TEST_CASE("parseval identity") {
  const double C = parseval_constant(keys());
  CHECK(C == doctest::Approx(7.0 / 3.0).epsilon(1e-8));
  CHECK(std::abs(table_l2_norm(fk().table) / C - 1.0) < 1e-5);
  CHECK(derivative_l2_quadrature(keys()) == doctest::Approx(7.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("autocorrelation") {
  const auto pieces = oracle::keys_pieces();
  CHECK(ac().value(0.0) == doctest::Approx(oracle::derivative_autocorrelation(pieces, 0.0)).epsilon(1e-12));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 200; ++i) {
    const double t = u(rng);
    REQUIRE(std::abs(ac().value(t) - oracle::derivative_autocorrelation(pieces, t)) < 1e-12);
    REQUIRE(ac().value(t) == ac().value(-t));
    REQUIRE(ac().value(t) <= ac().value(0.0));
  }
  CHECK(ac().value(1.5) == ac().value(-1.5));
  for (double t : {4.0, 4.5, -7.0, 30.0}) CHECK(ac().value(t) == 0.0);
  CHECK(ac().exact_support_radius == 4.0);
}

TEST_CASE("cross correlation") {
  const KernelTable zero(0.5, 4.0, std::vector<double>(17, 0.0), 0.0);
  CHECK(cross_correlate(zero, fk().table, 0.7) == 0.0);
  CHECK(cross_correlate(ac().table, ac().table, 0.0) >= 0.0);
  for (double t : {0.0, 0.3, 1.1}) CHECK(std::abs(cross_correlate(fk().table, fk().table, t) - ac().value(t)) < 2e-5);
}

TEST_CASE("table identity on every tenth table node") {
  double worst = 0.0;
  for (std::size_t i = 0; i < ac().table.node_count(); i += 10) {
    const double t = ac().table.node(i);
    if (std::abs(t) > 4.0) continue;
    worst = std::max(worst, std::abs(cross_correlate(fk().table, fk().table, t) - ac().value(t)));
  }
  CHECK(worst < 2e-5);
}

TEST_CASE("kernel check suite passes for keys") {
  const KernelCheckReport r = run_kernel_checks(keys(), fk(), ac());
  CHECK(r.all_pass());
  CHECK(r.parseval_constant == doctest::Approx(7.0 / 3.0).epsilon(1e-8));
}

TEST_CASE("kernel checks catch a corrupted table") {
  Json j = to_json(fk());
  j["values"][24250] = j["values"][24250].get<double>() + 1e-3;
  const FilteredKernelTable bad = filtered_table_from_json(j);
  CHECK_FALSE(run_kernel_checks(keys(), bad, ac()).all_pass());
}

TEST_CASE("serialization round trip") {
  const FilteredKernelTable back = filtered_table_from_json(to_json(fk()));
  CHECK(back.table.values() == fk().table.values());
  CHECK(back.table.tail_coefficient() == fk().table.tail_coefficient());
  CHECK(back.kernel_fingerprint == fk().kernel_fingerprint);
  const Kernel k2 = kernel_from_json(to_json(keys()));
  CHECK(k2.fingerprint() == keys().fingerprint());
  Json bad = to_json(keys());
  bad["schema"] = 2;
  CHECK_THROWS_AS(kernel_from_json(bad), Error);
}

TEST_CASE("filtered kernel needs a C1 kernel") {
  const Kernel hat("hat", {Piece{-1.0, 0.0, {1.0, 1.0}}, Piece{0.0, 1.0, {1.0, -1.0}}});
  CHECK_THROWS_AS(build_filtered_kernel(hat), Error);
  CHECK_THROWS_AS(build_filtered_kernel(keys(), 1e-3, 6.0), Error);
}

TEST_CASE("bspline table matches its closed form") {
  // cubic B-spline: 1/6 (2 - |s|)^3 on [1, 2], 2/3 - s^2 + |s|^3 / 2 on [0, 1]
  std::vector<oracle::Poly> p = {
      {-2, -1, {8.0L / 6, 12.0L / 6, 6.0L / 6, 1.0L / 6}},
      {-1, 0, {2.0L / 3, 0, -1, -0.5L}},
      {0, 1, {2.0L / 3, 0, -1, 0.5L}},
      {1, 2, {8.0L / 6, -12.0L / 6, 6.0L / 6, -1.0L / 6}},
  };
  const FilteredKernelTable t = build_filtered_kernel(make_bspline3_kernel());
  for (double x : {0.0, 0.4, 1.3, 2.0, 5.5}) CHECK(std::abs(t.value(x) - oracle::hilbert_derivative(p, x)) < 1e-7);
}
