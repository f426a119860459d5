#include "lra/kernel_checks.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

namespace lra {

namespace {

template <class F>
double integrate_split(F f, double a, double b, std::vector<double> cuts) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  cuts.push_back(a);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = std::max(a, cuts[i]);
    const double hi = std::min(b, cuts[i + 1]);
    if (hi > lo) acc += GK::integrate(f, lo, hi, 15, 1e-14);
  }
  return acc;
}

std::vector<double> breakpoint_positions(const Kernel& k) {
  std::vector<double> b;
  for (const Breakpoint& bp : k.breakpoints()) b.push_back(bp.at);
  return b;
}

CheckItem item(std::string name, double value, double reference, double error, double tol, bool required = true) {
  return CheckItem{std::move(name), value, reference, error, tol, error <= tol, required};
}

}  // namespace

bool KernelCheckReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckItem& c) { return c.pass || !c.required; });
}

double pv_hilbert_derivative(const Kernel& k, double t) {
  const double R = k.support_radius();
  const std::vector<double> cuts = breakpoint_positions(k);
  auto excised = [&](double d) {
    auto f = [&](double s) { return k.eval(s, 1) / (t - s); };
    double acc = 0.0;
    if (t - d > -R) acc += integrate_split(f, -R, std::min(t - d, R), cuts);
    if (t + d < R) acc += integrate_split(f, std::max(t + d, -R), R, cuts);
    return acc;
  };
  const double d = 0.02;
  const double i0 = excised(d), i1 = excised(d / 2), i2 = excised(d / 4);
  const double r0 = 2.0 * i1 - i0;
  const double r1 = 2.0 * i2 - i1;
  return (4.0 * r1 - r0) / 3.0 / std::numbers::pi;
}

double parseval_constant(const Kernel& k) {
  using Rule = boost::math::quadrature::gauss<double, 20>;
  const double panel = 0.5;
  const double cut = 400.0;
  double acc = 0.0;
  for (int p = 0; p < static_cast<int>(cut / panel); ++p) {
    const double mid = (p + 0.5) * panel, half = 0.5 * panel;
    for (std::size_t i = 0; i < Rule::abscissa().size(); ++i) {
      for (double s : {1.0, -1.0}) {
        const double lam = mid + s * half * Rule::abscissa()[i];
        acc += half * Rule::weights()[i] * lam * lam * std::norm(k.spectrum(lam));
      }
    }
  }
  // Beyond the cut |phi~|^2 ~ sum_m J_m^2 / lambda^{2q+2} on average, q = first jump order.
  const int q = k.smoothness_M() + 1;
  double jj = 0.0;
  for (const Breakpoint& b : k.breakpoints())
    if (q < static_cast<int>(b.jumps.size())) jj += b.jumps[q] * b.jumps[q];
  const double power = 2.0 * q;  // lambda^2 * lambda^{-(2q+2)}
  acc += jj * std::pow(cut, 1.0 - power) / (power - 1.0);
  return acc / std::numbers::pi;
}

double table_l2_norm(const KernelTable& table) {
  const auto& v = table.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) acc += (i == 0 || i + 1 == v.size() ? 0.5 : 1.0) * v[i] * v[i];
  acc *= table.grid_step();
  const double c = table.tail_coefficient();
  const double R = table.half_range();
  return acc + 2.0 * c * c / (3.0 * R * R * R);
}

double derivative_l2_quadrature(const Kernel& k) {
  const double R = k.support_radius();
  return integrate_split([&](double s) { return k.eval(s, 1) * k.eval(s, 1); }, -R, R, breakpoint_positions(k));
}

KernelCheckReport run_kernel_checks(const Kernel& k, const FilteredKernelTable& fk, const Autocorrelation& ac) {
  KernelCheckReport r;
  r.kernel_name = k.name();
  r.smoothness_M = k.smoothness_M();
  const KernelTable& tab = fk.table;

  r.checks.push_back(item("unit_mass", k.mass(), 1.0, std::abs(k.mass() - 1.0), 1e-12));
  r.checks.push_back(item("table_matches_kernel", static_cast<double>(fk.kernel_fingerprint == k.fingerprint()), 1.0,
                          fk.kernel_fingerprint == k.fingerprint() ? 0.0 : 1.0, 0.0));

  if (k.is_even()) {
    double worst = 0.0;
    const auto& v = tab.values();
    for (std::size_t i = 0; i < v.size(); ++i) worst = std::max(worst, std::abs(v[i] - v[v.size() - 1 - i]));
    r.checks.push_back(item("table_even", worst, 0.0, worst, 1e-12));
  }

  const double R = tab.half_range();
  const double edge = tab.value(R);
  const double asym = tab.tail_coefficient() / (R * R);
  const double mismatch = asym != 0.0 ? std::abs(edge - asym) / std::abs(asym) : 1.0;
  r.checks.push_back(item("tail_boundary", edge, asym, mismatch, 1e-3));

  for (double t : {0.25, 1.0, 3.0}) {
    const double ref = pv_hilbert_derivative(k, t);
    const double v = tab.value(t);
    r.checks.push_back(item("pv_match_t=" + std::to_string(t).substr(0, 4), v, ref, std::abs(v - ref), 1e-6));
  }

  r.parseval_constant = parseval_constant(k);
  r.table_l2 = table_l2_norm(tab);
  r.checks.push_back(item("parseval", r.table_l2, r.parseval_constant,
                          std::abs(r.table_l2 - r.parseval_constant) / r.parseval_constant, 1e-5));

  for (double t : {0.0, 0.3, 1.1}) {
    const double cc = cross_correlate(tab, tab, t);
    const double ref = ac.value(t);
    r.checks.push_back(item("autocorrelation_identity_t=" + std::to_string(t).substr(0, 3), cc, ref,
                            std::abs(cc - ref), 2e-5));
  }

  const double d2 = derivative_l2_quadrature(k);
  r.checks.push_back(item("autocorrelation_at_zero", ac.value(0.0), d2, std::abs(ac.value(0.0) - d2), 1e-10));

  double pou = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double t = -3.0 + 6.0 * (i + 0.5) / 1000.0;
    double s = 0.0;
    for (int j = static_cast<int>(std::floor(t - k.support_radius())) - 1; j <= t + k.support_radius() + 1; ++j)
      s += k.eval(t - j);
    pou = std::max(pou, std::abs(s - 1.0));
  }
  r.checks.push_back(item("partition_of_unity", 1.0 + pou, 1.0, pou, 1e-12, false));
  return r;
}

}  // namespace lra
