#include "lra/kernel_tables.hpp"

#include <gsl/gsl_sf_expint.h>

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "lra/error.hpp"

namespace lra {

using cplx = std::complex<double>;

KernelTable::KernelTable(double grid_step, double half_range, std::vector<double> values, double tail_coefficient)
    : step_(grid_step), range_(half_range), tail_(tail_coefficient), values_(std::move(values)) {
  if (!(step_ > 0.0) || !(range_ > 0.0)) fail(ErrorCode::InvalidArgument, "table step and range must be positive");
  const double n = 2.0 * range_ / step_;
  if (std::abs(n - std::round(n)) > 1e-6 * n)
    fail(ErrorCode::InvalidArgument, "table half_range must be a multiple of grid_step");
  if (values_.size() != static_cast<std::size_t>(std::llround(n)) + 1)
    fail(ErrorCode::InvalidArgument, "table value count does not match step and range");
  if (values_.size() < 4) fail(ErrorCode::InvalidArgument, "table needs at least 4 nodes");
  for (double v : values_)
    if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "table value is not finite");
  inv_step_ = 1.0 / step_;
}

double KernelTable::value(double t) const {
  if (std::abs(t) > range_) return tail_ == 0.0 ? 0.0 : tail_ / (t * t);
  const double x = (t + range_) * inv_step_;
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(values_.size());
  std::ptrdiff_t i0 = static_cast<std::ptrdiff_t>(std::floor(x)) - 1;
  i0 = std::clamp<std::ptrdiff_t>(i0, 0, n - 4);
  const double u = x - static_cast<double>(i0);
  const double um1 = u - 1.0, um2 = u - 2.0, um3 = u - 3.0;
  const double* v = values_.data() + i0;
  return -um1 * um2 * um3 / 6.0 * v[0] + u * um2 * um3 / 2.0 * v[1] - u * um1 * um3 / 2.0 * v[2] +
         u * um1 * um2 / 6.0 * v[3];
}

double singular_part(const SingularTerm& s, double t) {
  const double x = t - s.at;
  const double ax = std::abs(x);
  if (ax >= kSingularCutoff || x == 0.0) return 0.0;
  const double r = x / kSingularCutoff;
  const double b = 1.0 - r * r;
  return (s.c1 + s.c2 * x) * x * std::log(ax) * (b * b) * (b * b);
}

std::vector<SingularTerm> singular_terms(const Kernel& k) {
  std::vector<SingularTerm> out;
  for (const Breakpoint& b : k.breakpoints()) {
    SingularTerm s{b.at, 0.0, 0.0};
    if (b.jumps.size() > 2) s.c1 = b.jumps[2] / std::numbers::pi;
    if (b.jumps.size() > 3) s.c2 = b.jumps[3] / (2.0 * std::numbers::pi);
    if (s.c1 != 0.0 || s.c2 != 0.0) out.push_back(s);
  }
  return out;
}

void FilteredKernelTable::attach_singular_terms(std::vector<SingularTerm> terms) {
  singular = std::move(terms);
  reach = 0.0;
  if (singular.empty()) {
    residual = KernelTable();
    return;
  }
  for (const SingularTerm& s : singular) {
    if (!(std::abs(s.at) + kSingularCutoff <= table.half_range()))
      fail(ErrorCode::InvalidArgument, "singular term lies outside the table range");
    reach = std::max(reach, std::abs(s.at) + kSingularCutoff);
  }
  std::vector<double> v = table.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double t = table.node(i);
    for (const SingularTerm& s : singular) v[i] -= singular_part(s, t);
  }
  residual = KernelTable(table.grid_step(), table.half_range(), std::move(v), table.tail_coefficient());
}

double FilteredKernelTable::value(double t) const {
  if (!(std::abs(t) < reach)) return table.value(t);
  double corr = 0.0;
  bool near = false;
  for (const SingularTerm& s : singular) {
    if (std::abs(t - s.at) < kSingularCutoff) {
      near = true;
      corr += singular_part(s, t);
    }
  }
  return near ? residual.value(t) + corr : table.value(t);
}

namespace {

constexpr double kSpectralCut = 8.0;

// Integral over [cut, inf) of xi^{-n} e^{i w xi}, n = 1..nmax.
std::vector<cplx> tail_moments(double w, int nmax) {
  std::vector<cplx> I(nmax + 1);
  const double L = kSpectralCut;
  if (std::abs(w) * L < 1e-300) {
    I[1] = cplx(std::numeric_limits<double>::infinity(), 0.0);
    for (int n = 2; n <= nmax; ++n) I[n] = std::pow(L, 1 - n) / (n - 1);
    return I;
  }
  const double x = std::abs(w) * L;
  const double sg = w > 0 ? 1.0 : -1.0;
  I[1] = cplx(-gsl_sf_Ci(x), sg * (std::numbers::pi / 2.0 - gsl_sf_Si(x)));
  const cplx e(std::cos(w * L), std::sin(w * L));
  for (int n = 1; n < nmax; ++n) I[n + 1] = (cplx(0.0, w) * I[n] + std::pow(L, -n) * e) / static_cast<double>(n);
  return I;
}

struct SpectralRule {
  std::vector<double> xi;
  std::vector<cplx> g;  // weight * xi * phi~(xi)
};

SpectralRule make_rule(const Kernel& k, double panel) {
  using Rule = boost::math::quadrature::gauss<double, 20>;
  SpectralRule r;
  const int panels = static_cast<int>(std::lround(kSpectralCut / panel));
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * panel;
    const double half = 0.5 * panel;
    for (std::size_t i = 0; i < Rule::abscissa().size(); ++i) {
      const double x = Rule::abscissa()[i];
      const double w = Rule::weights()[i] * half;
      for (double s : {1.0, -1.0}) {
        const double xi = mid + s * half * x;
        r.xi.push_back(xi);
        r.g.push_back(w * xi * k.spectrum(xi));
        if (x == 0.0) break;
      }
    }
  }
  return r;
}

class SpectralFilter {
 public:
  explicit SpectralFilter(const Kernel& k) : kernel_(k), coarse_(make_rule(k, 0.25)), fine_(make_rule(k, 0.125)) {
    for (const Breakpoint& b : k.breakpoints())
      if (b.jumps[0] != 0.0 || (b.jumps.size() > 1 && b.jumps[1] != 0.0))
        fail(ErrorCode::InvalidArgument, "spectral tabulation of H phi' needs a kernel with continuous phi and phi'");
  }

  double tail(double t) const {
    cplx acc(0.0, 0.0);
    const int deg = kernel_.degree();
    if (deg < 2) return 0.0;
    for (const Breakpoint& b : kernel_.breakpoints()) {
      bool any = false;
      for (int n = 2; n <= deg; ++n) any = any || b.jumps[n] != 0.0;
      if (!any) continue;
      const std::vector<cplx> I = tail_moments(t - b.at, deg);
      cplx ipow = cplx(0.0, -1.0) * cplx(0.0, -1.0) * cplx(0.0, -1.0);  // i^{-3}
      for (int n = 2; n <= deg; ++n) {
        acc += b.jumps[n] * ipow * I[n];
        ipow *= cplx(0.0, -1.0);
      }
    }
    return acc.real();
  }

  double numeric(const SpectralRule& r, double t) const {
    double acc = 0.0;
    for (std::size_t q = 0; q < r.xi.size(); ++q) {
      const double ph = r.xi[q] * t;
      acc += r.g[q].real() * std::cos(ph) - r.g[q].imag() * std::sin(ph);
    }
    return acc;
  }

  double point(double t) const { return (numeric(fine_, t) + tail(t)) / std::numbers::pi; }

  // Numeric part on nodes t0 + n h, n < count, by phase rotation with periodic reseeding.
  std::vector<double> numeric_sweep(const SpectralRule& r, double t0, double h, std::size_t count) const {
    std::vector<double> out(count, 0.0);
    const std::size_t Q = r.xi.size();
    std::vector<cplx> z(Q), rot(Q);
    for (std::size_t q = 0; q < Q; ++q) rot[q] = std::polar(1.0, r.xi[q] * h);
    for (std::size_t n = 0; n < count; ++n) {
      if (n % 256 == 0) {
        const double t = t0 + static_cast<double>(n) * h;
        for (std::size_t q = 0; q < Q; ++q) z[q] = std::polar(1.0, r.xi[q] * t);
      }
      double acc = 0.0;
      for (std::size_t q = 0; q < Q; ++q) {
        acc += r.g[q].real() * z[q].real() - r.g[q].imag() * z[q].imag();
        z[q] *= rot[q];
      }
      out[n] = acc;
    }
    return out;
  }

  const SpectralRule& coarse() const { return coarse_; }
  const SpectralRule& fine() const { return fine_; }

 private:
  const Kernel& kernel_;
  SpectralRule coarse_;
  SpectralRule fine_;
};

double fit_tail(const std::vector<double>& values, double step, double range) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double t = -range + static_cast<double>(i) * step;
    if (std::abs(t) < 0.9 * range) continue;
    const double it2 = 1.0 / (t * t);
    num += values[i] * it2;
    den += it2 * it2;
  }
  return num / den;
}

}  // namespace

double filtered_kernel_point(const Kernel& k, double t) { return SpectralFilter(k).point(t); }

FilteredKernelTable build_filtered_kernel(const Kernel& k, double grid_step, double half_range) {
  if (!(grid_step > 0.0)) fail(ErrorCode::InvalidArgument, "grid_step must be positive");
  if (!(half_range >= 4.0 * k.support_radius()))
    fail(ErrorCode::InvalidArgument, "half_range must be at least 4 support radii");
  const double nd = 2.0 * half_range / grid_step;
  if (std::abs(nd - std::round(nd)) > 1e-6 * nd)
    fail(ErrorCode::InvalidArgument, "half_range must be a multiple of grid_step");
  const std::size_t count = static_cast<std::size_t>(std::llround(nd)) + 1;
  const std::size_t mid = count / 2;

  const SpectralFilter filter(k);
  // Even kernels: tabulate t >= 0 and mirror, so the table is exactly even.
  const std::size_t first = k.is_even() ? mid : 0;
  const std::size_t m = count - first;
  const double t0 = -half_range + static_cast<double>(first) * grid_step;
  const std::vector<double> coarse = filter.numeric_sweep(filter.coarse(), t0, grid_step, m);
  const std::vector<double> fine = filter.numeric_sweep(filter.fine(), t0, grid_step, m);

  std::vector<double> values(count, 0.0);
  double peak = 0.0, change = 0.0;
  for (std::size_t n = 0; n < m; ++n) {
    const double t = t0 + static_cast<double>(n) * grid_step;
    const double tail = filter.tail(t);
    const double v = (fine[n] + tail) / std::numbers::pi;
    change = std::max(change, std::abs(fine[n] - coarse[n]) / std::numbers::pi);
    peak = std::max(peak, std::abs(v));
    values[first + n] = v;
  }
  if (k.is_even())
    for (std::size_t n = 0; n < mid; ++n) values[n] = values[count - 1 - n];
  const double rel_change = peak > 0.0 ? change / peak : change;
  if (rel_change > 1e-8)
    fail(ErrorCode::Convergence, "filtered kernel quadrature did not converge between refinement levels");

  FilteredKernelTable out;
  const double c = fit_tail(values, grid_step, half_range);
  out.table = KernelTable(grid_step, half_range, std::move(values), c);
  out.kernel_fingerprint = k.fingerprint();
  out.refinement_change = rel_change;
  out.attach_singular_terms(singular_terms(k));
  return out;
}

std::shared_ptr<const FilteredKernelTable> filtered_kernel_cached(const Kernel& k, double grid_step, double half_range) {
  static std::mutex mu;
  static std::map<std::tuple<std::uint64_t, double, double>, std::shared_ptr<const FilteredKernelTable>> cache;
  const auto key = std::make_tuple(k.fingerprint(), grid_step, half_range);
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto built = std::make_shared<const FilteredKernelTable>(build_filtered_kernel(k, grid_step, half_range));
  std::lock_guard lock(mu);
  return cache.emplace(key, std::move(built)).first->second;
}

double Autocorrelation::value(double t) const {
  using Rule = boost::math::quadrature::gauss<double, 15>;
  t = std::abs(t);
  if (std::abs(t) >= exact_support_radius) return 0.0;
  double acc = 0.0;
  for (const Piece& p : derivative_pieces) {
    for (const Piece& q : derivative_pieces) {
      // s in q's interval with t + s in p's interval
      const double lo = std::max(q.lo, p.lo - t);
      const double hi = std::min(q.hi, p.hi - t);
      if (!(hi > lo)) continue;
      const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      double part = 0.0;
      for (std::size_t i = 0; i < Rule::abscissa().size(); ++i) {
        const double x = Rule::abscissa()[i];
        const double w = Rule::weights()[i];
        const double s1 = mid + half * x;
        part += w * poly_eval(p.coeffs, t + s1) * poly_eval(q.coeffs, s1);
        if (x != 0.0) {
          const double s2 = mid - half * x;
          part += w * poly_eval(p.coeffs, t + s2) * poly_eval(q.coeffs, s2);
        }
      }
      acc += half * part;
    }
  }
  return acc;
}

Autocorrelation build_autocorrelation(const Kernel& k, double grid_step) {
  Autocorrelation ac;
  for (const Piece& p : k.pieces()) ac.derivative_pieces.push_back({p.lo, p.hi, poly_derivative(p.coeffs)});
  ac.exact_support_radius = 2.0 * k.support_radius();
  const double R = ac.exact_support_radius;
  const std::size_t count = static_cast<std::size_t>(std::llround(2.0 * R / grid_step)) + 1;
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) values[i] = ac.value(-R + static_cast<double>(i) * grid_step);
  ac.table = KernelTable(grid_step, R, std::move(values), 0.0);
  return ac;
}

std::shared_ptr<const Autocorrelation> autocorrelation_cached(const Kernel& k, double grid_step) {
  static std::mutex mu;
  static std::map<std::pair<std::uint64_t, double>, std::shared_ptr<const Autocorrelation>> cache;
  const auto key = std::make_pair(k.fingerprint(), grid_step);
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto built = std::make_shared<const Autocorrelation>(build_autocorrelation(k, grid_step));
  std::lock_guard lock(mu);
  return cache.emplace(key, std::move(built)).first->second;
}

double cross_correlate(const KernelTable& f, const KernelTable& g, double t) {
  const std::size_t n = g.node_count();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = g.node(i);
    const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    acc += w * f.value(t + s) * g.values()[i];
  }
  acc *= g.grid_step();
  if (g.tail_coefficient() != 0.0) {
    // integral over |s| > R of f(t+s) c / s^2, with u = 1/s
    using Rule = boost::math::quadrature::gauss<double, 30>;
    const double c = g.tail_coefficient();
    const double umax = 1.0 / g.half_range();
    const double half = 0.5 * umax;
    double tail = 0.0;
    for (std::size_t i = 0; i < Rule::abscissa().size(); ++i) {
      const double x = Rule::abscissa()[i];
      for (double sgn : {1.0, -1.0}) {
        const double u = half + sgn * half * x;
        if (u > 0.0) tail += Rule::weights()[i] * c * (f.value(t + 1.0 / u) + f.value(t - 1.0 / u));
        if (x == 0.0) break;
      }
    }
    acc += half * tail;
  }
  return acc;
}

}  // namespace lra
