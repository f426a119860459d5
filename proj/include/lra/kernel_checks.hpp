#pragma once

#include <string>
#include <vector>

#include "lra/kernel_tables.hpp"

namespace lra {

struct CheckItem {
  std::string name;
  double value = 0.0;
  double reference = 0.0;
  double error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool required = true;
};

struct KernelCheckReport {
  std::string kernel_name;
  int smoothness_M = 0;
  double parseval_constant = 0.0;
  double table_l2 = 0.0;
  std::vector<CheckItem> checks;
  bool all_pass() const;
};

// (1/pi) PV integral of phi'(s) / (t - s), by excision and Richardson extrapolation.
double pv_hilbert_derivative(const Kernel& k, double t);
// (2 pi)^{-1} integral over R of |lambda phi~(lambda)|^2.
double parseval_constant(const Kernel& k);
// Integral of value(t)^2 over R, tails included.
double table_l2_norm(const KernelTable& table);
// Integral of phi'(t)^2 by adaptive quadrature.
double derivative_l2_quadrature(const Kernel& k);

KernelCheckReport run_kernel_checks(const Kernel& k, const FilteredKernelTable& fk, const Autocorrelation& ac);

}  // namespace lra
