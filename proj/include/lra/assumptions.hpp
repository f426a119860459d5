#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lra/geometry.hpp"
#include "lra/variance_field.hpp"

namespace lra {

struct ContinuedFraction {
  std::vector<long long> quotients;  // a_0, a_1, ...
  std::vector<double> denominators;  // q_0, q_1, ...
  bool terminated = false;           // exact rational within working precision
};

// Expansion of x to at most depth partial quotients, in 50-digit arithmetic.
ContinuedFraction continued_fraction(double x, int depth);
ContinuedFraction continued_fraction_of_norm(double kappa, Vec2 x0, int depth);
// max log q_{n+1} / log q_n over the second half of the convergents; empty if too few.
std::optional<double> estimate_type_nu(const ContinuedFraction& cf);

struct AssumptionReport {
  double kappa_x0_norm = 0.0;
  std::vector<long long> continued_fraction_quotients;
  std::optional<double> estimated_type_nu;
  bool rational_flag = false;
  bool sigma_positivity = false;
  double witness_alpha_lo = 0.0;
  double witness_alpha_hi = 0.0;
  std::vector<std::string> warnings;
};

AssumptionReport check_assumptions(const GridSpec& grid, Vec2 x0, const VarianceField& field, int depth = 30);

}  // namespace lra
