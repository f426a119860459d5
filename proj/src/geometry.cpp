#include "lra/geometry.hpp"

#include <cmath>
#include <numbers>

#include "lra/error.hpp"

namespace lra {

std::string to_string(AngleConvention c) { return c == AngleConvention::FullTurn ? "full_turn" : "centered"; }

AngleConvention angle_convention_from_string(const std::string& s) {
  if (s == "full_turn") return AngleConvention::FullTurn;
  if (s == "centered") return AngleConvention::Centered;
  fail(ErrorCode::Config, "unknown angle convention '" + s + "' (expected full_turn or centered)");
}

GridSpec build_grid(double epsilon, double kappa, std::optional<double> p_bar, double P, AngleConvention convention) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) fail(ErrorCode::InvalidArgument, "epsilon must be positive");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) fail(ErrorCode::InvalidArgument, "kappa must be positive");
  if (!(P > 0.0) || !std::isfinite(P)) fail(ErrorCode::InvalidArgument, "P must be positive");
  if (kappa * epsilon > std::numbers::pi / 4.0 * (1.0 + 1e-12))
    fail(ErrorCode::Domain, "angular step too coarse for meaningful asymptotics");

  GridSpec g;
  g.epsilon = epsilon;
  g.kappa = kappa;
  g.P = P;
  g.convention = convention;
  g.p_bar = p_bar ? *p_bar : -P - epsilon;
  if (!std::isfinite(g.p_bar)) fail(ErrorCode::InvalidArgument, "p_bar must be finite");

  const double da = g.delta_alpha();
  const int n = static_cast<int>(std::floor(2.0 * std::numbers::pi / da + 1e-9));
  if (convention == AngleConvention::FullTurn) {
    g.angle_min_index = 1;
    g.angle_max_index = n;
  } else {
    g.angle_max_index = static_cast<int>(std::floor(std::numbers::pi / da + 1e-9));
    g.angle_min_index = g.angle_max_index - n + 1;
  }

  const double slack = 1e-9;
  g.detector_min_index = static_cast<int>(std::ceil((-P - g.p_bar) / epsilon - slack));
  g.detector_max_index = static_cast<int>(std::floor((P - g.p_bar) / epsilon + slack));
  if (g.detector_max_index < g.detector_min_index) fail(ErrorCode::InvalidArgument, "detector range is empty");
  return g;
}

double a_k_of(const GridSpec& grid, Vec2 x0, int k) {
  const double a = grid.alpha(k);
  return (std::cos(a) * x0.x + std::sin(a) * x0.y - grid.p_bar) / grid.epsilon;
}

LocalPatch::LocalPatch(Vec2 x0_, std::vector<Vec2> offsets_, double epsilon_)
    : x0(x0_), offsets(std::move(offsets_)), epsilon(epsilon_) {
  if (offsets.empty()) fail(ErrorCode::InvalidArgument, "patch needs at least one offset");
  if (!(epsilon > 0.0)) fail(ErrorCode::InvalidArgument, "patch epsilon must be positive");
  for (std::size_t i = 0; i < offsets.size(); ++i)
    for (std::size_t j = i + 1; j < offsets.size(); ++j)
      if (offsets[i] == offsets[j]) fail(ErrorCode::InvalidArgument, "patch offsets must be pairwise distinct");
}

}  // namespace lra
