#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace lra {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }

// FullTurn: alpha_k = k * dalpha, k = 1..N (alpha_N = 2 pi). Centered: alpha_k in (-pi, pi].
enum class AngleConvention { FullTurn, Centered };

std::string to_string(AngleConvention c);
AngleConvention angle_convention_from_string(const std::string& s);

struct GridSpec {
  double epsilon = 0.0;
  double kappa = 0.0;
  double p_bar = 0.0;
  double P = 0.0;
  AngleConvention convention = AngleConvention::FullTurn;
  int angle_min_index = 0;
  int angle_max_index = -1;
  int detector_min_index = 0;
  int detector_max_index = -1;

  double delta_alpha() const { return kappa * epsilon; }
  std::size_t angle_count() const { return static_cast<std::size_t>(angle_max_index - angle_min_index + 1); }
  std::size_t detector_count() const { return static_cast<std::size_t>(detector_max_index - detector_min_index + 1); }
  double alpha(int k) const { return static_cast<double>(k) * delta_alpha(); }
  double p(int j) const { return p_bar + static_cast<double>(j) * epsilon; }
};

// p_bar empty selects the 1-based detector layout p_bar = -P - epsilon.
GridSpec build_grid(double epsilon, double kappa, std::optional<double> p_bar, double P,
                    AngleConvention convention = AngleConvention::FullTurn);

// (alpha_k . x0 - p_bar) / epsilon
double a_k_of(const GridSpec& grid, Vec2 x0, int k);
inline Vec2 direction(double alpha) { return {std::cos(alpha), std::sin(alpha)}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

struct LocalPatch {
  Vec2 x0;
  std::vector<Vec2> offsets;
  double epsilon = 0.0;

  LocalPatch() = default;
  LocalPatch(Vec2 x0, std::vector<Vec2> offsets, double epsilon);
  Vec2 physical(std::size_t i) const { return x0 + epsilon * offsets[i]; }
  std::size_t size() const { return offsets.size(); }
};

}  // namespace lra
