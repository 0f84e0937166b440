#pragma once

#include <cmath>

namespace lrt {

/// A point (or vector) in the sample plane, in meters.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Point2 a, Point2 b) = default;
};

constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
/// Counter-clockwise quarter turn.
constexpr Point2 perp(Point2 a) { return {-a.y, a.x}; }
inline bool is_finite(Point2 a) { return std::isfinite(a.x) && std::isfinite(a.y); }

/// Symmetric 2-D strain tensor; e12 is the tensor (not engineering) shear.
struct StrainTensor {
  double e11 = 0.0;
  double e12 = 0.0;
  double e22 = 0.0;

  /// Normal strain along the unit direction n.
  constexpr double normal(Point2 n) const {
    return n.x * n.x * e11 + 2.0 * n.x * n.y * e12 + n.y * n.y * e22;
  }
  friend constexpr bool operator==(const StrainTensor&, const StrainTensor&) = default;
};

}  // namespace lrt
