#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "lrt/errors.hpp"
#include "lrt/geometry.hpp"
#include "lrt/mesh.hpp"

namespace lrt {

/// Half-plane clipping tolerance and shortest chord kept, in meters.
inline constexpr double kClipTolerance = 1e-12;

/// Parallel-beam ray. Points on the ray are origin + s * direction; s is arc
/// length in meters. offset is the signed distance of the line from the
/// reference centre, measured along perp(direction).
struct Ray {
  double theta = 0.0;
  double offset = 0.0;
  Point2 origin{};
  Point2 direction{1.0, 0.0};

  Point2 at(double s) const { return origin + s * direction; }

  /// Ray through `origin` travelling at angle theta; offset is taken about (0, 0).
  static Ray through(Point2 origin, double theta) {
    const Point2 dir{std::cos(theta), std::sin(theta)};
    return {theta, dot(origin, perp(dir)), origin, dir};
  }
};

/// Ray at angle theta and signed offset a from `center`, starting outside the
/// circle of radius `radius` about it.
inline Ray make_ray(Point2 center, double radius, double theta, double offset) {
  const Point2 dir{std::cos(theta), std::sin(theta)};
  const double back = 1.5 * radius + 1e-9;
  return {theta, offset, center + offset * perp(dir) - back * dir, dir};
}

inline Ray make_ray(const QuadMesh& mesh, double theta, double offset) {
  return make_ray(mesh.bounding_center(), mesh.bounding_radius(), theta, offset);
}

/// Ray travelling the same line in the opposite direction, i.e. (theta + pi, -offset).
inline Ray reversed(const Ray& ray, double length) {
  Ray r = ray;
  r.theta = ray.theta + std::numbers::pi;
  r.offset = -ray.offset;
  r.origin = ray.at(length);
  r.direction = -1.0 * ray.direction;
  return r;
}

struct Segment {
  std::size_t element_id = 0;
  double s_in = 0.0;
  double s_out = 0.0;

  double length() const { return s_out - s_in; }
};

struct RayPath {
  Ray ray;
  std::vector<Segment> segments;
  double length = 0.0;

  bool empty() const { return segments.empty(); }
};

/// n_angles * n_offsets rays, angle-major. Angles 2 pi i / n_angles; offsets
/// on a uniform grid over [-R, R] inset half a step from the tangent lines.
inline std::vector<Ray> generate_rays(const QuadMesh& mesh, std::size_t n_angles,
                                      std::size_t n_offsets) {
  std::vector<Ray> rays;
  if (n_angles == 0 || n_offsets == 0) return rays;
  rays.reserve(n_angles * n_offsets);
  const double r = mesh.bounding_radius();
  const double step = 2.0 * r / double(n_offsets);
  for (std::size_t i = 0; i < n_angles; ++i) {
    const double theta = 2.0 * std::numbers::pi * double(i) / double(n_angles);
    for (std::size_t j = 0; j < n_offsets; ++j)
      rays.push_back(make_ray(mesh, theta, -r + (double(j) + 0.5) * step));
  }
  return rays;
}

namespace detail {

// Cyrus-Beck clipping of the ray's line against the four CCW edges. A ray
// running exactly along an edge belongs to the element on its left, so that a
// shared edge is never counted twice.
inline std::optional<std::pair<double, double>> clip_convex_quad(const Ray& ray,
                                                                 const std::array<Point2, 4>& p) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < 4; ++i) {
    const Point2 edge = p[(i + 1) % 4] - p[i];
    const double len = norm(edge);
    const double f0 = cross(edge, ray.origin - p[i]) / len;
    const double f1 = cross(edge, ray.direction) / len;
    if (std::abs(f1) < 1e-15) {
      if (f0 < -kClipTolerance) return std::nullopt;
      if (f0 <= kClipTolerance && dot(edge, ray.direction) < 0.0) return std::nullopt;
      continue;
    }
    const double s = -f0 / f1;
    if (f1 > 0.0) {
      lo = std::max(lo, s);
    } else {
      hi = std::min(hi, s);
    }
  }
  if (!(hi - lo >= kClipTolerance)) return std::nullopt;
  return std::make_pair(lo, hi);
}

}  // namespace detail

/// Arc-length interval of the ray inside element e, or nothing when the chord
/// is shorter than kClipTolerance.
inline std::optional<std::pair<double, double>> clip_ray_to_element(const Ray& ray,
                                                                    const QuadMesh& mesh,
                                                                    std::size_t element_id) {
  const auto p = mesh.corners(element_id);
  for (int k = 0; k < 4; ++k) {
    if (corner_jacobian(p, k) < kMinCornerJacobian)
      throw DegenerateElementError(element_id, "element is not strictly convex");
  }
  return detail::clip_convex_quad(ray, p);
}

/// Traces rays through a fixed mesh. Element bounding circles are cached so
/// most elements are rejected with one distance test.
class RayTracer {
 public:
  explicit RayTracer(const QuadMesh& mesh) : mesh_(&mesh) {
    circles_.reserve(mesh.element_count());
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
      const auto p = mesh.corners(e);
      const Point2 c = 0.25 * (p[0] + p[1] + p[2] + p[3]);
      double r = 0.0;
      for (const Point2& q : p) r = std::max(r, norm(q - c));
      circles_.push_back({c, r});
    }
  }

  RayPath trace(const Ray& ray) const {
    RayPath path{ray, {}, 0.0};
    for (std::size_t e = 0; e < circles_.size(); ++e) {
      const auto& [c, r] = circles_[e];
      if (std::abs(cross(ray.direction, c - ray.origin)) > r + kClipTolerance) continue;
      if (auto hit = detail::clip_convex_quad(ray, mesh_->corners(e)))
        path.segments.push_back({e, hit->first, hit->second});
    }
    std::sort(path.segments.begin(), path.segments.end(), [](const Segment& a, const Segment& b) {
      return a.s_in != b.s_in ? a.s_in < b.s_in : a.element_id < b.element_id;
    });
    for (const Segment& s : path.segments) path.length += s.length();
    return path;
  }

  const QuadMesh& mesh() const { return *mesh_; }

 private:
  const QuadMesh* mesh_;
  std::vector<std::pair<Point2, double>> circles_;
};

/// Ordered chord segments of the ray through every element it crosses.
inline RayPath trace(const Ray& ray, const QuadMesh& mesh) { return RayTracer(mesh).trace(ray); }

}  // namespace lrt
