#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lrt/errors.hpp"
#include "lrt/geometry.hpp"

namespace lrt {

enum class DomainKind { rectangle, ring_plug, generic };

inline std::string_view to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::rectangle: return "rectangle";
    case DomainKind::ring_plug: return "ring-plug";
    case DomainKind::generic: return "generic";
  }
  return "generic";
}

inline DomainKind domain_kind_from_string(std::string_view s) {
  if (s == "rectangle") return DomainKind::rectangle;
  if (s == "ring-plug") return DomainKind::ring_plug;
  if (s == "generic") return DomainKind::generic;
  throw FormatError("unknown domain_kind '" + std::string(s) + "'");
}

/// Smallest admissible corner Jacobian (parallelogram area at a corner), m^2.
inline constexpr double kMinCornerJacobian = 1e-14;
/// Nodes closer than this are considered coincident, m.
inline constexpr double kNodeMergeTolerance = 1e-12;

/// Signed parallelogram area spanned by the two edges meeting at corner k.
inline double corner_jacobian(const std::array<Point2, 4>& p, int k) {
  const Point2 c = p[static_cast<std::size_t>(k)];
  const Point2 next = p[static_cast<std::size_t>((k + 1) % 4)];
  const Point2 prev = p[static_cast<std::size_t>((k + 3) % 4)];
  return cross(next - c, prev - c);
}

/// Area of a simple quadrilateral by the shoelace formula (positive when CCW).
inline double quad_area(const std::array<Point2, 4>& p) {
  double twice = 0.0;
  for (std::size_t i = 0; i < 4; ++i) twice += cross(p[i], p[(i + 1) % 4]);
  return 0.5 * twice;
}

/// Conforming mesh of convex, counter-clockwise 4-node quadrilaterals.
///
/// The mesh is validated on construction and immutable afterwards, so a
/// single instance can be shared between threads.
class QuadMesh {
 public:
  using Element = std::array<std::size_t, 4>;

  QuadMesh(std::vector<Point2> nodes, std::vector<Element> elements,
           DomainKind kind = DomainKind::generic)
      : nodes_(std::move(nodes)), elements_(std::move(elements)), kind_(kind) {
    validate();
    compute_bounds();
  }

  const std::vector<Point2>& nodes() const noexcept { return nodes_; }
  const std::vector<Element>& elements() const noexcept { return elements_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t element_count() const noexcept { return elements_.size(); }
  DomainKind domain_kind() const noexcept { return kind_; }

  const Point2& node(std::size_t i) const { return nodes_.at(i); }
  const Element& element(std::size_t e) const { return elements_.at(e); }

  std::array<Point2, 4> corners(std::size_t e) const {
    const Element& el = elements_.at(e);
    return {nodes_[el[0]], nodes_[el[1]], nodes_[el[2]], nodes_[el[3]]};
  }

  double element_area(std::size_t e) const { return quad_area(corners(e)); }

  /// Centre of the axis-aligned bounding box; rays are offset relative to it.
  Point2 bounding_center() const noexcept { return center_; }
  /// Radius of the smallest circle about bounding_center() enclosing all nodes.
  double bounding_radius() const noexcept { return radius_; }

 private:
  void validate() const {
    const std::size_t m = nodes_.size();
    for (std::size_t i = 0; i < m; ++i) {
      if (!is_finite(nodes_[i]))
        throw InvalidGeometryError("node " + std::to_string(i) + " has a non-finite coordinate");
    }
    for (std::size_t e = 0; e < elements_.size(); ++e) {
      for (std::size_t k : elements_[e]) {
        if (k >= m)
          throw InvalidGeometryError("element " + std::to_string(e) + " references node " +
                                     std::to_string(k) + " but the mesh has " +
                                     std::to_string(m) + " nodes");
      }
      const auto p = corners(e);
      for (int k = 0; k < 4; ++k) {
        if (corner_jacobian(p, k) < kMinCornerJacobian)
          throw DegenerateElementError(e, "corner " + std::to_string(k) +
                                              " Jacobian below tolerance (degenerate, "
                                              "clockwise or non-convex element)");
      }
    }
    // Coincident nodes: sweep over x-sorted nodes.
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return nodes_[a].x < nodes_[b].x; });
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = a + 1; b < m; ++b) {
        const Point2 pa = nodes_[order[a]];
        const Point2 pb = nodes_[order[b]];
        if (pb.x - pa.x > kNodeMergeTolerance) break;
        if (norm(pb - pa) <= kNodeMergeTolerance)
          throw InvalidGeometryError("nodes " + std::to_string(order[a]) + " and " +
                                     std::to_string(order[b]) + " coincide");
      }
    }
  }

  void compute_bounds() {
    if (nodes_.empty()) return;
    Point2 lo = nodes_.front();
    Point2 hi = nodes_.front();
    for (const Point2& p : nodes_) {
      lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
      hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    center_ = 0.5 * (lo + hi);
    for (const Point2& p : nodes_) radius_ = std::max(radius_, norm(p - center_));
  }

  std::vector<Point2> nodes_;
  std::vector<Element> elements_;
  DomainKind kind_;
  Point2 center_{};
  double radius_ = 0.0;
};

/// Affine frame in which a bilinear polynomial is written:
/// u = s (p - origin) . axis, v = s (p - origin) . perp(axis).
struct ElementFrame {
  Point2 origin{0.0, 0.0};
  Point2 axis{1.0, 0.0};
  double inv_scale = 1.0;

  Point2 local(Point2 p) const {
    const Point2 d = p - origin;
    return {inv_scale * dot(d, axis), inv_scale * dot(d, perp(axis))};
  }
};

/// beta + gamma u + eta v + zeta u v, with (u, v) = frame.local(p).
/// The default frame is the identity, i.e. the plain polynomial in (x, y).
struct BilinearCoeffs {
  double beta = 0.0;
  double gamma = 0.0;
  double eta = 0.0;
  double zeta = 0.0;
  ElementFrame frame{};

  double evaluate(Point2 p) const {
    const Point2 q = frame.local(p);
    return beta + gamma * q.x + eta * q.y + zeta * q.x * q.y;
  }
};

/// Per-element bilinear basis: coefficients = inverse * (four nodal values).
struct ElementBasis {
  ElementFrame frame;
  Eigen::Matrix4d inverse;

  static Eigen::RowVector4d monomials(Point2 local) {
    return {1.0, local.x, local.y, local.x * local.y};
  }
  /// Weights w with w . nodal_values = field value at p.
  Eigen::RowVector4d nodal_weights(Point2 p) const { return monomials(frame.local(p)) * inverse; }

  BilinearCoeffs coefficients(const std::array<double, 4>& nodal) const {
    const Eigen::Vector4d c = inverse * Eigen::Vector4d(nodal[0], nodal[1], nodal[2], nodal[3]);
    return {c[0], c[1], c[2], c[3], frame};
  }
};

namespace detail {

inline Eigen::Matrix4d invert_vandermonde(const std::array<Point2, 4>& local, std::size_t element) {
  Eigen::Matrix4d v;
  for (int i = 0; i < 4; ++i) v.row(i) = ElementBasis::monomials(local[static_cast<std::size_t>(i)]);
  Eigen::FullPivLU<Eigen::Matrix4d> lu(v);
  if (!lu.isInvertible() || lu.rcond() < 1e-12)
    throw DegenerateElementError(element, "bilinear interpolation system is singular");
  return lu.inverse();
}

inline ElementFrame centered_frame(const std::array<Point2, 4>& p, Point2 axis) {
  ElementFrame f;
  f.origin = 0.25 * (p[0] + p[1] + p[2] + p[3]);
  f.axis = axis;
  double reach = 0.0;
  for (const Point2& c : p) reach = std::max(reach, norm(c - f.origin));
  f.inv_scale = 1.0 / reach;
  return f;
}

}  // namespace detail

/// Basis in the element-aligned frame used for operator assembly: centred on
/// the corner average, u along the mean of edges 0-1 and 3-2, scaled to unit
/// reach. Equal to the physical {1, x, y, xy} basis on axis-aligned elements
/// and non-singular for rotated ones.
inline ElementBasis element_basis(const QuadMesh& mesh, std::size_t e) {
  const auto p = mesh.corners(e);
  const Point2 dir = (p[1] - p[0]) + (p[2] - p[3]);
  const double len = norm(dir);
  if (!(len > 0.0)) throw DegenerateElementError(e, "collapsed edges");
  const ElementFrame frame = detail::centered_frame(p, (1.0 / len) * dir);
  std::array<Point2, 4> local;
  for (std::size_t i = 0; i < 4; ++i) local[i] = frame.local(p[i]);
  return {frame, detail::invert_vandermonde(local, e)};
}

inline std::vector<ElementBasis> element_bases(const QuadMesh& mesh) {
  std::vector<ElementBasis> out;
  out.reserve(mesh.element_count());
  for (std::size_t e = 0; e < mesh.element_count(); ++e) out.push_back(element_basis(mesh, e));
  return out;
}

/// Coefficients of beta + gamma x + eta y + zeta x y interpolating the four
/// nodal values (ordered as the element's nodes) in global coordinates.
///
/// The system is solved about the element centre with axis-aligned scaling and
/// expanded back, which keeps it well conditioned far from the origin.
inline BilinearCoeffs element_coefficients(const QuadMesh& mesh, std::size_t e,
                                           const std::array<double, 4>& nodal_values) {
  const auto p = mesh.corners(e);
  const ElementFrame frame = detail::centered_frame(p, {1.0, 0.0});
  std::array<Point2, 4> local;
  for (std::size_t i = 0; i < 4; ++i) local[i] = frame.local(p[i]);
  const Eigen::Matrix4d inv = detail::invert_vandermonde(local, e);
  const Eigen::Vector4d c =
      inv * Eigen::Vector4d(nodal_values[0], nodal_values[1], nodal_values[2], nodal_values[3]);
  const double s = frame.inv_scale;
  const double ox = frame.origin.x;
  const double oy = frame.origin.y;
  BilinearCoeffs g;
  g.zeta = c[3] * s * s;
  g.gamma = c[1] * s - g.zeta * oy;
  g.eta = c[2] * s - g.zeta * ox;
  g.beta = c[0] - c[1] * s * ox - c[2] * s * oy + g.zeta * ox * oy;
  return g;
}

}  // namespace lrt
