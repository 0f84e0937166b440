#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

#include "lrt/errors.hpp"
#include "lrt/geometry.hpp"
#include "lrt/mesh.hpp"

namespace lrt {

/// nx-by-ny grid of rectangles over [x_min, x_max] x [y_min, y_max].
/// Nodes are numbered row-major (x fastest); elements likewise.
inline QuadMesh build_structured_mesh(double x_min, double x_max, double y_min, double y_max,
                                      std::size_t nx, std::size_t ny) {
  if (!(x_max > x_min) || !(y_max > y_min) || !std::isfinite(x_max - x_min) ||
      !std::isfinite(y_max - y_min))
    throw InvalidGeometryError("structured mesh needs x_max > x_min and y_max > y_min");
  if (nx < 1 || ny < 1) throw InvalidGeometryError("structured mesh needs nx >= 1 and ny >= 1");

  std::vector<Point2> nodes;
  nodes.reserve((nx + 1) * (ny + 1));
  for (std::size_t j = 0; j <= ny; ++j) {
    const double y = j == ny ? y_max : y_min + (y_max - y_min) * double(j) / double(ny);
    for (std::size_t i = 0; i <= nx; ++i) {
      const double x = i == nx ? x_max : x_min + (x_max - x_min) * double(i) / double(nx);
      nodes.push_back({x, y});
    }
  }
  std::vector<QuadMesh::Element> elements;
  elements.reserve(nx * ny);
  const std::size_t stride = nx + 1;
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t n0 = j * stride + i;
      elements.push_back({n0, n0 + 1, n0 + 1 + stride, n0 + stride});
    }
  }
  return QuadMesh(std::move(nodes), std::move(elements), DomainKind::rectangle);
}

/// Geometry of a disc of radius outer_radius centred at the origin containing a
/// circular plug of radius bore_radius centred at (bore_offset, 0).
struct RingPlugGeometry {
  double outer_radius = 0.0;
  double bore_radius = 0.0;
  double bore_offset = 0.0;

  Point2 bore_center() const { return {bore_offset, 0.0}; }

  void check() const {
    if (!(bore_radius > 0.0) || !(outer_radius > 0.0) ||
        !(std::abs(bore_offset) + bore_radius < outer_radius) || !std::isfinite(outer_radius))
      throw InvalidGeometryError(
          "ring-plug geometry needs 0 < bore_radius and |bore_offset| + bore_radius < "
          "outer_radius");
  }
};

namespace detail {

class RingPlugMesher {
 public:
  RingPlugMesher(const RingPlugGeometry& g, double element_size) : g_(g) {
    // Splitting a near-equilateral triangle of side H yields three quads of
    // area (sqrt(3) / 12) H^2; pick H so that quads have area element_size^2.
    coarse_ = element_size * std::sqrt(12.0 / std::sqrt(3.0));
    radial_ = 0.5 * std::sqrt(3.0) * coarse_;
  }

  QuadMesh build() {
    const double b = g_.bore_radius;
    const double c = g_.outer_radius;
    const Point2 bc = g_.bore_center();

    // Plug: centre node plus concentric rings about the bore centre.
    const std::size_t center = add_node(bc, Tag::interior);
    const std::size_t plug_rings = std::max<std::size_t>(1, std::lround(b / radial_));
    std::vector<std::size_t> prev;
    for (std::size_t k = 1; k <= plug_rings; ++k) {
      const double r = b * double(k) / double(plug_rings);
      const std::size_t n = ring_count(r);
      const Tag tag = k == plug_rings ? Tag::interface : Tag::interior;
      std::vector<std::size_t> ring;
      ring.reserve(n);
      for (std::size_t i = 0; i < n; ++i) ring.push_back(add_node(bc + r * unit(i, n), tag));
      if (k == 1) {
        for (std::size_t i = 0; i < n; ++i) add_cell({center, ring[i], ring[(i + 1) % n]});
      } else {
        zip(prev, ring);
      }
      prev = std::move(ring);
    }

    // Ring: blend between the bore circle and the outer circle.
    const std::size_t layers = std::max<std::size_t>(1, std::lround((c - b) / radial_));
    for (std::size_t j = 1; j <= layers; ++j) {
      const double t = double(j) / double(layers);
      const std::size_t n = ring_count((1.0 - t) * b + t * c);
      const Tag tag = j == layers ? Tag::outer : Tag::interior;
      std::vector<std::size_t> ring;
      ring.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        const Point2 e = unit(i, n);
        ring.push_back(add_node((1.0 - t) * (bc + b * e) + t * c * e, tag));
      }
      zip(prev, ring);
      prev = std::move(ring);
    }
    return split();
  }

 private:
  enum class Tag { interior, interface, outer };

  std::size_t ring_count(double r) const {
    return std::max<std::size_t>(6, std::lround(2.0 * std::numbers::pi * r / coarse_));
  }

  // Ring nodes start at the top of the circle so that every ring is mirror
  // symmetric about the vertical axis.
  static Point2 unit(std::size_t i, std::size_t n) {
    const double phi = 0.5 * std::numbers::pi + 2.0 * std::numbers::pi * double(i) / double(n);
    return {std::cos(phi), std::sin(phi)};
  }

  std::size_t add_node(Point2 p, Tag tag) {
    nodes_.push_back(p);
    tags_.push_back(tag);
    return nodes_.size() - 1;
  }

  void add_cell(std::vector<std::size_t> cell) {
    double twice = 0.0;
    for (std::size_t i = 0; i < cell.size(); ++i)
      twice += cross(nodes_[cell[i]], nodes_[cell[(i + 1) % cell.size()]]);
    if (twice < 0.0) std::reverse(cell.begin(), cell.end());
    cells_.push_back(std::move(cell));
  }

  // Stitch two closed rings. Node i of a ring with n nodes owns the parameter
  // interval ((i - 1/2) / n, (i + 1/2) / n); one cell is emitted per interval
  // boundary, in parameter order, compared in exact integer arithmetic.
  void zip(const std::vector<std::size_t>& inner, const std::vector<std::size_t>& outer) {
    const std::size_t na = inner.size();
    const std::size_t nb = outer.size();
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < na || j < nb) {
      const std::size_t lhs = (2 * i + 1) * nb;
      const std::size_t rhs = (2 * j + 1) * na;
      const std::size_t a0 = inner[i % na];
      const std::size_t a1 = inner[(i + 1) % na];
      const std::size_t b0 = outer[j % nb];
      const std::size_t b1 = outer[(j + 1) % nb];
      if (j == nb || (i < na && lhs < rhs)) {
        add_cell({a0, a1, b0});
        ++i;
      } else if (i == na || rhs < lhs) {
        add_cell({a0, b1, b0});
        ++j;
      } else {
        add_cell({a0, a1, b1, b0});
        ++i;
        ++j;
      }
    }
  }

  std::size_t midpoint(std::size_t a, std::size_t b) {
    const auto key = std::minmax(a, b);
    if (auto it = midpoints_.find(key); it != midpoints_.end()) return it->second;
    const Point2 chord = 0.5 * (nodes_[a] + nodes_[b]);
    Point2 m = chord;
    if (tags_[a] == Tag::outer && tags_[b] == Tag::outer) {
      m = (g_.outer_radius / norm(m)) * m;
    } else if (tags_[a] == Tag::interface && tags_[b] == Tag::interface) {
      const Point2 d = m - g_.bore_center();
      m = g_.bore_center() + (g_.bore_radius / norm(d)) * d;
    }
    const std::size_t id = add_node(m, Tag::interior);
    if (!(m == chord)) chords_.emplace(id, chord);
    midpoints_.emplace(key, id);
    return id;
  }

  QuadMesh split() {
    std::vector<QuadMesh::Element> quads;
    quads.reserve(4 * cells_.size());
    for (const auto& cell : cells_) {
      const std::size_t n = cell.size();
      Point2 g{};
      for (std::size_t v : cell) g = g + nodes_[v];
      const std::size_t centre = add_node((1.0 / double(n)) * g, Tag::interior);
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t v = cell[k];
        const std::size_t next = cell[(k + 1) % n];
        const std::size_t prev = cell[(k + n - 1) % n];
        quads.push_back({v, midpoint(v, next), centre, midpoint(prev, v)});
      }
    }
    // A curved midpoint can fold a quad in a very thin layer; fall back to the
    // straight chord there.
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& q : quads) {
        const std::array<Point2, 4> p{nodes_[q[0]], nodes_[q[1]], nodes_[q[2]], nodes_[q[3]]};
        bool valid = true;
        for (int k = 0; k < 4; ++k) valid = valid && corner_jacobian(p, k) >= kMinCornerJacobian;
        if (valid) continue;
        for (std::size_t v : q) {
          if (auto it = chords_.find(v); it != chords_.end()) {
            nodes_[v] = it->second;
            chords_.erase(it);
            changed = true;
          }
        }
      }
    }
    return QuadMesh(std::move(nodes_), std::move(quads), DomainKind::ring_plug);
  }

  RingPlugGeometry g_;
  double coarse_ = 0.0;
  double radial_ = 0.0;
  std::vector<Point2> nodes_;
  std::vector<Tag> tags_;
  std::vector<std::vector<std::size_t>> cells_;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> midpoints_;
  std::map<std::size_t, Point2> chords_;  // projected midpoint -> straight position
};

}  // namespace detail

/// All-quadrilateral mesh of the ring-and-plug disc. The bore circle is
/// resolved by element edges so ring and plug share their interface nodes.
///
/// Concentric node rings (about the bore centre inside the plug, blended
/// towards the outer circle in the ring) are stitched into triangles and
/// quads, then every cell is split into quads through its edge midpoints and
/// centroid. Element count is close to pi * outer_radius^2 / element_size^2.
inline QuadMesh build_ring_plug_mesh(double outer_radius, double bore_radius, double bore_offset,
                                     double target_element_size) {
  const RingPlugGeometry g{outer_radius, bore_radius, bore_offset};
  g.check();
  if (!(target_element_size > 0.0) || !(target_element_size <= 0.125 * outer_radius))
    throw InvalidGeometryError("target element size must be in (0, outer_radius / 8]");
  return detail::RingPlugMesher(g, target_element_size).build();
}

}  // namespace lrt
