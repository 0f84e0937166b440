#pragma once

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "lrt/errors.hpp"
#include "lrt/forward.hpp"
#include "lrt/mesh.hpp"

namespace lrt {

/// C: two integrated plane-stress equilibrium rows per element, C eps = 0.
struct ConstraintMatrix {
  RowMatrix matrix;
  double nu = 0.0;
};

namespace detail {

inline void check_poisson(double nu) {
  if (!(nu >= 0.0 && nu < 0.5))
    throw Error("Poisson ratio must lie in [0, 0.5), got " + std::to_string(nu));
}

struct ElementDerivatives {
  // Integrals over the element of d/dx and d/dy of the interpolated field,
  // as weights on the four nodal values.
  Eigen::RowVector4d dx;
  Eigen::RowVector4d dy;
};

inline ElementDerivatives integrated_derivatives(const QuadMesh& mesh, std::size_t e,
                                                 const ElementBasis& basis) {
  const auto p = mesh.corners(e);
  const ElementFrame& f = basis.frame;
  // Exact polygon moments about the frame origin.
  double area = 0.0;
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const Point2 a = p[i] - f.origin;
    const Point2 b = p[(i + 1) % 4] - f.origin;
    const double w = cross(a, b);
    area += w;
    mx += (a.x + b.x) * w;
    my += (a.y + b.y) * w;
  }
  area *= 0.5;
  mx /= 6.0;
  my /= 6.0;
  const double s = f.inv_scale;
  const Point2 u = f.axis;
  const Point2 v = perp(u);
  const double mu = s * (mx * u.x + my * u.y);
  const double mv = s * (mx * v.x + my * v.y);

  // Integrated d/du and d/dv over the (beta, gamma, eta, zeta) coefficients.
  const Eigen::RowVector4d du(0.0, area, 0.0, mv);
  const Eigen::RowVector4d dv(0.0, 0.0, area, mu);
  return {s * (u.x * du + v.x * dv) * basis.inverse, s * (u.y * du + v.y * dv) * basis.inverse};
}

}  // namespace detail

/// The two rows for element e:
///   int_P d/dx (e11 + nu e22) + (1 - nu) d/dy e12 = 0
///   int_P d/dy (e22 + nu e11) + (1 - nu) d/dx e12 = 0
inline std::pair<SparseRow, SparseRow> element_equilibrium_rows(const QuadMesh& mesh,
                                                                std::size_t e, double nu) {
  detail::check_poisson(nu);
  const ElementBasis basis = element_basis(mesh, e);
  const auto d = detail::integrated_derivatives(mesh, e, basis);
  const auto m = static_cast<Eigen::Index>(mesh.node_count());
  const auto& el = mesh.element(e);
  const auto col = [&](Component c, int k) {
    return static_cast<Eigen::Index>(c) * m + static_cast<Eigen::Index>(el[static_cast<std::size_t>(k)]);
  };
  SparseRow r1(3 * m);
  SparseRow r2(3 * m);
  for (int k = 0; k < 4; ++k) {
    r1.coeffRef(col(Component::e11, k)) += d.dx[k];
    r1.coeffRef(col(Component::e12, k)) += (1.0 - nu) * d.dy[k];
    r2.coeffRef(col(Component::e22, k)) += d.dy[k];
    r2.coeffRef(col(Component::e12, k)) += (1.0 - nu) * d.dx[k];
    if (nu != 0.0) {
      r1.coeffRef(col(Component::e22, k)) += nu * d.dx[k];
      r2.coeffRef(col(Component::e11, k)) += nu * d.dy[k];
    }
  }
  return {std::move(r1), std::move(r2)};
}

/// Stacks the element rows in element order.
inline ConstraintMatrix assemble_constraints(const QuadMesh& mesh, double nu) {
  detail::check_poisson(nu);
  const auto m = static_cast<Eigen::Index>(mesh.node_count());
  const std::size_t p = mesh.element_count();
  std::vector<std::array<std::vector<std::pair<Eigen::Index, double>>, 2>> rows(p);
  parallel_for(p, [&](std::size_t e) {
    const auto [r1, r2] = element_equilibrium_rows(mesh, e, nu);
    for (int r = 0; r < 2; ++r) {
      const SparseRow& row = r == 0 ? r1 : r2;
      for (SparseRow::InnerIterator it(row); it; ++it) rows[e][static_cast<std::size_t>(r)].emplace_back(it.index(), it.value());
    }
  });
  ConstraintMatrix c;
  c.nu = nu;
  c.matrix.resize(2 * static_cast<Eigen::Index>(p), 3 * m);
  c.matrix.reserve(24 * static_cast<Eigen::Index>(p));
  Eigen::Index r = 0;
  for (std::size_t e = 0; e < p; ++e) {
    for (auto& row : rows[e]) {
      c.matrix.startVec(r);
      for (const auto& [col, v] : row) c.matrix.insertBack(r, col) = v;
      ++r;
    }
  }
  c.matrix.finalize();
  return c;
}

}  // namespace lrt
