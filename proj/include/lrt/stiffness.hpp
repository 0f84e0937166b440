#pragma once

#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "lrt/mesh.hpp"

namespace lrt {

/// S_ij = integral over the domain of grad(phi_i) . grad(phi_j), one row per node.
using StiffnessMatrix = Eigen::SparseMatrix<double>;

/// Element gradient matrix of the isoparametric bilinear basis, 2x2 Gauss.
inline Eigen::Matrix4d element_stiffness(const std::array<Point2, 4>& p) {
  static constexpr std::array<double, 4> xi_n{-1.0, 1.0, 1.0, -1.0};
  static constexpr std::array<double, 4> eta_n{-1.0, -1.0, 1.0, 1.0};
  const double g = 1.0 / std::sqrt(3.0);
  Eigen::Matrix4d ke = Eigen::Matrix4d::Zero();
  for (double xi : {-g, g}) {
    for (double eta : {-g, g}) {
      Eigen::Matrix<double, 2, 4> dref;
      for (int a = 0; a < 4; ++a) {
        dref(0, a) = 0.25 * xi_n[a] * (1.0 + eta * eta_n[a]);
        dref(1, a) = 0.25 * eta_n[a] * (1.0 + xi * xi_n[a]);
      }
      Eigen::Matrix2d jac = Eigen::Matrix2d::Zero();
      for (int a = 0; a < 4; ++a) {
        jac(0, 0) += dref(0, a) * p[a].x;
        jac(0, 1) += dref(0, a) * p[a].y;
        jac(1, 0) += dref(1, a) * p[a].x;
        jac(1, 1) += dref(1, a) * p[a].y;
      }
      const double det = jac.determinant();
      const Eigen::Matrix<double, 2, 4> grad = jac.inverse() * dref;
      ke.noalias() += det * grad.transpose() * grad;
    }
  }
  // Exact symmetry, independent of the product kernel's rounding.
  ke.triangularView<Eigen::StrictlyLower>() = ke.transpose();
  return ke;
}

inline StiffnessMatrix assemble_stiffness(const QuadMesh& mesh) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(16 * mesh.element_count());
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const Eigen::Matrix4d ke = element_stiffness(mesh.corners(e));
    const auto& el = mesh.element(e);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        triplets.emplace_back(static_cast<int>(el[a]), static_cast<int>(el[b]), ke(a, b));
  }
  const auto m = static_cast<Eigen::Index>(mesh.node_count());
  StiffnessMatrix s(m, m);
  s.setFromTriplets(triplets.begin(), triplets.end());
  return s;
}

}  // namespace lrt
