#pragma once

#include <cstddef>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "lrt/errors.hpp"
#include "lrt/geometry.hpp"
#include "lrt/mesh.hpp"

namespace lrt {

enum class Component : int { e11 = 0, e12 = 1, e22 = 2 };

/// Nodal strain unknowns in component-major order:
/// [e11 at every node | e12 at every node | e22 at every node].
class NodalStrainField {
 public:
  NodalStrainField() = default;
  explicit NodalStrainField(std::size_t node_count)
      : values_(Eigen::VectorXd::Zero(3 * static_cast<Eigen::Index>(node_count))) {}
  explicit NodalStrainField(Eigen::VectorXd values) : values_(std::move(values)) {
    if (values_.size() % 3 != 0)
      throw DimensionMismatchError("nodal strain vector length " + std::to_string(values_.size()) +
                                   " is not a multiple of 3");
  }

  /// The same tensor at every node.
  static NodalStrainField constant(std::size_t node_count, const StrainTensor& t) {
    NodalStrainField f(node_count);
    for (std::size_t i = 0; i < node_count; ++i) f.set(i, t);
    return f;
  }

  std::size_t node_count() const { return static_cast<std::size_t>(values_.size() / 3); }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }

  static Eigen::Index index(std::size_t node_count, Component c, std::size_t node) {
    return static_cast<Eigen::Index>(static_cast<std::size_t>(c) * node_count + node);
  }

  double operator()(Component c, std::size_t node) const {
    return values_[index(node_count(), c, node)];
  }
  double& operator()(Component c, std::size_t node) { return values_[index(node_count(), c, node)]; }

  StrainTensor at(std::size_t node) const {
    return {(*this)(Component::e11, node), (*this)(Component::e12, node),
            (*this)(Component::e22, node)};
  }
  void set(std::size_t node, const StrainTensor& t) {
    (*this)(Component::e11, node) = t.e11;
    (*this)(Component::e12, node) = t.e12;
    (*this)(Component::e22, node) = t.e22;
  }

  auto component(Component c) const {
    const auto m = static_cast<Eigen::Index>(node_count());
    return values_.segment(static_cast<Eigen::Index>(c) * m, m);
  }

 private:
  Eigen::VectorXd values_;
};

/// Samples an analytic field (callable Point2 -> StrainTensor, throwing
/// DomainError outside its domain) at every mesh node.
template <class Field>
NodalStrainField interpolate_to_nodes(const Field& field, const QuadMesh& mesh) {
  NodalStrainField out(mesh.node_count());
  for (std::size_t i = 0; i < mesh.node_count(); ++i) {
    try {
      out.set(i, field(mesh.node(i)));
    } catch (const DomainError& e) {
      throw DomainError("node " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace lrt
