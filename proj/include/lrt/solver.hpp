#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "lrt/detail/cholmod.hpp"
#include "lrt/detail/gram.hpp"
#include "lrt/errors.hpp"
#include "lrt/forward.hpp"
#include "lrt/mesh.hpp"
#include "lrt/stiffness.hpp"
#include "lrt/strain_field.hpp"

namespace lrt {

enum class ConstraintMode { kkt, penalty };
enum class Regularizer { none, identity, stiffness };

inline std::string_view to_string(ConstraintMode m) { return m == ConstraintMode::kkt ? "kkt" : "penalty"; }
inline std::string_view to_string(Regularizer r) {
  switch (r) {
    case Regularizer::none: return "none";
    case Regularizer::identity: return "identity";
    case Regularizer::stiffness: return "stiffness";
  }
  return "none";
}

struct SolverConfig {
  ConstraintMode constraint_mode = ConstraintMode::kkt;
  /// w in ||K e - I||^2 + w^2 ||C e||^2 (penalty mode only).
  double penalty_weight = 1e4;
  /// Multiplier of B in the stacked system [K; alpha B].
  double alpha = 0.0;
  Regularizer regularizer = Regularizer::none;
  /// Required ||C e||_inf / max(1, ||e||_inf) in kkt mode.
  double constraint_tolerance = 1e-8;
  /// Return the shift-regularised (minimum-norm-like) solution instead of
  /// raising SingularSystemError when the system is rank deficient.
  bool allow_rank_deficient = false;
  std::size_t max_iterations = 500;
  /// rho ||Cn||_F^2 / trace(K^T K + alpha^2 B^T B) for the multiplier method.
  double augmentation_ratio = 1.0;

  void check() const {
    if (!(alpha >= 0.0)) throw Error("alpha must be non-negative");
    if (!(penalty_weight > 0.0)) throw Error("penalty weight must be positive");
    if (!(constraint_tolerance > 0.0)) throw Error("constraint tolerance must be positive");
    if (!(augmentation_ratio > 0.0)) throw Error("augmentation ratio must be positive");
  }
};

struct SolverStats {
  std::size_t iterations = 0;
  /// Diagonal shift added to the normal-equations block.
  double shift = 0.0;
  /// Augmented-Lagrangian weight on the row-normalised constraints (kkt).
  double augmentation = 0.0;
  double factor_nonzeros = 0.0;
  /// Pivots at the level of the shift, i.e. directions fixed only by it.
  std::size_t deficiency = 0;
  bool converged = false;
};

struct ReconResult {
  NodalStrainField field;
  /// ||K e - I||_2
  double data_residual = 0.0;
  /// ||C e||_inf
  double constraint_residual = 0.0;
  /// ||B e||_2
  double reg_norm = 0.0;
  /// ||2 K^T (K e - I) + C^T mu + 2 alpha^2 B^T B e||_inf
  double stationarity = 0.0;
  /// Lagrange multipliers mu of C e = 0 (kkt mode).
  Eigen::VectorXd multipliers;
  SolverStats stats;
};

/// B for the chosen regulariser: empty, the identity, or blockdiag(S, S, S).
inline RowMatrix regularization_matrix(Regularizer kind, const QuadMesh& mesh) {
  const auto m = static_cast<Eigen::Index>(mesh.node_count());
  RowMatrix b(3 * m, 3 * m);
  if (kind == Regularizer::identity) {
    b.setIdentity();
  } else if (kind == Regularizer::stiffness) {
    const StiffnessMatrix s = assemble_stiffness(mesh);
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(3 * static_cast<std::size_t>(s.nonZeros()));
    for (Eigen::Index block = 0; block < 3; ++block)
      for (Eigen::Index k = 0; k < s.outerSize(); ++k)
        for (StiffnessMatrix::InnerIterator it(s, k); it; ++it)
          t.emplace_back(block * m + it.row(), block * m + it.col(), it.value());
    b.setFromTriplets(t.begin(), t.end());
  }
  b.makeCompressed();
  return b;
}

namespace detail {

inline double sum_squares(const RowMatrix& m) {
  return m.nonZeros() == 0 ? 0.0 : Eigen::Map<const Eigen::VectorXd>(m.valuePtr(), m.nonZeros()).squaredNorm();
}

inline double inf_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

// Shared driver for the constrained and the Tikhonov-regularised solves:
// minimise ||K e - I||^2 + alpha^2 ||B e||^2 subject to C e = 0 (kkt) or with
// w^2 ||C e||^2 added (penalty).
//
// kkt mode runs the method of multipliers on the row-normalised constraints
// Cn = D C. One Cholesky factorisation of
//   H = K^T K + alpha^2 B^T B + rho Cn^T Cn + shift I
// is reused for every iteration; each iteration performs one refinement step
// x += H^{-1} (K^T I - Cn^T y - (H - rho Cn^T Cn) x - rho Cn^T Cn x) and the
// multiplier update y += rho Cn x, until both the stationarity and the
// feasibility residuals fall below target.
inline ReconResult solve_least_squares(const RowMatrix& k, const Eigen::VectorXd& data,
                                       const RowMatrix& c, const RowMatrix* b, double alpha,
                                       const SolverConfig& config) {
  config.check();
  if (!(alpha >= 0.0)) throw Error("alpha must be non-negative");
  const Eigen::Index n = k.cols();
  if (k.rows() < 1) throw DimensionMismatchError("measurement operator has no rows");
  if (data.size() != k.rows())
    throw DimensionMismatchError("data length " + std::to_string(data.size()) +
                                 " does not match operator rows " + std::to_string(k.rows()));
  if (c.rows() > 0 && c.cols() != n)
    throw DimensionMismatchError("constraint and measurement column counts differ");
  if (n % 3 != 0) throw DimensionMismatchError("unknown count is not a multiple of 3");
  const bool use_b = b != nullptr && alpha > 0.0;
  if (b != nullptr && (b->rows() != n || b->cols() != n))
    throw DimensionMismatchError("regularisation matrix must be square over the unknowns");

  RowMatrix kc = k;
  kc.makeCompressed();
  RowMatrix bc;
  if (use_b) {
    bc = *b;
    bc.makeCompressed();
  }
  const bool constrained = c.rows() > 0;
  const bool kkt = config.constraint_mode == ConstraintMode::kkt;

  // Row scaling of C: every constraint row gets unit largest entry.
  Eigen::VectorXd row_scale = Eigen::VectorXd::Zero(c.rows());
  RowMatrix craw = c;
  craw.makeCompressed();
  RowMatrix cn = craw;
  for (Eigen::Index r = 0; r < cn.rows(); ++r) {
    double big = 0.0;
    for (RowMatrix::InnerIterator it(cn, r); it; ++it) big = std::max(big, std::abs(it.value()));
    row_scale[r] = big > 0.0 ? 1.0 / big : 0.0;
    for (RowMatrix::InnerIterator it(cn, r); it; ++it) it.valueRef() *= row_scale[r];
  }

  const double trace_a = sum_squares(kc) + (use_b ? alpha * alpha * sum_squares(bc) : 0.0);
  const double mean_diag = trace_a > 0.0 ? trace_a / double(n) : 1.0;
  SolverStats stats;
  stats.shift = 1e-12 * mean_diag;

  std::vector<GramTerm> terms{{&kc, 1.0}};
  if (use_b) terms.push_back({&bc, alpha});
  double rho = 0.0;
  if (constrained && kkt) {
    const double c_norm2 = sum_squares(cn);
    rho = c_norm2 > 0.0 ? config.augmentation_ratio * trace_a / c_norm2 : 0.0;
    stats.augmentation = rho;
    if (rho > 0.0) terms.push_back({&cn, std::sqrt(rho)});
  } else if (constrained) {
    terms.push_back({&craw, config.penalty_weight});
  }

  Eigen::SparseMatrix<double> h = gram_lower(terms, n, stats.shift);
  CholmodFactor factor;
  if (!factor.factorize(h)) {
    const std::size_t failed = factor.failed_column();
    throw SingularSystemError(static_cast<std::size_t>(n) - failed,
                              "normal equations are not positive definite (elimination stopped "
                              "at column " + std::to_string(failed) + ")");
  }
  stats.factor_nonzeros = factor.factor_nonzeros();
  for (double d : factor.pivots())
    if (d <= 1e3 * stats.shift) ++stats.deficiency;
  if (stats.deficiency > 0 && !config.allow_rank_deficient)
    throw SingularSystemError(stats.deficiency, "reconstruction system is rank deficient");
  h.resize(0, 0);
  h.data().squeeze();

  // Normal-equations operator without the augmentation term.
  const auto apply_a = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd y = kc.transpose() * (kc * x);
    if (use_b) y += alpha * alpha * (bc.transpose() * (bc * x));
    if (constrained && !kkt)
      y += config.penalty_weight * config.penalty_weight * (c.transpose() * (c * x));
    return y;
  };

  const Eigen::VectorXd rhs = kc.transpose() * data;
  const double rhs_scale = inf_norm(rhs) + 1.0;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(cn.rows());
  const bool augmented = constrained && kkt && rho > 0.0;

  // Iterate to scale-relative targets (strains are ~1e-3 and C rows scale
  // with element size, so absolute floors would stop far too early), until
  // round-off stalls progress.
  const double stationarity_goal = 1e-13 * inf_norm(rhs);
  double best_stationarity = std::numeric_limits<double>::infinity();
  double best_feasibility = std::numeric_limits<double>::infinity();
  std::size_t stalled = 0;
  for (std::size_t it = 0; it < config.max_iterations; ++it) {
    Eigen::VectorXd residual = rhs - apply_a(x) - stats.shift * x;
    if (augmented) residual -= cn.transpose() * (y + rho * (cn * x));
    x += factor.solve(residual);
    if (augmented) y += rho * (cn * x);
    stats.iterations = it + 1;

    Eigen::VectorXd grad = apply_a(x) - rhs;
    if (augmented) grad += cn.transpose() * y;
    const double stationarity = inf_norm(grad);
    const double feasibility = augmented ? inf_norm(cn * x) : 0.0;
    if (stationarity <= stationarity_goal && feasibility <= 1e-13 * inf_norm(x)) break;
    bool improved = false;
    if (stationarity < 0.5 * best_stationarity) {
      best_stationarity = stationarity;
      improved = true;
    }
    if (feasibility < 0.5 * best_feasibility) {
      best_feasibility = feasibility;
      improved = true;
    }
    stalled = improved ? 0 : stalled + 1;
    if (stalled >= 8) break;
  }

  ReconResult out;
  out.field = NodalStrainField(x);
  out.data_residual = (kc * x - data).norm();
  out.constraint_residual = constrained ? inf_norm(c * x) : 0.0;
  out.reg_norm = b != nullptr ? (*b * x).norm() : 0.0;
  Eigen::VectorXd grad = 2.0 * (kc.transpose() * (kc * x) - rhs);
  if (use_b) grad += 2.0 * alpha * alpha * (bc.transpose() * (bc * x));
  if (augmented) {
    out.multipliers = 2.0 * row_scale.cwiseProduct(y);
    grad += c.transpose() * out.multipliers;
  } else if (constrained && !kkt) {
    grad += 2.0 * config.penalty_weight * config.penalty_weight * (c.transpose() * (c * x));
  }
  out.stationarity = inf_norm(grad);
  stats.converged = out.stationarity <= 1e-8 * rhs_scale &&
                    (!constrained || !kkt ||
                     out.constraint_residual <= config.constraint_tolerance * std::max(1.0, inf_norm(x)));
  out.stats = stats;
  return out;
}

}  // namespace detail

/// min ||K e - I||_2 subject to C e = 0 (kkt) or with the penalty rows w C.
inline ReconResult solve_constrained(const RowMatrix& k, const Eigen::VectorXd& data,
                                     const RowMatrix& c, const SolverConfig& config = {}) {
  return detail::solve_least_squares(k, data, c, nullptr, 0.0, config);
}

/// min ||K e - I||^2 + alpha^2 ||B e||^2, constrained as in solve_constrained.
/// alpha = 0 reproduces solve_constrained exactly.
inline ReconResult solve_tikhonov(const RowMatrix& k, const Eigen::VectorXd& data,
                                  const RowMatrix& c, const RowMatrix& b, double alpha,
                                  const SolverConfig& config = {}) {
  return detail::solve_least_squares(k, data, c, &b, alpha, config);
}

struct SweepPoint {
  double alpha = 0.0;
  ReconResult result;
};

/// solve_tikhonov at each alpha of the grid, in grid order.
inline std::vector<SweepPoint> sweep_alpha(const RowMatrix& k, const Eigen::VectorXd& data,
                                           const RowMatrix& c, const RowMatrix& b,
                                           const std::vector<double>& alphas,
                                           const SolverConfig& config = {}) {
  std::vector<SweepPoint> out;
  out.reserve(alphas.size());
  for (double a : alphas) out.push_back({a, solve_tikhonov(k, data, c, b, a, config)});
  return out;
}

inline constexpr double kDiscrepancyTau = 1.1;

/// Discrepancy principle: the largest alpha whose data residual does not
/// exceed tau * sigma * sqrt(N). Falls back to the smallest residual.
inline std::size_t discrepancy_choice(const std::vector<SweepPoint>& sweep, double sigma,
                                      std::size_t measurements, double tau = kDiscrepancyTau) {
  if (sweep.empty()) throw Error("empty alpha sweep");
  const double target = tau * sigma * std::sqrt(double(measurements));
  std::size_t best = sweep.size();
  for (std::size_t i = 0; i < sweep.size(); ++i)
    if (sweep[i].result.data_residual <= target && (best == sweep.size() || sweep[i].alpha > sweep[best].alpha))
      best = i;
  if (best != sweep.size()) return best;
  best = 0;
  for (std::size_t i = 1; i < sweep.size(); ++i)
    if (sweep[i].result.data_residual < sweep[best].result.data_residual) best = i;
  return best;
}

struct ComponentError {
  double rmse = 0.0;
  double max_abs = 0.0;
  /// rmse / max |reference|; infinite when the reference vanishes and rmse > 0.
  double normalized_rmse = 0.0;
};

struct FieldComparison {
  std::array<ComponentError, 3> components;  // e11, e12, e22
  /// RMSE over all three components together.
  double rmse = 0.0;
};

/// Errors of `a` against the reference `b`, both on `mesh`.
inline FieldComparison compare_fields(const NodalStrainField& a, const NodalStrainField& b,
                                      const QuadMesh& mesh) {
  if (a.node_count() != mesh.node_count() || b.node_count() != mesh.node_count())
    throw MeshMismatchError("fields have " + std::to_string(a.node_count()) + " and " +
                            std::to_string(b.node_count()) + " nodes, mesh has " +
                            std::to_string(mesh.node_count()));
  FieldComparison out;
  double total = 0.0;
  for (int c = 0; c < 3; ++c) {
    const auto comp = static_cast<Component>(c);
    const Eigen::VectorXd diff = a.component(comp) - b.component(comp);
    ComponentError& e = out.components[static_cast<std::size_t>(c)];
    const double n = double(std::max<Eigen::Index>(1, diff.size()));
    e.rmse = std::sqrt(diff.squaredNorm() / n);
    e.max_abs = detail::inf_norm(diff);
    const double ref = detail::inf_norm(b.component(comp));
    e.normalized_rmse = ref > 0.0 ? e.rmse / ref : (e.rmse == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    total += diff.squaredNorm();
  }
  out.rmse = std::sqrt(total / double(std::max<std::size_t>(1, 3 * mesh.node_count())));
  return out;
}

}  // namespace lrt
