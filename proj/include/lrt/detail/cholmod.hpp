#pragma once

#include <cstddef>
#include <vector>

#include <cholmod.h>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "lrt/errors.hpp"

namespace lrt::detail {

/// Owning handle to a CHOLMOD Cholesky factorization of a symmetric positive
/// definite matrix given by its lower triangle.
class CholmodFactor {
 public:
  CholmodFactor() {
    cholmod_start(&common_);
    common_.print = 0;
    common_.error_handler = nullptr;
  }
  ~CholmodFactor() {
    if (factor_ != nullptr) cholmod_free_factor(&factor_, &common_);
    cholmod_finish(&common_);
  }
  CholmodFactor(const CholmodFactor&) = delete;
  CholmodFactor& operator=(const CholmodFactor&) = delete;

  /// Returns false when the matrix is not numerically positive definite;
  /// failed_column() then reports where elimination broke down.
  bool factorize(Eigen::SparseMatrix<double>& lower) {
    lower.makeCompressed();
    cholmod_sparse a{};
    a.nrow = static_cast<std::size_t>(lower.rows());
    a.ncol = static_cast<std::size_t>(lower.cols());
    a.nzmax = static_cast<std::size_t>(lower.nonZeros());
    a.p = lower.outerIndexPtr();
    a.i = lower.innerIndexPtr();
    a.x = lower.valuePtr();
    a.stype = -1;
    a.itype = CHOLMOD_INT;
    a.xtype = CHOLMOD_REAL;
    a.dtype = CHOLMOD_DOUBLE;
    a.sorted = 1;
    a.packed = 1;
    if (factor_ != nullptr) cholmod_free_factor(&factor_, &common_);
    factor_ = cholmod_analyze(&a, &common_);
    if (factor_ == nullptr) throw Error("sparse Cholesky analysis failed");
    cholmod_factorize(&a, factor_, &common_);
    if (common_.status == CHOLMOD_OUT_OF_MEMORY) throw Error("sparse Cholesky ran out of memory");
    return common_.status == CHOLMOD_OK && factor_->minor == factor_->n;
  }

  std::size_t failed_column() const { return factor_ ? factor_->minor : 0; }
  std::size_t size() const { return factor_ ? factor_->n : 0; }

  /// Number of stored entries in the factor.
  double factor_nonzeros() const { return common_.lnz; }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) {
    Eigen::VectorXd b = rhs;
    cholmod_dense d{};
    d.nrow = static_cast<std::size_t>(b.size());
    d.ncol = 1;
    d.nzmax = d.nrow;
    d.d = d.nrow;
    d.x = b.data();
    d.xtype = CHOLMOD_REAL;
    d.dtype = CHOLMOD_DOUBLE;
    cholmod_dense* x = cholmod_solve(CHOLMOD_A, factor_, &d, &common_);
    if (x == nullptr) throw Error("sparse Cholesky solve failed");
    Eigen::VectorXd out = Eigen::Map<Eigen::VectorXd>(static_cast<double*>(x->x), b.size());
    cholmod_free_dense(&x, &common_);
    return out;
  }

  /// Pivots d_k (squared diagonal of L) in elimination order.
  std::vector<double> pivots() const {
    std::vector<double> d;
    if (factor_ == nullptr) return d;
    d.reserve(factor_->n);
    const double* x = static_cast<const double*>(factor_->x);
    if (factor_->is_super) {
      const int* super = static_cast<const int*>(factor_->super);
      const int* pi = static_cast<const int*>(factor_->pi);
      const int* px = static_cast<const int*>(factor_->px);
      for (std::size_t s = 0; s < factor_->nsuper; ++s) {
        const int k1 = super[s];
        const int k2 = super[s + 1];
        const int rows = pi[s + 1] - pi[s];
        for (int k = k1; k < k2; ++k) {
          const double l = x[px[s] + (k - k1) * rows + (k - k1)];
          d.push_back(l * l);
        }
      }
    } else {
      const int* p = static_cast<const int*>(factor_->p);
      for (std::size_t j = 0; j < factor_->n; ++j) {
        const double l = x[p[j]];
        d.push_back(factor_->is_ll ? l * l : l);
      }
    }
    return d;
  }

 private:
  cholmod_common common_{};
  cholmod_factor* factor_ = nullptr;
};

}  // namespace lrt::detail
