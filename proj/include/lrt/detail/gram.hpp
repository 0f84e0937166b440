#pragma once

#include <algorithm>
#include <vector>

#include <Eigen/Sparse>

#include "lrt/errors.hpp"

namespace lrt::detail {

struct GramTerm {
  const Eigen::SparseMatrix<double, Eigen::RowMajor>* matrix;
  double weight;
};

/// Lower triangle of sum_t weight_t^2 M_t^T M_t + shift I, column by column
/// with a dense accumulator.
inline Eigen::SparseMatrix<double> gram_lower(const std::vector<GramTerm>& terms, Eigen::Index n,
                                              double shift) {
  std::vector<Eigen::SparseMatrix<double>> by_column;
  by_column.reserve(terms.size());
  for (const GramTerm& t : terms) {
    if (t.matrix->cols() != n) throw DimensionMismatchError("gram term has the wrong column count");
    by_column.emplace_back(*t.matrix);
    by_column.back().makeCompressed();
  }

  Eigen::SparseMatrix<double> out(n, n);
  std::vector<double> acc(static_cast<std::size_t>(n), 0.0);
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<Eigen::Index> touched;
  std::vector<int> outer(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> inner;
  std::vector<double> values;

  for (Eigen::Index j = 0; j < n; ++j) {
    touched.clear();
    touched.push_back(j);
    seen[static_cast<std::size_t>(j)] = 1;
    acc[static_cast<std::size_t>(j)] = shift;
    for (std::size_t t = 0; t < terms.size(); ++t) {
      const auto& rows = *terms[t].matrix;
      const double w2 = terms[t].weight * terms[t].weight;
      for (Eigen::SparseMatrix<double>::InnerIterator cj(by_column[t], j); cj; ++cj) {
        const Eigen::Index r = cj.row();
        const double a = w2 * cj.value();
        const int* idx = rows.innerIndexPtr() + rows.outerIndexPtr()[r];
        const int* end = rows.innerIndexPtr() + rows.outerIndexPtr()[r + 1];
        const double* val = rows.valuePtr() + rows.outerIndexPtr()[r];
        const int* start = std::lower_bound(idx, end, static_cast<int>(j));
        for (const int* it = start; it != end; ++it) {
          const auto i = static_cast<std::size_t>(*it);
          if (!seen[i]) {
            seen[i] = 1;
            touched.push_back(*it);
            acc[i] = 0.0;
          }
          acc[i] += a * val[it - idx];
        }
      }
    }
    std::sort(touched.begin(), touched.end());
    for (Eigen::Index i : touched) {
      inner.push_back(static_cast<int>(i));
      values.push_back(acc[static_cast<std::size_t>(i)]);
      seen[static_cast<std::size_t>(i)] = 0;
    }
    outer[static_cast<std::size_t>(j) + 1] = static_cast<int>(inner.size());
  }
  out.resizeNonZeros(static_cast<Eigen::Index>(inner.size()));
  std::copy(outer.begin(), outer.end(), out.outerIndexPtr());
  std::copy(inner.begin(), inner.end(), out.innerIndexPtr());
  std::copy(values.begin(), values.end(), out.valuePtr());
  return out;
}

}  // namespace lrt::detail
