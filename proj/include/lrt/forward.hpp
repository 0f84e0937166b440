#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "lrt/errors.hpp"
#include "lrt/mesh.hpp"
#include "lrt/parallel.hpp"
#include "lrt/raytrace.hpp"
#include "lrt/strain_field.hpp"

namespace lrt {

using SparseRow = Eigen::SparseVector<double>;
using RowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Fraction of the bounding radius below which a ray's in-sample length is
/// treated as grazing and not measured.
inline constexpr double kGrazingFraction = 1e-3;

struct MeasurementRow {
  std::size_t ray_index = 0;
  double theta = 0.0;
  double offset = 0.0;
  double length = 0.0;
};

/// K: one row per measured ray over the 3m nodal unknowns.
struct MeasurementOperator {
  RowMatrix matrix;
  std::vector<MeasurementRow> rows;
};

struct SinogramRecord {
  double theta = 0.0;
  double offset = 0.0;
  double length = 0.0;
  double strain = 0.0;
  double sigma = 0.0;
};

struct Sinogram {
  std::vector<SinogramRecord> records;

  std::size_t size() const { return records.size(); }
  Eigen::VectorXd values() const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(records.size()));
    for (std::size_t i = 0; i < records.size(); ++i) v[static_cast<Eigen::Index>(i)] = records[i].strain;
    return v;
  }
};

/// Exact integral of the bilinear polynomial along the ray over [s_in, s_out].
/// The integrand is quadratic in s, so two Gauss points suffice.
inline double integrate_segment(const BilinearCoeffs& coeffs, const Ray& ray, double s_in,
                                double s_out) {
  if (s_out == s_in) return 0.0;
  const double half = 0.5 * (s_out - s_in);
  const double mid = 0.5 * (s_out + s_in);
  const double g = half / std::sqrt(3.0);
  return half * (coeffs.evaluate(ray.at(mid - g)) + coeffs.evaluate(ray.at(mid + g)));
}

namespace detail {

// Row of K for a traced path: (1/L) sum over segments of the integral of
// n^T eps n, with the bilinear coefficients mapped back onto nodal unknowns.
inline std::vector<std::pair<Eigen::Index, double>> row_entries(
    const RayPath& path, const QuadMesh& mesh, const std::vector<ElementBasis>& bases) {
  std::vector<std::pair<std::size_t, double>> node_weights;
  node_weights.reserve(4 * path.segments.size());
  const Ray& ray = path.ray;
  const double g = 1.0 / std::sqrt(3.0);
  for (const Segment& seg : path.segments) {
    const double half = 0.5 * seg.length();
    const double mid = 0.5 * (seg.s_in + seg.s_out);
    const ElementBasis& basis = bases[seg.element_id];
    const Eigen::RowVector4d w =
        half * (basis.nodal_weights(ray.at(mid - half * g)) + basis.nodal_weights(ray.at(mid + half * g)));
    const auto& el = mesh.element(seg.element_id);
    for (int k = 0; k < 4; ++k) node_weights.emplace_back(el[static_cast<std::size_t>(k)], w[k]);
  }
  std::stable_sort(node_weights.begin(), node_weights.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  const double n1 = ray.direction.x;
  const double n2 = ray.direction.y;
  const std::array<double, 3> factor{n1 * n1, 2.0 * n1 * n2, n2 * n2};
  const double inv_len = 1.0 / path.length;
  const auto m = static_cast<Eigen::Index>(mesh.node_count());

  std::vector<std::pair<std::size_t, double>> merged;
  for (const auto& [node, w] : node_weights) {
    if (!merged.empty() && merged.back().first == node) {
      merged.back().second += w;
    } else {
      merged.emplace_back(node, w);
    }
  }
  std::vector<std::pair<Eigen::Index, double>> entries;
  entries.reserve(3 * merged.size());
  for (int c = 0; c < 3; ++c) {
    if (factor[static_cast<std::size_t>(c)] == 0.0) continue;
    for (const auto& [node, w] : merged)
      entries.emplace_back(c * m + static_cast<Eigen::Index>(node),
                           factor[static_cast<std::size_t>(c)] * w * inv_len);
  }
  return entries;
}

}  // namespace detail

/// Row r of the measurement operator with r . eps = I_eps(ray).
inline SparseRow assemble_row(const Ray& ray, const QuadMesh& mesh) {
  const RayPath path = trace(ray, mesh);
  if (path.empty()) throw NoIntersectionError("ray does not intersect the mesh");
  std::vector<ElementBasis> bases(mesh.element_count());
  for (const Segment& s : path.segments) bases[s.element_id] = element_basis(mesh, s.element_id);
  SparseRow row(3 * static_cast<Eigen::Index>(mesh.node_count()));
  for (const auto& [col, v] : detail::row_entries(path, mesh, bases)) row.insert(col) = v;
  return row;
}

/// Traces every ray (in parallel) and keeps the paths longer than min_length.
inline std::vector<std::optional<RayPath>> trace_all(const std::vector<Ray>& rays,
                                                     const QuadMesh& mesh, double min_length = 0.0) {
  const RayTracer tracer(mesh);
  std::vector<std::optional<RayPath>> paths(rays.size());
  parallel_for(rays.size(), [&](std::size_t i) {
    RayPath p = tracer.trace(rays[i]);
    if (!p.empty() && p.length > min_length) paths[i] = std::move(p);
  });
  return paths;
}

/// K from already traced paths; rays without a path produce no row.
inline MeasurementOperator assemble_operator(const std::vector<std::optional<RayPath>>& paths,
                                             const QuadMesh& mesh) {
  const std::vector<ElementBasis> bases = element_bases(mesh);
  std::vector<std::vector<std::pair<Eigen::Index, double>>> entries(paths.size());
  parallel_for(paths.size(), [&](std::size_t i) {
    if (paths[i]) entries[i] = detail::row_entries(*paths[i], mesh, bases);
  });

  MeasurementOperator op;
  std::size_t nnz = 0;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (!paths[i]) continue;
    op.rows.push_back({i, paths[i]->ray.theta, paths[i]->ray.offset, paths[i]->length});
    nnz += entries[i].size();
  }
  const auto cols = 3 * static_cast<Eigen::Index>(mesh.node_count());
  op.matrix.resize(static_cast<Eigen::Index>(op.rows.size()), cols);
  op.matrix.reserve(static_cast<Eigen::Index>(nnz));
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (!paths[i]) continue;
    std::vector<std::pair<Eigen::Index, double>>& row = entries[i];
    std::sort(row.begin(), row.end());
    op.matrix.startVec(r);
    for (const auto& [col, v] : row) op.matrix.insertBack(r, col) = v;
    ++r;
  }
  op.matrix.finalize();
  return op;
}

/// K with one row per ray (in ray order) whose in-sample length exceeds
/// min_length; rays missing the mesh are skipped.
inline MeasurementOperator assemble_operator(const std::vector<Ray>& rays, const QuadMesh& mesh,
                                             double min_length = 0.0) {
  return assemble_operator(trace_all(rays, mesh, min_length), mesh);
}

enum class ProjectionMode {
  /// Sample the field at the nodes and apply the discrete operator K.
  interpolated,
  /// Integrate the analytic field along each chord with Gauss-Legendre quadrature.
  exact,
};

namespace detail {

inline void add_noise(Sinogram& s, double noise_sigma, std::uint64_t seed) {
  if (noise_sigma < 0.0) throw Error("noise sigma must be non-negative");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist(0.0, noise_sigma > 0.0 ? noise_sigma : 1.0);
  for (SinogramRecord& r : s.records) {
    if (noise_sigma > 0.0) r.strain += dist(gen);
    r.sigma = noise_sigma;
  }
}

inline Sinogram records_from(const MeasurementOperator& op, const Eigen::VectorXd& values) {
  Sinogram s;
  s.records.reserve(op.rows.size());
  for (std::size_t i = 0; i < op.rows.size(); ++i) {
    const MeasurementRow& r = op.rows[i];
    s.records.push_back({r.theta, r.offset, r.length, values[static_cast<Eigen::Index>(i)], 0.0});
  }
  return s;
}

// 6-point Gauss-Legendre on [-1, 1].
inline constexpr std::array<double, 6> kGaussNodes{-0.9324695142031521, -0.6612093864662645,
                                                    -0.2386191860831969, 0.2386191860831969,
                                                    0.6612093864662645,  0.9324695142031521};
inline constexpr std::array<double, 6> kGaussWeights{0.1713244923791704, 0.3607615730481386,
                                                      0.4679139345726910, 0.4679139345726910,
                                                      0.3607615730481386, 0.1713244923791704};

}  // namespace detail

/// Noiseless measurements (K eps) plus i.i.d. Gaussian noise from a seeded
/// generator. Grazing rays (length < kGrazingFraction * R) are discarded.
inline Sinogram simulate_sinogram(const QuadMesh& mesh, const NodalStrainField& field,
                                  const std::vector<Ray>& rays, double noise_sigma,
                                  std::uint64_t seed) {
  if (field.node_count() != mesh.node_count())
    throw DimensionMismatchError("field and mesh node counts differ");
  const MeasurementOperator op =
      assemble_operator(rays, mesh, kGrazingFraction * mesh.bounding_radius());
  Sinogram s = detail::records_from(op, op.matrix * field.values());
  detail::add_noise(s, noise_sigma, seed);
  return s;
}

/// Line average of n^T eps n over the traced chord, eps an analytic field.
template <class Field>
double exact_line_average(const Field& field, const RayPath& path) {
  const Point2 n = path.ray.direction;
  double sum = 0.0;
  for (const Segment& seg : path.segments) {
    const double half = 0.5 * seg.length();
    const double mid = 0.5 * (seg.s_in + seg.s_out);
    double part = 0.0;
    for (std::size_t q = 0; q < detail::kGaussNodes.size(); ++q)
      part += detail::kGaussWeights[q] * field(path.ray.at(mid + half * detail::kGaussNodes[q])).normal(n);
    sum += half * part;
  }
  return sum / path.length;
}

/// Measurements of an analytic field (callable Point2 -> StrainTensor).
/// `interpolated` shares the reconstruction operator (an inverse crime);
/// `exact` quadratures the analytic field along each chord.
template <class Field>
Sinogram simulate_sinogram(const QuadMesh& mesh, const Field& field, const std::vector<Ray>& rays,
                           double noise_sigma, std::uint64_t seed, ProjectionMode mode) {
  if (mode == ProjectionMode::interpolated)
    return simulate_sinogram(mesh, interpolate_to_nodes(field, mesh), rays, noise_sigma, seed);

  const auto paths = trace_all(rays, mesh, kGrazingFraction * mesh.bounding_radius());
  Sinogram s;
  std::vector<double> values(paths.size(), 0.0);
  parallel_for(paths.size(), [&](std::size_t i) {
    if (paths[i]) values[i] = exact_line_average(field, *paths[i]);
  });
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (!paths[i]) continue;
    s.records.push_back({paths[i]->ray.theta, paths[i]->ray.offset, paths[i]->length, values[i], 0.0});
  }
  detail::add_noise(s, noise_sigma, seed);
  return s;
}

/// Rays reproducing the records of a sinogram on the mesh it was measured on.
inline std::vector<Ray> rays_from_sinogram(const Sinogram& s, const QuadMesh& mesh) {
  std::vector<Ray> rays;
  rays.reserve(s.records.size());
  for (const SinogramRecord& r : s.records) rays.push_back(make_ray(mesh, r.theta, r.offset));
  return rays;
}

}  // namespace lrt
