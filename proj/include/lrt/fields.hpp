#pragma once

#include <cmath>
#include <string>

#include "lrt/errors.hpp"
#include "lrt/geometry.hpp"
#include "lrt/strain_field.hpp"

namespace lrt {

/// Points this close outside an analytic field's domain are still accepted, m.
inline constexpr double kDomainTolerance = 1e-9;

/// End-loaded cantilever occupying [0, length] x [-width/2, width/2].
struct BeamParams {
  double length = 0.020;     // m
  double width = 0.010;      // m
  double thickness = 0.005;  // m
  double youngs_modulus = 200e9;  // Pa
  double poisson = 0.3;
  double load = 2000.0;  // N

  /// Second moment of area t W^3 / 12, m^4.
  double moment_of_area() const { return thickness * width * width * width / 12.0; }
  /// P / (E I), 1/m^2.
  double curvature_scale() const { return load / (youngs_modulus * moment_of_area()); }

  void check() const {
    if (!(length > 0.0 && width > 0.0 && thickness > 0.0 && youngs_modulus > 0.0 && load > 0.0))
      throw Error("beam parameters must be positive");
    if (!(poisson >= 0.0 && poisson < 0.5)) throw Error("beam Poisson ratio must lie in [0, 0.5)");
  }
};

/// Saint-Venant plane-stress strain of the cantilever.
inline StrainTensor beam_strain(double x, double y, const BeamParams& p) {
  p.check();
  const double half = 0.5 * p.width;
  if (x < -kDomainTolerance || x > p.length + kDomainTolerance || std::abs(y) > half + kDomainTolerance)
    throw DomainError("point (" + std::to_string(x) + ", " + std::to_string(y) +
                      ") lies outside the beam");
  const double k = p.curvature_scale();
  const double bend = (p.length - x) * y * k;
  return {bend, -0.5 * (1.0 + p.poisson) * (half * half - y * y) * k, -p.poisson * bend};
}

/// Steel plug shrink-fitted into a bore of a disc.
struct RingPlugParams {
  double outer_radius = 0.015;   // m
  double bore_radius = 0.007;    // m
  double bore_offset = 0.004;    // m, bore centre at (bore_offset, 0)
  double interference = 40e-6;   // m, diametral
  double youngs_modulus = 200e9; // Pa
  double poisson = 0.3;

  void check() const {
    if (!(bore_radius > 0.0 && std::abs(bore_offset) + bore_radius < outer_radius))
      throw Error("ring-plug geometry needs 0 < bore_radius and |bore_offset| + bore_radius < outer_radius");
    if (!(interference >= 0.0)) throw Error("interference must be non-negative");
    if (!(youngs_modulus > 0.0)) throw Error("Young's modulus must be positive");
    if (!(poisson >= 0.0 && poisson < 0.5)) throw Error("Poisson ratio must lie in [0, 0.5)");
  }

  /// The closed form is exact only for a concentric bore.
  bool is_exact() const { return bore_offset == 0.0; }

  /// Interface pressure of the plane-stress shrink fit (same material), Pa.
  double contact_pressure() const {
    const double b = bore_radius;
    const double c = outer_radius;
    return youngs_modulus * (0.5 * interference) * (c * c - b * b) / (2.0 * b * c * c);
  }
};

/// Lamé shrink-fit strain about the bore centre. The plug is in uniform
/// equi-biaxial compression; the ring carries the thick-cylinder field. For an
/// offset bore the concentric solution is used as an approximation.
inline StrainTensor ring_plug_strain(double x, double y, const RingPlugParams& p) {
  p.check();
  if (std::hypot(x, y) > p.outer_radius + kDomainTolerance)
    throw DomainError("point (" + std::to_string(x) + ", " + std::to_string(y) +
                      ") lies outside the ring");
  const double e = p.youngs_modulus;
  const double nu = p.poisson;
  const double b = p.bore_radius;
  const double c = p.outer_radius;
  const double pressure = p.contact_pressure();
  const double dx = x - p.bore_offset;
  const double r = std::hypot(dx, y);
  if (r <= b) {
    const double plug = -pressure * (1.0 - nu) / e;
    return {plug, 0.0, plug};
  }
  const double a = pressure * b * b / (c * c - b * b);
  const double ratio = c * c / (r * r);
  const double srr = a * (1.0 - ratio);
  const double stt = a * (1.0 + ratio);
  const double err = (srr - nu * stt) / e;
  const double ett = (stt - nu * srr) / e;
  const double cs = dx / r;
  const double sn = y / r;
  return {err * cs * cs + ett * sn * sn, (err - ett) * sn * cs, err * sn * sn + ett * cs * cs};
}

/// Callable wrappers for use with interpolate_to_nodes and simulate_sinogram.
struct BeamField {
  BeamParams params;
  StrainTensor operator()(Point2 p) const { return beam_strain(p.x, p.y, params); }
};

struct RingPlugField {
  RingPlugParams params;
  StrainTensor operator()(Point2 p) const { return ring_plug_strain(p.x, p.y, params); }
};

/// Same tensor everywhere.
struct ConstantField {
  StrainTensor value;
  StrainTensor operator()(Point2) const { return value; }
};

}  // namespace lrt
