#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <string>

#include "lrt/lrt.hpp"
#include "support/generators.hpp"

using lrt::Point2;
using lrt::StrainTensor;

namespace {

// In-plane equilibrium written on strains (plane stress, divided by E/(1-nu^2)).
template <class Fn>
std::pair<double, double> divergence(const Fn& f, double x, double y, double nu, double h) {
  const StrainTensor xp = f(x + h, y), xm = f(x - h, y), yp = f(x, y + h), ym = f(x, y - h);
  const double d1 = ((xp.e11 + nu * xp.e22) - (xm.e11 + nu * xm.e22)) / (2 * h) + (1 - nu) * (yp.e12 - ym.e12) / (2 * h);
  const double d2 = ((yp.e22 + nu * yp.e11) - (ym.e22 + nu * ym.e11)) / (2 * h) + (1 - nu) * (xp.e12 - xm.e12) / (2 * h);
  return {d1, d2};
}

double hoop(const StrainTensor& t, double angle) {
  return t.normal({-std::sin(angle), std::cos(angle)});
}

double radial(const StrainTensor& t, double angle) { return t.normal({std::cos(angle), std::sin(angle)}); }

}  // namespace

TEST(BeamField, CurvatureScaleFromCaptionParameters) {
  const lrt::BeamParams p{};
  const double i = 0.005 * std::pow(0.010, 3) / 12.0;
  EXPECT_NEAR(p.moment_of_area(), i, 1e-12 * i);
  EXPECT_NEAR(2000.0 / (200e9 * i), 24.0, 1e-12);
  EXPECT_NEAR(p.curvature_scale(), 24.0, 1e-12);
}

TEST(BeamField, TopFibreAtRoot) {
  const StrainTensor t = lrt::beam_strain(0, 0.005, lrt::BeamParams{});
  EXPECT_NEAR(t.e11, 2.4e-3, 1e-15);
  EXPECT_NEAR(t.e22, -7.2e-4, 1e-15);
  EXPECT_NEAR(t.e12, 0.0, 1e-18);
}

TEST(BeamField, NeutralAxisAndFreeEnd) {
  const lrt::BeamParams p{};
  gen::Rng rng(1);
  for (int k = 0; k < 50; ++k) {
    const double x = rng.uniform(0, p.length), y = rng.uniform(-p.width / 2, p.width / 2);
    const StrainTensor axis = lrt::beam_strain(x, 0, p);
    EXPECT_EQ(axis.e11, 0.0);
    EXPECT_EQ(axis.e22, 0.0);
    const StrainTensor end = lrt::beam_strain(p.length, y, p);
    EXPECT_EQ(end.e11, 0.0);
    EXPECT_EQ(end.e22, 0.0);
    EXPECT_EQ(end.e12, lrt::beam_strain(x, y, p).e12);
    EXPECT_NEAR(lrt::beam_strain(x, p.width / 2, p).e12, 0.0, 1e-18);
    EXPECT_NEAR(lrt::beam_strain(x, -p.width / 2, p).e12, 0.0, 1e-18);
  }
  // Shear at the neutral axis: -(1 + nu)/2 (W/2)^2 P/(EI).
  EXPECT_NEAR(lrt::beam_strain(0.01, 0, p).e12, -0.65 * 25e-6 * 24.0, 1e-15);
}

TEST(BeamField, SatisfiesEquilibriumByFiniteDifferences) {
  const lrt::BeamParams p{};
  gen::Rng rng(2);
  const auto f = [&](double x, double y) { return lrt::beam_strain(x, y, p); };
  for (int k = 0; k < 200; ++k) {
    const double x = rng.uniform(0.001, p.length - 0.001), y = rng.uniform(-0.004, 0.004);
    const auto [d1, d2] = divergence(f, x, y, p.poisson, 1e-5);
    EXPECT_LE(std::abs(d1), 1e-6 * p.curvature_scale());
    EXPECT_LE(std::abs(d2), 1e-6 * p.curvature_scale());
  }
}

TEST(BeamField, DomainErrors) {
  const lrt::BeamParams p{};
  EXPECT_THROW(lrt::beam_strain(-1e-6, 0, p), lrt::DomainError);
  EXPECT_THROW(lrt::beam_strain(p.length + 1e-6, 0, p), lrt::DomainError);
  EXPECT_THROW(lrt::beam_strain(0.01, p.width / 2 + 1e-6, p), lrt::DomainError);
  EXPECT_NO_THROW(lrt::beam_strain(p.length + 1e-10, p.width / 2 + 1e-10, p));
  lrt::BeamParams bad = p;
  bad.youngs_modulus = 0;
  EXPECT_THROW(lrt::beam_strain(0, 0, bad), lrt::Error);
}

TEST(RingPlugField, CentreIsEquiBiaxial) {
  lrt::RingPlugParams p{};
  p.bore_offset = 0;
  const StrainTensor t = lrt::ring_plug_strain(0, 0, p);
  EXPECT_EQ(t.e11, t.e22);
  EXPECT_EQ(t.e12, 0.0);
  EXPECT_LT(t.e11, 0.0);
  EXPECT_TRUE(p.is_exact());
}

TEST(RingPlugField, HoopStrainDecaysAndInterfaceIsCompressive) {
  lrt::RingPlugParams p{};
  p.bore_offset = 0;
  const double angle = 0.7;
  double previous = INFINITY;
  for (int i = 1; i <= 50; ++i) {
    const double r = p.bore_radius + (p.outer_radius - p.bore_radius) * i / 50.0;
    const double h = hoop(lrt::ring_plug_strain(r * std::cos(angle), r * std::sin(angle), p), angle);
    EXPECT_GT(h, 0.0);
    EXPECT_LT(h, previous);
    previous = h;
  }
  // Radial stress just outside the interface, from the strains.
  const double r = p.bore_radius * (1 + 1e-9);
  const StrainTensor t = lrt::ring_plug_strain(r * std::cos(angle), r * std::sin(angle), p);
  const double srr = p.youngs_modulus / (1 - p.poisson * p.poisson) * (radial(t, angle) + p.poisson * hoop(t, angle));
  EXPECT_LT(srr, 0.0);
  EXPECT_NEAR(srr, -p.contact_pressure(), 1e-6 * p.contact_pressure());
}

TEST(RingPlugField, InterfaceDisplacementsCloseTheInterference) {
  // Radial displacement is r times the hoop strain on each side; their
  // difference at the interface is the radial interference.
  gen::Rng rng(3);
  for (int k = 0; k < 20; ++k) {
    lrt::RingPlugParams p{};
    p.outer_radius = rng.uniform(0.01, 0.05);
    p.bore_radius = p.outer_radius * rng.uniform(0.2, 0.8);
    p.bore_offset = 0;
    p.interference = rng.uniform(1e-6, 1e-4);
    p.poisson = rng.uniform(0, 0.45);
    const double b = p.bore_radius;
    const double u_ring = b * hoop(lrt::ring_plug_strain(0, b * (1 + 1e-12), p), std::numbers::pi / 2);
    const double u_plug = b * hoop(lrt::ring_plug_strain(0, b * (1 - 1e-12), p), std::numbers::pi / 2);
    EXPECT_NEAR(u_ring - u_plug, p.interference / 2, 1e-9 * p.interference);
  }
}

TEST(RingPlugField, RingSatisfiesEquilibrium) {
  lrt::RingPlugParams p{};
  p.bore_offset = 0;
  const auto f = [&](double x, double y) { return lrt::ring_plug_strain(x, y, p); };
  const double scale = p.contact_pressure() / p.youngs_modulus / p.bore_radius;
  gen::Rng rng(4);
  for (int k = 0; k < 200; ++k) {
    const double r = rng.uniform(p.bore_radius + 5e-4, p.outer_radius - 5e-4);
    const double a = rng.uniform(0, 2 * std::numbers::pi);
    const auto [d1, d2] = divergence(f, r * std::cos(a), r * std::sin(a), p.poisson, 1e-6);
    EXPECT_LE(std::abs(d1), 1e-6 * scale);
    EXPECT_LE(std::abs(d2), 1e-6 * scale);
  }
}

TEST(RingPlugField, OffsetBoreCentresTheField) {
  lrt::RingPlugParams p{};
  EXPECT_FALSE(p.is_exact());
  const StrainTensor at_bore = lrt::ring_plug_strain(p.bore_offset, 0, p);
  EXPECT_EQ(at_bore.e11, at_bore.e22);
  const StrainTensor a = lrt::ring_plug_strain(p.bore_offset + 0.009, 0.001, p);
  const StrainTensor b = lrt::ring_plug_strain(p.bore_offset + 0.009, -0.001, p);
  EXPECT_NEAR(a.e11, b.e11, 1e-18);
  EXPECT_NEAR(a.e12, -b.e12, 1e-18);
}

TEST(RingPlugField, ZeroInterferenceIsStressFree) {
  lrt::RingPlugParams p{};
  p.interference = 0;
  for (Point2 q : {Point2{0, 0}, Point2{0.005, 0.002}, Point2{-0.012, 0.003}, Point2{0.0, 0.0149}}) {
    const StrainTensor t = lrt::ring_plug_strain(q.x, q.y, p);
    EXPECT_EQ(t.e11, 0.0);
    EXPECT_EQ(t.e12, 0.0);
    EXPECT_EQ(t.e22, 0.0);
  }
}

TEST(RingPlugField, DomainAndParameterErrors) {
  const lrt::RingPlugParams p{};
  EXPECT_THROW(lrt::ring_plug_strain(0.0151, 0, p), lrt::DomainError);
  EXPECT_NO_THROW(lrt::ring_plug_strain(0.015 + 1e-10, 0, p));
  lrt::RingPlugParams bad = p;
  bad.bore_offset = 0.009;
  EXPECT_THROW(lrt::ring_plug_strain(0, 0, bad), lrt::Error);
  bad = p;
  bad.interference = -1e-6;
  EXPECT_THROW(lrt::ring_plug_strain(0, 0, bad), lrt::Error);
  bad = p;
  bad.poisson = 0.5;
  EXPECT_THROW(lrt::ring_plug_strain(0, 0, bad), lrt::Error);
}

TEST(InterpolateToNodes, ConstantAndExactAtNodes) {
  gen::Rng rng(5);
  const lrt::QuadMesh m = gen::jittered_mesh(rng, 4, 4, 1, 1, 0.2);
  const StrainTensor t{1e-3, 2e-4, -5e-4};
  const auto f = lrt::interpolate_to_nodes(lrt::ConstantField{t}, m);
  EXPECT_TRUE(f.values().isApprox(lrt::NodalStrainField::constant(m.node_count(), t).values(), 0.0));

  const lrt::BeamParams p{};
  const lrt::QuadMesh beam = lrt::build_structured_mesh(0, p.length, -p.width / 2, p.width / 2, 20, 10);
  const auto nodal = lrt::interpolate_to_nodes(lrt::BeamField{p}, beam);
  for (std::size_t i = 0; i < beam.node_count(); ++i) {
    const StrainTensor e = lrt::beam_strain(beam.node(i).x, beam.node(i).y, p);
    EXPECT_EQ(nodal.at(i), e);
  }
}

TEST(InterpolateToNodes, NodeOutsideDomainIsReported) {
  const lrt::BeamParams p{};
  const lrt::QuadMesh m = lrt::build_structured_mesh(0, p.length * 1.1, -p.width / 2, p.width / 2, 4, 2);
  try {
    lrt::interpolate_to_nodes(lrt::BeamField{p}, m);
    FAIL() << "expected DomainError";
  } catch (const lrt::DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("node"), std::string::npos);
  }
}

TEST(InterpolateToNodes, ShearInterpolationErrorQuartersUnderRefinement) {
  // e12 is quadratic in y; the bilinear interpolant's worst error sits at
  // element mid-heights and scales with the element height squared.
  const lrt::BeamParams p{};
  double previous = 0;
  for (std::size_t n : {5u, 10u, 20u, 40u}) {
    const lrt::QuadMesh m = lrt::build_structured_mesh(0, p.length, -p.width / 2, p.width / 2, 2 * n, n);
    const auto nodal = lrt::interpolate_to_nodes(lrt::BeamField{p}, m);
    double worst = 0;
    for (std::size_t e = 0; e < m.element_count(); ++e) {
      const lrt::ElementBasis basis = lrt::element_basis(m, e);
      const auto& el = m.element(e);
      const auto c = m.corners(e);
      const Point2 mid = 0.25 * (c[0] + c[1] + c[2] + c[3]);
      Eigen::Vector4d v;
      for (int k = 0; k < 4; ++k) v[k] = nodal(lrt::Component::e12, el[k]);
      const double interp = basis.nodal_weights(mid) * v;
      worst = std::max(worst, std::abs(interp - lrt::beam_strain(mid.x, mid.y, p).e12));
    }
    if (previous > 0) EXPECT_NEAR(previous / worst, 4.0, 1e-6);
    previous = worst;
  }
}
