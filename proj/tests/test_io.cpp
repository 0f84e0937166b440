#include <gtest/gtest.h>

#include <cstdio>
#include <unistd.h>
#include <filesystem>
#include <limits>
#include <sstream>
#include <string>

#include "lrt/lrt.hpp"
#include "support/generators.hpp"

using lrt::Component;
using lrt::FormatError;

namespace {

lrt::Sinogram random_sinogram(gen::Rng& rng, std::size_t n) {
  lrt::Sinogram s;
  for (std::size_t i = 0; i < n; ++i)
    s.records.push_back({rng.uniform(0, 6.3), rng.uniform(-0.01, 0.01), rng.uniform(1e-6, 0.03),
                         rng.uniform(-1e-3, 1e-3) * std::pow(10.0, rng.uniform(-300, 0)),
                         i % 3 == 0 ? 0.0 : rng.uniform(0, 1e-4)});
  return s;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("lrt_test_io_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST(SinogramCsv, HeaderAndColumns) {
  lrt::Sinogram s;
  s.records.push_back({0.5, -0.25, 0.01, 1.5e-4, 0.0});
  const auto l = lines(lrt::sinogram_to_csv(s));
  ASSERT_EQ(l.size(), 2u);
  EXPECT_EQ(l[0], "theta_rad,offset_m,length_m,strain,sigma");
  EXPECT_EQ(l[1], "0.5,-0.25,0.01,0.00014999999999999999,0");
}

TEST(SinogramCsv, RoundTripIsBitExact) {
  gen::Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const lrt::Sinogram s = random_sinogram(rng, 1 + rng.index(200));
    const std::string text = lrt::sinogram_to_csv(s);
    const lrt::Sinogram back = lrt::sinogram_from_csv(text);
    ASSERT_EQ(back.size(), s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      EXPECT_EQ(back.records[i].theta, s.records[i].theta);
      EXPECT_EQ(back.records[i].offset, s.records[i].offset);
      EXPECT_EQ(back.records[i].length, s.records[i].length);
      EXPECT_EQ(back.records[i].strain, s.records[i].strain);
      EXPECT_EQ(back.records[i].sigma, s.records[i].sigma);
    }
    EXPECT_EQ(lrt::sinogram_to_csv(back), text);
  }
}

TEST(SinogramCsv, SubnormalValuesSurvive) {
  lrt::Sinogram s;
  s.records.push_back({0.0, 0.0, 1.0, std::numeric_limits<double>::denorm_min(), 0.0});
  EXPECT_EQ(lrt::sinogram_from_csv(lrt::sinogram_to_csv(s)).records[0].strain,
            std::numeric_limits<double>::denorm_min());
}

TEST(SinogramCsv, AcceptsCrlfAndBlankLines) {
  const auto s = lrt::sinogram_from_csv("theta_rad,offset_m,length_m,strain,sigma\r\n0,0,1,2,0\r\n\n1,0,1,3,0\n");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.records[1].strain, 3.0);
}

TEST(SinogramCsv, EmptyBodyIsEmptySinogram) {
  EXPECT_EQ(lrt::sinogram_from_csv("theta_rad,offset_m,length_m,strain,sigma\n").size(), 0u);
}

TEST(SinogramCsv, RejectsMalformedInput) {
  const std::string h = "theta_rad,offset_m,length_m,strain,sigma\n";
  EXPECT_THROW(lrt::sinogram_from_csv(""), FormatError);
  EXPECT_THROW(lrt::sinogram_from_csv("theta,offset,length,strain,sigma\n0,0,1,0,0\n"), FormatError);
  EXPECT_THROW(lrt::sinogram_from_csv(h + "0,0,1,0\n"), FormatError);
  EXPECT_THROW(lrt::sinogram_from_csv(h + "0,0,1,0,0,0\n"), FormatError);
  EXPECT_THROW(lrt::sinogram_from_csv(h + "0,0,1,abc,0\n"), FormatError);
  EXPECT_THROW(lrt::sinogram_from_csv(h + "0,0,1,0.1x,0\n"), FormatError);
  EXPECT_THROW(lrt::sinogram_from_csv(h + "0,0,1,,0\n"), FormatError);
  EXPECT_THROW(lrt::sinogram_from_csv(h + "0,0,1,1e999,0\n"), FormatError);
  EXPECT_THROW(lrt::sinogram_from_csv(h + "0,0,0,0,0\n"), FormatError);
  EXPECT_THROW(lrt::sinogram_from_csv(h + "0,0,-1,0,0\n"), FormatError);
  EXPECT_THROW(lrt::sinogram_from_csv(h + "0,0,1,0,-1e-6\n"), FormatError);
  EXPECT_THROW(lrt::sinogram_from_csv(h + "0,0,nan,0,0\n"), FormatError);
}

TEST(SinogramCsv, FileRoundTrip) {
  gen::Rng rng(3);
  const lrt::Sinogram s = random_sinogram(rng, 50);
  const auto path = temp_path("sino.csv");
  lrt::write_sinogram(path.string(), s);
  EXPECT_EQ(lrt::sinogram_to_csv(lrt::read_sinogram(path.string())), lrt::sinogram_to_csv(s));
  std::filesystem::remove(path);
  EXPECT_THROW(lrt::read_sinogram(path.string()), lrt::Error);
}

TEST(FieldCsv, RoundTripIsBitExact) {
  gen::Rng rng(5);
  const lrt::QuadMesh mesh = gen::jittered_mesh(rng, 7, 4, 0.02, 0.01, 0.3);
  const lrt::NodalStrainField f(gen::nodal_values(rng, mesh.node_count()));
  const std::string text = lrt::field_to_csv(f, mesh);
  const auto l = lines(text);
  ASSERT_EQ(l.size(), mesh.node_count() + 1);
  EXPECT_EQ(l[0], "node_id,x_m,y_m,exx,exy,eyy");
  EXPECT_EQ(l[3].substr(0, 2), "2,");

  const lrt::FieldFile back = lrt::field_from_csv(text);
  ASSERT_EQ(back.nodes.size(), mesh.node_count());
  for (std::size_t i = 0; i < mesh.node_count(); ++i) {
    EXPECT_EQ(back.nodes[i].x, mesh.node(i).x);
    EXPECT_EQ(back.nodes[i].y, mesh.node(i).y);
  }
  EXPECT_EQ(back.field.values(), f.values());
  EXPECT_EQ(lrt::field_to_csv(back.field, mesh), text);
}

TEST(FieldCsv, ColumnsFollowComponentOrder) {
  const lrt::QuadMesh mesh = lrt::build_structured_mesh(0, 1, 0, 1, 1, 1);
  const auto f = lrt::NodalStrainField::constant(mesh.node_count(), {1.0, 2.0, 3.0});
  EXPECT_EQ(lines(lrt::field_to_csv(f, mesh))[2], "1,1,0,1,2,3");
  const auto back = lrt::field_from_csv(lrt::field_to_csv(f, mesh));
  EXPECT_EQ(back.field(Component::e11, 0), 1.0);
  EXPECT_EQ(back.field(Component::e12, 0), 2.0);
  EXPECT_EQ(back.field(Component::e22, 0), 3.0);
}

TEST(FieldCsv, RejectsBadNodeIds) {
  const std::string h = "node_id,x_m,y_m,exx,exy,eyy\n";
  EXPECT_NO_THROW(lrt::field_from_csv(h + "0,0,0,0,0,0\n1,1,0,0,0,0\n"));
  EXPECT_THROW(lrt::field_from_csv(h + "1,0,0,0,0,0\n"), FormatError);
  EXPECT_THROW(lrt::field_from_csv(h + "0,0,0,0,0,0\n2,1,0,0,0,0\n"), FormatError);
  EXPECT_THROW(lrt::field_from_csv(h + "0.5,0,0,0,0,0\n"), FormatError);
  EXPECT_THROW(lrt::field_from_csv(h + "0,0,0,0,0\n"), FormatError);
  EXPECT_THROW(lrt::field_from_csv("node,x,y,exx,exy,eyy\n0,0,0,0,0,0\n"), FormatError);
}

TEST(FieldCsv, RejectsMeshMismatch) {
  const lrt::QuadMesh mesh = lrt::build_structured_mesh(0, 1, 0, 1, 2, 2);
  const lrt::NodalStrainField f(4);
  EXPECT_THROW(lrt::field_to_csv(f, mesh), lrt::MeshMismatchError);
  EXPECT_THROW(lrt::field_to_vtk(f, mesh), lrt::MeshMismatchError);
}

TEST(FieldVtk, Structure) {
  const lrt::QuadMesh mesh = lrt::build_structured_mesh(0, 2, 0, 1, 2, 1);
  lrt::NodalStrainField f(mesh.node_count());
  for (std::size_t i = 0; i < mesh.node_count(); ++i) f.set(i, {double(i), 10.0 + i, 20.0 + i});
  const auto l = lines(lrt::field_to_vtk(f, mesh));
  const std::vector<std::string> expected = {
      "# vtk DataFile Version 3.0", "reconstructed strain", "ASCII", "DATASET UNSTRUCTURED_GRID",
      "POINTS 6 double", "0 0 0", "1 0 0", "2 0 0", "0 1 0", "1 1 0", "2 1 0",
      "CELLS 2 10", "4 0 1 4 3", "4 1 2 5 4",
      "CELL_TYPES 2", "9", "9",
      "POINT_DATA 6",
      "SCALARS exx double 1", "LOOKUP_TABLE default", "0", "1", "2", "3", "4", "5",
      "SCALARS exy double 1", "LOOKUP_TABLE default", "10", "11", "12", "13", "14", "15",
      "SCALARS eyy double 1", "LOOKUP_TABLE default", "20", "21", "22", "23", "24", "25"};
  EXPECT_EQ(l, expected);
}

TEST(FieldVtk, SizesScaleWithMesh) {
  gen::Rng rng(8);
  const lrt::QuadMesh mesh = gen::jittered_mesh(rng, 9, 5, 1.0, 0.5, 0.2);
  const lrt::NodalStrainField f(gen::nodal_values(rng, mesh.node_count()));
  const auto l = lines(lrt::field_to_vtk(f, mesh));
  const std::size_t m = mesh.node_count(), p = mesh.element_count();
  EXPECT_EQ(l.size(), 4 + 1 + m + 1 + p + 1 + p + 1 + 3 * (2 + m));
  EXPECT_EQ(l[4 + 1 + m], "CELLS " + std::to_string(p) + " " + std::to_string(5 * p));
}

TEST(MeshJson, RoundTripIsExact) {
  gen::Rng rng(21);
  const lrt::QuadMesh mesh = gen::jittered_mesh(rng, 6, 3, 0.02, 0.01, 0.35, 0.4, {1e-3, -2e-3});
  const std::string text = lrt::mesh_to_json(mesh);
  const lrt::QuadMesh back = lrt::mesh_from_json(text);
  ASSERT_EQ(back.node_count(), mesh.node_count());
  for (std::size_t i = 0; i < mesh.node_count(); ++i) {
    EXPECT_EQ(back.node(i).x, mesh.node(i).x);
    EXPECT_EQ(back.node(i).y, mesh.node(i).y);
  }
  EXPECT_EQ(back.elements(), mesh.elements());
  EXPECT_EQ(back.domain_kind(), mesh.domain_kind());
  EXPECT_EQ(lrt::mesh_to_json(back), text);

  const lrt::QuadMesh ring = lrt::build_ring_plug_mesh(0.01, 0.004, 0.002, 0.00125);
  EXPECT_EQ(lrt::mesh_to_json(lrt::mesh_from_json(lrt::mesh_to_json(ring))), lrt::mesh_to_json(ring));
}

TEST(MeshJson, RejectsMalformed) {
  EXPECT_THROW(lrt::mesh_from_json("{"), FormatError);
  EXPECT_THROW(lrt::mesh_from_json("[]"), FormatError);
  EXPECT_THROW(lrt::mesh_from_json(R"({"nodes": []})"), FormatError);
  EXPECT_THROW(lrt::mesh_from_json(R"({"nodes": [[0]], "elements": []})"), FormatError);
  EXPECT_THROW(lrt::mesh_from_json(R"({"nodes": [[0,0],[1,0],[1,1],[0,1]], "elements": [[0,1,2]]})"),
               FormatError);
  EXPECT_THROW(lrt::mesh_from_json(R"({"nodes": [["a",0]], "elements": []})"), FormatError);
  EXPECT_THROW(lrt::mesh_from_json(
                   R"({"nodes": [[0,0],[1,0],[1,1],[0,1]], "elements": [[0,1,2,3]], "domain_kind": "torus"})"),
               lrt::Error);
}

TEST(RunConfigJson, KeysPerCommand) {
  lrt::RunConfig c;
  c.command = "simulate";
  c.mesh_path = "m.json";
  c.n_angles = 36;
  c.n_offsets = 40;
  c.noise_sigma = 1e-4;
  c.output_path = "s.csv";
  auto j = to_json(c);
  for (const char* k : {"command", "mesh", "angles", "offsets", "noise_sigma", "output"}) EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_FALSE(j.contains("seed"));
  EXPECT_FALSE(j.contains("alpha"));
  c.has_seed = true;
  c.seed = 7;
  EXPECT_EQ(to_json(c)["seed"], 7u);

  lrt::RunConfig r;
  r.command = "reconstruct";
  r.mesh_path = "m.json";
  r.sinogram_path = "s.csv";
  r.alpha = 0.2;
  j = to_json(r);
  for (const char* k : {"nu", "alpha", "regularizer", "constraint_mode", "constraint_tolerance"})
    EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j["constraint_mode"], "kkt");
  EXPECT_FALSE(j.contains("penalty_weight"));
  EXPECT_FALSE(j.contains("angles"));
  r.constraint_mode = lrt::ConstraintMode::penalty;
  EXPECT_TRUE(to_json(r).contains("penalty_weight"));
}
