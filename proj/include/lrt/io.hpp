#pragma once

#include <cmath>
#include <string>

#include "lrt/csv.hpp"
#include "lrt/forward.hpp"
#include "lrt/mesh.hpp"
#include "lrt/mesh_io.hpp"
#include "lrt/strain_field.hpp"

namespace lrt {

inline constexpr const char* kSinogramHeader = "theta_rad,offset_m,length_m,strain,sigma";
inline constexpr const char* kFieldHeader = "node_id,x_m,y_m,exx,exy,eyy";

inline std::string sinogram_to_csv(const Sinogram& s) {
  std::string out = std::string(kSinogramHeader) + "\n";
  for (const SinogramRecord& r : s.records) {
    detail::append_number(out, r.theta);
    out += ',';
    detail::append_number(out, r.offset);
    out += ',';
    detail::append_number(out, r.length);
    out += ',';
    detail::append_number(out, r.strain);
    out += ',';
    detail::append_number(out, r.sigma);
    out += '\n';
  }
  return out;
}

inline Sinogram sinogram_from_csv(const std::string& text) {
  Sinogram s;
  for (const auto& row : detail::parse_csv(text, kSinogramHeader)) {
    const SinogramRecord r{row[0], row[1], row[2], row[3], row[4]};
    if (!(r.length > 0.0)) throw FormatError("sinogram record with non-positive length");
    if (!(r.sigma >= 0.0)) throw FormatError("sinogram record with negative sigma");
    s.records.push_back(r);
  }
  return s;
}

inline void write_sinogram(const std::string& path, const Sinogram& s) {
  write_text_file(path, sinogram_to_csv(s));
}
inline Sinogram read_sinogram(const std::string& path) {
  return sinogram_from_csv(read_text_file(path));
}

inline std::string field_to_csv(const NodalStrainField& f, const QuadMesh& mesh) {
  if (f.node_count() != mesh.node_count()) throw MeshMismatchError("field and mesh node counts differ");
  std::string out = std::string(kFieldHeader) + "\n";
  for (std::size_t i = 0; i < mesh.node_count(); ++i) {
    out += std::to_string(i);
    for (double v : {mesh.node(i).x, mesh.node(i).y, f(Component::e11, i), f(Component::e12, i),
                     f(Component::e22, i)}) {
      out += ',';
      detail::append_number(out, v);
    }
    out += '\n';
  }
  return out;
}

/// A strain field file: node coordinates plus the nodal values.
struct FieldFile {
  std::vector<Point2> nodes;
  NodalStrainField field;
};

inline FieldFile field_from_csv(const std::string& text) {
  const auto rows = detail::parse_csv(text, kFieldHeader);
  FieldFile out{{}, NodalStrainField(rows.size())};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i][0] != double(i)) throw FormatError("field file node ids must be 0, 1, 2, ...");
    out.nodes.push_back({rows[i][1], rows[i][2]});
    out.field.set(i, {rows[i][3], rows[i][4], rows[i][5]});
  }
  return out;
}

inline void write_field(const std::string& path, const NodalStrainField& f, const QuadMesh& mesh) {
  write_text_file(path, field_to_csv(f, mesh));
}
inline FieldFile read_field(const std::string& path) { return field_from_csv(read_text_file(path)); }

/// Legacy VTK unstructured grid with point arrays exx, exy, eyy.
inline std::string field_to_vtk(const NodalStrainField& f, const QuadMesh& mesh) {
  if (f.node_count() != mesh.node_count()) throw MeshMismatchError("field and mesh node counts differ");
  const std::size_t m = mesh.node_count();
  const std::size_t p = mesh.element_count();
  std::string out = "# vtk DataFile Version 3.0\nreconstructed strain\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out += "POINTS " + std::to_string(m) + " double\n";
  for (const Point2& q : mesh.nodes()) {
    detail::append_number(out, q.x);
    out += ' ';
    detail::append_number(out, q.y);
    out += " 0\n";
  }
  out += "CELLS " + std::to_string(p) + " " + std::to_string(5 * p) + "\n";
  for (const auto& el : mesh.elements())
    out += "4 " + std::to_string(el[0]) + " " + std::to_string(el[1]) + " " + std::to_string(el[2]) +
           " " + std::to_string(el[3]) + "\n";
  out += "CELL_TYPES " + std::to_string(p) + "\n";
  for (std::size_t e = 0; e < p; ++e) out += "9\n";
  out += "POINT_DATA " + std::to_string(m) + "\n";
  const char* names[3] = {"exx", "exy", "eyy"};
  for (int c = 0; c < 3; ++c) {
    out += std::string("SCALARS ") + names[c] + " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t i = 0; i < m; ++i) {
      detail::append_number(out, f(static_cast<Component>(c), i));
      out += '\n';
    }
  }
  return out;
}

inline void write_field_vtk(const std::string& path, const NodalStrainField& f, const QuadMesh& mesh) {
  write_text_file(path, field_to_vtk(f, mesh));
}

}  // namespace lrt
