#pragma once

#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "lrt/errors.hpp"
#include "lrt/mesh.hpp"

namespace lrt {

/// {"nodes": [[x, y], ...], "elements": [[i0, i1, i2, i3], ...], "domain_kind": "..."}
inline std::string mesh_to_json(const QuadMesh& mesh) {
  nlohmann::ordered_json j;
  auto& nodes = j["nodes"] = nlohmann::ordered_json::array();
  for (const Point2& p : mesh.nodes()) nodes.push_back({p.x, p.y});
  auto& elements = j["elements"] = nlohmann::ordered_json::array();
  for (const auto& el : mesh.elements()) elements.push_back({el[0], el[1], el[2], el[3]});
  j["domain_kind"] = std::string(to_string(mesh.domain_kind()));
  return j.dump() + "\n";
}

inline QuadMesh mesh_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("mesh file is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("nodes") || !j.contains("elements"))
    throw FormatError("mesh file needs 'nodes' and 'elements'");
  try {
    std::vector<Point2> nodes;
    for (const auto& n : j.at("nodes")) {
      if (!n.is_array() || n.size() != 2) throw FormatError("each node must be [x, y]");
      nodes.push_back({n[0].get<double>(), n[1].get<double>()});
    }
    std::vector<QuadMesh::Element> elements;
    for (const auto& e : j.at("elements")) {
      if (!e.is_array() || e.size() != 4) throw FormatError("each element must list 4 nodes");
      elements.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>(),
                          e[2].get<std::size_t>(), e[3].get<std::size_t>()});
    }
    const DomainKind kind = j.contains("domain_kind")
                                ? domain_kind_from_string(j["domain_kind"].get<std::string>())
                                : DomainKind::generic;
    return QuadMesh(std::move(nodes), std::move(elements), kind);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed mesh file: ") + e.what());
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error("failed writing '" + path + "'");
}

inline void write_mesh(const std::string& path, const QuadMesh& mesh) {
  write_text_file(path, mesh_to_json(mesh));
}
inline QuadMesh read_mesh(const std::string& path) { return mesh_from_json(read_text_file(path)); }

}  // namespace lrt
