#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "lrt/solver.hpp"

namespace lrt {

/// Parameters of one CLI invocation, echoed into reports.
struct RunConfig {
  std::string command;
  std::string mesh_path;
  std::string sinogram_path;
  std::size_t n_angles = 0;
  std::size_t n_offsets = 0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  bool has_seed = false;
  double nu = 0.3;
  double alpha = 0.0;
  Regularizer regularizer = Regularizer::stiffness;
  ConstraintMode constraint_mode = ConstraintMode::kkt;
  double penalty_weight = 1e4;
  double constraint_tolerance = 1e-8;
  std::string output_path;
  std::string report_path;
  std::string vtk_path;
  std::size_t threads = 1;
};

inline nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["command"] = c.command;
  if (!c.mesh_path.empty()) j["mesh"] = c.mesh_path;
  if (!c.sinogram_path.empty()) j["sinogram"] = c.sinogram_path;
  if (c.command == "simulate") {
    j["angles"] = c.n_angles;
    j["offsets"] = c.n_offsets;
    j["noise_sigma"] = c.noise_sigma;
    if (c.has_seed) j["seed"] = c.seed;
  }
  if (c.command == "reconstruct") {
    j["nu"] = c.nu;
    j["alpha"] = c.alpha;
    j["regularizer"] = std::string(to_string(c.regularizer));
    j["constraint_mode"] = std::string(to_string(c.constraint_mode));
    if (c.constraint_mode == ConstraintMode::penalty) j["penalty_weight"] = c.penalty_weight;
    j["constraint_tolerance"] = c.constraint_tolerance;
  }
  if (!c.output_path.empty()) j["output"] = c.output_path;
  if (!c.report_path.empty()) j["report"] = c.report_path;
  if (!c.vtk_path.empty()) j["vtk"] = c.vtk_path;
  return j;
}

}  // namespace lrt
