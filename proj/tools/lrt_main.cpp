// lrt: mesh generation, measurement simulation, reconstruction and field
// comparison for 2-D strain tomography.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lrt/lrt.hpp"

namespace {

using lrt::Component;
using json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Length flags are read in these units and converted to metres.
double unit_scale(const std::string& units) { return units == "mm" ? 1e-3 : 1.0; }

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

void write_json(const std::string& path, const json& j) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty() || path == "-")
    std::cout << text;
  else
    lrt::write_text_file(path, text);
}

void check_nodes_match(const lrt::FieldFile& f, const lrt::QuadMesh& mesh, const std::string& what) {
  if (f.nodes.size() != mesh.node_count())
    throw lrt::MeshMismatchError(what + " has " + std::to_string(f.nodes.size()) + " nodes, mesh has " +
                                 std::to_string(mesh.node_count()));
  const double tol = 1e-9 * std::max(1.0, mesh.bounding_radius());
  for (std::size_t i = 0; i < f.nodes.size(); ++i)
    if (lrt::norm(f.nodes[i] - mesh.node(i)) > tol)
      throw lrt::MeshMismatchError(what + " node " + std::to_string(i) + " does not match the mesh");
}

// ---------------------------------------------------------------- meshgen

struct MeshgenArgs {
  std::string shape;
  std::string out;
  std::string units = "m";
  std::size_t nx = 20;
  std::size_t ny = 10;
  double x_min = 0.0, x_max = 20.0e-3, y_min = -5.0e-3, y_max = 5.0e-3;
  double outer = 15.0e-3, bore = 7.0e-3, offset = 4.0e-3;
  std::optional<double> element_size;
  std::size_t target_elements = 3688;
};

void setup_meshgen(CLI::App& app, MeshgenArgs& a) {
  auto* sub = app.add_subcommand("meshgen", "Write a quadrilateral mesh (JSON)");
  sub->add_option("--shape", a.shape, "rect or ring-plug")->required()->check(CLI::IsMember({"rect", "ring-plug"}));
  sub->add_option("-o,--out", a.out, "output mesh file")->required();
  sub->add_option("--units", a.units, "units of the length flags")->check(CLI::IsMember({"m", "mm"}))->capture_default_str();
  sub->add_option("--nx", a.nx, "rect: elements along x")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--ny", a.ny, "rect: elements along y")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--x-min", a.x_min)->capture_default_str();
  sub->add_option("--x-max", a.x_max)->capture_default_str();
  sub->add_option("--y-min", a.y_min)->capture_default_str();
  sub->add_option("--y-max", a.y_max)->capture_default_str();
  sub->add_option("--outer-radius", a.outer, "ring-plug: disc radius")->capture_default_str();
  sub->add_option("--bore-radius", a.bore, "ring-plug: bore (plug) radius")->capture_default_str();
  sub->add_option("--bore-offset", a.offset, "ring-plug: bore centre x")->capture_default_str();
  sub->add_option("--element-size", a.element_size, "target element edge length");
  sub->add_option("--target-elements", a.target_elements,
                  "ring-plug: element count used to pick the size when --element-size is absent")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

int run_meshgen(const MeshgenArgs& a, const CLI::App& sub) {
  // Only lengths the user passed are rescaled; defaults are already SI.
  const double s = unit_scale(a.units);
  const auto len = [&](const char* flag, double v) { return sub.count(flag) ? v * s : v; };
  std::optional<lrt::QuadMesh> mesh;
  if (a.shape == "rect") {
    const double x0 = len("--x-min", a.x_min), x1 = len("--x-max", a.x_max);
    const double y0 = len("--y-min", a.y_min), y1 = len("--y-max", a.y_max);
    std::size_t nx = a.nx;
    std::size_t ny = a.ny;
    if (a.element_size) {
      if (sub.count("--nx") || sub.count("--ny")) throw UsageError("--element-size excludes --nx/--ny");
      const double h = *a.element_size * s;
      if (!(h > 0.0)) throw UsageError("--element-size must be positive");
      if (!(x1 > x0 && y1 > y0)) throw UsageError("rectangle bounds must satisfy min < max");
      nx = static_cast<std::size_t>(std::max(1.0, std::round((x1 - x0) / h)));
      ny = static_cast<std::size_t>(std::max(1.0, std::round((y1 - y0) / h)));
    }
    mesh.emplace(lrt::build_structured_mesh(x0, x1, y0, y1, nx, ny));
  } else {
    const double outer = len("--outer-radius", a.outer);
    const double h = a.element_size ? *a.element_size * s
                                    : std::sqrt(M_PI * outer * outer / double(a.target_elements));
    mesh.emplace(lrt::build_ring_plug_mesh(outer, len("--bore-radius", a.bore), len("--bore-offset", a.offset), h));
  }
  lrt::write_mesh(a.out, *mesh);
  std::cout << "wrote " << a.out << ": " << mesh->element_count() << " elements, " << mesh->node_count()
            << " nodes\n";
  return 0;
}

// --------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string mesh;
  std::string field;
  std::string field_file;
  std::string mode = "exact";
  std::string out;
  std::string truth_out;
  std::string units = "m";
  std::size_t angles = 36;
  std::size_t offsets = 40;
  double sigma = 0.0;
  std::optional<std::uint64_t> seed;
  lrt::BeamParams beam;
  lrt::RingPlugParams ring;
  double nu = 0.3;
};

void setup_simulate(CLI::App& app, SimulateArgs& a) {
  auto* sub = app.add_subcommand("simulate", "Simulate a sinogram (CSV) from a strain field");
  sub->add_option("--mesh", a.mesh, "mesh file")->required();
  sub->add_option("--field", a.field, "beam, ringplug or file")->required()->check(CLI::IsMember({"beam", "ringplug", "file"}));
  sub->add_option("--field-file", a.field_file, "nodal field CSV for --field file");
  sub->add_option("--mode", a.mode, "exact line integrals or interpolated nodal field")
      ->check(CLI::IsMember({"exact", "interpolated"}))
      ->capture_default_str();
  sub->add_option("-o,--out", a.out, "output sinogram file")->required();
  sub->add_option("--truth-out", a.truth_out, "also write the field sampled at the nodes");
  sub->add_option("--angles", a.angles, "projection angles over 360 degrees")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--offsets", a.offsets, "parallel rays per angle")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--noise-sigma", a.sigma, "std of additive Gaussian noise (strain)")->check(CLI::NonNegativeNumber)->capture_default_str();
  sub->add_option("--seed", a.seed, "noise seed (required when --noise-sigma > 0)");
  sub->add_option("--units", a.units, "units of the length flags")->check(CLI::IsMember({"m", "mm"}))->capture_default_str();
  sub->add_option("--nu", a.nu, "Poisson ratio of the analytic field")->capture_default_str();
  sub->add_option("--youngs-modulus", a.beam.youngs_modulus, "Pa")->capture_default_str();
  sub->add_option("--load", a.beam.load, "beam: end load, N")->capture_default_str();
  sub->add_option("--beam-length", a.beam.length, "beam: length")->capture_default_str();
  sub->add_option("--beam-width", a.beam.width, "beam: width")->capture_default_str();
  sub->add_option("--thickness", a.beam.thickness, "beam: thickness")->capture_default_str();
  sub->add_option("--outer-radius", a.ring.outer_radius, "ringplug: disc radius")->capture_default_str();
  sub->add_option("--bore-radius", a.ring.bore_radius, "ringplug: bore radius")->capture_default_str();
  sub->add_option("--bore-offset", a.ring.bore_offset, "ringplug: bore centre x")->capture_default_str();
  sub->add_option("--interference", a.ring.interference, "ringplug: diametral interference")->capture_default_str();
}

int run_simulate(SimulateArgs a, const CLI::App& sub) {
  if (a.sigma > 0.0 && !a.seed) throw UsageError("--seed is required when --noise-sigma > 0");
  if (a.field == "file" && a.field_file.empty()) throw UsageError("--field file needs --field-file");
  if (a.field != "file" && !a.field_file.empty()) throw UsageError("--field-file is only used with --field file");
  if (a.field == "file" && sub.count("--mode") && a.mode == "exact")
    throw UsageError("a nodal field file only supports --mode interpolated");

  // Only lengths the user passed are rescaled; defaults are already SI.
  const double s = unit_scale(a.units);
  if (s != 1.0) {
    if (sub.count("--beam-length")) a.beam.length *= s;
    if (sub.count("--beam-width")) a.beam.width *= s;
    if (sub.count("--thickness")) a.beam.thickness *= s;
    if (sub.count("--outer-radius")) a.ring.outer_radius *= s;
    if (sub.count("--bore-radius")) a.ring.bore_radius *= s;
    if (sub.count("--bore-offset")) a.ring.bore_offset *= s;
    if (sub.count("--interference")) a.ring.interference *= s;
  }
  a.beam.poisson = a.nu;
  a.ring.poisson = a.nu;
  a.ring.youngs_modulus = a.beam.youngs_modulus;

  const lrt::QuadMesh mesh = lrt::read_mesh(a.mesh);
  const auto rays = lrt::generate_rays(mesh, a.angles, a.offsets);
  const std::uint64_t seed = a.seed.value_or(0);
  const auto mode = a.mode == "exact" ? lrt::ProjectionMode::exact : lrt::ProjectionMode::interpolated;

  lrt::Sinogram sino;
  lrt::NodalStrainField truth;
  if (a.field == "beam") {
    const lrt::BeamField f{a.beam};
    sino = lrt::simulate_sinogram(mesh, f, rays, a.sigma, seed, mode);
    if (!a.truth_out.empty()) truth = lrt::interpolate_to_nodes(f, mesh);
  } else if (a.field == "ringplug") {
    if (!a.ring.is_exact()) std::cerr << "note: offset bore, the Lame field is an approximation\n";
    const lrt::RingPlugField f{a.ring};
    sino = lrt::simulate_sinogram(mesh, f, rays, a.sigma, seed, mode);
    if (!a.truth_out.empty()) truth = lrt::interpolate_to_nodes(f, mesh);
  } else {
    lrt::FieldFile file = lrt::read_field(a.field_file);
    check_nodes_match(file, mesh, "field file");
    sino = lrt::simulate_sinogram(mesh, file.field, rays, a.sigma, seed);
    truth = std::move(file.field);
  }
  lrt::write_sinogram(a.out, sino);
  if (!a.truth_out.empty()) lrt::write_field(a.truth_out, truth, mesh);
  std::cout << "wrote " << a.out << ": " << sino.size() << " records (" << rays.size() - sino.size()
            << " grazing or missing rays dropped)\n";
  return 0;
}

// ------------------------------------------------------------ reconstruct

struct ReconstructArgs {
  lrt::RunConfig cfg;
  std::string reg = "stiffness";
  std::string constraint = "kkt";
  std::vector<double> alpha_grid;
  double tau = lrt::kDiscrepancyTau;
  bool allow_rank_deficient = false;
};

void setup_reconstruct(CLI::App& app, ReconstructArgs& a) {
  auto* sub = app.add_subcommand("reconstruct", "Reconstruct the nodal strain field from a sinogram");
  sub->add_option("--mesh", a.cfg.mesh_path, "mesh file")->required();
  sub->add_option("--sinogram", a.cfg.sinogram_path, "sinogram CSV")->required();
  sub->add_option("-o,--out", a.cfg.output_path, "output field CSV")->required();
  sub->add_option("--report", a.cfg.report_path, "JSON report (default: stdout)");
  sub->add_option("--vtk", a.cfg.vtk_path, "also write a legacy VTK file");
  sub->add_option("--nu", a.cfg.nu, "Poisson ratio for the equilibrium rows")->capture_default_str();
  auto* alpha = sub->add_option("--alpha", a.cfg.alpha, "Tikhonov weight (stacked [K; alpha B])")
                    ->check(CLI::NonNegativeNumber)
                    ->capture_default_str();
  sub->add_option("--alpha-grid", a.alpha_grid, "sweep these alphas and keep the discrepancy-principle choice")
      ->check(CLI::NonNegativeNumber)
      ->excludes(alpha)
      ->delimiter(',');
  sub->add_option("--discrepancy-tau", a.tau, "alpha-grid: keep the largest alpha with residual <= tau sigma sqrt(N)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--reg", a.reg, "none, identity or stiffness")
      ->check(CLI::IsMember({"none", "identity", "stiffness"}))
      ->capture_default_str();
  sub->add_option("--constraint", a.constraint, "kkt or penalty")->check(CLI::IsMember({"kkt", "penalty"}))->capture_default_str();
  sub->add_option("--penalty-weight", a.cfg.penalty_weight, "w in the penalty rows w C")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--tolerance", a.cfg.constraint_tolerance, "kkt feasibility tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_flag("--allow-rank-deficient", a.allow_rank_deficient, "return the shifted solution instead of failing");
}

json result_json(const lrt::ReconResult& r) {
  json j;
  j["data_residual"] = r.data_residual;
  j["constraint_residual"] = r.constraint_residual;
  j["reg_norm"] = r.reg_norm;
  j["stationarity"] = r.stationarity;
  j["iterations"] = r.stats.iterations;
  j["converged"] = r.stats.converged;
  j["rank_deficiency"] = r.stats.deficiency;
  j["shift"] = r.stats.shift;
  return j;
}

int run_reconstruct(ReconstructArgs a) {
  a.cfg.command = "reconstruct";
  a.cfg.regularizer = a.reg == "none" ? lrt::Regularizer::none
                      : a.reg == "identity" ? lrt::Regularizer::identity
                                            : lrt::Regularizer::stiffness;
  a.cfg.constraint_mode = a.constraint == "kkt" ? lrt::ConstraintMode::kkt : lrt::ConstraintMode::penalty;
  if (!(a.cfg.nu >= 0.0 && a.cfg.nu < 0.5)) throw UsageError("--nu must lie in [0, 0.5)");
  if (a.cfg.regularizer == lrt::Regularizer::none && (a.cfg.alpha > 0.0 || !a.alpha_grid.empty()))
    throw UsageError("--alpha needs --reg identity or stiffness");

  const lrt::QuadMesh mesh = lrt::read_mesh(a.cfg.mesh_path);
  const lrt::Sinogram sino = lrt::read_sinogram(a.cfg.sinogram_path);
  if (sino.size() == 0) throw lrt::FormatError("sinogram has no records");

  const auto paths = lrt::trace_all(lrt::rays_from_sinogram(sino, mesh), mesh);
  const double tol = 1e-9 * std::max(1.0, mesh.bounding_radius());
  for (std::size_t i = 0; i < paths.size(); ++i)
    if (!paths[i] || std::abs(paths[i]->length - sino.records[i].length) > tol)
      throw lrt::MeshMismatchError("sinogram record " + std::to_string(i) +
                                   " does not match a ray through this mesh");
  const lrt::MeasurementOperator op = lrt::assemble_operator(paths, mesh);
  const lrt::ConstraintMatrix c = lrt::assemble_constraints(mesh, a.cfg.nu);
  const lrt::RowMatrix b = lrt::regularization_matrix(a.cfg.regularizer, mesh);
  const Eigen::VectorXd data = sino.values();

  lrt::SolverConfig sc;
  sc.constraint_mode = a.cfg.constraint_mode;
  sc.penalty_weight = a.cfg.penalty_weight;
  sc.regularizer = a.cfg.regularizer;
  sc.constraint_tolerance = a.cfg.constraint_tolerance;
  sc.allow_rank_deficient = a.allow_rank_deficient;

  json report;
  lrt::ReconResult result;
  if (!a.alpha_grid.empty()) {
    double sigma = 0.0;
    for (const auto& r : sino.records) sigma = std::max(sigma, r.sigma);
    auto sweep = lrt::sweep_alpha(op.matrix, data, c.matrix, b, a.alpha_grid, sc);
    const std::size_t pick = lrt::discrepancy_choice(sweep, sigma, sino.size(), a.tau);
    json entries = json::array();
    for (const auto& p : sweep) {
      json e;
      e["alpha"] = p.alpha;
      e["data_residual"] = p.result.data_residual;
      e["reg_norm"] = p.result.reg_norm;
      e["constraint_residual"] = p.result.constraint_residual;
      entries.push_back(e);
    }
    report["sweep"] = entries;
    report["discrepancy_tau"] = a.tau;
    report["discrepancy_target"] = a.tau * sigma * std::sqrt(double(sino.size()));
    a.cfg.alpha = sweep[pick].alpha;
    result = std::move(sweep[pick].result);
  } else {
    sc.alpha = a.cfg.alpha;
    result = lrt::solve_tikhonov(op.matrix, data, c.matrix, b, a.cfg.alpha, sc);
  }

  lrt::write_field(a.cfg.output_path, result.field, mesh);
  if (!a.cfg.vtk_path.empty()) lrt::write_field_vtk(a.cfg.vtk_path, result.field, mesh);

  json out;
  out["config"] = lrt::to_json(a.cfg);
  out["measurements"] = sino.size();
  out["elements"] = mesh.element_count();
  out["unknowns"] = 3 * mesh.node_count();
  const json summary = result_json(result);
  for (const auto& [key, value] : summary.items()) out[key] = value;
  for (auto& [key, value] : report.items()) out[key] = value;
  write_json(a.cfg.report_path, out);

  const bool feasible = a.cfg.constraint_mode != lrt::ConstraintMode::kkt ||
                        result.constraint_residual <=
                            a.cfg.constraint_tolerance * std::max(1.0, result.field.values().lpNorm<Eigen::Infinity>());
  if (!result.stats.converged || !feasible) {
    std::cerr << "error: solver did not reach its tolerances (constraint residual "
              << format("%.3e", result.constraint_residual) << ")\n";
    return 1;
  }
  return 0;
}

// ---------------------------------------------------------------- compare

struct CompareArgs {
  std::string mesh;
  std::string a;
  std::string b;
  std::string json_out;
};

void setup_compare(CLI::App& app, CompareArgs& a) {
  auto* sub = app.add_subcommand("compare", "Per-component errors of a field against a reference");
  sub->add_option("--mesh", a.mesh, "mesh file")->required();
  sub->add_option("field", a.a, "field CSV")->required();
  sub->add_option("reference", a.b, "reference field CSV")->required();
  sub->add_option("--json", a.json_out, "also write the table as JSON");
}

int run_compare(const CompareArgs& a) {
  const lrt::QuadMesh mesh = lrt::read_mesh(a.mesh);
  const lrt::FieldFile fa = lrt::read_field(a.a);
  const lrt::FieldFile fb = lrt::read_field(a.b);
  check_nodes_match(fa, mesh, "field");
  check_nodes_match(fb, mesh, "reference");
  const lrt::FieldComparison cmp = lrt::compare_fields(fa.field, fb.field, mesh);

  static constexpr const char* names[3] = {"exx", "exy", "eyy"};
  std::cout << "component        rmse     max_abs  normalized\n";
  json j;
  for (std::size_t c = 0; c < 3; ++c) {
    const lrt::ComponentError& e = cmp.components[c];
    std::cout << names[c] << "       " << format("%11.4e", e.rmse) << " " << format("%11.4e", e.max_abs) << " "
              << format("%11.4e", e.normalized_rmse) << "\n";
    json row;
    row["rmse"] = e.rmse;
    row["max_abs"] = e.max_abs;
    row["normalized_rmse"] = std::isfinite(e.normalized_rmse) ? json(e.normalized_rmse) : json(nullptr);
    j[names[c]] = row;
  }
  std::cout << "all       " << format("%11.4e", cmp.rmse) << "\n";
  j["rmse"] = cmp.rmse;
  if (!a.json_out.empty()) write_json(a.json_out, j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2-D strain tomography from line-average strain measurements", "lrt"};
  app.require_subcommand(1);
  std::size_t threads = 0;
  app.add_option("--threads", threads, "assembly worker threads (default $LRT_THREADS or 1)")
      ->envname("LRT_THREADS")
      ->check(CLI::PositiveNumber);

  MeshgenArgs meshgen;
  SimulateArgs simulate;
  ReconstructArgs reconstruct;
  CompareArgs compare;
  setup_meshgen(app, meshgen);
  setup_simulate(app, simulate);
  setup_reconstruct(app, reconstruct);
  setup_compare(app, compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  if (threads > 0) lrt::set_thread_count(threads);

  try {
    const CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "meshgen") return run_meshgen(meshgen, *sub);
    if (name == "simulate") return run_simulate(simulate, *sub);
    if (name == "reconstruct") return run_reconstruct(reconstruct);
    return run_compare(compare);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
