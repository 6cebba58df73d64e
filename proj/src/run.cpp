#include "hmmrd/run.hpp"

#include "hmmrd/diagnostics.hpp"
#include "hmmrd/hash.hpp"
#include "hmmrd/verify.hpp"

#include <Eigen/Core>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace hmmrd {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("out", "cannot write '" + path.string() + "'");
  out << std::setprecision(9);
  return out;
}

std::string hex(std::uint64_t value) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << value;
  return s.str();
}

ExactSolution config_exact(const RunConfig& cfg) {
  return cfg.problem == "affine" ? affine_exact() : brusselator_exact();
}

KineticsModel config_kinetics(const RunConfig& cfg) {
  return kinetics_by_name(cfg.kinetics, BrusselatorParams{cfg.a, cfg.b});
}

NewtonConfig config_newton(const RunConfig& cfg) {
  return NewtonConfig{cfg.newton_tol, cfg.newton_max_iter, cfg.linear_tol};
}

void write_manifest(const RunConfig& cfg, const fs::path& dir,
                    const std::vector<std::pair<std::string, std::uint64_t>>& meshes) {
  Fnv1a config_hash;
  const std::string canonical = cfg.canonical_text();
  config_hash.update(canonical);

  std::ofstream out = open_output(dir / "manifest.txt");
  out << "command: " << command_name(cfg.command) << '\n'
      << "config_hash: " << hex(config_hash.digest()) << '\n';
  for (const auto& [label, checksum] : meshes) {
    out << "mesh_checksum[" << label << "]: " << hex(checksum) << '\n';
  }
  out << "hmmrd_version: " << HMMRD_VERSION << '\n'
      << "eigen_version: " << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.'
      << EIGEN_MINOR_VERSION << '\n'
      << "compiler: " << __VERSION__ << '\n'
      << "cxx_standard: " << __cplusplus << '\n'
      << "config:\n";
  std::istringstream lines(canonical);
  for (std::string line; std::getline(lines, line);) out << "  " << line << '\n';
}

std::string mesh_label(const RunConfig& cfg) {
  return cfg.mesh_file ? *cfg.mesh_file : "n=" + std::to_string(cfg.level);
}

void run_solve(const RunConfig& cfg, const fs::path& dir, std::ostream& log) {
  const PolytopalMesh mesh = config_mesh(cfg);
  const HmmDiscretisation disc(mesh);
  const ExactSolution exact = config_exact(cfg);
  const ProblemSpec spec = problem_from_exact(exact, cfg.mu1, cfg.mu2, config_kinetics(cfg));
  const TimeGrid grid = TimeGrid::with_step(cfg.final_time, cfg.effective_dt());

  const auto start = std::chrono::steady_clock::now();
  SolveOptions options;
  options.keep_all_levels = false;
  const TransientSolution sol = solve_transient(spec, disc, grid, config_newton(cfg), options);
  const double runtime =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const double t = grid.final_time();
  const SpeciesPair& last = sol.final_state();
  ConvergenceTable table;
  ErrorReport r;
  r.h = cfg.h_label == "leg" && !cfg.mesh_file ? 1.0 / static_cast<double>(cfg.level) : mesh.h();
  r.err_u = relative_value_error(disc, last.u, [&](const Point& x) { return exact.u(x, t); });
  r.err_v = relative_value_error(disc, last.v, [&](const Point& x) { return exact.v(x, t); });
  r.err_grad_u =
      relative_gradient_error(disc, last.u, [&](const Point& x) { return exact.grad_u(x, t); });
  r.err_grad_v =
      relative_gradient_error(disc, last.v, [&](const Point& x) { return exact.grad_v(x, t); });
  r.runtime_s = runtime;
  table.rows.push_back(r);
  {
    std::ofstream out = open_output(dir / "errors.csv");
    write_convergence_csv(table, out);
  }
  {
    std::ofstream out = open_output(dir / "final_state.csv");
    out << std::setprecision(17) << "x,y,u,v\n";
    for (const Cell& c : mesh.cells()) {
      const auto k = static_cast<Eigen::Index>(c.id);
      out << c.center.x() << ',' << c.center.y() << ',' << last.u.cell_values[k] << ','
          << last.v.cell_values[k] << '\n';
    }
  }
  {
    std::ofstream out = open_output(dir / "run.log");
    out << "level,time,newton_iterations,final_residual,norm_u,norm_v\n";
    for (std::size_t n = 0; n < sol.records.size(); ++n) {
      const auto& rec = sol.records[n];
      out << n << ',' << rec.time << ',' << rec.newton_iterations << ','
          << rec.final_residual << ',' << rec.norm_u << ',' << rec.norm_v << '\n';
    }
    out << "runtime_s," << runtime << '\n';
  }
  write_manifest(cfg, dir, {{mesh_label(cfg), mesh_checksum(mesh)}});

  int max_iter = 0;
  for (const auto& rec : sol.records) max_iter = std::max(max_iter, rec.newton_iterations);
  log << std::setprecision(9) << "solve " << mesh_label(cfg) << ": " << grid.num_steps()
      << " steps, max Newton iterations " << max_iter << ", err_u " << r.err_u << ", err_v "
      << r.err_v << ", " << runtime << " s\n";
}

void run_convergence(const RunConfig& cfg, const fs::path& dir, std::ostream& log) {
  if (cfg.mesh_file) {
    throw ConfigError("mesh_file", "the convergence study runs on the structured ladder");
  }
  StudySetup setup;
  setup.exact = config_exact(cfg);
  setup.mu1 = cfg.mu1;
  setup.mu2 = cfg.mu2;
  setup.kinetics = config_kinetics(cfg);
  setup.newton = config_newton(cfg);
  setup.h_label = cfg.h_label == "leg" ? MeshSizeLabel::leg : MeshSizeLabel::diameter;
  setup.parallel = cfg.parallel;

  const auto levels = cfg.effective_levels();
  const ConvergenceTable table =
      run_convergence_study(levels, cfg.effective_dt(), cfg.final_time, setup);

  {
    std::ofstream out = open_output(dir / "errors.csv");
    write_convergence_csv(table, out);
  }
  std::vector<double> h, eu, ev, egu, egv;
  for (const auto& r : table.rows) {
    h.push_back(r.h);
    eu.push_back(r.err_u);
    ev.push_back(r.err_v);
    egu.push_back(r.err_grad_u);
    egv.push_back(r.err_grad_v);
  }
  const std::pair<const char*, const std::vector<double>*> plots[] = {
      {"grad_u.dat", &egu}, {"grad_v.dat", &egv}, {"err_u.dat", &eu}, {"err_v.dat", &ev}};
  for (const auto& [name, data] : plots) {
    std::ofstream out = open_output(dir / name);
    write_plot_data(h, *data, out);
  }
  {
    std::ofstream out = open_output(dir / "run.log");
    out << "n,h,max_newton_iterations,max_norm_ratio_u,max_norm_ratio_v,runtime_s\n";
    for (const auto& r : table.rows) {
      out << r.level << ',' << r.h << ',' << r.max_newton_iterations << ','
          << r.max_norm_ratio_u << ',' << r.max_norm_ratio_v << ',' << r.runtime_s << '\n';
    }
  }
  std::vector<std::pair<std::string, std::uint64_t>> meshes;
  for (std::size_t n : levels) {
    meshes.emplace_back("n=" + std::to_string(n), mesh_checksum(build_structured_triangular(n)));
  }
  write_manifest(cfg, dir, meshes);

  log << std::setprecision(6);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    log << "n=" << r.level << " h=" << r.h << " err_u=" << r.err_u << " err_v=" << r.err_v
        << " err_gu=" << r.err_grad_u << " err_gv=" << r.err_grad_v;
    if (auto ru = table.rate_u(i)) log << " rate_u=" << *ru << " rate_v=" << *table.rate_v(i);
    log << " newton<=" << r.max_newton_iterations << " (" << r.runtime_s << " s)\n";
  }
}

void run_diagnose(const RunConfig& cfg, const fs::path& dir, std::ostream& log) {
  std::vector<PolytopalMesh> meshes;
  std::vector<std::pair<std::string, std::uint64_t>> checksums;
  if (cfg.mesh_file) {
    meshes.push_back(load_mesh_file(*cfg.mesh_file));
    checksums.emplace_back(*cfg.mesh_file, mesh_checksum(meshes.back()));
  } else {
    for (std::size_t n : cfg.effective_levels()) {
      meshes.push_back(build_structured_triangular(n));
      checksums.emplace_back("n=" + std::to_string(n), mesh_checksum(meshes.back()));
    }
  }
  for (const auto& label : cfg.consistency_samples) (void)sample_function(label);
  for (const auto& label : cfg.conformity_samples) (void)sample_flux(label);

  std::ofstream out = open_output(dir / "diagnostics.csv");
  out << "h,C_D";
  for (const auto& l : cfg.consistency_samples) out << ",S_D[" << l << ']';
  for (const auto& l : cfg.conformity_samples) out << ",W_D[" << l << ']';
  out << '\n';
  for (const PolytopalMesh& mesh : meshes) {
    const HmmDiscretisation disc(mesh);
    const GdmQualityReport report =
        quality_report(disc, cfg.consistency_samples, cfg.conformity_samples);
    out << report.h << ',' << report.coercivity;
    for (const auto& [label, value] : report.consistency) out << ',' << value;
    for (const auto& [label, value] : report.limit_conformity) out << ',' << value;
    out << '\n';
    log << std::setprecision(6) << "h=" << report.h << " C_D=" << report.coercivity << '\n';
  }
  write_manifest(cfg, dir, checksums);
}

void run_mesh_info(const RunConfig& cfg, const fs::path& dir, std::ostream& log) {
  const PolytopalMesh mesh = config_mesh(cfg);
  const ValidationReport v = validate(mesh);
  log << std::setprecision(9) << "mesh " << mesh_label(cfg) << '\n'
      << "vertices: " << mesh.num_vertices() << '\n'
      << "faces: " << mesh.num_faces() << " (" << mesh.num_boundary_faces() << " boundary, "
      << mesh.num_interior_faces() << " interior)\n"
      << "cells: " << mesh.num_cells() << '\n'
      << "h: " << mesh_size(mesh) << '\n'
      << "total_area: " << v.total_area << '\n'
      << "closedness_defect: " << v.closedness_defect << '\n'
      << "stokes_defect: " << v.stokes_defect << '\n'
      << "volume_defect: " << v.volume_defect << '\n'
      << "min_cell_face_distance: " << v.min_distance << '\n'
      << "euler_characteristic: " << v.euler_characteristic << '\n'
      << "valid: " << (v.ok() ? "yes" : "no") << '\n';
  write_manifest(cfg, dir, {{mesh_label(cfg), mesh_checksum(mesh)}});
}

}  // namespace

PolytopalMesh config_mesh(const RunConfig& cfg) {
  return cfg.mesh_file ? load_mesh_file(*cfg.mesh_file) : build_structured_triangular(cfg.level);
}

int run(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  try {
    const fs::path dir(cfg.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
      throw ConfigError("out", "cannot create output directory '" + cfg.out + "'");
    }
    switch (cfg.command) {
      case Command::solve: run_solve(cfg, dir, log); break;
      case Command::convergence: run_convergence(cfg, dir, log); break;
      case Command::diagnose: run_diagnose(cfg, dir, log); break;
      case Command::mesh_info: run_mesh_info(cfg, dir, log); break;
    }
    return 0;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const MeshError& e) {
    err << "mesh error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace hmmrd
