#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "eigenbound/driver.hpp"
#include "eigenbound/errors.hpp"
#include "eigenbound/mesh_io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"guaranteed two-sided bounds for Friedrichs, Poincare, and trace constants"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  bool emit_vtk = false;
  CLI::App* run = app.add_subcommand("run", "execute the adaptive sweep from a config file");
  run->add_option("--config", config_path, "key-value or JSON config file")->required();
  run->add_option("--out", out_dir, "output directory (overrides the config)");
  run->add_flag("--emit-vtk", emit_vtk, "write per-iteration VTK meshes");

  std::string mesh_path;
  CLI::App* check = app.add_subcommand("check-mesh", "validate a plain-text mesh file");
  check->add_option("mesh", mesh_path, "mesh file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      eigenbound::RunConfig cfg = eigenbound::load_run_config(config_path);
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      if (emit_vtk) cfg.emit_vtk = true;
      return eigenbound::run_sweep(cfg);
    }
    const eigenbound::Mesh mesh = eigenbound::read_mesh_text(mesh_path);
    const eigenbound::ConformityReport report = eigenbound::check_conformity(mesh);
    if (report.pass) {
      std::printf("mesh OK: %d vertices, %d triangles, %zu boundary edges\n",
                  mesh.num_vertices(), mesh.num_triangles(), mesh.boundary_edges.size());
      return 0;
    }
    for (const std::string& v : report.violations)
      std::fprintf(stderr, "violation: %s\n", v.c_str());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
