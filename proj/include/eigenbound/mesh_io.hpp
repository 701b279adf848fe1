#pragma once

#include <string>
#include <vector>

#include "eigenbound/mesh.hpp"

namespace eigenbound {

// Plain-text mesh format:
//   line 1:            <num_vertices> <num_triangles> <num_boundary_edges>
//   then per vertex:   x y
//   then per triangle: v0 v1 v2 region
//   then per edge:     v0 v1 dirichlet|neumann
// Coordinates are written with 17 significant digits so a round trip is
// bit-exact. Imported meshes get refinement edges assigned by the
// longest-edge rule (ties by smallest opposite-vertex id) at generation 0.
void write_mesh_text(const Mesh& mesh, const std::string& path);
Mesh read_mesh_text(const std::string& path);

struct NamedCellField {
  std::string name;
  std::vector<double> values;  // one per triangle
};

// Legacy ASCII VTK unstructured grid. The region id is always written as
// cell data; extra per-triangle fields may be appended. A field whose size
// differs from the triangle count is an argument error.
void export_vtk(const Mesh& mesh, const std::string& path,
                const std::vector<NamedCellField>& fields = {});

}  // namespace eigenbound
