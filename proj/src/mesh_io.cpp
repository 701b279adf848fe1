#include "eigenbound/mesh_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "eigenbound/errors.hpp"

namespace eigenbound {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Longest edge; ties by smallest global id of the opposite vertex.
std::int8_t longest_edge_label(const Mesh& m, const Triangle& tr) {
  double best = -1.0;
  std::int8_t arg = 0;
  std::int32_t best_opp = 0;
  for (std::int8_t e = 0; e < 3; ++e) {
    const Vec2& a = m.vertices[tr.v[e]];
    const Vec2& b = m.vertices[tr.v[(e + 1) % 3]];
    const double len2 = (b.x - a.x) * (b.x - a.x) + (b.y - a.y) * (b.y - a.y);
    const std::int32_t opp = tr.v[(e + 2) % 3];
    if (len2 > best || (len2 == best && opp < best_opp)) {
      best = len2;
      arg = e;
      best_opp = opp;
    }
  }
  return arg;
}

}  // namespace

void write_mesh_text(const Mesh& mesh, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ArgumentError("cannot open '" + path + "' for writing");
  os << mesh.num_vertices() << ' ' << mesh.num_triangles() << ' ' << mesh.boundary_edges.size()
     << '\n';
  for (const Vec2& p : mesh.vertices) os << fmt17(p.x) << ' ' << fmt17(p.y) << '\n';
  for (const Triangle& t : mesh.triangles)
    os << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << ' ' << t.region << '\n';
  for (const BoundaryEdge& e : mesh.boundary_edges)
    os << e.v0 << ' ' << e.v1 << ' '
       << (e.label == BoundaryLabel::Dirichlet ? "dirichlet" : "neumann") << '\n';
  if (!os) throw ArgumentError("write to '" + path + "' failed");
}

Mesh read_mesh_text(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ArgumentError("cannot open mesh file '" + path + "'");
  int nv = 0, nt = 0, nb = 0;
  if (!(is >> nv >> nt >> nb) || nv < 3 || nt < 1 || nb < 3)
    throw ArgumentError("mesh file '" + path + "': bad count header");

  Mesh m;
  m.vertices.resize(nv);
  for (int i = 0; i < nv; ++i)
    if (!(is >> m.vertices[i].x >> m.vertices[i].y))
      throw ArgumentError("mesh file '" + path + "': truncated vertex list");
  m.triangles.resize(nt);
  for (int i = 0; i < nt; ++i) {
    Triangle& t = m.triangles[i];
    int a, b, c, r;
    if (!(is >> a >> b >> c >> r))
      throw ArgumentError("mesh file '" + path + "': truncated triangle list");
    t.v = {a, b, c};
    t.region = r;
    t.generation = 0;
  }
  m.boundary_edges.resize(nb);
  for (int i = 0; i < nb; ++i) {
    int a, b;
    std::string label;
    if (!(is >> a >> b >> label))
      throw ArgumentError("mesh file '" + path + "': truncated boundary list");
    m.boundary_edges[i] = {a, b, parse_boundary_label(label)};
  }
  for (Triangle& t : m.triangles) t.ref_edge = longest_edge_label(m, t);
  return m;
}

void export_vtk(const Mesh& mesh, const std::string& path,
                const std::vector<NamedCellField>& fields) {
  for (const NamedCellField& f : fields)
    if (static_cast<int>(f.values.size()) != mesh.num_triangles())
      throw ArgumentError("VTK field '" + f.name + "' has " + std::to_string(f.values.size()) +
                          " values for " + std::to_string(mesh.num_triangles()) + " triangles");

  std::ofstream os(path);
  if (!os) throw ArgumentError("cannot open '" + path + "' for writing");
  os << "# vtk DataFile Version 3.0\n";
  os << "eigenbound mesh\n";
  os << "ASCII\n";
  os << "DATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.num_vertices() << " double\n";
  for (const Vec2& p : mesh.vertices) os << fmt17(p.x) << ' ' << fmt17(p.y) << " 0\n";
  const int nt = mesh.num_triangles();
  os << "CELLS " << nt << ' ' << 4 * nt << '\n';
  for (const Triangle& t : mesh.triangles)
    os << "3 " << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << '\n';
  os << "CELL_TYPES " << nt << '\n';
  for (int i = 0; i < nt; ++i) os << "5\n";  // VTK_TRIANGLE
  os << "CELL_DATA " << nt << '\n';
  os << "SCALARS region int 1\nLOOKUP_TABLE default\n";
  for (const Triangle& t : mesh.triangles) os << t.region << '\n';
  for (const NamedCellField& f : fields) {
    os << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : f.values) os << fmt17(v) << '\n';
  }
  if (!os) throw ArgumentError("write to '" + path + "' failed");
}

}  // namespace eigenbound
