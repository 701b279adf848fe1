#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace eigenbound {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

enum class BoundaryLabel : std::uint8_t { Dirichlet = 0, Neumann = 1 };

// Parses "dirichlet" / "neumann" (case-insensitive); anything else is a
// configuration error.
BoundaryLabel parse_boundary_label(const std::string& text);

struct BoundaryEdge {
  std::int32_t v0 = -1;
  std::int32_t v1 = -1;
  BoundaryLabel label = BoundaryLabel::Dirichlet;
};

// Vertices are CCW. ref_edge is the local index r of the refinement edge
// (v_r, v_{r+1 mod 3}); bisection inserts the midpoint of that edge.
// generation counts bisections since the initial mesh.
struct Triangle {
  std::array<std::int32_t, 3> v{-1, -1, -1};
  std::int32_t region = 0;
  std::int8_t ref_edge = 0;
  std::int32_t generation = 0;
};

// Conforming triangulation of the square (-1,1)^2 with boundary labels.
// Plain data; invariants are enforced by the builders and checkable with
// check_conformity.
struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<Triangle> triangles;
  std::vector<BoundaryEdge> boundary_edges;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }

  double triangle_area(int t) const;
  Vec2 centroid(int t) const;

  // Vertices that lie on at least one Dirichlet boundary edge.
  std::vector<bool> dirichlet_vertex_mask() const;

  bool has_dirichlet() const;
  bool has_neumann() const;
};

// Per-side boundary labels of the initial square.
struct SquareBoundaryRule {
  BoundaryLabel bottom = BoundaryLabel::Dirichlet;
  BoundaryLabel right = BoundaryLabel::Dirichlet;
  BoundaryLabel top = BoundaryLabel::Dirichlet;
  BoundaryLabel left = BoundaryLabel::Dirichlet;
};

// Criss-cross mesh of (-1,1)^2: 4 corners, 4 side midpoints, the center;
// 8 triangles whose refinement edges are the corner-center diagonals
// (compatibly paired, so uniform refinement stays conforming).
// Region 1 is the pair of quadrants with x*y > 0, region 0 the others.
Mesh build_initial_mesh(const SquareBoundaryRule& rule);

// Newest-vertex bisection of the marked triangles plus the recursive
// conforming closure. marked holds triangle ids of the input mesh (dedup'd
// internally); out-of-range ids are an argument error. Parents are dropped
// from the output numbering; children are appended in deterministic order.
Mesh refine(const Mesh& mesh, const std::vector<int>& marked);

struct ConformityReport {
  bool pass = true;
  std::vector<std::string> violations;
};

/// Structural checks: positive triangle areas, every edge shared by at most
// two triangles, single-triangle edges exactly the labeled boundary edges,
// no duplicated vertices or boundary entries.
ConformityReport check_conformity(const Mesh& mesh);

}  // namespace eigenbound
