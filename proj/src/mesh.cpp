#include "eigenbound/mesh.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_map>

#include "eigenbound/errors.hpp"

namespace eigenbound {

namespace {

// Undirected edge key.
inline std::uint64_t edge_key(std::int32_t a, std::int32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

inline double signed_area2(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

}  // namespace

BoundaryLabel parse_boundary_label(const std::string& text) {
  std::string t;
  t.reserve(text.size());
  for (char c : text) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (t == "dirichlet") return BoundaryLabel::Dirichlet;
  if (t == "neumann") return BoundaryLabel::Neumann;
  throw ConfigError("unknown boundary label '" + text + "' (expected dirichlet or neumann)");
}

double Mesh::triangle_area(int t) const {
  const Triangle& tr = triangles[static_cast<std::size_t>(t)];
  return 0.5 * signed_area2(vertices[tr.v[0]], vertices[tr.v[1]], vertices[tr.v[2]]);
}

Vec2 Mesh::centroid(int t) const {
  const Triangle& tr = triangles[static_cast<std::size_t>(t)];
  const Vec2& a = vertices[tr.v[0]];
  const Vec2& b = vertices[tr.v[1]];
  const Vec2& c = vertices[tr.v[2]];
  return {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
}

std::vector<bool> Mesh::dirichlet_vertex_mask() const {
  std::vector<bool> mask(vertices.size(), false);
  for (const BoundaryEdge& e : boundary_edges) {
    if (e.label == BoundaryLabel::Dirichlet) {
      mask[e.v0] = true;
      mask[e.v1] = true;
    }
  }
  return mask;
}

bool Mesh::has_dirichlet() const {
  for (const BoundaryEdge& e : boundary_edges)
    if (e.label == BoundaryLabel::Dirichlet) return true;
  return false;
}

bool Mesh::has_neumann() const {
  for (const BoundaryEdge& e : boundary_edges)
    if (e.label == BoundaryLabel::Neumann) return true;
  return false;
}

Mesh build_initial_mesh(const SquareBoundaryRule& rule) {
  Mesh m;
  m.vertices = {
      {-1.0, -1.0}, {1.0, -1.0}, {1.0, 1.0}, {-1.0, 1.0},  // corners
      {0.0, -1.0},  {1.0, 0.0},  {0.0, 1.0}, {-1.0, 0.0},  // side midpoints
      {0.0, 0.0},                                          // center
  };

  // (corner, midpoint, center) fans, CCW. The corner-center diagonal is the
  // unique longest edge of each triangle and is shared by consecutive pairs.
  struct T {
    std::array<std::int32_t, 3> v;
    std::int8_t ref;
  };
  const std::array<T, 8> tris = {{
      {{0, 4, 8}, 2},  // diagonal (8,0)
      {{4, 1, 8}, 1},  // diagonal (1,8)
      {{1, 5, 8}, 2},
      {{5, 2, 8}, 1},
      {{2, 6, 8}, 2},
      {{6, 3, 8}, 1},
      {{3, 7, 8}, 2},
      {{7, 0, 8}, 1},
  }};
  m.triangles.reserve(8);
  for (const T& t : tris) {
    Triangle tr;
    tr.v = t.v;
    tr.ref_edge = t.ref;
    tr.generation = 0;
    const Vec2 c = {(m.vertices[t.v[0]].x + m.vertices[t.v[1]].x + m.vertices[t.v[2]].x) / 3.0,
                    (m.vertices[t.v[0]].y + m.vertices[t.v[1]].y + m.vertices[t.v[2]].y) / 3.0};
    tr.region = (c.x * c.y > 0.0) ? 1 : 0;
    m.triangles.push_back(tr);
  }

  m.boundary_edges = {
      {0, 4, rule.bottom}, {4, 1, rule.bottom}, {1, 5, rule.right}, {5, 2, rule.right},
      {2, 6, rule.top},    {6, 3, rule.top},    {3, 7, rule.left},  {7, 0, rule.left},
  };
  return m;
}

namespace {

// Mutable refinement state. Triangles are tombstoned in place and children
// appended; compaction at the end preserves creation order.
struct RefineState {
  std::vector<Vec2> verts;
  std::vector<Triangle> tris;
  std::vector<bool> alive;
  // edge -> up to two alive triangles
  std::unordered_map<std::uint64_t, std::array<std::int32_t, 2>> edge2tri;
  std::unordered_map<std::uint64_t, std::int32_t> midpoint;
  std::vector<BoundaryEdge> bedges;
  std::unordered_map<std::uint64_t, std::int32_t> bedge_index;

  void edge_add(std::int32_t a, std::int32_t b, std::int32_t t) {
    auto [it, inserted] = edge2tri.try_emplace(edge_key(a, b), std::array<std::int32_t, 2>{-1, -1});
    auto& slot = it->second;
    if (slot[0] == t || slot[1] == t) return;
    if (slot[0] < 0)
      slot[0] = t;
    else if (slot[1] < 0)
      slot[1] = t;
    else
      throw ArgumentError("refine: edge shared by more than two triangles");
  }

  void edge_remove(std::int32_t a, std::int32_t b, std::int32_t t) {
    auto it = edge2tri.find(edge_key(a, b));
    if (it == edge2tri.end()) return;
    if (it->second[0] == t) it->second[0] = -1;
    if (it->second[1] == t) it->second[1] = -1;
  }

  std::int32_t neighbor_across(std::int32_t t, std::int32_t a, std::int32_t b) const {
    auto it = edge2tri.find(edge_key(a, b));
    if (it == edge2tri.end()) return -1;
    if (it->second[0] == t) return it->second[1];
    if (it->second[1] == t) return it->second[0];
    return -1;
  }

  std::int32_t midpoint_vertex(std::int32_t a, std::int32_t b) {
    const std::uint64_t key = edge_key(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    Vec2 p{0.5 * (verts[a].x + verts[b].x), 0.5 * (verts[a].y + verts[b].y)};
    const std::int32_t id = static_cast<std::int32_t>(verts.size());
    verts.push_back(p);
    midpoint.emplace(key, id);
    return id;
  }

  // Splits triangle t through its refinement edge with midpoint m.
  void bisect(std::int32_t t, std::int32_t m) {
    const Triangle tr = tris[t];
    const std::int32_t a = tr.v[tr.ref_edge];
    const std::int32_t b = tr.v[(tr.ref_edge + 1) % 3];
    const std::int32_t p = tr.v[(tr.ref_edge + 2) % 3];

    alive[t] = false;
    edge_remove(a, b, t);
    edge_remove(b, p, t);
    edge_remove(p, a, t);

    Triangle c1;  // keeps edge (p,a)
    c1.v = {a, m, p};
    c1.ref_edge = 2;
    c1.region = tr.region;
    c1.generation = tr.generation + 1;
    Triangle c2;  // keeps edge (b,p)
    c2.v = {m, b, p};
    c2.ref_edge = 1;
    c2.region = tr.region;
    c2.generation = tr.generation + 1;

    const std::int32_t i1 = static_cast<std::int32_t>(tris.size());
    tris.push_back(c1);
    alive.push_back(true);
    const std::int32_t i2 = static_cast<std::int32_t>(tris.size());
    tris.push_back(c2);
    alive.push_back(true);

    edge_add(a, m, i1);
    edge_add(m, p, i1);
    edge_add(p, a, i1);
    edge_add(m, b, i2);
    edge_add(b, p, i2);
    edge_add(m, p, i2);
  }

  void split_boundary(std::int32_t a, std::int32_t b, std::int32_t m) {
    auto it = bedge_index.find(edge_key(a, b));
    if (it == bedge_index.end()) return;
    const std::int32_t idx = it->second;
    const BoundaryEdge old = bedges[idx];
    bedge_index.erase(it);
    // Replace in place with the half that keeps old.v0, append the other.
    bedges[idx] = {old.v0, m, old.label};
    bedge_index[edge_key(old.v0, m)] = idx;
    const std::int32_t nidx = static_cast<std::int32_t>(bedges.size());
    bedges.push_back({m, old.v1, old.label});
    bedge_index[edge_key(m, old.v1)] = nidx;
  }

  // Refinement edge endpoints of t.
  std::pair<std::int32_t, std::int32_t> ref_pair(std::int32_t t) const {
    const Triangle& tr = tris[t];
    return {tr.v[tr.ref_edge], tr.v[(tr.ref_edge + 1) % 3]};
  }

  // Bisects t, recursing into incompatible neighbors first so every split
  // goes through a shared refinement edge (conforming closure).
  void ensure_split(std::int32_t t0, std::size_t budget) {
    std::vector<std::int32_t> stack;
    stack.push_back(t0);
    std::size_t steps = 0;
    while (!stack.empty()) {
      if (++steps > budget)
        throw ArgumentError("refine: conforming closure did not terminate (incompatible mesh labeling)");
      const std::int32_t t = stack.back();
      if (!alive[t]) {
        stack.pop_back();
        continue;
      }
      const auto [a, b] = ref_pair(t);
      const std::int32_t n = neighbor_across(t, a, b);
      if (n >= 0) {
        const auto [na, nb] = ref_pair(n);
        if (edge_key(na, nb) != edge_key(a, b)) {
          stack.push_back(n);  // neighbor must split first
          continue;
        }
      }
      const std::int32_t m = midpoint_vertex(a, b);
      bisect(t, m);
      if (n >= 0)
        bisect(n, m);
      else
        split_boundary(a, b, m);
      stack.pop_back();
    }
  }
};

}  // namespace

Mesh refine(const Mesh& mesh, const std::vector<int>& marked) {
  std::vector<int> ids(marked);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  for (int id : ids)
    if (id < 0 || id >= mesh.num_triangles())
      throw ArgumentError("refine: marked triangle id " + std::to_string(id) + " out of range");
  if (ids.empty()) return mesh;

  RefineState st;
  st.verts = mesh.vertices;
  st.tris = mesh.triangles;
  st.alive.assign(st.tris.size(), true);
  st.bedges = mesh.boundary_edges;
  for (std::size_t i = 0; i < st.bedges.size(); ++i)
    st.bedge_index[edge_key(st.bedges[i].v0, st.bedges[i].v1)] = static_cast<std::int32_t>(i);
  st.edge2tri.reserve(st.tris.size() * 2);
  for (std::size_t t = 0; t < st.tris.size(); ++t) {
    const auto& tr = st.tris[t];
    for (int e = 0; e < 3; ++e) st.edge_add(tr.v[e], tr.v[(e + 1) % 3], static_cast<std::int32_t>(t));
  }

  const std::size_t budget = (st.tris.size() + ids.size()) * 64 + 1024;
  for (int id : ids) {
    if (!st.alive[id]) continue;  // already split by closure
    st.ensure_split(id, budget);
  }

  Mesh out;
  out.vertices = std::move(st.verts);
  out.triangles.reserve(st.tris.size());
  for (std::size_t t = 0; t < st.tris.size(); ++t)
    if (st.alive[t]) out.triangles.push_back(st.tris[t]);
  out.boundary_edges = std::move(st.bedges);
  return out;
}

ConformityReport check_conformity(const Mesh& mesh) {
  ConformityReport rep;
  auto fail = [&rep](std::string msg) {
    rep.pass = false;
    rep.violations.push_back(std::move(msg));
  };

  const int nv = mesh.num_vertices();
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Triangle& tr = mesh.triangles[t];
    for (int k = 0; k < 3; ++k)
      if (tr.v[k] < 0 || tr.v[k] >= nv) {
        fail("triangle " + std::to_string(t) + " has vertex id out of range");
        return rep;
      }
    if (tr.v[0] == tr.v[1] || tr.v[1] == tr.v[2] || tr.v[2] == tr.v[0])
      fail("triangle " + std::to_string(t) + " has repeated vertices");
    const double a2 = signed_area2(mesh.vertices[tr.v[0]], mesh.vertices[tr.v[1]], mesh.vertices[tr.v[2]]);
    if (!(a2 > 0.0)) fail("triangle " + std::to_string(t) + " is not positively oriented");
    if (tr.ref_edge < 0 || tr.ref_edge > 2)
      fail("triangle " + std::to_string(t) + " has invalid refinement edge index");
  }

  // Duplicate coordinates.
  {
    std::vector<int> order(mesh.vertices.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
      if (mesh.vertices[i].x != mesh.vertices[j].x) return mesh.vertices[i].x < mesh.vertices[j].x;
      return mesh.vertices[i].y < mesh.vertices[j].y;
    });
    for (std::size_t k = 1; k < order.size(); ++k) {
      const Vec2& p = mesh.vertices[order[k - 1]];
      const Vec2& q = mesh.vertices[order[k]];
      if (p.x == q.x && p.y == q.y)
        fail("vertices " + std::to_string(order[k - 1]) + " and " + std::to_string(order[k]) +
             " have identical coordinates");
    }
  }

  // Edge incidence counts.
  std::unordered_map<std::uint64_t, int> count;
  count.reserve(mesh.triangles.size() * 2);
  for (const Triangle& tr : mesh.triangles)
    for (int e = 0; e < 3; ++e) ++count[edge_key(tr.v[e], tr.v[(e + 1) % 3])];

  std::unordered_map<std::uint64_t, int> bcount;
  for (const BoundaryEdge& e : mesh.boundary_edges) ++bcount[edge_key(e.v0, e.v1)];
  for (const auto& [key, c] : bcount)
    if (c > 1)
      fail("boundary edge (" + std::to_string(static_cast<std::int32_t>(key >> 32)) + "," +
           std::to_string(static_cast<std::int32_t>(key & 0xffffffffu)) + ") listed more than once");

  for (const auto& [key, c] : count) {
    const auto a = static_cast<std::int32_t>(key >> 32);
    const auto b = static_cast<std::int32_t>(key & 0xffffffffu);
    if (c > 2) {
      fail("edge (" + std::to_string(a) + "," + std::to_string(b) + ") shared by more than two triangles");
    } else if (c == 2) {
      if (bcount.count(key))
        fail("interior edge (" + std::to_string(a) + "," + std::to_string(b) + ") labeled as boundary");
    } else {  // c == 1
      if (!bcount.count(key))
        fail("single-triangle edge (" + std::to_string(a) + "," + std::to_string(b) +
             ") missing from the labeled boundary (hanging node or gap)");
    }
  }
  for (const auto& [key, c] : bcount)
    if (!count.count(key))
      fail("labeled boundary edge (" + std::to_string(static_cast<std::int32_t>(key >> 32)) + "," +
           std::to_string(static_cast<std::int32_t>(key & 0xffffffffu)) + ") is not an edge of any triangle");

  return rep;
}

}  // namespace eigenbound
