#ifndef MINSURF_MESH_HPP
#define MINSURF_MESH_HPP

// Triangle meshes: validation with half-edge adjacency, OBJ input, discrete
// curvature and a few generators used for cross-validation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "minsurf/errors.hpp"
#include "minsurf/numeric.hpp"

namespace minsurf {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Interior angle at a in triangle (a, b, c).
inline double corner_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 u = b - a;
  const Vec3 v = c - a;
  return std::atan2(norm(cross(u, v)), dot(u, v));
}

using Face = std::array<int, 3>;

class TriangleMesh {
 public:
  static constexpr int kNone = -1;

  /// Validates and builds adjacency. Throws TopologyError on bad indices,
  /// degenerate faces, edges with more than two faces or inconsistent Euler data.
  static TriangleMesh build(std::vector<Vec3> vertices, std::vector<Face> faces) {
    TriangleMesh m;
    m.v_ = std::move(vertices);
    m.f_ = std::move(faces);
    const int nv = static_cast<int>(m.v_.size());
    for (std::size_t fi = 0; fi < m.f_.size(); ++fi) {
      const auto& f = m.f_[fi];
      for (int k = 0; k < 3; ++k) {
        if (f[k] < 0 || f[k] >= nv) throw TopologyError("face " + std::to_string(fi) + " has an out-of-range index");
      }
      if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) {
        throw TopologyError("face " + std::to_string(fi) + " repeats a vertex");
      }
      if (!(m.face_area(fi) > 1e-14)) throw TopologyError("face " + std::to_string(fi) + " is degenerate");
    }
    m.build_adjacency();
    return m;
  }

  std::size_t num_vertices() const { return v_.size(); }
  std::size_t num_faces() const { return f_.size(); }
  std::size_t num_edges() const { return num_edges_; }
  const std::vector<Vec3>& vertices() const { return v_; }
  const std::vector<Face>& faces() const { return f_; }
  const Vec3& vertex(int i) const { return v_[static_cast<std::size_t>(i)]; }

  int euler_characteristic() const {
    return static_cast<int>(v_.size()) - static_cast<int>(num_edges_) + static_cast<int>(f_.size());
  }
  int boundary_loops() const { return boundary_loops_; }
  int components() const { return components_; }
  int genus() const { return genus_; }
  bool closed() const { return boundary_loops_ == 0; }
  bool orientable() const { return orientable_; }
  bool is_boundary_vertex(int v) const { return boundary_vertex_[static_cast<std::size_t>(v)]; }

  /// Neighbouring vertices of v (unordered, deterministic).
  const std::vector<int>& neighbors(int v) const { return nbr_[static_cast<std::size_t>(v)]; }
  /// Faces incident to v.
  const std::vector<int>& vertex_faces(int v) const { return vf_[static_cast<std::size_t>(v)]; }

  /// Face index on the other side of the directed edge (a -> b), or kNone.
  int opposite_face(int a, int b) const {
    const auto it = half_.find(key(b, a));
    return it == half_.end() ? kNone : it->second;
  }

  double face_area(std::size_t fi) const {
    const auto& f = f_[fi];
    return 0.5 * norm(cross(v_[f[1]] - v_[f[0]], v_[f[2]] - v_[f[0]]));
  }

  double total_area() const {
    std::vector<double> a(f_.size());
    for (std::size_t i = 0; i < f_.size(); ++i) a[i] = face_area(i);
    return pairwise_sum(a);
  }

  double max_edge_length() const {
    double h = 0.0;
    for (const auto& f : f_) {
      for (int k = 0; k < 3; ++k) h = std::max(h, norm(v_[f[(k + 1) % 3]] - v_[f[k]]));
    }
    return h;
  }

  /// 2 pi (pi on the boundary) minus the incident corner angles.
  double angle_defect(int v) const {
    double sum = 0.0;
    for (int fi : vertex_faces(v)) {
      const auto& f = f_[static_cast<std::size_t>(fi)];
      const int k = f[0] == v ? 0 : (f[1] == v ? 1 : 2);
      sum += corner_angle(v_[f[k]], v_[f[(k + 1) % 3]], v_[f[(k + 2) % 3]]);
    }
    return (is_boundary_vertex(v) ? kPi : kTwoPi) - sum;
  }

  /// Sum of interior angle defects (boundary vertices excluded).
  double total_interior_defect() const {
    std::vector<double> d;
    for (int v = 0; v < static_cast<int>(v_.size()); ++v) {
      if (!is_boundary_vertex(v)) d.push_back(angle_defect(v));
    }
    return pairwise_sum(d);
  }

  /// Mixed Voronoi areas (Voronoi cells, obtuse triangles split by halves and quarters).
  std::vector<double> mixed_areas() const {
    std::vector<double> a(v_.size(), 0.0);
    for (std::size_t fi = 0; fi < f_.size(); ++fi) {
      const auto& f = f_[fi];
      const double area = face_area(fi);
      std::array<double, 3> ang{};
      for (int k = 0; k < 3; ++k) ang[k] = corner_angle(v_[f[k]], v_[f[(k + 1) % 3]], v_[f[(k + 2) % 3]]);
      const int obtuse = ang[0] > 0.5 * kPi ? 0 : (ang[1] > 0.5 * kPi ? 1 : (ang[2] > 0.5 * kPi ? 2 : -1));
      if (obtuse >= 0) {
        for (int k = 0; k < 3; ++k) a[f[k]] += k == obtuse ? 0.5 * area : 0.25 * area;
        continue;
      }
      for (int k = 0; k < 3; ++k) {
        const Vec3& p = v_[f[k]];
        const Vec3& q = v_[f[(k + 1) % 3]];
        const Vec3& r = v_[f[(k + 2) % 3]];
        const double pq = dot(q - p, q - p);
        const double pr = dot(r - p, r - p);
        a[f[k]] += (pq / std::tan(ang[(k + 2) % 3]) + pr / std::tan(ang[(k + 1) % 3])) / 8.0;
      }
    }
    return a;
  }

  /// Unit face normal from the vertex order.
  Vec3 face_normal(std::size_t fi) const {
    const auto& f = f_[fi];
    const Vec3 n = cross(v_[f[1]] - v_[f[0]], v_[f[2]] - v_[f[0]]);
    return n * (1.0 / norm(n));
  }

 private:
  static std::uint64_t key(int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
  }

  void build_adjacency() {
    const std::size_t nv = v_.size();
    nbr_.assign(nv, {});
    vf_.assign(nv, {});
    boundary_vertex_.assign(nv, false);
    std::map<std::pair<int, int>, int> edge_faces;
    half_.reserve(3 * f_.size());
    orientable_ = true;
    for (std::size_t fi = 0; fi < f_.size(); ++fi) {
      const auto& f = f_[fi];
      for (int k = 0; k < 3; ++k) {
        const int a = f[k];
        const int b = f[(k + 1) % 3];
        vf_[a].push_back(static_cast<int>(fi));
        if (!half_.emplace(key(a, b), static_cast<int>(fi)).second) orientable_ = false;
        const auto e = std::minmax(a, b);
        if (++edge_faces[{e.first, e.second}] > 2) {
          throw TopologyError("non-manifold edge (" + std::to_string(e.first) + ", " + std::to_string(e.second) +
                              ") has more than two faces");
        }
      }
    }
    num_edges_ = edge_faces.size();
    std::vector<std::pair<int, int>> boundary_edges;
    for (const auto& [e, count] : edge_faces) {
      nbr_[e.first].push_back(e.second);
      nbr_[e.second].push_back(e.first);
      if (count == 1) {
        boundary_vertex_[e.first] = boundary_vertex_[e.second] = true;
        boundary_edges.push_back(e);
      }
    }
    // boundary loops and components by union-find
    std::vector<int> parent(nv);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
    for (const auto& [a, b] : boundary_edges) unite(a, b);
    std::vector<bool> seen(nv, false);
    boundary_loops_ = 0;
    for (const auto& [a, b] : boundary_edges) {
      const int r = find(a);
      if (!seen[r]) {
        seen[r] = true;
        ++boundary_loops_;
      }
    }
    std::iota(parent.begin(), parent.end(), 0);
    for (const auto& f : f_) {
      unite(f[0], f[1]);
      unite(f[1], f[2]);
    }
    std::fill(seen.begin(), seen.end(), false);
    components_ = 0;
    for (std::size_t v = 0; v < nv; ++v) {
      if (vf_[v].empty()) continue;
      const int r = find(static_cast<int>(v));
      if (!seen[r]) {
        seen[r] = true;
        ++components_;
      }
    }
    const int twice_genus = 2 * components_ - euler_characteristic() - boundary_loops_;
    if (twice_genus < 0 || twice_genus % 2 != 0) {
      throw TopologyError("Euler characteristic " + std::to_string(euler_characteristic()) +
                          " inconsistent with " + std::to_string(components_) + " components and " +
                          std::to_string(boundary_loops_) + " boundary loops");
    }
    genus_ = twice_genus / 2;
  }

  std::vector<Vec3> v_;
  std::vector<Face> f_;
  std::vector<std::vector<int>> nbr_;
  std::vector<std::vector<int>> vf_;
  std::vector<bool> boundary_vertex_;
  std::unordered_map<std::uint64_t, int> half_;
  std::size_t num_edges_ = 0;
  int boundary_loops_ = 0;
  int components_ = 0;
  int genus_ = 0;
  bool orientable_ = true;
};

/// Wavefront OBJ subset: `v x y z`, `f i j k ...` (1-based, fan-triangulated,
/// `i/t/n` forms accepted), `#` comments; other records are ignored.
inline TriangleMesh parse_obj(std::string_view text) {
  std::vector<Vec3> verts;
  std::vector<Face> faces;
  std::vector<int> face_line;
  int line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string line(text.substr(start, end - start));
    start = end + 1;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream in(line);
    std::string tag;
    if (!(in >> tag)) continue;
    if (tag == "v") {
      Vec3 p;
      if (!(in >> p.x >> p.y >> p.z)) throw ConfigError("malformed vertex record", line_no, 1);
      verts.push_back(p);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      int col = static_cast<int>(line.find('f')) + 2;
      while (in >> tok) {
        col = static_cast<int>(line.find(tok, static_cast<std::size_t>(col - 1))) + 1;
        const std::string head = tok.substr(0, tok.find('/'));
        long long v = 0;
        try {
          std::size_t used = 0;
          v = std::stoll(head, &used);
          if (used != head.size()) throw std::invalid_argument(head);
        } catch (const std::exception&) {
          throw ConfigError("malformed face index '" + tok + "'", line_no, col);
        }
        if (v < 1 || v > static_cast<long long>(verts.size())) {
          throw ConfigError("face index " + std::to_string(v) + " out of range (OBJ indices are 1-based, " +
                                std::to_string(verts.size()) + " vertices defined)",
                            line_no, col);
        }
        idx.push_back(static_cast<int>(v - 1));
        col += static_cast<int>(tok.size());
      }
      if (idx.size() < 3) throw ConfigError("face needs at least three vertices", line_no, 1);
      for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
        faces.push_back({idx[0], idx[k], idx[k + 1]});
        face_line.push_back(line_no);
      }
    }
  }
  try {
    return TriangleMesh::build(std::move(verts), std::move(faces));
  } catch (const TopologyError& e) {
    // point at the first face mentioned in the message when possible
    const std::string msg = e.what();
    const auto pos = msg.find("face ");
    if (pos != std::string::npos) {
      const auto fi = static_cast<std::size_t>(std::atoll(msg.c_str() + pos + 5));
      if (fi < face_line.size()) throw TopologyError(msg, face_line[fi], 1);
    }
    throw;
  }
}

/// [-1, 1]^2 in the z = 0 plane, n x n cells, diagonals mirrored about both
/// axes ("union jack") so the mesh is symmetric about the origin. n even.
inline TriangleMesh flat_grid_mesh(int n) {
  if (n < 2 || n % 2 != 0) throw DomainError("flat_grid_mesh: n must be even and >= 2");
  std::vector<Vec3> v;
  std::vector<Face> f;
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) v.push_back({-1.0 + 2.0 * i / n, -1.0 + 2.0 * j / n, 0.0});
  }
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const bool flip = (i < n / 2) == (j < n / 2);
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if (flip) {
        f.push_back({a, b, c});
        f.push_back({a, c, d});
      } else {
        f.push_back({a, b, d});
        f.push_back({b, c, d});
      }
    }
  }
  return TriangleMesh::build(std::move(v), std::move(f));
}

/// Index of the vertex nearest to p.
inline int nearest_vertex(const TriangleMesh& m, const Vec3& p) {
  int best = 0;
  double bd = INFINITY;
  for (int i = 0; i < static_cast<int>(m.num_vertices()); ++i) {
    const double d = norm(m.vertex(i) - p);
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  return best;
}

inline TriangleMesh tetrahedron_mesh() {
  std::vector<Vec3> v{{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
  std::vector<Face> f{{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
  return TriangleMesh::build(std::move(v), std::move(f));
}

/// Unit sphere from a subdivided icosahedron.
inline TriangleMesh icosphere_mesh(int subdivisions) {
  if (subdivisions < 0 || subdivisions > 8) throw DomainError("icosphere_mesh: subdivisions in [0, 8]");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v{{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  std::vector<Face> f{{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                      {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (auto& p : v) p = p * (1.0 / norm(p));
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto k = std::minmax(a, b);
      const auto it = mid.find({k.first, k.second});
      if (it != mid.end()) return it->second;
      Vec3 p = (v[a] + v[b]) * 0.5;
      p = p * (1.0 / norm(p));
      v.push_back(p);
      const int id = static_cast<int>(v.size()) - 1;
      mid[{k.first, k.second}] = id;
      return id;
    };
    std::vector<Face> next;
    for (const auto& tri : f) {
      const int a = midpoint(tri[0], tri[1]);
      const int b = midpoint(tri[1], tri[2]);
      const int c = midpoint(tri[2], tri[0]);
      next.push_back({tri[0], a, c});
      next.push_back({tri[1], b, a});
      next.push_back({tri[2], c, b});
      next.push_back({a, b, c});
    }
    f = std::move(next);
  }
  return TriangleMesh::build(std::move(v), std::move(f));
}

struct CatenoidMesh {
  TriangleMesh mesh;
  std::vector<int> neck;  // vertices on the waist circle
  int rows = 0;           // meridian segments
  int segments = 0;       // angular segments
};

/// Catenoid (c cosh(t/c) cos th, c cosh(t/c) sin th, t) sampled uniformly in
/// meridian arclength s = c sinh(t/c) over [-extent, extent] with `resolution`
/// angular segments. The row count is even so the waist is a vertex row, and
/// the diagonals are mirrored across it.
inline CatenoidMesh generate_catenoid_mesh(double c, double extent, int resolution) {
  if (resolution < 16) throw DomainError("generate_catenoid_mesh: resolution must be >= 16");
  if (!(c > 0.0) || !(extent > 0.0)) throw DomainError("generate_catenoid_mesh: need c > 0, extent > 0");
  const int n_theta = resolution;
  int half_rows = static_cast<int>(std::ceil(extent * n_theta / (kTwoPi * c)));
  half_rows = std::max(half_rows, 2);
  const int rows = 2 * half_rows;
  CatenoidMesh out;
  out.rows = rows;
  out.segments = n_theta;
  std::vector<Vec3> v;
  for (int j = 0; j <= rows; ++j) {
    const double s = extent * (static_cast<double>(j - half_rows) / half_rows);
    const double t = c * std::asinh(s / c);
    const double rho = std::sqrt(c * c + s * s);
    for (int i = 0; i < n_theta; ++i) {
      const double th = kTwoPi * i / n_theta;
      v.push_back({rho * std::cos(th), rho * std::sin(th), t});
      if (j == half_rows) out.neck.push_back(static_cast<int>(v.size()) - 1);
    }
  }
  std::vector<Face> f;
  auto id = [n_theta](int i, int j) { return j * n_theta + (i % n_theta); };
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < n_theta; ++i) {
      const int a = id(i, j), b = id(i + 1, j), cc = id(i + 1, j + 1), d = id(i, j + 1);
      if (j < half_rows) {
        f.push_back({a, b, d});
        f.push_back({b, cc, d});
      } else {
        f.push_back({a, b, cc});
        f.push_back({a, cc, d});
      }
    }
  }
  out.mesh = TriangleMesh::build(std::move(v), std::move(f));
  return out;
}

/// Two disjoint flat grids (the second shifted by 3 in x).
inline TriangleMesh two_component_mesh(int n) {
  const auto a = flat_grid_mesh(n);
  std::vector<Vec3> v = a.vertices();
  std::vector<Face> f = a.faces();
  const int off = static_cast<int>(v.size());
  for (const auto& p : a.vertices()) v.push_back({p.x + 3.0, p.y, p.z});
  for (const auto& t : a.faces()) f.push_back({t[0] + off, t[1] + off, t[2] + off});
  return TriangleMesh::build(std::move(v), std::move(f));
}

inline std::string to_obj(const TriangleMesh& m) {
  std::ostringstream out;
  for (const auto& p : m.vertices()) {
    out << "v " << format_number(p.x) << ' ' << format_number(p.y) << ' ' << format_number(p.z) << '\n';
  }
  for (const auto& f : m.faces()) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  return out.str();
}

}  // namespace minsurf

#endif  // MINSURF_MESH_HPP
