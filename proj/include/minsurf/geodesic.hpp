#ifndef MINSURF_GEODESIC_HPP
#define MINSURF_GEODESIC_HPP

// Discrete distance fields and ball profiles on triangle meshes.

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "minsurf/ball_geometry.hpp"
#include "minsurf/errors.hpp"
#include "minsurf/mesh.hpp"
#include "minsurf/numeric.hpp"

namespace minsurf {

struct DistanceField {
  std::vector<double> d;  // +inf where unreachable
  std::vector<int> seeds;
  double h = 0.0;         // max edge length
  bool unfolded = false;
  std::size_t unfolding_updates = 0;
};

namespace detail {

/// Distance at k from a virtual point source consistent with d_i, d_j,
/// unfolded into the plane of triangle (i, j, k); infinite when the straight
/// ray from the source to k misses the edge (i, j).
inline double unfold_candidate(const Vec3& pi, const Vec3& pj, const Vec3& pk, double di, double dj) {
  const Vec3 ej = pj - pi;
  const double e = norm(ej);
  const Vec3 ek = pk - pi;
  const double kx = dot(ek, ej) / e;
  const double ky = norm(cross(ej, ek)) / e;
  const double sx = (di * di - dj * dj + e * e) / (2.0 * e);
  const double sy2 = di * di - sx * sx;
  if (!(sy2 >= 0.0)) return INFINITY;
  const double sy = -std::sqrt(sy2);
  const double denom = ky - sy;
  if (!(denom > 0.0)) return INFINITY;
  const double xcross = sx + (kx - sx) * (-sy) / denom;
  if (xcross < 0.0 || xcross > e) return INFINITY;
  return std::hypot(kx - sx, ky - sy);
}

}  // namespace detail

/// Multi-source shortest paths along edges, then one pass of triangle
/// unfolding in increasing-distance order. Unreachable vertices stay infinite.
inline DistanceField geodesic_distance(const TriangleMesh& m, const std::vector<int>& seeds, bool unfold = true) {
  const auto nv = m.num_vertices();
  if (seeds.empty()) throw DomainError("geodesic_distance: need at least one seed");
  DistanceField out;
  out.seeds = seeds;
  out.h = m.max_edge_length();
  out.d.assign(nv, INFINITY);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  for (int s : seeds) {
    if (s < 0 || s >= static_cast<int>(nv)) throw DomainError("geodesic_distance: seed out of range");
    out.d[s] = 0.0;
    pq.push({0.0, s});
  }
  std::vector<int> order;
  std::vector<bool> done(nv, false);
  while (!pq.empty()) {
    const auto [dist, v] = pq.top();
    pq.pop();
    if (done[v]) continue;
    done[v] = true;
    order.push_back(v);
    for (int w : m.neighbors(v)) {
      const double nd = dist + norm(m.vertex(w) - m.vertex(v));
      if (nd < out.d[w]) {
        out.d[w] = nd;
        pq.push({nd, w});
      }
    }
  }
  if (!unfold) return out;
  out.unfolded = true;
  std::vector<bool> fixed(nv, false);
  for (int s : seeds) fixed[s] = true;
  for (int k : order) {
    if (fixed[k]) continue;
    for (int fi : m.vertex_faces(k)) {
      const auto& f = m.faces()[static_cast<std::size_t>(fi)];
      const int pos = f[0] == k ? 0 : (f[1] == k ? 1 : 2);
      const int i = f[(pos + 1) % 3];
      const int j = f[(pos + 2) % 3];
      if (!fixed[i] || !fixed[j]) continue;
      const double c = detail::unfold_candidate(m.vertex(i), m.vertex(j), m.vertex(k), out.d[i], out.d[j]);
      if (c < out.d[k]) {
        out.d[k] = c;
        ++out.unfolding_updates;
      }
    }
    fixed[k] = true;
  }
  return out;
}

inline DistanceField geodesic_distance(const TriangleMesh& m, int seed, bool unfold = true) {
  return geodesic_distance(m, std::vector<int>{seed}, unfold);
}

struct DiscreteBallProfile {
  std::vector<double> grid;
  std::vector<double> length;      // L~
  std::vector<double> area;        // A~
  std::vector<double> total_curv;  // K~, interior angle defects inside the ball
  std::vector<int> source;
  double h = 0.0;
  bool truncated = false;

  std::size_t size() const { return grid.size(); }
};

/// Level lengths, clipped sublevel areas and cumulative angle defects of the
/// piecewise-linear distance field. Radii beyond the largest finite distance
/// are dropped and flagged.
inline DiscreteBallProfile discrete_profile(const TriangleMesh& m, const DistanceField& dist,
                                            const std::vector<double>& grid) {
  DiscreteBallProfile p;
  p.source = dist.seeds;
  p.h = dist.h;
  double dmax = 0.0;
  for (double x : dist.d) {
    if (std::isfinite(x)) dmax = std::max(dmax, x);
  }
  std::vector<double> defect(m.num_vertices(), 0.0);
  for (int v = 0; v < static_cast<int>(m.num_vertices()); ++v) {
    if (!m.is_boundary_vertex(v) && std::isfinite(dist.d[v])) defect[v] = m.angle_defect(v);
  }
  const auto& F = m.faces();
  std::vector<double> face_len(F.size());
  std::vector<double> face_area(F.size());
  std::vector<double> vert_k;
  for (double r : grid) {
    if (r > dmax) {
      p.truncated = true;
      continue;
    }
    const double level = r + 1e-12;  // ties at vertices go to the sublevel set
    for (std::size_t fi = 0; fi < F.size(); ++fi) {
      const auto& f = F[fi];
      face_len[fi] = 0.0;
      face_area[fi] = 0.0;
      const double d0 = dist.d[f[0]], d1 = dist.d[f[1]], d2 = dist.d[f[2]];
      if (!std::isfinite(d0) || !std::isfinite(d1) || !std::isfinite(d2)) continue;
      const int below = (d0 < level) + (d1 < level) + (d2 < level);
      if (below == 0) continue;
      const double area = m.face_area(fi);
      if (below == 3) {
        face_area[fi] = area;
        continue;
      }
      // the lone vertex on one side of the level
      const bool lone_below = below == 1;
      int k = 0;
      for (int q = 0; q < 3; ++q) {
        if ((dist.d[f[q]] < level) == lone_below) k = q;
      }
      const int a = f[k], b = f[(k + 1) % 3], c = f[(k + 2) % 3];
      const double ta = (level - dist.d[a]) / (dist.d[b] - dist.d[a]);
      const double tb = (level - dist.d[a]) / (dist.d[c] - dist.d[a]);
      const Vec3 pa = m.vertex(a) + (m.vertex(b) - m.vertex(a)) * ta;
      const Vec3 pb = m.vertex(a) + (m.vertex(c) - m.vertex(a)) * tb;
      face_len[fi] = norm(pb - pa);
      const double corner = ta * tb * area;
      face_area[fi] = lone_below ? corner : area - corner;
    }
    vert_k.clear();
    for (std::size_t v = 0; v < m.num_vertices(); ++v) {
      if (dist.d[v] < level) vert_k.push_back(defect[v]);
    }
    p.grid.push_back(r);
    p.length.push_back(pairwise_sum(face_len));
    p.area.push_back(pairwise_sum(face_area));
    p.total_curv.push_back(pairwise_sum(vert_k));
  }
  return p;
}

struct DiscreteFialaResult {
  double max_violation = 0.0;  // max of lhs - rhs over windows (<= tol passes)
  double worst_r = 0.0;
  double tolerance = 0.0;      // C_h h
  double C_h = 0.0;
  int chi_max = 1;
  Status status = Status::Inapplicable;
  std::vector<double> margins;  // rhs + tol - lhs per window
};

/// (L~(r_{i+3}) - L~(r_i)) / (r_{i+3} - r_i) <= 2 pi chi_max - min K~ on the window + C_h h.
inline DiscreteFialaResult fiala_discrete_check(const DiscreteBallProfile& p, int chi_max, double C_h = 4.0) {
  DiscreteFialaResult out;
  out.chi_max = chi_max;
  out.C_h = C_h;
  out.tolerance = C_h * p.h;
  constexpr std::size_t w = 3;
  if (p.size() <= w) return out;
  out.max_violation = -INFINITY;
  for (std::size_t i = 0; i + w < p.size(); ++i) {
    const double slope = (p.length[i + w] - p.length[i]) / (p.grid[i + w] - p.grid[i]);
    double kmin = p.total_curv[i];
    for (std::size_t j = i; j <= i + w; ++j) kmin = std::min(kmin, p.total_curv[j]);
    const double rhs = kTwoPi * chi_max - kmin;
    out.margins.push_back(rhs + out.tolerance - slope);
    if (slope - rhs > out.max_violation) {
      out.max_violation = slope - rhs;
      out.worst_r = 0.5 * (p.grid[i] + p.grid[i + w]);
    }
  }
  out.status = out.max_violation <= out.tolerance ? Status::Pass : Status::Fail;
  return out;
}

struct CrossValidationRow {
  double r, L_discrete, L_analytic, L_rel, A_discrete, A_analytic, A_rel;
};

struct CrossValidation {
  std::vector<CrossValidationRow> rows;
  double max_L_rel = 0.0;
  double max_A_rel = 0.0;
};

/// Relative errors of L~, A~ against multiplicity * (2 pi f, 2 pi int f) of
/// the analytic profile's surface, restricted to r in [r_lo, r_hi].
inline CrossValidation cross_validate(const DiscreteBallProfile& dp, const BallProfile& analytic, double multiplicity = 1.0,
                                      double r_lo = 0.0, double r_hi = INFINITY) {
  CrossValidation out;
  const auto& s = analytic.surface;
  double area = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < dp.size(); ++i) {
    const double r = dp.grid[i];
    area += kTwoPi * integrate(s.warp, prev, r).value;
    prev = r;
    if (r < r_lo || r > r_hi || r > s.r_max) continue;
    CrossValidationRow row{};
    row.r = r;
    row.L_discrete = dp.length[i];
    row.L_analytic = multiplicity * kTwoPi * s.warp(r);
    row.L_rel = std::abs(row.L_discrete - row.L_analytic) / row.L_analytic;
    row.A_discrete = dp.area[i];
    row.A_analytic = multiplicity * area;
    row.A_rel = row.A_analytic > 0.0 ? std::abs(row.A_discrete - row.A_analytic) / row.A_analytic : 0.0;
    out.max_L_rel = std::max(out.max_L_rel, row.L_rel);
    out.max_A_rel = std::max(out.max_A_rel, row.A_rel);
    out.rows.push_back(row);
  }
  return out;
}

struct SelfConvergence {
  std::vector<double> h;
  std::vector<double> diffs;   // max |d_k - d_{k+1}| on the vertices of level k
  std::vector<double> ratios;  // diffs[k] / diffs[k+1]
};

/// Distance-field self-convergence on nested meshes: vertex i of level k must
/// be vertex i of level k+1 (midpoint subdivision keeps old indices first).
inline SelfConvergence self_convergence(const std::vector<TriangleMesh>& levels, int seed) {
  if (levels.size() < 3) throw DomainError("self_convergence: need at least three levels");
  std::vector<DistanceField> d;
  for (const auto& m : levels) d.push_back(geodesic_distance(m, seed));
  SelfConvergence out;
  for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
    const auto nv = levels[k].num_vertices();
    if (levels[k + 1].num_vertices() < nv) throw DomainError("self_convergence: levels are not nested");
    double e = 0.0;
    for (std::size_t v = 0; v < nv; ++v) {
      const Vec3 gap = levels[k].vertex(static_cast<int>(v)) - levels[k + 1].vertex(static_cast<int>(v));
      if (norm(gap) > 1e-12) throw DomainError("self_convergence: levels are not nested");
      if (std::isfinite(d[k].d[v])) e = std::max(e, std::abs(d[k].d[v] - d[k + 1].d[v]));
    }
    out.h.push_back(d[k].h);
    out.diffs.push_back(e);
  }
  for (std::size_t k = 0; k + 1 < out.diffs.size(); ++k) out.ratios.push_back(out.diffs[k] / out.diffs[k + 1]);
  return out;
}

/// r,L,A,K_cum
inline std::string to_csv(const DiscreteBallProfile& p) {
  std::ostringstream out;
  out << "r,L,A,K_cum\n";
  for (std::size_t i = 0; i < p.size(); ++i) {
    out << format_number(p.grid[i]) << ',' << format_number(p.length[i]) << ',' << format_number(p.area[i]) << ','
        << format_number(p.total_curv[i]) << '\n';
  }
  return out.str();
}

inline nlohmann::ordered_json to_json(const DiscreteFialaResult& r) {
  nlohmann::ordered_json j;
  j["chi_max"] = r.chi_max;
  j["max_violation"] = r.max_violation;
  j["worst_r"] = r.worst_r;
  j["C_h"] = r.C_h;
  j["tolerance"] = r.tolerance;
  j["status"] = to_string(r.status);
  return j;
}

}  // namespace minsurf

#endif  // MINSURF_GEODESIC_HPP
