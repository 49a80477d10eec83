#ifndef HYPVOL_MESH_HPP
#define HYPVOL_MESH_HPP

// Geodesic triangulations of a fundamental polygon with the boundary
// identifications induced by its side pairings.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <queue>
#include <vector>

#include "hypvol/domain.hpp"
#include "hypvol/error.hpp"
#include "hypvol/lorentz.hpp"

namespace hypvol {

/// points[to] = j(word) points[from], for a vertex on a paired side.
struct Identification {
  int from = 0;
  int to = 0;
  Word word;
};

/// Triangulated fundamental domain. Finite vertices lie on the hyperboloid;
/// cusp vertices are the domain's null vectors. Each vertex knows the
/// lowest-index vertex of its orbit and the word relating them.
struct Mesh {
  std::vector<Vec<2>> points;
  std::vector<bool> ideal;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Identification> identifications;
  std::vector<int> rep;
  std::vector<Word> word;   // points[v] = j(word[v]) points[rep[v]]
  std::vector<int> cusp;    // ideal domain vertex whose closed horoball holds v, or -1
  std::vector<bool> boundary;
  int refine = 0;
  double h = 0.0;           // longest finite edge

  // derived: inverse of [p_a p_b p_c] per triangle, Klein bucket grid
  std::vector<Mat<2>> inverse_corners;
  int grid_size = 0;
  std::vector<std::vector<int>> grid;

  int vertex_count() const { return static_cast<int>(points.size()); }
  int triangle_count() const { return static_cast<int>(triangles.size()); }
  bool is_free(int v) const { return cusp[v] < 0; }
  bool triangle_is_ideal(int t) const {
    for (int v : triangles[t])
      if (ideal[v]) return true;
    return false;
  }
  Eigen::Vector2d klein(int v) const { return points[v].head<2>() / points[v](2); }

  int grid_cell(const Eigen::Vector2d& k) const {
    auto idx = [&](double c) { return std::clamp(static_cast<int>((c + 1.0) * 0.5 * grid_size), 0, grid_size - 1); };
    return idx(k(1)) * grid_size + idx(k(0));
  }

  /// Barycentric coordinates in the Klein model of point x (hyperboloid
  /// coordinates) with respect to triangle t.
  Eigen::Vector3d klein_barycentric(int t, const Vec<2>& x) const {
    const Vec<2> mu = inverse_corners[t] * x;
    Eigen::Vector3d l;
    for (int i = 0; i < 3; ++i) l(i) = mu(i) * points[triangles[t][i]](2);
    return l / l.sum();
  }
};

/// Orbit representatives, in ascending order.
inline std::vector<int> orbit_representatives(const Mesh& m) {
  std::vector<int> out;
  for (int v = 0; v < m.vertex_count(); ++v)
    if (m.rep[v] == v) out.push_back(v);
  return out;
}

namespace detail {

// Aspect ratio from hyperbolic edge lengths: longest edge over the
// height of a Euclidean triangle with the same side lengths.
inline double aspect_ratio(double a, double b, double c) {
  const double s = 0.5 * (a + b + c);
  const double area = std::sqrt(std::max(0.0, s * (s - a) * (s - b) * (s - c)));
  const double l = std::max({a, b, c});
  if (area <= 0.0) return std::numeric_limits<double>::infinity();
  return l * l / (2.0 * area);
}

// Point on the geodesic from p toward the ideal point q where the horocycle
// -<x, q> = c crosses it.
inline Vec<2> horocycle_cut(const Vec<2>& q, const Vec<2>& p, double c) {
  const double m = -minkowski<2>(p, q);
  const double beta = c / m;
  const double alpha = (1.0 + beta * beta * minkowski<2>(p, p)) / (2.0 * beta * m);
  return alpha * q + beta * p;
}

}  // namespace detail

inline constexpr double kMaxAspectRatio = 50.0;

/// Fills the derived lookup data of a mesh.
inline void finalize_mesh(Mesh& m) {
  m.inverse_corners.clear();
  for (const auto& t : m.triangles) {
    Mat<2> c;
    for (int i = 0; i < 3; ++i) c.col(i) = m.points[t[i]];
    m.inverse_corners.push_back(c.inverse());
  }
  m.grid_size = std::clamp(static_cast<int>(std::sqrt(static_cast<double>(m.triangles.size()))), 4, 256);
  m.grid.assign(m.grid_size * m.grid_size, {});
  for (int t = 0; t < m.triangle_count(); ++t) {
    Eigen::Vector2d lo(1e9, 1e9), hi(-1e9, -1e9);
    for (int v : m.triangles[t]) {
      lo = lo.cwiseMin(m.klein(v));
      hi = hi.cwiseMax(m.klein(v));
    }
    const int c0 = m.grid_cell(lo), c1 = m.grid_cell(hi);
    for (int y = c0 / m.grid_size; y <= c1 / m.grid_size; ++y)
      for (int x = c0 % m.grid_size; x <= c1 % m.grid_size; ++x) m.grid[y * m.grid_size + x].push_back(t);
  }
}

/// Fan triangulation from the center, refined `refine` times by splitting
/// every triangle at its hyperbolic edge midpoints. On cusped domains the
/// fan covers the polygon truncated along horocycle chords; each cusp adds
/// one unrefined ideal triangle.
inline Mesh build_mesh(const FundamentalDomain& d, int refine) {
  if (refine < 0 || refine > 8) throw PreconditionViolation("mesh: need 0 <= refine <= 8");
  Mesh m;
  m.refine = refine;
  auto add = [&](const Vec<2>& p, bool ideal) {
    m.points.push_back(p);
    m.ideal.push_back(ideal);
    return static_cast<int>(m.points.size()) - 1;
  };
  const int center = add(d.center().coords(), false);
  std::vector<int> ring;
  struct CuspCell {
    int a, v, b;
  };
  std::vector<CuspCell> cusp_cells;
  for (int k = 0; k < d.size(); ++k) {
    if (!d.is_ideal(k)) {
      ring.push_back(add(d.vertex(k), false));
      continue;
    }
    const double c = d.cusp_level();
    const int a = add(detail::horocycle_cut(d.vertex(k), d.vertex(k - 1), c), false);
    const int b = add(detail::horocycle_cut(d.vertex(k), d.vertex(k + 1), c), false);
    ring.push_back(a);
    ring.push_back(b);
    cusp_cells.push_back({a, -1, b});
    cusp_cells.back().v = k;
  }
  const int nr = static_cast<int>(ring.size());
  for (int i = 0; i < nr; ++i) m.triangles.push_back({center, ring[i], ring[(i + 1) % nr]});

  for (int level = 0; level < refine; ++level) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      const Vec<2> s = m.points[a] + m.points[b];
      const int id = add(s / std::sqrt(-minkowski<2>(s, s)), false);
      mid.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    for (const auto& t : m.triangles) {
      const int ab = midpoint(t[0], t[1]), bc = midpoint(t[1], t[2]), ca = midpoint(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({ab, t[1], bc});
      next.push_back({ca, bc, t[2]});
      next.push_back({ab, bc, ca});
    }
    m.triangles = std::move(next);
  }
  for (auto& cell : cusp_cells) {
    const int v = add(d.vertex(cell.v), true);
    m.triangles.push_back({cell.a, v, cell.b});
  }

  // quality and orientation
  for (const auto& t : m.triangles) {
    Mat<2> pts;
    for (int i = 0; i < 3; ++i) pts.col(i) = m.points[t[i]];
    if (!(pts.determinant() > 0.0)) throw InvariantViolation("mesh: triangle is not positively oriented");
    bool finite = true;
    for (int v : t) finite = finite && !m.ideal[v];
    if (!finite) continue;
    std::array<double, 3> len;
    for (int i = 0; i < 3; ++i)
      len[i] = dist(HPoint<2>::adopt(m.points[t[i]], 1e-9), HPoint<2>::adopt(m.points[t[(i + 1) % 3]], 1e-9));
    m.h = std::max({m.h, len[0], len[1], len[2]});
    if (detail::aspect_ratio(len[0], len[1], len[2]) > kMaxAspectRatio)
      throw InvariantViolation("mesh: degenerate triangle (aspect ratio above 50)");
  }

  // vertices on each side, matched through the pairings
  const int nv = m.vertex_count();
  m.boundary.assign(nv, false);
  std::vector<std::vector<int>> on_side(d.size());
  for (int v = 0; v < nv; ++v) {
    for (int k = 0; k < d.size(); ++k) {
      const bool endpoint = m.ideal[v] && ((m.points[v] - d.vertex(k)).norm() < 1e-12 ||
                                           (m.points[v] - d.vertex(k + 1)).norm() < 1e-12);
      if (endpoint || (!m.ideal[v] && std::abs(d.violation(m.points[v], k)) < 1e-11)) {
        on_side[k].push_back(v);
        m.boundary[v] = true;
      }
    }
  }
  for (std::size_t i = 0; i < d.pairings().size(); ++i) {
    const auto& p = d.pairings()[i];
    const Mat<2>& g = d.pairing_map(static_cast<int>(i)).matrix();
    for (int v : on_side[p.from]) {
      const Vec<2> y = g * m.points[v];
      int match = -1;
      for (int u : on_side[p.to]) {
        if (m.ideal[u] != m.ideal[v]) continue;
        if ((m.points[u] - y).norm() < 1e-9 * std::max(1.0, y.norm())) {
          match = u;
          break;
        }
      }
      if (match < 0) throw InvariantViolation("mesh: side vertices do not match under the pairing");
      m.identifications.push_back({v, match, p.word});
    }
  }

  // orbit representatives and words
  m.rep.assign(nv, -1);
  m.word.assign(nv, Word());
  std::vector<std::vector<std::pair<int, Word>>> adj(nv);
  for (const auto& id : m.identifications) {
    adj[id.from].push_back({id.to, id.word});
    adj[id.to].push_back({id.from, id.word.inverse()});
  }
  for (int s = 0; s < nv; ++s) {
    if (m.rep[s] >= 0) continue;
    m.rep[s] = s;
    std::queue<int> q;
    q.push(s);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (const auto& [v, w] : adj[u]) {
        if (m.rep[v] >= 0) continue;
        m.rep[v] = s;
        m.word[v] = w * m.word[u];
        q.push(v);
      }
    }
  }
  for (int v = 0; v < nv; ++v) {
    const Vec<2> y = d.j()(m.word[v]).matrix() * m.points[m.rep[v]];
    if ((y - m.points[v]).norm() > 1e-9 * std::max(1.0, y.norm()))
      throw InvariantViolation("mesh: orbit words do not reproduce the vertices");
  }

  // closed horoball membership
  m.cusp.assign(nv, -1);
  for (int v = 0; v < nv; ++v) {
    for (int k = 0; k < d.size(); ++k) {
      if (!d.is_ideal(k)) continue;
      if (m.ideal[v] ? (m.points[v] - d.vertex(k)).norm() < 1e-12
                     : -minkowski<2>(m.points[v], d.vertex(k)) <= d.cusp_level() * (1.0 + 1e-9)) {
        m.cusp[v] = k;
        break;
      }
    }
  }
  finalize_mesh(m);
  return m;
}

/// Smallest refinement level whose longest finite edge is at most h.
inline int refine_for_h(const FundamentalDomain& d, double h) {
  if (!(h > 0.0)) throw PreconditionViolation("mesh: need h > 0");
  for (int r = 0; r <= 7; ++r)
    if (build_mesh(d, r).h <= h) return r;
  throw PreconditionViolation("mesh: h is too small (refinement above 7)");
}

}  // namespace hypvol

#endif  // HYPVOL_MESH_HPP
