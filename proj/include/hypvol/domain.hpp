#ifndef HYPVOL_DOMAIN_HPP
#define HYPVOL_DOMAIN_HPP

// Fundamental polygons in H^2 with side pairings, vertex cycles and the
// reduction of points into the polygon.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <queue>
#include <vector>

#include "hypvol/error.hpp"
#include "hypvol/lorentz.hpp"
#include "hypvol/surface.hpp"

namespace hypvol {

/// j(word) maps side `from` onto side `to`, reversing its direction:
/// start(from) goes to end(to) and end(from) to start(to).
struct SidePairing {
  int from = 0;
  int to = 0;
  Word word;
};

/// Convex polygon, vertices counter-clockwise around the base point.
/// Side k runs from vertex k to vertex k+1. Ideal vertices are stored as
/// null vectors scaled consistently along their cycle, so pairings map
/// them onto each other as vectors, not only as directions.
class FundamentalDomain {
 public:
  struct VertexCycle {
    std::vector<int> members;
    std::vector<Word> words;  // vertex(members[i]) = j(words[i]) vertex(members[0])
    std::vector<Word> loops;  // generators of the stabilizer of vertex(members[0])
    bool ideal = false;
  };

  FundamentalDomain(Representation<2> j, std::vector<Vec<2>> vertices, std::vector<bool> ideal,
                    std::vector<SidePairing> pairings, double cusp_level = 0.0)
      : j_(std::move(j)), v_(std::move(vertices)), ideal_(std::move(ideal)), pairings_(std::move(pairings)),
        cusp_level_(cusp_level) {
    const int n = size();
    if (n < 3 || static_cast<int>(ideal_.size()) != n) throw DimensionMismatch("domain: bad vertex list");
    std::vector<int> seen(n, 0);
    for (const auto& p : pairings_) {
      if (p.from < 0 || p.from >= n || p.to < 0 || p.to >= n) throw PreconditionViolation("domain: side index out of range");
      ++seen[p.from];
      ++seen[p.to];
    }
    for (int s : seen)
      if (s != 1) throw PreconditionViolation("domain: every side must be paired exactly once");
    if (has_cusps() && !(cusp_level_ > 0.0)) throw PreconditionViolation("domain: cusped domains need a horocycle level");
    for (int k = 0; k < n; ++k) {
      Vec<2> c = v_[k].cross(v_[(k + 1) % n]);
      c(2) = -c(2);  // Lorentz normal: <c, v_k> = <c, v_{k+1}> = 0
      c /= std::sqrt(minkowski<2>(c, c));
      if (minkowski<2>(c, HPoint<2>::base().coords()) > 0.0) c = -c;
      normals_.push_back(c);  // outward: <c, x> < 0 inside
    }
    for (const auto& p : pairings_) pairing_maps_.push_back(j_(p.word));
    build_cycles();
    validate();
  }

  const Representation<2>& j() const { return j_; }
  int size() const { return static_cast<int>(v_.size()); }
  const Vec<2>& vertex(int k) const { return v_.at(((k % size()) + size()) % size()); }
  bool is_ideal(int k) const { return ideal_.at(((k % size()) + size()) % size()); }
  bool has_cusps() const {
    for (bool b : ideal_)
      if (b) return true;
    return false;
  }
  double cusp_level() const { return cusp_level_; }
  const std::vector<SidePairing>& pairings() const { return pairings_; }
  const Isometry<2>& pairing_map(int i) const { return pairing_maps_.at(i); }
  const Vec<2>& outward_normal(int side) const { return normals_.at(side); }
  const std::vector<VertexCycle>& cycles() const { return cycles_; }
  HPoint<2> center() const { return HPoint<2>::base(); }

  Eigen::Vector2d klein_vertex(int k) const {
    const Vec<2>& v = vertex(k);
    return v.head<2>() / v(2);
  }

  /// Signed distance-like violation of side k, scaled to the Klein model.
  double violation(const Vec<2>& x, int side) const { return minkowski<2>(normals_[side], x) / x(2); }

  bool contains(const HPoint<2>& x, double tol = 1e-12) const {
    for (int k = 0; k < size(); ++k)
      if (violation(x.coords(), k) > tol) return false;
    return true;
  }

  /// Interior angle at a finite vertex.
  double angle(int k) const {
    if (is_ideal(k)) return 0.0;
    const HPoint<2> p = HPoint<2>::adopt(vertex(k), 1e-9);
    Vec<2> a = vertex(k - 1) + minkowski<2>(vertex(k - 1), p.coords()) * p.coords();
    Vec<2> b = vertex(k + 1) + minkowski<2>(vertex(k + 1), p.coords()) * p.coords();
    return std::acos(std::clamp(minkowski<2>(a, b) / std::sqrt(minkowski<2>(a, a) * minkowski<2>(b, b)), -1.0, 1.0));
  }

  /// Area by Gauss-Bonnet: (N - 2) pi minus the interior angles.
  double area() const {
    double s = (size() - 2) * std::numbers::pi;
    for (int k = 0; k < size(); ++k) s -= angle(k);
    return s;
  }

  /// Index of the cycle containing vertex k and its word within the cycle.
  std::pair<int, Word> cycle_of(int k) const {
    for (int c = 0; c < static_cast<int>(cycles_.size()); ++c)
      for (std::size_t i = 0; i < cycles_[c].members.size(); ++i)
        if (cycles_[c].members[i] == k) return {c, cycles_[c].words[i]};
    throw InvariantViolation("domain: vertex without cycle");
  }

  struct Reduced {
    HPoint<2> point;
    Word word;  // x = j(word) point
  };

  /// Moves x into the polygon by repeatedly undoing the pairing across the
  /// most violated side. Each move brings the point closer to the center.
  Reduced reduce(const HPoint<2>& x, double tol = 1e-12, int max_steps = 10000) const {
    Vec<2> y = x.coords();
    Word w;
    for (int step = 0; step < max_steps; ++step) {
      int worst = -1;
      double vmax = tol;
      for (int k = 0; k < size(); ++k) {
        const double v = violation(y, k);
        if (v > vmax) {
          vmax = v;
          worst = k;
        }
      }
      if (worst < 0) return {HPoint<2>(y), w};
      for (std::size_t i = 0; i < pairings_.size(); ++i) {
        const auto& p = pairings_[i];
        if (p.to == worst) {
          // x lies in j(w) D across side `to`
          y = pairing_maps_[i].inverse().apply(y);
          w = w * p.word;
          break;
        }
        if (p.from == worst) {
          y = pairing_maps_[i].apply(y);
          w = w * p.word.inverse();
          break;
        }
      }
      y /= std::sqrt(-minkowski<2>(y, y));
    }
    throw ConvergenceFailure("domain: point reduction did not terminate");
  }

  /// Endpoint matching of the pairings and the angle sums of finite cycles.
  void validate(double tol = 1e-9) const {
    for (std::size_t i = 0; i < pairings_.size(); ++i) {
      const auto& p = pairings_[i];
      const Mat<2>& g = pairing_maps_[i].matrix();
      const Vec<2> s = g * vertex(p.from), e = g * vertex(p.from + 1);
      const double scale = std::max(1.0, vertex(p.to + 1).norm());
      if ((s - vertex(p.to + 1)).norm() > tol * scale || (e - vertex(p.to)).norm() > tol * scale)
        throw InvariantViolation("domain: side pairing does not match side endpoints");
    }
    for (const auto& c : cycles_) {
      if (c.ideal) continue;
      double sum = 0.0;
      for (int k : c.members) sum += angle(k);
      if (std::abs(sum - 2.0 * std::numbers::pi) > 1e-8)
        throw InvariantViolation("domain: vertex cycle angle sum is not 2 pi");
    }
  }

 private:
  // Vertex identifications induced by the pairings, spanning trees per cycle.
  void build_cycles() {
    const int n = size();
    struct Edge {
      int from, to;
      Word w;  // vertex(to) = j(w) vertex(from)
    };
    std::vector<Edge> edges;
    for (const auto& p : pairings_) {
      edges.push_back({p.from, (p.to + 1) % n, p.word});
      edges.push_back({(p.from + 1) % n, p.to, p.word});
    }
    std::vector<int> cyc(n, -1);
    std::vector<Word> word(n);
    for (int start = 0; start < n; ++start) {
      if (cyc[start] >= 0) continue;
      VertexCycle c;
      c.ideal = ideal_[start];
      const int id = static_cast<int>(cycles_.size());
      std::queue<int> q;
      q.push(start);
      cyc[start] = id;
      std::vector<bool> tree(edges.size(), false);
      while (!q.empty()) {
        const int u = q.front();
        q.pop();
        c.members.push_back(u);
        c.words.push_back(word[u]);
        for (std::size_t e = 0; e < edges.size(); ++e) {
          const Edge& ed = edges[e];
          int v = -1;
          Word wv;
          if (ed.from == u) {
            v = ed.to;
            wv = ed.w * word[u];
          } else if (ed.to == u) {
            v = ed.from;
            wv = ed.w.inverse() * word[u];
          }
          if (v < 0 || cyc[v] >= 0) continue;
          cyc[v] = id;
          word[v] = wv;
          tree[e] = true;
          q.push(v);
        }
      }
      // every non-tree edge closes a loop fixing vertex(start)
      for (std::size_t e = 0; e < edges.size(); ++e) {
        const Edge& ed = edges[e];
        if (tree[e] || cyc[ed.from] != id) continue;
        const Word loop = word[ed.to].inverse() * ed.w * word[ed.from];
        if (!loop.empty()) c.loops.push_back(loop);
      }
      cycles_.push_back(std::move(c));
    }
  }

  Representation<2> j_;
  std::vector<Vec<2>> v_;
  std::vector<bool> ideal_;
  std::vector<SidePairing> pairings_;
  double cusp_level_ = 0.0;
  std::vector<Vec<2>> normals_;
  std::vector<Isometry<2>> pairing_maps_;
  std::vector<VertexCycle> cycles_;
};

/// A Fuchsian representation together with a fundamental polygon for it.
struct Surface {
  Representation<2> j;
  FundamentalDomain domain;
};

/// Regular 4g-gon surface with its holonomy from fuchsian_closed.
inline Surface closed_surface(int genus) {
  Representation<2> j = fuchsian_closed(genus);
  const auto poly = detail::regular_polygon(genus);
  const int n = 4 * genus;
  std::vector<SidePairing> pairings;
  for (int i = 0; i < genus; ++i) {
    pairings.push_back({4 * i + 2, 4 * i, Word::generator(2 * i)});
    pairings.push_back({4 * i + 1, 4 * i + 3, Word::generator(2 * i + 1)});
  }
  FundamentalDomain d(j, poly.vertices, std::vector<bool>(n, false), std::move(pairings));
  return {std::move(j), std::move(d)};
}

/// Default horocycle level of the punctured torus cusp: the horocycle
/// meets the diagonal toward each ideal vertex at distance 2 from the center.
inline constexpr double kDefaultCuspLevel = 0.1353352832366127;  // e^{-2}

/// Regular ideal quadrilateral for fuchsian_punctured_torus: a maps side 0
/// onto side 2 and b maps side 1 onto side 3.
inline Surface punctured_torus_surface(double cusp_level = kDefaultCuspLevel) {
  Representation<2> j = fuchsian_punctured_torus();
  const Mat<2> a = j.image(0).matrix();
  const Mat<2> bi = j.image(1).inverse().matrix();
  std::vector<Vec<2>> v(4);
  v[0] = Vec<2>(1.0, 0.0, 1.0);
  v[3] = a * v[0];
  v[1] = bi * v[0];
  v[2] = a * v[1];
  std::vector<SidePairing> pairings{{0, 2, Word::generator(0)}, {1, 3, Word::generator(1)}};
  FundamentalDomain d(j, std::move(v), std::vector<bool>(4, true), std::move(pairings), cusp_level);
  return {std::move(j), std::move(d)};
}

/// The built-in surfaces: closed genus g >= 2 and the once-punctured torus.
inline Surface standard_surface(int genus, int punctures) {
  if (punctures == 0) return closed_surface(genus);
  if (genus == 1 && punctures == 1) return punctured_torus_surface();
  throw PreconditionViolation("no built-in domain for genus " + std::to_string(genus) + " with " +
                              std::to_string(punctures) + " punctures");
}

}  // namespace hypvol

#endif  // HYPVOL_DOMAIN_HPP
