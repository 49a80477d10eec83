#ifndef HYPVOL_EQUIVARIANT_MAP_HPP
#define HYPVOL_EQUIVARIANT_MAP_HPP

// Piecewise (j, rho)-equivariant maps H^2 -> H^2 given by vertex images on a
// triangulated fundamental domain.
//
// Extension rule: a point x = sum mu_i p_i (hyperboloid coordinates of the
// triangle corners, mu_i >= 0) goes to the normalization of sum mu_i y_i.
// In Klein coordinates this is affine interpolation with weights rescaled by
// the time coordinates; in hyperboloid coordinates it is the linear map
// Y P^{-1} followed by projection, so it commutes with every isometry and
// glues continuously across the side pairings.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>
#include <string>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <vector>

#include "hypvol/domain.hpp"
#include "hypvol/error.hpp"
#include "hypvol/lorentz.hpp"
#include "hypvol/mesh.hpp"
#include "hypvol/surface.hpp"

namespace hypvol {

class EquivariantMap {
 public:
  /// images: one point per mesh vertex; only orbit representatives are read,
  /// the others are filled in by equivariance.
  EquivariantMap(std::shared_ptr<const FundamentalDomain> domain, std::shared_ptr<const Mesh> mesh,
                 Representation<2> rho, const std::vector<Vec<2>>& images, bool pinned = false)
      : domain_(std::move(domain)), mesh_(std::move(mesh)), rho_(std::move(rho)), pinned_(pinned) {
    if (rho_.presentation() != domain_->j().presentation())
      throw DimensionMismatch("map: j and rho have different presentations");
    if (static_cast<int>(images.size()) != mesh_->vertex_count())
      throw DimensionMismatch("map: need one image per mesh vertex");
    rho_word_.resize(mesh_->vertex_count());
    for (int v = 0; v < mesh_->vertex_count(); ++v) rho_word_[v] = rho_(mesh_->word[v]).matrix();
    set_images(images);
  }

  const FundamentalDomain& domain() const { return *domain_; }
  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const FundamentalDomain> domain_ptr() const { return domain_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  const Representation<2>& j() const { return domain_->j(); }
  const Representation<2>& rho() const { return rho_; }
  const std::vector<Vec<2>>& images() const { return images_; }
  const Vec<2>& image(int v) const { return images_.at(v); }
  /// Cusp neighborhoods are mapped to points fixed by the cusp groups.
  bool pinned() const { return pinned_ || !domain_->has_cusps(); }

  /// max |y_to - rho(word) y_from| over the boundary identifications.
  double equivariance_residual() const {
    double r = 0.0;
    for (const auto& id : mesh_->identifications) {
      const Vec<2> y = rho_(id.word).matrix() * images_[id.from];
      r = std::max(r, (y - images_[id.to]).norm() / std::max(1.0, y.norm()));
    }
    return r;
  }

  struct Sample {
    HPoint<2> value;
    Mat<2> linear;     // ambient linear map L with f = L x / |L x| near x
    double scale = 1;  // |L x|
    int triangle = -1;
    Word word;         // x = j(word) x', x' in the domain
    double min_barycentric = 0.0;
  };

  /// Locates x, reduced into the domain, in the lowest-index triangle
  /// containing it. min_barycentric near 0 flags a point on a triangle edge,
  /// where the differential jumps.
  Sample sample(const HPoint<2>& x) const {
    const auto red = domain_->reduce(x);
    const Vec<2>& xp = red.point.coords();
    const Mesh& m = *mesh_;
    const Eigen::Vector2d k = xp.head<2>() / xp(2);
    // lowest containing triangle, else the least violated one
    int best = -1;
    double best_min = -1e300;
    auto scan = [&](const std::vector<int>& cands) {
      for (int t : cands) {
        const double lmin = m.klein_barycentric(t, xp).minCoeff();
        const bool inside = lmin >= -1e-12, best_inside = best_min >= -1e-12;
        if ((inside && (!best_inside || t < best)) || (!inside && !best_inside && lmin > best_min)) {
          best = t;
          best_min = lmin;
        }
      }
    };
    scan(m.grid[m.grid_cell(k)]);
    if (best_min < -1e-12) {
      std::vector<int> all(m.triangle_count());
      for (int t = 0; t < m.triangle_count(); ++t) all[t] = t;
      scan(all);
    }
    if (best < 0 || best_min < -1e-7) throw InvariantViolation("map: point is not covered by the mesh");
    Sample s;
    s.triangle = best;
    s.min_barycentric = best_min;
    s.word = red.word;
    const Mat<2> jw = domain_->j()(red.word).matrix();
    const Mat<2> rw = rho_(red.word).matrix();
    const Mat<2> jwi = LorentzForm<2>::matrix() * jw.transpose() * LorentzForm<2>::matrix();
    s.linear = rw * corner_maps_[best] * jwi;
    const Vec<2> f = rw * (corner_maps_[best] * xp);
    s.scale = std::sqrt(-minkowski<2>(f, f));
    s.value = HPoint<2>(f);
    return s;
  }

  HPoint<2> operator()(const HPoint<2>& x) const { return sample(x).value; }

  /// df_x in the frames at x and f(x).
  Eigen::Matrix2d differential(const HPoint<2>& x) const { return differential(x, sample(x)); }

  Eigen::Matrix2d differential(const HPoint<2>& x, const Sample& s) const {
    const Frame<2> ex = frame(x), ey = frame(s.value);
    return ey.transpose() * LorentzForm<2>::matrix() * s.linear * ex / s.scale;
  }

  /// Linear map Y P^{-1} of triangle t.
  const Mat<2>& corner_map(int t) const { return corner_maps_.at(t); }

  /// Discrete Dirichlet energy: half the sum of squared image edge lengths
  /// over the finite mesh edges.
  double energy() const {
    double e = 0.0;
    for (const auto& [a, b] : edges()) {
      const double d = dist(HPoint<2>::adopt(images_[a], 1e-9), HPoint<2>::adopt(images_[b], 1e-9));
      e += 0.5 * d * d;
    }
    return e;
  }

  /// Unique finite mesh edges (a < b).
  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    for (const auto& t : mesh_->triangles)
      for (int i = 0; i < 3; ++i) {
        const int a = t[i], b = t[(i + 1) % 3];
        if (mesh_->ideal[a] || mesh_->ideal[b]) continue;
        out.emplace_back(std::min(a, b), std::max(a, b));
      }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// Replaces the images of the orbit representatives and re-derives the rest.
  void set_images(const std::vector<Vec<2>>& images) {
    const Mesh& m = *mesh_;
    images_.assign(m.vertex_count(), Vec<2>::Zero());
    for (int v = 0; v < m.vertex_count(); ++v) {
      const int r = m.rep[v];
      const Vec<2> y = v == r ? images[r] : Vec<2>(rho_word_[v] * images[r]);
      // representatives already on the sheet are kept bit for bit
      const double off = std::abs(minkowski<2>(y, y) + 1.0);
      images_[v] = v == r && off < 1e-12 * std::max(1.0, y(2) * y(2)) && y(2) > 0.0 ? y : HPoint<2>(y).coords();
    }
    corner_maps_.clear();
    for (int t = 0; t < m.triangle_count(); ++t) {
      Mat<2> y;
      for (int i = 0; i < 3; ++i) y.col(i) = images_[m.triangles[t][i]];
      corner_maps_.push_back(y * m.inverse_corners[t]);
    }
  }

  void set_pinned(bool p) { pinned_ = p; }

 private:
  std::shared_ptr<const FundamentalDomain> domain_;
  std::shared_ptr<const Mesh> mesh_;
  Representation<2> rho_;
  bool pinned_ = false;
  std::vector<Mat<2>> rho_word_;
  std::vector<Vec<2>> images_;
  std::vector<Mat<2>> corner_maps_;
};

/// The constant map to a point fixed by all of rho.
inline EquivariantMap constant_map(std::shared_ptr<const FundamentalDomain> d, std::shared_ptr<const Mesh> m,
                                   const Representation<2>& rho, const HPoint<2>& fixed_point) {
  for (const auto& g : rho.images())
    if (dist(g(fixed_point), fixed_point) > 1e-9)
      throw PreconditionViolation("constant_map: rho does not fix the point");
  const std::vector<Vec<2>> imgs(m->vertex_count(), fixed_point.coords());
  return EquivariantMap(std::move(d), std::move(m), rho, imgs, true);
}

/// The identity map of a closed surface (rho = j).
inline EquivariantMap identity_map(std::shared_ptr<const FundamentalDomain> d, std::shared_ptr<const Mesh> m) {
  if (d->has_cusps()) throw PreconditionViolation("identity_map: cusped domains have ideal vertices");
  const Representation<2> j = d->j();
  const std::vector<Vec<2>> imgs = m->points;
  return EquivariantMap(std::move(d), std::move(m), j, imgs);
}

/// Free representative images drawn uniformly in direction and radius
/// from the ball of the given radius about center; cusp vertices go to center.
inline EquivariantMap random_map(std::shared_ptr<const FundamentalDomain> d, std::shared_ptr<const Mesh> m,
                                 const Representation<2>& rho, const HPoint<2>& center, double radius,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vec<2>> imgs(m->vertex_count(), center.coords());
  const Frame<2> e = frame(center);
  for (int v : orbit_representatives(*m)) {
    if (!m->is_free(v)) continue;
    const double r = radius * u(rng), t = 2.0 * std::numbers::pi * u(rng);
    imgs[v] = exp_map(center, Vec<2>(r * (std::cos(t) * e.col(0) + std::sin(t) * e.col(1)))).coords();
  }
  return EquivariantMap(std::move(d), std::move(m), rho, imgs);
}

/// Sends every vertex in a closed cusp horoball to rho(w) y, where y is
/// the point assigned to the cusp cycle and w carries the cycle's first
/// vertex to the horoball's vertex. Each assigned point must be fixed by
/// rho of the cusp stabilizer (elliptic or trivial type).
inline EquivariantMap pin_cusps(const EquivariantMap& f, const std::vector<HPoint<2>>& assignments) {
  const auto& d = f.domain();
  std::vector<int> ideal_cycles;
  for (int c = 0; c < static_cast<int>(d.cycles().size()); ++c)
    if (d.cycles()[c].ideal) ideal_cycles.push_back(c);
  if (assignments.size() != ideal_cycles.size())
    throw DimensionMismatch("pin_cusps: need one point per cusp");
  for (std::size_t i = 0; i < ideal_cycles.size(); ++i)
    for (const Word& loop : d.cycles()[ideal_cycles[i]].loops)
      if (dist(f.rho()(loop)(assignments[i]), assignments[i]) > 1e-9)
        throw PreconditionViolation(
            "pin_cusps: the cusp group image does not fix the assigned point (parabolic-type cusps are not supported)");
  const Mesh& m = f.mesh();
  std::vector<Vec<2>> imgs = f.images();
  for (int v = 0; v < m.vertex_count(); ++v) {
    if (m.cusp[v] < 0) continue;
    const auto [cyc, w] = d.cycle_of(m.cusp[v]);
    const auto it = std::find(ideal_cycles.begin(), ideal_cycles.end(), cyc);
    imgs[v] = f.rho()(w)(assignments[it - ideal_cycles.begin()]).coords();
  }
  EquivariantMap out(f.domain_ptr(), f.mesh_ptr(), f.rho(), imgs, true);
  if (out.equivariance_residual() > 1e-9) throw InvariantViolation("pin_cusps: equivariance lost");
  return out;
}

namespace detail {

// Neighbors of an orbit, moved next to its representative, with
// mean-value weights computed from the domain positions.
struct Star {
  int rep = 0;
  std::vector<int> vertex;    // mesh vertex supplying the neighbor image
  std::vector<Mat<2>> rho_t;  // neighbor image = rho_t * images[vertex]
  std::vector<double> weight;
};

inline std::vector<Star> build_stars(const EquivariantMap& f) {
  const Mesh& m = f.mesh();
  const auto& j = f.j();
  const auto& rho = f.rho();
  std::vector<std::vector<int>> tris_of(m.vertex_count());
  for (int t = 0; t < m.triangle_count(); ++t)
    for (int v : m.triangles[t]) tris_of[v].push_back(t);
  std::vector<std::vector<int>> copies(m.vertex_count());
  for (int v = 0; v < m.vertex_count(); ++v) copies[m.rep[v]].push_back(v);

  std::vector<Star> stars;
  for (int r : orbit_representatives(m)) {
    if (!m.is_free(r)) continue;
    Star s;
    s.rep = r;
    const HPoint<2> x = HPoint<2>::adopt(m.points[r], 1e-9);
    const Frame<2> e = frame(x);
    struct Nb {
      double angle, len;
      int vertex;
      Mat<2> rho_t;
      Vec<2> pos;
    };
    std::vector<Nb> nbs;
    for (int v : copies[r]) {
      const Word back = m.word[v].inverse();  // j(back) moves v onto r
      const Mat<2> jb = j(back).matrix(), rb = rho(back).matrix();
      for (int t : tris_of[v])
        for (int u : m.triangles[t]) {
          if (u == v) continue;
          if (m.ideal[u]) throw InvariantViolation("relax: free vertex adjacent to a cusp");
          const Vec<2> pos = jb * m.points[u];
          bool dup = false;
          for (const auto& nb : nbs) dup = dup || (nb.pos - pos).norm() < 1e-9 * std::max(1.0, pos.norm());
          if (dup) continue;
          const HPoint<2> y(pos);
          const auto c = frame_coords(x, log_map(x, y));
          nbs.push_back({std::atan2(c(1), c(0)), c.norm(), u, rb, pos});
        }
    }
    std::sort(nbs.begin(), nbs.end(), [](const Nb& a, const Nb& b) { return a.angle < b.angle; });
    const int k = static_cast<int>(nbs.size());
    if (k < 3) throw InvariantViolation("relax: vertex star is too small");
    std::vector<double> half_tan(k);
    for (int i = 0; i < k; ++i) {
      double a = nbs[(i + 1) % k].angle - nbs[i].angle;
      if (a <= 0) a += 2.0 * std::numbers::pi;
      if (a >= std::numbers::pi) throw InvariantViolation("relax: vertex star does not surround the vertex");
      half_tan[i] = std::tan(0.5 * a);
    }
    for (int i = 0; i < k; ++i) {
      s.vertex.push_back(nbs[i].vertex);
      s.rho_t.push_back(nbs[i].rho_t);
      s.weight.push_back((half_tan[(i + k - 1) % k] + half_tan[i]) / nbs[i].len);
    }
    stars.push_back(std::move(s));
  }
  return stars;
}

}  // namespace detail

/// Weighted Karcher mean by gradient iteration with step 1/2 from start.
inline HPoint<2> karcher_mean(const std::vector<HPoint<2>>& pts, const std::vector<double>& w, HPoint<2> start,
                              double tol = 1e-12, int max_iter = 2000) {
  double wsum = 0.0;
  for (double a : w) wsum += a;
  HPoint<2> x = start;
  for (int it = 0; it < max_iter; ++it) {
    Vec<2> g = Vec<2>::Zero();
    for (std::size_t i = 0; i < pts.size(); ++i) g += (w[i] / wsum) * log_map(x, pts[i]);
    const Vec<2> stepv = 0.5 * g;
    x = exp_map(x, stepv);
    if (std::sqrt(std::max(0.0, minkowski<2>(stepv, stepv))) < tol) return x;
  }
  throw ConvergenceFailure("karcher_mean: no convergence (points too spread)");
}

struct RelaxReport {
  int sweeps = 0;
  std::vector<double> energy;  // before the first sweep, then after each
  bool stalled = false;        // no non-increasing step found
};

/// Bulk-synchronous sweeps moving each free representative image a fraction
/// `step` of the way to the mean-value weighted Karcher mean of its
/// neighbors. A sweep that would raise the energy is retried with half the
/// step, so the energy never increases.
inline EquivariantMap relax(const EquivariantMap& f, int iterations, double step, RelaxReport* report = nullptr) {
  if (!(step > 0.0 && step <= 1.0)) throw PreconditionViolation("relax: need step in (0, 1]");
  if (iterations < 0) throw PreconditionViolation("relax: need iterations >= 0");
  const auto stars = detail::build_stars(f);
  EquivariantMap cur = f;
  double e_cur = cur.energy();
  RelaxReport rep;
  rep.energy.push_back(e_cur);
  for (int it = 0; it < iterations; ++it) {
    std::vector<Vec<2>> target = cur.images();
    double moved = 0.0;
    for (const auto& s : stars) {
      std::vector<HPoint<2>> pts;
      for (std::size_t i = 0; i < s.vertex.size(); ++i)
        pts.push_back(HPoint<2>(Vec<2>(s.rho_t[i] * cur.image(s.vertex[i]))));
      const HPoint<2> here = HPoint<2>::adopt(cur.image(s.rep), 1e-9);
      const HPoint<2> mean = karcher_mean(pts, s.weight, here);
      target[s.rep] = mean.coords();
      moved = std::max(moved, dist(here, mean));
    }
    if (moved == 0.0) break;
    bool accepted = false;
    for (double a = step; a > 1e-9; a *= 0.5) {
      std::vector<Vec<2>> trial = cur.images();
      for (const auto& s : stars)
        trial[s.rep] = geodesic_point(HPoint<2>::adopt(cur.image(s.rep), 1e-9), HPoint<2>(target[s.rep]), a).coords();
      EquivariantMap next = cur;
      next.set_images(trial);
      const double e_next = next.energy();
      if (e_next <= e_cur) {
        cur = std::move(next);
        e_cur = e_next;
        accepted = true;
        break;
      }
    }
    rep.sweeps = it + 1;
    if (!accepted) {
      rep.stalled = true;
      break;
    }
    rep.energy.push_back(e_cur);
  }
  if (cur.equivariance_residual() > 1e-9) throw InvariantViolation("relax: equivariance lost");
  if (report) *report = rep;
  return cur;
}

/// The map on the next finer mesh agreeing with f at the new vertices.
inline EquivariantMap refine_map(const EquivariantMap& f) {
  auto mesh = std::make_shared<const Mesh>(build_mesh(f.domain(), f.mesh().refine + 1));
  std::vector<Vec<2>> imgs(mesh->vertex_count());
  // cusp points: the old cusp cells are constant, so read them off there
  std::map<int, Vec<2>> cusp_image;
  const Mesh& old = f.mesh();
  for (int v = 0; v < old.vertex_count(); ++v)
    if (old.ideal[v]) cusp_image[old.cusp[v]] = f.image(v);
  for (int v = 0; v < mesh->vertex_count(); ++v) {
    if (mesh->ideal[v] || (mesh->cusp[v] >= 0 && f.pinned()))
      imgs[v] = cusp_image.at(mesh->cusp[v]);
    else
      imgs[v] = f(HPoint<2>::adopt(mesh->points[v], 1e-9)).coords();
  }
  return EquivariantMap(f.domain_ptr(), mesh, f.rho(), imgs, f.pinned());
}

enum class LipschitzMethod { EdgeRatio, DifferentialBound };

struct LipschitzCertificate {
  double lambda = 0.0;
  LipschitzMethod method = LipschitzMethod::EdgeRatio;
  double margin = 0.0;  // 1 - lambda
  double h = 0.0;       // mesh resolution
  bool heuristic = true;
};

/// Mesh-scale Lipschitz estimate: the largest image/domain length ratio of
/// the edges of each finite triangle subdivided into 4^refine pieces, or the
/// largest operator norm of df at the sub-triangle centroids.
inline LipschitzCertificate measure_lipschitz(const EquivariantMap& f, int refine,
                                              LipschitzMethod method = LipschitzMethod::EdgeRatio) {
  if (refine < 0 || refine > 6) throw PreconditionViolation("measure_lipschitz: need 0 <= refine <= 6");
  const Mesh& m = f.mesh();
  const int n = 1 << refine;
  double lambda = 0.0;
  for (int t = 0; t < m.triangle_count(); ++t) {
    if (m.triangle_is_ideal(t)) continue;
    const auto& tri = m.triangles[t];
    const Vec<2> pa = m.points[tri[0]], pb = m.points[tri[1]], pc = m.points[tri[2]];
    const Vec<2> ya = f.image(tri[0]), yb = f.image(tri[1]), yc = f.image(tri[2]);
    auto point = [&](double i, double j) {
      return HPoint<2>(Vec<2>((n - i - j) * pa + i * pb + j * pc));
    };
    auto img = [&](double i, double j) {
      return HPoint<2>(Vec<2>((n - i - j) * ya + i * yb + j * yc));
    };
    if (method == LipschitzMethod::EdgeRatio) {
      auto ratio = [&](double i0, double j0, double i1, double j1) {
        const double dd = dist(point(i0, j0), point(i1, j1));
        return dist(img(i0, j0), img(i1, j1)) / dd;
      };
      for (int i = 0; i < n; ++i)
        for (int j = 0; i + j < n; ++j) {
          lambda = std::max({lambda, ratio(i, j, i + 1, j), ratio(i, j, i, j + 1), ratio(i + 1, j, i, j + 1)});
        }
    } else {
      const Mat<2>& l = f.corner_map(t);
      for (int i = 0; i < n; ++i)
        for (int j = 0; i + j < n; ++j) {
          for (int flip = 0; flip < 2; ++flip) {
            if (flip && i + j + 2 > n) continue;
            const double ci = flip ? i + 2.0 / 3 : i + 1.0 / 3, cj = flip ? j + 2.0 / 3 : j + 1.0 / 3;
            const HPoint<2> x = point(ci, cj);
            const Vec<2> fx = l * x.coords();
            const double s = std::sqrt(-minkowski<2>(fx, fx));
            const HPoint<2> y(fx);
            const Eigen::Matrix2d d = frame(y).transpose() * LorentzForm<2>::matrix() * l * frame(x) / s;
            lambda = std::max(lambda, Eigen::JacobiSVD<Eigen::Matrix2d>(d).singularValues()(0));
          }
        }
    }
  }
  LipschitzCertificate c;
  c.lambda = lambda;
  c.method = method;
  c.margin = 1.0 - lambda;
  c.h = m.h / n;
  return c;
}

/// max over cyclically reduced words up to length L of l_rho(w) / l_j(w),
/// skipping words with l_j < 1e-6.
inline double length_spectrum_ratio(const Representation<2>& j, const Representation<2>& rho, int max_len) {
  if (j.presentation() != rho.presentation()) throw DimensionMismatch("length_spectrum_ratio: presentations differ");
  double best = 0.0;
  for_each_word(j.generator_count(), max_len, true, [&](const Word& w) {
    const double lj = translation_length(j(w));
    if (lj < 1e-6) return;
    best = std::max(best, translation_length(rho(w)) / lj);
  });
  return best;
}

// --- persistence --------------------------------------------------------

inline void write_mesh(std::ostream& os, const Mesh& m) {
  os << "vertices " << m.vertex_count() << '\n';
  for (int v = 0; v < m.vertex_count(); ++v)
    os << detail::fmt17(m.points[v](0)) << ' ' << detail::fmt17(m.points[v](1)) << ' '
       << detail::fmt17(m.points[v](2)) << ' ' << (m.ideal[v] ? 1 : 0) << ' ' << m.rep[v] << ' '
       << (m.word[v].empty() ? "." : m.word[v].to_string()) << '\n';
  os << "triangles " << m.triangle_count() << '\n';
  for (const auto& t : m.triangles) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

/// Map file: header, both representations, the mesh tables and the images.
/// The domain and mesh are rebuilt from (genus, punctures, refine) on load
/// and must reproduce the stored tables.
inline void write_map(std::ostream& os, const EquivariantMap& f, std::uint64_t seed = 0) {
  const auto& p = f.rho().presentation();
  os << "hypvol-map 1\n";
  os << "genus " << p.genus() << '\n';
  os << "punctures " << p.punctures() << '\n';
  os << "refine " << f.mesh().refine << '\n';
  os << "seed " << seed << '\n';
  os << "pinned " << (f.pinned() ? 1 : 0) << '\n';
  os << "j\n";
  write_representation(os, f.j());
  os << "rho\n";
  write_representation(os, f.rho());
  write_mesh(os, f.mesh());
  os << "images " << f.mesh().vertex_count() << '\n';
  for (const auto& y : f.images())
    os << detail::fmt17(y(0)) << ' ' << detail::fmt17(y(1)) << ' ' << detail::fmt17(y(2)) << '\n';
}

struct LoadedMap {
  EquivariantMap map;
  std::uint64_t seed = 0;
};

inline LoadedMap read_map(std::istream& is) {
  using detail::expect_key;
  using detail::parse_int;
  std::string v;
  expect_key(is, "hypvol-map", v);
  if (v != "1") throw ParseError("map: unsupported version " + v);
  expect_key(is, "genus", v);
  const int genus = parse_int(v);
  expect_key(is, "punctures", v);
  const int punct = parse_int(v);
  expect_key(is, "refine", v);
  const int refine = parse_int(v);
  expect_key(is, "seed", v);
  const std::uint64_t seed = detail::parse_uint64(v);
  expect_key(is, "pinned", v);
  const bool pinned = parse_int(v) != 0;
  expect_key(is, "j", v);
  const auto j = read_representation<2>(is);
  expect_key(is, "rho", v);
  const auto rho = read_representation<2>(is);
  if (j.presentation() != Presentation::make(genus, punct) || rho.presentation() != j.presentation())
    throw ParseError("map: presentations do not match the header");

  const Surface s = standard_surface(genus, punct);
  for (int i = 0; i < j.generator_count(); ++i)
    if ((j.image(i).matrix() - s.j.image(i).matrix()).cwiseAbs().maxCoeff() > 1e-12)
      throw InvariantViolation("map: stored j differs from the built-in holonomy");
  auto domain = std::make_shared<const FundamentalDomain>(s.domain);
  auto mesh = std::make_shared<const Mesh>(build_mesh(*domain, refine));

  expect_key(is, "vertices", v);
  if (parse_int(v) != mesh->vertex_count()) throw InvariantViolation("map: vertex table does not match the mesh");
  for (int k = 0; k < mesh->vertex_count(); ++k) {
    std::istringstream line;
    if (!detail::next_line(is, line)) throw ParseError("map: truncated vertex table");
    std::string x, y, t, ideal, rep;
    if (!(line >> x >> y >> t >> ideal >> rep)) throw ParseError("map: short vertex row");
    std::string word;
    std::getline(line, word);
    word = word.substr(std::min(word.size(), word.find_first_not_of(' ')));
    const Vec<2> p(detail::parse_double(x), detail::parse_double(y), detail::parse_double(t));
    if ((p - mesh->points[k]).norm() > 1e-12 * std::max(1.0, p.norm()) || (parse_int(ideal) != 0) != mesh->ideal[k] ||
        parse_int(rep) != mesh->rep[k] || (word == "." ? Word() : Word::parse(word)) != mesh->word[k])
      throw InvariantViolation("map: vertex table does not match the mesh");
  }
  expect_key(is, "triangles", v);
  if (parse_int(v) != mesh->triangle_count()) throw InvariantViolation("map: triangle table does not match the mesh");
  for (int k = 0; k < mesh->triangle_count(); ++k) {
    std::istringstream line;
    if (!detail::next_line(is, line)) throw ParseError("map: truncated triangle table");
    std::array<std::string, 3> tok;
    if (!(line >> tok[0] >> tok[1] >> tok[2])) throw ParseError("map: short triangle row");
    for (int i = 0; i < 3; ++i)
      if (parse_int(tok[i]) != mesh->triangles[k][i])
        throw InvariantViolation("map: triangle table does not match the mesh");
  }
  expect_key(is, "images", v);
  if (parse_int(v) != mesh->vertex_count()) throw ParseError("map: image count");
  std::vector<Vec<2>> imgs;
  for (int k = 0; k < mesh->vertex_count(); ++k) {
    std::istringstream line;
    if (!detail::next_line(is, line)) throw ParseError("map: truncated image table");
    std::string x, y, t;
    if (!(line >> x >> y >> t)) throw ParseError("map: short image row");
    imgs.emplace_back(detail::parse_double(x), detail::parse_double(y), detail::parse_double(t));
  }
  EquivariantMap f(domain, mesh, rho, imgs, pinned);
  for (int k = 0; k < mesh->vertex_count(); ++k)
    if ((f.image(k) - imgs[k]).norm() > 1e-9 * std::max(1.0, imgs[k].norm()))
      throw InvariantViolation("map: stored images are not equivariant");
  return {std::move(f), seed};
}

inline void save_map(const std::string& path, const EquivariantMap& f, std::uint64_t seed = 0) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  write_map(os, f, seed);
}

inline LoadedMap load_map(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot read " + path);
  return read_map(is);
}

}  // namespace hypvol

#endif  // HYPVOL_EQUIVARIANT_MAP_HPP
