#ifndef HYPVOL_SCHLAFLI_HPP
#define HYPVOL_SCHLAFLI_HPP

// Compact hyperbolic simplices in H^2 and H^3: volumes, dihedral angles
// and a finite-difference study of the Schlafli variation formula.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <vector>

#include "hypvol/error.hpp"
#include "hypvol/lorentz.hpp"
#include "hypvol/surface.hpp"

namespace hypvol {

template <int N>
class Simplex {
  static_assert(N == 2 || N == 3, "simplices are supported in H^2 and H^3");

 public:
  explicit Simplex(std::array<HPoint<N>, N + 1> v) : v_(std::move(v)) {
    if (degenerate(v_)) throw PreconditionViolation("simplex: vertices are degenerate");
  }

  /// |det[x_0 ... x_n]| against its Hadamard bound with the edge vectors
  /// x_i - x_0, so the test does not depend on the size of the simplex.
  static bool degenerate(const std::array<HPoint<N>, N + 1>& v) {
    Mat<N> m;
    double bound = v[0].coords().norm();
    m.col(0) = v[0].coords();
    for (int i = 1; i <= N; ++i) {
      m.col(i) = v[i].coords() - v[0].coords();
      bound *= m.col(i).norm();
    }
    return !(std::abs(m.determinant()) > 1e-10 * bound);
  }

  const HPoint<N>& vertex(int i) const { return v_.at(i); }
  const std::array<HPoint<N>, N + 1>& vertices() const { return v_; }

  Simplex moved(const Isometry<N>& g) const {
    std::array<HPoint<N>, N + 1> w;
    for (int i = 0; i <= N; ++i) w[i] = g(v_[i]);
    return Simplex(w);
  }

  /// Unit spacelike normal of the facet opposite vertex i, pointing away
  /// from vertex i.
  Vec<N> facet_normal(int i) const {
    Eigen::Matrix<double, N, N + 1> rows;
    for (int k = 0, r = 0; k <= N; ++k)
      if (k != i) rows.row(r++) = (LorentzForm<N>::matrix() * v_[k].coords()).transpose();
    // generalized cross product: <c, x_k> = 0 for the facet vertices
    Vec<N> c;
    for (int col = 0; col <= N; ++col) {
      Eigen::Matrix<double, N, N> minor;
      for (int r = 0; r < N; ++r)
        for (int k = 0, m = 0; k <= N; ++k)
          if (k != col) minor(r, m++) = rows(r, k);
      c(col) = ((col % 2) ? -1.0 : 1.0) * minor.determinant();
    }
    c /= std::sqrt(minkowski<N>(c, c));
    if (minkowski<N>(c, v_[i].coords()) > 0.0) c = -c;
    return c;
  }

 private:
  std::array<HPoint<N>, N + 1> v_;
};

/// Interior dihedral angle at the codimension-2 face missing vertices i, j.
template <int N>
double dihedral_angle(const Simplex<N>& s, int i, int j) {
  if (i == j || i < 0 || j < 0 || i > N || j > N) throw PreconditionViolation("dihedral_angle: bad vertex pair");
  const double c = -minkowski<N>(s.facet_normal(i), s.facet_normal(j));
  return std::acos(std::clamp(c, -1.0, 1.0));
}

/// Volume of the codimension-2 face missing vertices i, j: 1 for n = 2
/// (a vertex), the edge length for n = 3.
template <int N>
double face_volume(const Simplex<N>& s, int i, int j) {
  if constexpr (N == 2) {
    return 1.0;
  } else {
    std::array<int, 2> e{};
    for (int k = 0, m = 0; k <= N; ++k)
      if (k != i && k != j) e[m++] = k;
    return dist(s.vertex(e[0]), s.vertex(e[1]));
  }
}

namespace detail {

// Interior angle at b of the geodesic triangle abc from tangent vectors.
inline double vertex_angle(const HPoint<2>& a, const HPoint<2>& b, const HPoint<2>& c) {
  const Vec<2> u = log_map(b, a), v = log_map(b, c);
  const double cs = minkowski<2>(u, v) / std::sqrt(minkowski<2>(u, u) * minkowski<2>(v, v));
  return std::acos(std::clamp(cs, -1.0, 1.0));
}

// Gauss-Legendre nodes and weights on [0, 1].
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (z * p1 - p0) / (z * z - 1.0);
    x[i] = 0.5 * (1.0 - z);
    w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

// Integral of (1 - |y|^2)^{-2} over the Euclidean tetrahedron abcd via
// the Duffy map (u, v, w) -> a + u(b - a) + uv(c - b) + uvw(d - c).
inline double klein_tetra_rule(const std::array<Eigen::Vector3d, 4>& p, int order) {
  static thread_local std::vector<std::pair<std::vector<double>, std::vector<double>>> cache(64);
  if (cache[order].first.empty()) cache[order] = gauss_legendre(order);
  const auto& [x, w] = cache[order];
  Eigen::Matrix3d m;
  m << p[1] - p[0], p[2] - p[1], p[3] - p[2];
  const double jac = std::abs(m.determinant());
  double sum = 0.0;
  for (int i = 0; i < order; ++i)
    for (int j = 0; j < order; ++j)
      for (int k = 0; k < order; ++k) {
        const double u = x[i], v = x[j], t = x[k];
        const Eigen::Vector3d y = p[0] + u * (p[1] - p[0]) + u * v * (p[2] - p[1]) + u * v * t * (p[3] - p[2]);
        const double q = 1.0 - y.squaredNorm();
        sum += w[i] * w[j] * w[k] * u * u * v / (q * q);
      }
  return jac * sum;
}

inline double klein_tetra_adaptive(const std::array<Eigen::Vector3d, 4>& p, double tol, int depth) {
  const double lo = klein_tetra_rule(p, 8), hi = klein_tetra_rule(p, 12);
  if (std::abs(hi - lo) <= tol || depth >= 6) {
    if (std::abs(hi - lo) > tol) throw ConvergenceFailure("simplex_volume: quadrature did not reach tolerance");
    return hi;
  }
  // 8 children: 4 corner tetrahedra and the octahedron cut along one diagonal
  auto mid = [&](int a, int b) -> Eigen::Vector3d { return 0.5 * (p[a] + p[b]); };
  const Eigen::Vector3d m01 = mid(0, 1), m02 = mid(0, 2), m03 = mid(0, 3), m12 = mid(1, 2), m13 = mid(1, 3),
                        m23 = mid(2, 3);
  const std::array<std::array<Eigen::Vector3d, 4>, 8> kids{{{p[0], m01, m02, m03},
                                                            {m01, p[1], m12, m13},
                                                            {m02, m12, p[2], m23},
                                                            {m03, m13, m23, p[3]},
                                                            {m01, m02, m03, m13},
                                                            {m01, m02, m12, m13},
                                                            {m02, m03, m13, m23},
                                                            {m02, m12, m13, m23}}};
  double s = 0.0;
  for (const auto& k : kids) s += klein_tetra_adaptive(k, tol / 8.0, depth + 1);
  return s;
}

}  // namespace detail

/// Volume: the triangle area for n = 2, adaptive quadrature of the Klein
/// density over the Euclidean image tetrahedron for n = 3.
template <int N>
double simplex_volume(const Simplex<N>& s, double rel_tol = 1e-12) {
  if constexpr (N == 2) {
    const auto& v = s.vertices();
    return std::abs(signed_area(v[0].coords(), v[1].coords(), v[2].coords()));
  } else {
    std::array<Eigen::Vector3d, 4> p;
    for (int i = 0; i < 4; ++i) p[i] = s.vertex(i).klein();
    const double rough = detail::klein_tetra_rule(p, 12);
    return detail::klein_tetra_adaptive(p, rel_tol * std::abs(rough), 0);
  }
}

/// Volume of a possibly degenerate vertex configuration; degenerate
/// (e.g. collinear) configurations have volume 0.
template <int N>
double simplex_volume(const std::array<HPoint<N>, N + 1>& v) {
  return Simplex<N>::degenerate(v) ? 0.0 : simplex_volume(Simplex<N>(v));
}

/// Vertex curves t -> simplex, sampled at `times` with central differences.
template <int N>
struct SimplexPath {
  std::function<Simplex<N>(double)> at;
  std::vector<double> times;
};

struct SchlafliReport {
  double c = 0.0;                 // least-squares fit of dVol/dt = c * sum vol(F) dtheta/dt, finest step
  double max_residual = 0.0;      // max |dVol - c_expected * S| at the finest step
  std::vector<double> steps;      // step sizes, halving
  std::vector<double> residuals;      // rms over the sample times, per step, against the expected constant
  std::vector<double> max_residuals;  // max over the sample times
  std::vector<double> c_per_step;
  bool second_order = false;  // residual ratios under halving close to 4 (or at the rounding floor)
  double max_dvol = 0.0;
  double max_rhs = 0.0;
};

/// The constant c_n predicted for curvature -1: -1/(n - 1).
template <int N>
constexpr double schlafli_constant() {
  return -1.0 / (N - 1);
}

/// Central differences of the volume and of the angles at each time, for
/// `halvings` + 1 step sizes starting at `step`.
template <int N>
SchlafliReport schlafli_check(const SimplexPath<N>& path, double step = 0.01, int halvings = 3) {
  if (path.times.empty()) throw PreconditionViolation("schlafli_check: no sample times");
  if (!(step > 0.0) || halvings < 1) throw PreconditionViolation("schlafli_check: need step > 0 and halvings >= 1");
  SchlafliReport r;
  const double expected = schlafli_constant<N>();
  for (int level = 0; level <= halvings; ++level) {
    const double h = step / std::pow(2.0, level);
    double num = 0.0, den = 0.0, res = 0.0, rms = 0.0;
    for (double t : path.times) {
      const Simplex<N> sp = path.at(t + h), sm = path.at(t - h), s0 = path.at(t);
      const double dvol = (simplex_volume(sp) - simplex_volume(sm)) / (2.0 * h);
      double rhs = 0.0;
      for (int i = 0; i <= N; ++i)
        for (int j = i + 1; j <= N; ++j)
          rhs += face_volume(s0, i, j) * (dihedral_angle(sp, i, j) - dihedral_angle(sm, i, j)) / (2.0 * h);
      num += dvol * rhs;
      den += rhs * rhs;
      res = std::max(res, std::abs(dvol - expected * rhs));
      rms += (dvol - expected * rhs) * (dvol - expected * rhs);
      if (level == halvings) {
        r.max_dvol = std::max(r.max_dvol, std::abs(dvol));
        r.max_rhs = std::max(r.max_rhs, std::abs(rhs));
      }
    }
    r.steps.push_back(h);
    r.residuals.push_back(std::sqrt(rms / path.times.size()));
    r.max_residuals.push_back(res);
    r.c_per_step.push_back(den > 0.0 ? num / den : 0.0);
  }
  r.c = r.c_per_step.back();
  r.max_residual = r.max_residuals.back();
  // residuals already at the rounding floor (n = 2, where the identity is
  // linear in the angles) count as converged
  const double floor = 1e-9 * std::max(1.0, r.max_rhs);
  r.second_order = true;
  for (std::size_t k = 1; k < r.residuals.size(); ++k) {
    const double ratio = r.residuals[k - 1] / r.residuals[k];
    const bool at_floor = r.residuals[k - 1] < floor && r.residuals[k] < floor;
    r.second_order = r.second_order && (at_floor || (ratio > 3.0 && ratio < 5.0));
  }
  return r;
}

/// Random C^1 path: x_i(t) = normalize(x_i + t v_i + t^2 w_i) around a
/// random simplex of vertices within `radius` of the base point.
template <int N, class Rng>
SimplexPath<N> random_simplex_path(Rng& rng, double radius = 1.0, int samples = 5) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::array<Vec<N>, N + 1> x, v, w;
  for (int attempt = 0;; ++attempt) {
    if (attempt > 1000) throw ConvergenceFailure("random_simplex_path: no well-shaped simplex found");
    std::array<HPoint<N>, N + 1> pts;
    for (int i = 0; i <= N; ++i) {
      Vec<N> t = Vec<N>::Zero();
      for (int k = 0; k < N; ++k) t(k) = g(rng);
      t *= radius * std::cbrt(std::uniform_real_distribution<double>(0.2, 1.0)(rng)) / t.template head<N>().norm();
      pts[i] = exp_map(HPoint<N>::base(), t);
      x[i] = pts[i].coords();
    }
    try {
      const Simplex<N> s(pts);
      bool ok = true;
      for (int i = 0; i <= N; ++i)
        for (int j = i + 1; j <= N; ++j) {
          const double a = dihedral_angle(s, i, j);
          ok = ok && a > 0.15 && a < std::numbers::pi - 0.15;
        }
      if (ok) break;
    } catch (const PreconditionViolation&) {
    }
  }
  for (int i = 0; i <= N; ++i) {
    for (int k = 0; k <= N; ++k) {
      v[i](k) = 0.3 * g(rng);
      w[i](k) = 0.3 * g(rng);
    }
  }
  SimplexPath<N> p;
  p.at = [x, v, w](double t) {
    std::array<HPoint<N>, N + 1> pts;
    for (int i = 0; i <= N; ++i) pts[i] = HPoint<N>(Vec<N>(x[i] + t * v[i] + t * t * w[i]));
    return Simplex<N>(pts);
  };
  for (int k = 0; k < samples; ++k) p.times.push_back(u(rng) * 0.2);
  return p;
}

/// CSV rows t, volume, the dihedral angles (i < j) and the edge lengths.
template <int N>
void write_path_csv(std::ostream& os, const SimplexPath<N>& path, const std::vector<double>& ts) {
  os << "t,volume";
  for (int i = 0; i <= N; ++i)
    for (int j = i + 1; j <= N; ++j) os << ",theta_" << i << j;
  for (int i = 0; i <= N; ++i)
    for (int j = i + 1; j <= N; ++j) os << ",length_" << i << j;
  os << '\n';
  for (double t : ts) {
    const Simplex<N> s = path.at(t);
    os << detail::fmt17(t) << ',' << detail::fmt17(simplex_volume(s));
    for (int i = 0; i <= N; ++i)
      for (int j = i + 1; j <= N; ++j) os << ',' << detail::fmt17(dihedral_angle(s, i, j));
    for (int i = 0; i <= N; ++i)
      for (int j = i + 1; j <= N; ++j) os << ',' << detail::fmt17(dist(s.vertex(i), s.vertex(j)));
    os << '\n';
  }
}

}  // namespace hypvol

#endif  // HYPVOL_SCHLAFLI_HPP
