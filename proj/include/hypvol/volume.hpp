#ifndef HYPVOL_VOLUME_HPP
#define HYPVOL_VOLUME_HPP

// Areas, volumes of representations and the two computations of the
// volume of the quotient of SO_0(2,1) by (j, rho)(Gamma).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hypvol/equivariant_map.hpp"
#include "hypvol/error.hpp"
#include "hypvol/fibration.hpp"
#include "hypvol/haar.hpp"
#include "hypvol/lorentz.hpp"

namespace hypvol {

struct QuadratureSpec {
  enum class Mode { MidpointSubdivision, MonteCarlo };
  Mode mode = Mode::MidpointSubdivision;
  int refine = 2;                 // subdivision levels per mesh triangle
  std::int64_t samples = 100000;  // Monte Carlo
  std::uint64_t seed = 1;
  bool jitter = false;  // random evaluation point per subcell instead of the centroid
};

/// Area of the triangulated domain: the sum of the angle defects of the
/// mesh triangles (exact up to roundoff), or a Monte Carlo integral of the
/// Klein density (1 - |x|^2)^{-3/2} over the polygon.
inline McEstimate hyperbolic_area(const FundamentalDomain& d, const QuadratureSpec& spec) {
  if (spec.mode == QuadratureSpec::Mode::MidpointSubdivision) {
    if (spec.refine < 0 || spec.refine > 8) throw PreconditionViolation("hyperbolic_area: need 0 <= refine <= 8");
    const Mesh m = build_mesh(d, spec.refine);
    double a = 0.0;
    for (const auto& t : m.triangles) a += signed_area(m.points[t[0]], m.points[t[1]], m.points[t[2]]);
    return {a, 0.0, 0, spec.seed};
  }
  if (d.has_cusps()) throw PreconditionViolation("hyperbolic_area: Monte Carlo needs a compact domain");
  if (spec.samples < 1000) throw PreconditionViolation("hyperbolic_area: need at least 1000 samples");
  // fan from the Klein origin; the polygon is star-shaped about it
  std::vector<double> area;
  for (int k = 0; k < d.size(); ++k) {
    const Eigen::Vector2d p = d.klein_vertex(k), q = d.klein_vertex(k + 1);
    area.push_back(0.5 * (p(0) * q(1) - p(1) * q(0)));
  }
  double total = 0.0;
  for (double a : area) total += a;
  std::discrete_distribution<int> pick(area.begin(), area.end());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return detail::chunked_mc(spec.samples, spec.seed, [&](std::mt19937_64& rng) {
    const int k = pick(rng);
    double s = u(rng), t = u(rng);
    if (s + t > 1.0) {
      s = 1.0 - s;
      t = 1.0 - t;
    }
    const Eigen::Vector2d x = s * d.klein_vertex(k) + t * d.klein_vertex(k + 1);
    return total * std::pow(1.0 - x.squaredNorm(), -1.5);
  });
}

/// Sum over the mesh of the signed areas of the image triangles; equals
/// the integral of f^* vol since f maps each triangle onto its image
/// geodesic triangle with constant orientation.
inline double vol_representation(const EquivariantMap& f) {
  if (f.domain().has_cusps() && !f.pinned())
    throw PreconditionViolation("vol_representation: cusped domains need a cusp-pinned map");
  const Mesh& m = f.mesh();
  double v = 0.0;
  for (const auto& t : m.triangles) v += signed_area(f.image(t[0]), f.image(t[1]), f.image(t[2]));
  return v;
}

/// V_n (vol_j + (-1)^n vol_rho).
inline double quotient_volume_formula(double vol_j, double vol_rho, int n) {
  return vn(n) * (vol_j + (n % 2 ? -1.0 : 1.0) * vol_rho);
}

/// Jac_f(x): the signed determinant of df in oriented orthonormal frames.
inline double jacobian(const EquivariantMap& f, const HPoint<2>& x) { return f.differential(x).determinant(); }

struct FiberwiseResult {
  double deterministic = 0.0;  // path (a)
  McEstimate monte_carlo;      // path (b)
  double finite_area = 0.0;    // area of the non-cusp cells
  double cusp_area = 0.0;
  double max_abs_jacobian = 0.0;
  int bound_violations = 0;  // samples with |Jac| above lambda^2
};

namespace detail {

// Subcells of a mesh triangle: the geodesic subdivision whose vertices
// are normalize(i a + j b + k c), i + j + k = m.
template <class Fn>
void for_each_subcell(const Vec<2>& a, const Vec<2>& b, const Vec<2>& c, int m, Fn&& fn) {
  auto p = [&](int i, int j) { return Vec<2>(HPoint<2>(Vec<2>((m - i - j) * a + i * b + j * c)).coords()); };
  for (int i = 0; i < m; ++i)
    for (int j = 0; i + j < m; ++j) {
      fn(p(i, j), p(i + 1, j), p(i, j + 1));
      if (i + j + 2 <= m) fn(p(i + 1, j), p(i + 1, j + 1), p(i, j + 1));
    }
}

}  // namespace detail

/// The fiberwise integral V_2 * int (1 + Jac_f) vol over the domain.
/// (a) subcell areas times the Jacobian at the subcell centroid;
/// (b) Monte Carlo: a hyperbolic-uniform point x, a Haar rotation k of the
/// stabilizer of x and g = k s(x) with pi(g) = x; the integrand is the
/// Jacobian factor det(Id - d(g f)) at g, whose fiber average is 1 + Jac_f(x).
/// Pinned cusp cells have constant images and contribute their exact area.
inline FiberwiseResult quotient_volume_fiberwise(const FibrationContext& ctx, const QuadratureSpec& spec) {
  const EquivariantMap& f = *ctx.f;
  if (!(ctx.lambda < 1.0)) throw PreconditionViolation("fiberwise volume: need a certificate with lambda < 1");
  if (f.domain().has_cusps() && !f.pinned())
    throw PreconditionViolation("fiberwise volume: cusped domains need a cusp-pinned map");
  if (spec.refine < 0 || spec.refine > 6) throw PreconditionViolation("fiberwise volume: need 0 <= refine <= 6");
  const Mesh& mesh = f.mesh();
  const double v2 = vn(2);
  const double bound = ctx.lambda * ctx.lambda * (1.0 + 1e-6) + 1e-12;
  FiberwiseResult r;

  std::vector<double> cell_area(mesh.triangle_count(), 0.0);
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double a = signed_area(mesh.points[tri[0]], mesh.points[tri[1]], mesh.points[tri[2]]);
    if (mesh.triangle_is_ideal(t)) {
      r.cusp_area += a;
    } else {
      cell_area[t] = a;
      r.finite_area += a;
    }
  }

  // (a)
  std::mt19937_64 jit(spec.seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double integral = r.cusp_area;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    if (mesh.triangle_is_ideal(t)) continue;
    const auto& tri = mesh.triangles[t];
    detail::for_each_subcell(mesh.points[tri[0]], mesh.points[tri[1]], mesh.points[tri[2]], 1 << spec.refine,
                             [&](const Vec<2>& a, const Vec<2>& b, const Vec<2>& c) {
                               double wa = 1.0, wb = 1.0, wc = 1.0;
                               if (spec.jitter) {
                                 wa = 0.5 + u01(jit);
                                 wb = 0.5 + u01(jit);
                                 wc = 0.5 + u01(jit);
                               }
                               const HPoint<2> x(Vec<2>(wa * a + wb * b + wc * c));
                               const double jac = jacobian(f, x);
                               r.max_abs_jacobian = std::max(r.max_abs_jacobian, std::abs(jac));
                               if (std::abs(jac) > bound) ++r.bound_violations;
                               integral += signed_area(a, b, c) * (1.0 + jac);
                             });
  }
  r.deterministic = v2 * integral;

  // (b)
  if (r.finite_area > 0.0) {
    std::vector<int> finite;
    std::vector<double> weights;
    for (int t = 0; t < mesh.triangle_count(); ++t)
      if (!mesh.triangle_is_ideal(t)) {
        finite.push_back(t);
        weights.push_back(cell_area[t]);
      }
    std::discrete_distribution<int> pick(weights.begin(), weights.end());
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto mc = detail::chunked_mc(spec.samples, spec.seed, [&](std::mt19937_64& rng) {
      const int t = finite[pick(rng)];
      const auto& tri = mesh.triangles[t];
      // Klein-uniform point in the triangle, reweighted to the hyperbolic area
      double s = u(rng), w = u(rng);
      if (s + w > 1.0) {
        s = 1.0 - s;
        w = 1.0 - w;
      }
      const Eigen::Vector2d ka = mesh.klein(tri[0]), kb = mesh.klein(tri[1]), kc = mesh.klein(tri[2]);
      const Eigen::Vector2d k = ka + s * (kb - ka) + w * (kc - ka);
      const double eucl = 0.5 * std::abs((kb - ka)(0) * (kc - ka)(1) - (kb - ka)(1) * (kc - ka)(0));
      const double weight = eucl * std::pow(1.0 - k.squaredNorm(), -1.5) / cell_area[t];
      const HPoint<2> x = HPoint<2>::from_klein(k);
      const Isometry<2> g = stabilizer_element(x, haar_sample<2>(rng).matrix()) * section(ctx, x);
      const FixedPoint fp = pi_solve(ctx, g);
      if (dist(fp.point, x) > 1e-9) throw InvariantViolation("fiberwise volume: pi(k s(x)) != x");
      const double jf = fixed_point_operator(ctx, fp.point, g).determinant();
      if (!(jf > 0.0)) throw InvariantViolation("fibration: non-positive Jacobian factor");
      return r.finite_area * weight * jf;
    });
    r.monte_carlo = {v2 * (mc.value + r.cusp_area), v2 * mc.std_error, mc.samples, mc.seed};
  } else {
    r.monte_carlo = {v2 * r.cusp_area, 0.0, 0, spec.seed};
  }
  return r;
}

struct VolumeReport {
  int n = 2;
  int genus = 0;
  int punctures = 0;
  double vol_j = 0.0;
  double vol_rho = 0.0;
  double quotient_formula = 0.0;
  double quotient_deterministic = 0.0;  // fiberwise path (a)
  McEstimate quotient_fiberwise;        // fiberwise path (b)
  double lambda = 0.0;
  double h = 0.0;
  std::uint64_t seed = 0;
  int bound_violations = 0;

  double recomputed_formula() const { return quotient_volume_formula(vol_j, vol_rho, n); }
  /// Fiberwise path (b) against the formula: within max(0.5%, 3 stderr).
  bool fiberwise_agrees() const {
    const double tol = std::max(0.005 * std::abs(quotient_formula), 3.0 * quotient_fiberwise.std_error);
    return std::abs(quotient_fiberwise.value - quotient_formula) <= tol;
  }
  /// Path (a) against the formula within 0.5%, and (a) against (b) within
  /// max(3 stderr, the quadrature error of (a)).
  bool paths_agree() const {
    const double qa = std::abs(quotient_deterministic - quotient_formula);
    return qa <= 0.005 * std::abs(quotient_formula) &&
           std::abs(quotient_deterministic - quotient_fiberwise.value) <= 3.0 * quotient_fiberwise.std_error + qa;
  }
  /// (1 - lambda^n) V_n vol_j <= volume <= (1 + lambda^n) V_n vol_j.
  bool within_bounds() const {
    const double l = std::pow(lambda, n), base = vn(n) * vol_j;
    return quotient_formula >= (1.0 - l) * base - 1e-9 && quotient_formula <= (1.0 + l) * base + 1e-9;
  }
};

inline VolumeReport quotient_volume(const FibrationContext& ctx, const QuadratureSpec& spec) {
  const EquivariantMap& f = *ctx.f;
  VolumeReport r;
  r.genus = f.rho().presentation().genus();
  r.punctures = f.rho().presentation().punctures();
  QuadratureSpec area_spec;
  area_spec.refine = f.mesh().refine;
  r.vol_j = hyperbolic_area(f.domain(), area_spec).value;
  r.vol_rho = vol_representation(f);
  r.quotient_formula = quotient_volume_formula(r.vol_j, r.vol_rho, 2);
  const auto fw = quotient_volume_fiberwise(ctx, spec);
  r.quotient_deterministic = fw.deterministic;
  r.quotient_fiberwise = fw.monte_carlo;
  r.bound_violations = fw.bound_violations;
  r.lambda = ctx.lambda;
  r.h = f.mesh().h;
  r.seed = spec.seed;
  return r;
}

/// 4 pi^2 (e_j + e_rho). A non-positive result cannot come from a properly
/// discontinuous (dominated) pair and is reported through `warning`.
inline double ads_volume(int e_j, int e_rho, std::string* warning = nullptr) {
  const double v = 4.0 * std::numbers::pi * std::numbers::pi * (e_j + e_rho);
  const double q = v / (4.0 * std::numbers::pi * std::numbers::pi);
  if (std::abs(q - std::round(q)) > 1e-12) throw InvariantViolation("ads_volume: not an integral multiple of 4 pi^2");
  if (warning) {
    warning->clear();
    if (e_j + e_rho <= 0 || std::abs(e_rho) >= std::abs(e_j))
      *warning = "Euler classes (" + std::to_string(e_j) + ", " + std::to_string(e_rho) +
                 ") are inconsistent with a strictly dominated pair";
  }
  return v;
}

}  // namespace hypvol

#endif  // HYPVOL_VOLUME_HPP
