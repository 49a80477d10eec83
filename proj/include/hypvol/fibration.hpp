#ifndef HYPVOL_FIBRATION_HPP
#define HYPVOL_FIBRATION_HPP

// pi(g) = Fix(g o f) for a lambda-Lipschitz equivariant f with lambda < 1,
// its differential and the Jacobian factor det(Id - d(g o f)).

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <memory>
#include <optional>

#include "hypvol/equivariant_map.hpp"
#include "hypvol/error.hpp"
#include "hypvol/lorentz.hpp"

namespace hypvol {

struct FibrationContext {
  std::shared_ptr<const EquivariantMap> f;
  double lambda = 0.0;  // Lipschitz bound, < 1
  double tol = 1e-12;
  int max_iterations = 10000;

  const Representation<2>& j() const { return f->j(); }
  const Representation<2>& rho() const { return f->rho(); }
};

/// Context with lambda measured on f (the larger of the edge-ratio and
/// differential estimates at the given refinement).
inline FibrationContext make_context(const EquivariantMap& f, int refine = 2) {
  FibrationContext c;
  c.f = std::make_shared<const EquivariantMap>(f);
  c.lambda = std::max(measure_lipschitz(f, refine).lambda,
                      measure_lipschitz(f, refine, LipschitzMethod::DifferentialBound).lambda);
  if (!(c.lambda < 1.0)) throw PreconditionViolation("fibration: f is not a contraction (lambda >= 1)");
  return c;
}

struct FixedPoint {
  HPoint<2> point;
  int iterations = 0;
  double residual = 0.0;  // dist(g f(x), x)
};

/// Banach iteration x <- g f(x) from the domain center. Stops once a step
/// moves less than the tolerance (or the rounding floor of the coordinates).
inline FixedPoint pi_solve(const FibrationContext& ctx, const Isometry<2>& g) {
  if (!(ctx.lambda < 1.0)) throw PreconditionViolation("fibration: need lambda < 1");
  HPoint<2> x = ctx.f->domain().center();
  for (int it = 1; it <= ctx.max_iterations; ++it) {
    const HPoint<2> y = g((*ctx.f)(x));
    const double step = dist(x, y);
    const double floor = 16.0 * std::numeric_limits<double>::epsilon() * y.coords().norm();
    x = y;
    if (step < std::max(ctx.tol, floor)) {
      // one more step settles the last digits
      x = g((*ctx.f)(x));
      return {x, it + 1, dist(g((*ctx.f)(x)), x)};
    }
  }
  throw ConvergenceFailure("fibration: fixed-point iteration budget exhausted");
}

inline HPoint<2> pi(const FibrationContext& ctx, const Isometry<2>& g) { return pi_solve(ctx, g).point; }

/// d(g o f) at x as a map from the frame at x to the frame at g f(x).
inline Eigen::Matrix2d df(const FibrationContext& ctx, const HPoint<2>& x, const Isometry<2>& g,
                          double* min_barycentric = nullptr) {
  const auto s = ctx.f->sample(x);
  if (min_barycentric) *min_barycentric = s.min_barycentric;
  const Eigen::Matrix2d d = ctx.f->differential(x, s);
  const HPoint<2> gy = g(s.value);
  const Eigen::Matrix2d dg = frame(gy).transpose() * LorentzForm<2>::matrix() * g.matrix() * frame(s.value);
  return dg * d;
}

/// Id - d_{pi(g)}(g o f) in the frame at pi(g).
inline Eigen::Matrix2d fixed_point_operator(const FibrationContext& ctx, const HPoint<2>& x, const Isometry<2>& g) {
  return Eigen::Matrix2d::Identity() - df(ctx, x, g);
}

/// d pi_g(u) for u in the Lie algebra, as an ambient tangent vector at pi(g).
inline TangentVector<2> dpi(const FibrationContext& ctx, const Isometry<2>& g, const AlgebraVector<2>& u) {
  const HPoint<2> x = pi(ctx, g);
  const Eigen::Matrix2d a = fixed_point_operator(ctx, x, g);
  const Frame<2> e = frame(x);
  const Eigen::Vector2d rhs = e.transpose() * LorentzForm<2>::matrix() * killing_field(u, x).vector();
  const Eigen::FullPivLU<Eigen::Matrix2d> lu(a);
  if (!lu.isInvertible() || std::abs(a.determinant()) < 1e-14)
    throw InvariantViolation("fibration: Id - d(g f) is singular");
  return TangentVector<2>(x, Vec<2>(e * lu.solve(rhs)));
}

/// det(Id - d_{pi(g)}(g o f)), asserted positive.
inline double jacobian_factor(const FibrationContext& ctx, const Isometry<2>& g) {
  const HPoint<2> x = pi(ctx, g);
  const double j = fixed_point_operator(ctx, x, g).determinant();
  if (!(j > 0.0)) throw InvariantViolation("fibration: non-positive Jacobian factor");
  return j;
}

/// An isometry with g f(x) = x, hence pi(g) = x.
inline Isometry<2> section(const FibrationContext& ctx, const HPoint<2>& x) {
  return transport((*ctx.f)(x), x);
}

}  // namespace hypvol

#endif  // HYPVOL_FIBRATION_HPP
