#ifndef HYPVOL_LORENTZ_HPP
#define HYPVOL_LORENTZ_HPP

// Lorentz linear algebra on R^{n,1}, the hyperboloid model of H^n and the
// group SO_0(n,1) with its Killing form kappa(A,B) = Tr(AB)/2.
//
// Conventions: the quadratic form is I_{n,1} = diag(1,...,1,-1), points of
// H^n lie on the upper sheet <x,x> = -1, x_n > 0. The Lie algebra basis is
// ordered boosts first (coordinate order) then rotations (lexicographic),
// and that ordered basis is declared positively oriented.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "hypvol/error.hpp"

namespace hypvol {

template <int N>
using Vec = Eigen::Matrix<double, N + 1, 1>;
template <int N>
using Mat = Eigen::Matrix<double, N + 1, N + 1>;
template <int N>
using Frame = Eigen::Matrix<double, N + 1, N>;
template <int N>
using TangentCoords = Eigen::Matrix<double, N, 1>;

template <int N>
inline constexpr bool kSupportedDim = (N >= 2 && N <= 4);

template <int N>
struct LorentzForm {
  static_assert(kSupportedDim<N>, "supported dimensions are 2..4");
  static constexpr int n = N;

  static Mat<N> matrix() {
    Mat<N> j = Mat<N>::Identity();
    j(N, N) = -1.0;
    return j;
  }

  template <class A, class B>
  static double inner(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    return a.template head<N>().dot(b.template head<N>()) - a(N) * b(N);
  }
};

template <int N>
inline double minkowski(const Vec<N>& a, const Vec<N>& b) {
  return LorentzForm<N>::inner(a, b);
}

namespace detail {

inline double max_abs(const auto& m) { return m.cwiseAbs().maxCoeff(); }

// Lorentz Gram-Schmidt on columns: the last column is made a unit future
// timelike vector, the others unit spacelike and mutually orthogonal.
template <int N>
Mat<N> lorentz_gram_schmidt(const Mat<N>& m) {
  Mat<N> q = m;
  Vec<N> t = q.col(N);
  const double tt = -minkowski<N>(t, t);
  if (!(tt > 0.0)) throw InvariantViolation("isometry: last column is not timelike");
  t /= std::sqrt(tt);
  q.col(N) = t;
  for (int i = 0; i < N; ++i) {
    Vec<N> v = q.col(i);
    for (int pass = 0; pass < 2; ++pass) {
      v += minkowski<N>(v, t) * t;
      for (int k = 0; k < i; ++k) {
        const Vec<N> qk = q.col(k);
        v -= minkowski<N>(v, qk) * qk;
      }
    }
    const double vv = minkowski<N>(v, v);
    if (!(vv > 0.0)) throw InvariantViolation("isometry: columns are degenerate");
    q.col(i) = v / std::sqrt(vv);
  }
  return q;
}

}  // namespace detail

/// Point on the upper sheet of the hyperboloid.
template <int N>
class HPoint {
  static_assert(kSupportedDim<N>);

 public:
  using Klein = Eigen::Matrix<double, N, 1>;

  HPoint() : x_(Vec<N>::Unit(N)) {}

  /// Rescales a timelike vector onto the hyperboloid. A past-pointing
  /// vector is identified with its negative.
  explicit HPoint(const Vec<N>& v) {
    const double q = -minkowski<N>(v, v);
    if (!(q > 0.0)) throw InvariantViolation("HPoint: vector is not timelike");
    x_ = v / std::sqrt(q);
    if (x_(N) < 0.0) x_ = -x_;
  }

  static HPoint base() { return HPoint(); }

  static HPoint from_klein(const Klein& k) {
    const double r2 = k.squaredNorm();
    if (!(r2 < 1.0)) throw InvariantViolation("HPoint: Klein coordinates outside the unit ball");
    Vec<N> v;
    v.template head<N>() = k;
    v(N) = 1.0;
    return HPoint(v);
  }

  /// Takes coordinates as given, validating the hyperboloid constraint.
  static HPoint adopt(const Vec<N>& v, double tol = 1e-12) {
    const double scale = std::max(1.0, v(N) * v(N));
    if (std::abs(minkowski<N>(v, v) + 1.0) > tol * scale || v(N) < 1.0 - tol)
      throw InvariantViolation("HPoint: coordinates are off the upper sheet");
    HPoint p;
    p.x_ = v;
    return p;
  }

  const Vec<N>& coords() const { return x_; }
  double operator[](int i) const { return x_(i); }

  Klein klein() const { return x_.template head<N>() / x_(N); }

 private:
  Vec<N> x_;
};

/// Tangent vector at a point of H^n, stored in ambient coordinates.
template <int N>
class TangentVector {
 public:
  TangentVector() = default;
  TangentVector(const HPoint<N>& base, const Vec<N>& v) : base_(base), v_(v) {
    // orthogonal projection onto base^perp
    v_ += minkowski<N>(v_, base_.coords()) * base_.coords();
  }

  const HPoint<N>& base() const { return base_; }
  const Vec<N>& vector() const { return v_; }
  double norm() const { return std::sqrt(std::max(0.0, minkowski<N>(v_, v_))); }

 private:
  HPoint<N> base_;
  Vec<N> v_ = Vec<N>::Zero();
};

/// Element of SO_0(n,1).
template <int N>
class Isometry {
  static_assert(kSupportedDim<N>);

 public:
  Isometry() : m_(Mat<N>::Identity()) {}

  /// Re-projects onto the group before validating orientation and sheet.
  explicit Isometry(const Mat<N>& m) : m_(detail::lorentz_gram_schmidt<N>(m)) { validate(1e-12); }

  /// Takes the matrix as given; the defect tolerance is relative to |m|^2.
  static Isometry adopt(const Mat<N>& m, double tol = 1e-9) {
    Isometry g;
    g.m_ = m;
    g.validate(tol);
    return g;
  }

  static Isometry identity() { return Isometry(); }

  const Mat<N>& matrix() const { return m_; }
  double operator()(int r, int c) const { return m_(r, c); }

  Isometry inverse() const {
    Isometry g;
    const Mat<N> j = LorentzForm<N>::matrix();
    g.m_ = j * m_.transpose() * j;
    return g;
  }

  // Products are not re-projected: on large-norm elements re-projection
  // loses more accuracy than the product itself.
  Isometry operator*(const Isometry& other) const {
    Isometry g;
    g.m_.noalias() = m_ * other.m_;
    return g;
  }

  HPoint<N> operator()(const HPoint<N>& x) const { return HPoint<N>(Vec<N>(m_ * x.coords())); }

  Vec<N> apply(const Vec<N>& v) const { return m_ * v; }

  TangentVector<N> operator()(const TangentVector<N>& t) const {
    return TangentVector<N>((*this)(t.base()), Vec<N>(m_ * t.vector()));
  }

  /// max |g^T I g - I|, the group-membership defect.
  double defect() const {
    const Mat<N> j = LorentzForm<N>::matrix();
    return detail::max_abs(Mat<N>(m_.transpose() * j * m_ - j));
  }

 private:
  void validate(double tol) const {
    if (!m_.allFinite()) throw InvariantViolation("isometry: non-finite entries");
    const double scale = std::max(1.0, m_.squaredNorm());
    if (defect() > tol * scale) throw InvariantViolation("isometry: does not preserve the Lorentz form");
    if (!(m_(N, N) > 0.0)) throw InvariantViolation("isometry: does not preserve the upper sheet");
    // det of the spatial block has the sign of det m and is far better
    // conditioned for large boosts
    if (m_.template topLeftCorner<N, N>().determinant() < 0.0)
      throw InvariantViolation("isometry: orientation reversing");
  }

  Mat<N> m_;
};

/// Element of so(n,1), built from basis coefficients or by projection.
template <int N>
class AlgebraVector {
  static_assert(kSupportedDim<N>);

 public:
  static constexpr int kDim = N * (N + 1) / 2;
  using Coeffs = Eigen::Matrix<double, kDim, 1>;

  AlgebraVector() : a_(Mat<N>::Zero()) {}

  static AlgebraVector from_coeffs(const Coeffs& c) {
    AlgebraVector out;
    for (int i = 0; i < N; ++i) {
      out.a_(i, N) += c(i);
      out.a_(N, i) += c(i);
    }
    int k = N;
    for (int i = 0; i < N; ++i) {
      for (int j = i + 1; j < N; ++j, ++k) {
        out.a_(i, j) += c(k);
        out.a_(j, i) -= c(k);
      }
    }
    return out;
  }

  /// Projection (m - I m^T I)/2 onto the algebra.
  static AlgebraVector from_matrix(const Mat<N>& m) {
    const Mat<N> j = LorentzForm<N>::matrix();
    return from_coeffs(AlgebraVector(0.5 * (m - j * m.transpose() * j)).coeffs());
  }

  static AlgebraVector basis(int k) { return from_coeffs(Coeffs::Unit(k)); }
  static AlgebraVector boost(int i) { return basis(i); }
  static AlgebraVector rotation(int i, int j) {
    if (!(0 <= i && i < j && j < N)) throw PreconditionViolation("rotation: need 0 <= i < j < n");
    return basis(rotation_index(i, j));
  }
  static int rotation_index(int i, int j) {
    int k = N;
    for (int a = 0; a < N; ++a)
      for (int b = a + 1; b < N; ++b, ++k)
        if (a == i && b == j) return k;
    return -1;
  }

  const Mat<N>& matrix() const { return a_; }

  Coeffs coeffs() const {
    Coeffs c;
    for (int i = 0; i < N; ++i) c(i) = a_(i, N);
    int k = N;
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j, ++k) c(k) = a_(i, j);
    return c;
  }

  double norm() const { return coeffs().norm(); }

  AlgebraVector operator+(const AlgebraVector& o) const { return AlgebraVector(Mat<N>(a_ + o.a_)); }
  AlgebraVector operator-(const AlgebraVector& o) const { return AlgebraVector(Mat<N>(a_ - o.a_)); }
  AlgebraVector operator*(double s) const { return AlgebraVector(Mat<N>(s * a_)); }
  friend AlgebraVector operator*(double s, const AlgebraVector& a) { return a * s; }

  /// Adjoint action g a g^{-1}.
  AlgebraVector conjugated(const Isometry<N>& g) const {
    return AlgebraVector(Mat<N>(g.matrix() * a_ * g.inverse().matrix()));
  }

 private:
  explicit AlgebraVector(const Mat<N>& a) : a_(a) {}
  Mat<N> a_;
};

/// kappa(a, b) = Tr(ab)/2.
template <int N>
double killing(const AlgebraVector<N>& a, const AlgebraVector<N>& b) {
  return 0.5 * (a.matrix().cwiseProduct(b.matrix().transpose())).sum();
}

/// Hyperbolic distance. Uses d = 2 asinh(|x - y|/2), equal to
/// arccosh(-<x,y>) but accurate for nearby points.
template <int N>
double dist(const HPoint<N>& x, const HPoint<N>& y) {
  const Vec<N> d = x.coords() - y.coords();
  const double q = std::max(0.0, minkowski<N>(d, d));
  return 2.0 * std::asinh(0.5 * std::sqrt(q));
}

template <int N>
HPoint<N> act(const Isometry<N>& g, const HPoint<N>& x) {
  return g(x);
}

/// Matrix exponential (Pade scaling-and-squaring).
template <int N>
Isometry<N> group_exp(const AlgebraVector<N>& a) {
  const Mat<N> m = a.matrix().exp();
  return Isometry<N>(m);
}

/// Principal logarithm; throws ConvergenceFailure when no real principal
/// logarithm reproduces g.
template <int N>
AlgebraVector<N> group_log(const Isometry<N>& g) {
  const Mat<N> l = g.matrix().log();
  if (!l.allFinite()) throw ConvergenceFailure("group_log: logarithm did not converge");
  const AlgebraVector<N> a = AlgebraVector<N>::from_matrix(l);
  const Mat<N> back = a.matrix().exp();
  const double scale = std::max(1.0, detail::max_abs(g.matrix()));
  if (detail::max_abs(Mat<N>(back - g.matrix())) > 1e-9 * scale)
    throw ConvergenceFailure("group_log: g is outside the principal logarithm domain");
  return a;
}

/// X_u(x) = u x, the Killing field of u evaluated at x.
template <int N>
TangentVector<N> killing_field(const AlgebraVector<N>& u, const HPoint<N>& x) {
  return TangentVector<N>(x, Vec<N>(u.matrix() * x.coords()));
}

/// The pure boost sending the base point to x.
template <int N>
Isometry<N> boost_to(const HPoint<N>& x) {
  const Vec<N>& v = x.coords();
  const auto s = v.template head<N>();
  Mat<N> m;
  m.template topLeftCorner<N, N>() =
      Eigen::Matrix<double, N, N>::Identity() + s * s.transpose() / (1.0 + v(N));
  m.template topRightCorner<N, 1>() = s;
  m.template bottomLeftCorner<1, N>() = s.transpose();
  m(N, N) = v(N);
  return Isometry<N>::adopt(m);
}

/// An isometry sending x to y (the composite of two pure boosts).
template <int N>
Isometry<N> transport(const HPoint<N>& x, const HPoint<N>& y) {
  return boost_to(y) * boost_to(x).inverse();
}

/// Orthonormal positively oriented tangent frame at x: the first n columns
/// of the pure boost to x. Deterministic and smooth in x.
template <int N>
Frame<N> frame(const HPoint<N>& x) {
  return boost_to(x).matrix().template leftCols<N>();
}

/// Coordinates of an ambient tangent vector in the frame at x.
template <int N>
TangentCoords<N> frame_coords(const HPoint<N>& x, const Vec<N>& v) {
  const Frame<N> e = frame(x);
  return e.transpose() * LorentzForm<N>::matrix() * v;
}

template <int N>
Vec<N> log_map(const HPoint<N>& x, const HPoint<N>& y) {
  const Vec<N> u = y.coords() + minkowski<N>(x.coords(), y.coords()) * x.coords();
  const double un = std::sqrt(std::max(0.0, minkowski<N>(u, u)));
  const double d = dist(x, y);
  if (un < 1e-300) return Vec<N>::Zero();
  return (d / un) * u;
}

template <int N>
HPoint<N> exp_map(const HPoint<N>& x, const Vec<N>& v) {
  const double r = std::sqrt(std::max(0.0, minkowski<N>(v, v)));
  const double shc = r < 1e-8 ? 1.0 + r * r / 6.0 : std::sinh(r) / r;
  return HPoint<N>(Vec<N>(std::cosh(r) * x.coords() + shc * v));
}

/// Point at fraction t along the geodesic from x to y.
template <int N>
HPoint<N> geodesic_point(const HPoint<N>& x, const HPoint<N>& y, double t) {
  return exp_map(x, Vec<N>(t * log_map(x, y)));
}

template <int N>
struct StabilizerSplit {
  std::vector<AlgebraVector<N>> stabilizer;  // k_x, kappa-orthonormal for -kappa
  std::vector<AlgebraVector<N>> complement;  // k_x^perp, kappa-orthonormal
};

/// Killing-orthonormal bases of the stabilizer algebra of x and of its
/// kappa-orthogonal complement, obtained by conjugating the base-point
/// rotations and boosts by the pure boost to x.
template <int N>
StabilizerSplit<N> stabilizer_split(const HPoint<N>& x) {
  const Isometry<N> h = boost_to(x);
  StabilizerSplit<N> out;
  for (int i = 0; i < N; ++i) out.complement.push_back(AlgebraVector<N>::boost(i).conjugated(h));
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) out.stabilizer.push_back(AlgebraVector<N>::rotation(i, j).conjugated(h));
  return out;
}

/// Rotation of the tangent space at x by the n x n orthogonal matrix u,
/// expressed in the frame at x.
template <int N>
Isometry<N> stabilizer_element(const HPoint<N>& x, const Eigen::Matrix<double, N, N>& u) {
  Mat<N> k = Mat<N>::Identity();
  k.template topLeftCorner<N, N>() = u;
  const Isometry<N> h = boost_to(x);
  return h * Isometry<N>::adopt(k) * h.inverse();
}

namespace detail {

// Finite vertices are normalized to <v,v> = -1, which roundoff keeps
// well away from 0 far out where a relative test would not.
inline bool is_null(const Vec<2>& v) { return std::abs(minkowski<2>(v, v)) < 0.5; }

}  // namespace detail

/// Signed area of the geodesic triangle abc, positive when det[a b c] > 0.
/// Vertices are unit timelike vectors or null vectors (ideal points).
/// tan(A/2) = det[a b c] / (1 - <a,b> - <b,c> - <c,a>); for ideal
/// vertices the homogeneous limit keeps only the top-degree terms.
inline double signed_area(const Vec<2>& a, const Vec<2>& b, const Vec<2>& c) {
  Mat<2> m;
  m << a, b, c;
  const double det = m.determinant();
  if (det == 0.0) return 0.0;
  const int ia = detail::is_null(a), ib = detail::is_null(b), ic = detail::is_null(c);
  const int ideal = ia + ib + ic;
  if (ideal == 3) return std::copysign(std::numbers::pi, det);
  double den = ideal == 0 ? 1.0 : 0.0;
  if (ia + ib == ideal) den -= minkowski<2>(a, b);
  if (ib + ic == ideal) den -= minkowski<2>(b, c);
  if (ic + ia == ideal) den -= minkowski<2>(c, a);
  return 2.0 * std::atan2(det, den);
}

}  // namespace hypvol

#endif  // HYPVOL_LORENTZ_HPP
