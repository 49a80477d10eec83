#ifndef HYPVOL_SURFACE_HPP
#define HYPVOL_SURFACE_HPP

// Representations of surface groups into SO_0(n,1): Fuchsian holonomies,
// elliptic test representations, translation lengths and the Euler class.

#include <Eigen/Dense>

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hypvol/error.hpp"
#include "hypvol/lorentz.hpp"
#include "hypvol/words.hpp"

namespace hypvol {

/// Presentation plus one image per generator.
template <int N>
class Representation {
 public:
  Representation() = default;

  Representation(Presentation p, std::vector<Isometry<N>> images, double tol = 1e-9)
      : pres_(std::move(p)), images_(std::move(images)) {
    if (static_cast<int>(images_.size()) != pres_.generator_count())
      throw DimensionMismatch("representation: need one image per generator");
    if (relator_residual() > tol) throw InvariantViolation("representation: relator is not mapped to the identity");
  }

  const Presentation& presentation() const { return pres_; }
  const std::vector<Isometry<N>>& images() const { return images_; }
  const Isometry<N>& image(int gen) const { return images_.at(gen); }
  int generator_count() const { return static_cast<int>(images_.size()); }

  Isometry<N> operator()(const Letter& l) const {
    return l.exp > 0 ? images_.at(l.gen) : images_.at(l.gen).inverse();
  }

  Isometry<N> operator()(const Word& w) const {
    Mat<N> m = Mat<N>::Identity();
    for (const Letter& l : w.letters()) m = m * (*this)(l).matrix();
    return Isometry<N>::adopt(m, 1e-6);
  }

  /// max |rho(relator) - Id|; zero for free groups.
  double relator_residual() const {
    if (pres_.relator().empty()) return 0.0;
    Mat<N> m = Mat<N>::Identity();
    for (const Letter& l : pres_.relator().letters()) m = m * (*this)(l).matrix();
    return detail::max_abs(Mat<N>(m - Mat<N>::Identity()));
  }

 private:
  Presentation pres_ = Presentation::closed(1);
  std::vector<Isometry<N>> images_;
};

template <int N>
Isometry<N> evaluate(const Representation<N>& rep, const Word& w) {
  return rep(w);
}

template <int N>
Representation<N> trivial_representation(const Presentation& p) {
  return Representation<N>(p, std::vector<Isometry<N>>(p.generator_count()));
}

/// Conjugate c rep c^{-1} by a Lorentz matrix c preserving the upper sheet,
/// possibly orientation reversing.
template <int N>
Representation<N> conjugate(const Representation<N>& rep, const Mat<N>& c) {
  const Mat<N> j = LorentzForm<N>::matrix();
  const Mat<N> ci = j * c.transpose() * j;
  if (detail::max_abs(Mat<N>(ci * c - Mat<N>::Identity())) > 1e-9 * std::max(1.0, c.squaredNorm()) || c(N, N) <= 0.0)
    throw PreconditionViolation("conjugate: matrix is not an isometry of H^n");
  std::vector<Isometry<N>> imgs;
  for (const auto& g : rep.images()) imgs.push_back(Isometry<N>::adopt(c * g.matrix() * ci));
  // roundoff in the relator product may grow by the condition number of c
  const double k = std::max(1.0, detail::max_abs(c) * detail::max_abs(ci));
  return Representation<N>(rep.presentation(), std::move(imgs), 1e-9 * k);
}

/// Generators act as rotations by the given angles about a common point,
/// all in the same plane. Abelian, so any relator holds exactly.
template <int N>
Representation<N> elliptic_representation(const Presentation& p, const std::vector<double>& angles,
                                          const HPoint<N>& center = HPoint<N>::base()) {
  if (static_cast<int>(angles.size()) != p.generator_count())
    throw DimensionMismatch("elliptic_representation: need one angle per generator");
  const Isometry<N> h = boost_to(center);
  std::vector<Isometry<N>> imgs;
  for (double t : angles) {
    Mat<N> r = Mat<N>::Identity();
    r(0, 0) = std::cos(t);
    r(0, 1) = -std::sin(t);
    r(1, 0) = std::sin(t);
    r(1, 1) = std::cos(t);
    imgs.push_back(h * Isometry<N>::adopt(r) * h.inverse());
  }
  return Representation<N>(p, std::move(imgs));
}

template <int N, class Rng>
Representation<N> random_elliptic_representation(const Presentation& p, Rng& rng,
                                                 const HPoint<N>& center = HPoint<N>::base()) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::vector<double> a(p.generator_count());
  for (double& t : a) t = angle(rng);
  return elliptic_representation<N>(p, a, center);
}

/// Log of the spectral radius; 0 for elliptic and parabolic elements.
template <int N>
double translation_length(const Isometry<N>& g) {
  if constexpr (N == 2) {
    const double c = 0.5 * (g.matrix().trace() - 1.0);
    return c > 1.0 ? std::acosh(c) : 0.0;
  } else {
    Eigen::EigenSolver<Mat<N>> es(g.matrix(), false);
    double r = 0.0;
    for (int i = 0; i <= N; ++i) r = std::max(r, std::abs(es.eigenvalues()(i)));
    const double l = std::log(r);
    // parabolic Jordan blocks perturb eigenvalues by ~eps^{1/3}
    return l > 1e-5 ? l : 0.0;
  }
}

namespace detail {

using LMat3 = Eigen::Matrix<long double, 3, 3>;
using LVec3 = Eigen::Matrix<long double, 3, 1>;

inline long double lip(const LVec3& a, const LVec3& b) { return a(0) * b(0) + a(1) * b(1) - a(2) * b(2); }

inline LMat3 linverse(const LMat3& m) {
  LMat3 j = LMat3::Identity();
  j(2, 2) = -1;
  return j * m.transpose() * j;
}

// Positive frame [unit tangent at p toward q, completing tangent, p].
inline LMat3 segment_frame(const LVec3& p, const LVec3& q) {
  LVec3 v = q + lip(p, q) * p;
  v /= std::sqrt(lip(v, v));
  LVec3 w = p.cross(v);
  w(2) = -w(2);
  w /= std::sqrt(lip(w, w));
  LMat3 f;
  f.col(0) = v;
  f.col(1) = w;
  f.col(2) = p;
  if (f.determinant() < 0) f.col(1) = -w;
  return f;
}

// The isometry sending p to p2 and q to q2 (equal segment lengths).
inline LMat3 segment_map(const LVec3& p, const LVec3& q, const LVec3& p2, const LVec3& q2) {
  return segment_frame(p2, q2) * linverse(segment_frame(p, q));
}

struct RegularPolygon {
  std::vector<Vec<2>> vertices;
  std::vector<Mat<2>> generators;  // a_1, b_1, ..., a_g, b_g
};

// Regular 4g-gon with angles 2 pi / 4g. a_i maps side 4i+2 onto side 4i,
// b_i maps side 4i+1 onto side 4i+3, both reversing the side direction.
// Built in extended precision so the relator closes to ~1e-11 at g = 2.
inline RegularPolygon regular_polygon(int g) {
  const int n = 4 * g;
  const long double pi = std::numbers::pi_v<long double>;
  const long double cot = 1.0L / std::tan(pi / n);
  const long double ch = cot * cot;
  const long double sh = std::sqrt(ch * ch - 1.0L);
  std::vector<LVec3> v(n);
  for (int k = 0; k < n; ++k) v[k] = LVec3(sh * std::cos(2 * pi * k / n), sh * std::sin(2 * pi * k / n), ch);
  auto at = [&](int k) { return v[((k % n) + n) % n]; };
  RegularPolygon out;
  for (const auto& x : v) out.vertices.push_back(x.cast<double>());
  for (int i = 0; i < g; ++i) {
    const LMat3 a = segment_map(at(4 * i + 2), at(4 * i + 3), at(4 * i + 1), at(4 * i));
    const LMat3 b = segment_map(at(4 * i + 3), at(4 * i + 4), at(4 * i + 2), at(4 * i + 1));
    out.generators.push_back(a.cast<double>());
    out.generators.push_back(linverse(b).cast<double>());
  }
  return out;
}

// Adjoint of a 2x2 matrix of determinant 1 on sl_2 with basis
// diag(1,-1), [[0,1],[1,0]], [[0,1],[-1,0]] (Killing form diag(1,1,-1)).
inline Mat<2> sl2_adjoint(const Eigen::Matrix2d& a) {
  const Eigen::Matrix2d ai = a.inverse();
  std::array<Eigen::Matrix2d, 3> x;
  x[0] << 1, 0, 0, -1;
  x[1] << 0, 1, 1, 0;
  x[2] << 0, 1, -1, 0;
  Mat<2> m;
  for (int k = 0; k < 3; ++k) {
    const Eigen::Matrix2d y = a * x[k] * ai;
    m(0, k) = y(0, 0);
    m(1, k) = 0.5 * (y(0, 1) + y(1, 0));
    m(2, k) = 0.5 * (y(0, 1) - y(1, 0));
  }
  return m;
}

}  // namespace detail

/// Holonomy of the regular 4g-gon surface, generators a_1, b_1, ..., a_g, b_g.
inline Representation<2> fuchsian_closed(int genus) {
  if (genus < 2) throw PreconditionViolation("fuchsian_closed: need genus >= 2");
  const auto poly = detail::regular_polygon(genus);
  std::vector<Isometry<2>> imgs;
  for (const auto& m : poly.generators) imgs.push_back(Isometry<2>::adopt(m));
  return Representation<2>(Presentation::closed(genus), std::move(imgs));
}

/// The 2x2 seeds of the once-punctured torus holonomy.
inline std::pair<Eigen::Matrix2d, Eigen::Matrix2d> punctured_torus_seeds() {
  Eigen::Matrix2d a, b;
  a << 1, 1, 1, 2;
  b << 1, -1, -1, 2;
  return {a, b};
}

/// Once-punctured torus holonomy on the free group <a, b>; [a,b] is parabolic.
inline Representation<2> fuchsian_punctured_torus() {
  const auto [a, b] = punctured_torus_seeds();
  std::vector<Isometry<2>> imgs{Isometry<2>::adopt(detail::sl2_adjoint(a)),
                                Isometry<2>::adopt(detail::sl2_adjoint(b))};
  return Representation<2>(Presentation::punctured(1, 1), std::move(imgs));
}

namespace detail {

// Boundary-circle action phi -> arg of g (cos phi, sin phi, 1).
inline double circle_image(const Mat<2>& g, double phi) {
  const Vec<2> w = g * Vec<2>(std::cos(phi), std::sin(phi), 1.0);
  return std::atan2(w(1), w(0));
}

inline double wrap_angle(double a) {
  const double tau = 2.0 * std::numbers::pi;
  a = std::fmod(a + std::numbers::pi, tau);
  if (a < 0) a += tau;
  return a - std::numbers::pi;
}

// Lift of the circle action to R: F(x) = x + d(x) + 2 pi shift, where d is
// the continuous displacement with d(0) in [-pi, pi), tracked by adaptive
// unwrapping from 0.
struct CircleLift {
  Mat<2> m;
  double shift = 0.0;

  double displacement(double x) const {
    const double tau = 2.0 * std::numbers::pi;
    const double x0 = x - tau * std::floor(x / tau);
    double prev = circle_image(m, 0.0);
    double d = wrap_angle(prev);
    double t = 0.0, step = 0.05;
    while (t < x0) {
      const double dt = std::min(step, x0 - t);
      const double img = circle_image(m, t + dt);
      const double inc = wrap_angle(img - prev);
      if (std::abs(inc) > 0.5 && dt > 1e-12) {
        step = 0.5 * dt;
        continue;
      }
      d += inc - dt;
      t += dt;
      prev = img;
      step = std::min(2.0 * step, 0.05);
    }
    return d;
  }

  double operator()(double x) const { return x + displacement(x) + 2.0 * std::numbers::pi * shift; }
};

inline CircleLift lift_letter(const Representation<2>& rep, const Letter& l) {
  const Mat<2> g = rep.image(l.gen).matrix();
  if (l.exp > 0) return {g, 0.0};
  // the inverse lift must undo the normalized lift of g exactly
  CircleLift f{g, 0.0};
  CircleLift inv{rep.image(l.gen).inverse().matrix(), 0.0};
  const double back = f(inv(0.0));
  inv.shift = -std::round(back / (2.0 * std::numbers::pi));
  return inv;
}

}  // namespace detail

/// Euler class as the translation number of the lifted relator, divided by
/// 2 pi. The standard Fuchsian construction has e = 2g - 2.
inline int euler_class(const Representation<2>& rep) {
  if (!rep.presentation().is_closed()) throw PreconditionViolation("euler_class: needs a closed surface group");
  std::vector<detail::CircleLift> lifts;
  for (const Letter& l : rep.presentation().relator().letters()) lifts.push_back(detail::lift_letter(rep, l));
  const double tau = 2.0 * std::numbers::pi;
  double sum = 0.0;
  std::vector<double> t;
  for (double x : {0.1, 1.3, 2.9, 4.4, 5.7}) {
    double y = x;
    for (auto it = lifts.rbegin(); it != lifts.rend(); ++it) y = (*it)(y);
    t.push_back((y - x) / tau);
    sum += t.back();
  }
  const double mean = sum / static_cast<double>(t.size());
  const double e = std::round(mean);
  for (double v : t)
    if (std::abs(v - e) > 1e-6)
      throw InvariantViolation("euler_class: lifted relator is not an integer translation");
  return static_cast<int>(e);
}

// --- persistence --------------------------------------------------------

namespace detail {

inline std::string fmt17(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

inline double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError("bad number '" + s + "'");
  }
  if (used != s.size()) throw ParseError("bad number '" + s + "'");
  return v;
}

inline int parse_int(const std::string& s) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    throw ParseError("bad integer '" + s + "'");
  }
  if (used != s.size()) throw ParseError("bad integer '" + s + "'");
  return v;
}

// Unsigned decimal; std::from_chars rejects signs and whitespace.
inline std::uint64_t parse_uint64(const std::string& s) {
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty()) throw ParseError("bad unsigned integer '" + s + "'");
  return v;
}

// Reads "key value..." lines, skipping blanks and '#' comments.
inline bool next_line(std::istream& is, std::istringstream& line) {
  std::string s;
  while (std::getline(is, s)) {
    const auto p = s.find_first_not_of(" \t\r");
    if (p == std::string::npos || s[p] == '#') continue;
    line = std::istringstream(s);
    return true;
  }
  return false;
}

inline void expect_key(std::istream& is, const std::string& key, std::string& rest) {
  std::istringstream line;
  if (!next_line(is, line)) throw ParseError("unexpected end of file, wanted '" + key + "'");
  std::string k;
  line >> k;
  if (k != key) throw ParseError("expected '" + key + "', found '" + k + "'");
  std::getline(line, rest);
  const auto p = rest.find_first_not_of(' ');
  rest = p == std::string::npos ? "" : rest.substr(p);
}

template <int N>
void write_matrix(std::ostream& os, const Mat<N>& m) {
  for (int r = 0; r <= N; ++r) {
    for (int c = 0; c <= N; ++c) os << (c ? " " : "") << fmt17(m(r, c));
    os << '\n';
  }
}

template <int N>
Mat<N> read_matrix(std::istream& is) {
  Mat<N> m;
  for (int r = 0; r <= N; ++r) {
    std::istringstream line;
    if (!next_line(is, line)) throw ParseError("matrix: unexpected end of file");
    for (int c = 0; c <= N; ++c) {
      std::string tok;
      if (!(line >> tok)) throw ParseError("matrix: short row");
      m(r, c) = parse_double(tok);
    }
  }
  return m;
}

}  // namespace detail

template <int N>
void write_representation(std::ostream& os, const Representation<N>& rep) {
  const auto& p = rep.presentation();
  os << "hypvol-representation 1\n";
  os << "n " << N << '\n';
  os << "genus " << p.genus() << '\n';
  os << "punctures " << p.punctures() << '\n';
  os << "generators " << rep.generator_count() << '\n';
  for (int i = 0; i < rep.generator_count(); ++i) {
    os << "image " << i << '\n';
    detail::write_matrix<N>(os, rep.image(i).matrix());
  }
}

/// Matrices are taken as stored (validated, not re-projected), so a
/// save/load round trip is bit-exact.
template <int N>
Representation<N> read_representation(std::istream& is) {
  std::string v;
  detail::expect_key(is, "hypvol-representation", v);
  if (v != "1") throw ParseError("representation: unsupported version " + v);
  detail::expect_key(is, "n", v);
  if (detail::parse_int(v) != N) throw DimensionMismatch("representation: file has n = " + v);
  detail::expect_key(is, "genus", v);
  const int genus = detail::parse_int(v);
  detail::expect_key(is, "punctures", v);
  const int punct = detail::parse_int(v);
  detail::expect_key(is, "generators", v);
  const int count = detail::parse_int(v);
  const Presentation p = Presentation::make(genus, punct);
  if (count != p.generator_count()) throw ParseError("representation: generator count does not match presentation");
  std::vector<Isometry<N>> imgs;
  for (int i = 0; i < count; ++i) {
    detail::expect_key(is, "image", v);
    if (detail::parse_int(v) != i) throw ParseError("representation: images out of order");
    imgs.push_back(Isometry<N>::adopt(detail::read_matrix<N>(is)));
  }
  return Representation<N>(p, std::move(imgs));
}

template <int N>
void save_representation(const std::string& path, const Representation<N>& rep) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  write_representation(os, rep);
}

template <int N>
Representation<N> load_representation(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot read " + path);
  return read_representation<N>(is);
}

}  // namespace hypvol

#endif  // HYPVOL_SURFACE_HPP
