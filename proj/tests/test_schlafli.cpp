#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "hypvol/schlafli.hpp"
#include "hypvol/volume.hpp"
#include "test_util.hpp"

using namespace hypvol;

namespace {

const double kPi = std::numbers::pi;

template <int N>
HPoint<N> at_distance(const Eigen::Matrix<double, N, 1>& dir, double r) {
  Vec<N> v = Vec<N>::Zero();
  v.template head<N>() = r * dir.normalized();
  return exp_map(HPoint<N>::base(), v);
}

Simplex<3> regular_tetrahedron(double r) {
  return Simplex<3>({at_distance<3>(Eigen::Vector3d(1, 1, 1), r), at_distance<3>(Eigen::Vector3d(1, -1, -1), r),
                     at_distance<3>(Eigen::Vector3d(-1, 1, -1), r), at_distance<3>(Eigen::Vector3d(-1, -1, 1), r)});
}

template <int N>
Simplex<N> random_simplex(std::mt19937_64& rng) {
  for (;;) {
    std::array<HPoint<N>, N + 1> v;
    for (auto& p : v) p = test_support::random_point<N>(rng, 1.0);
    try {
      return Simplex<N>(v);
    } catch (const PreconditionViolation&) {
    }
  }
}

// Volume from the angles alone: shrink the simplex to a vertex-free point
// along x_i(t) = geodesic_point(o, x_i, t) and integrate the variation
// -1/2 sum l_ij dtheta_ij / dt over t in [0, 1] by composite Simpson.
double volume_by_schlafli_integration(const Simplex<3>& s) {
  const HPoint<3> o = HPoint<3>::base();
  auto at = [&](double t) {
    std::array<HPoint<3>, 4> v;
    for (int i = 0; i < 4; ++i) v[i] = geodesic_point(o, s.vertex(i), t);
    return Simplex<3>(v);
  };
  auto integrand = [&](double t) {
    const double h = 1e-5;
    const Simplex<3> p = at(t + h), m = at(t - h), c = at(t);
    double sum = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) sum += face_volume(c, i, j) * (dihedral_angle(p, i, j) - dihedral_angle(m, i, j)) / (2 * h);
    return -0.5 * sum;
  };
  const int n = 200;
  const double a = 1e-3, dt = (1.0 - a) / n;
  double total = integrand(a) + integrand(1.0);
  for (int k = 1; k < n; ++k) total += (k % 2 ? 4.0 : 2.0) * integrand(a + k * dt);
  // below t = a the simplex is Euclidean to O(a^2): volume scales like t^3
  return total * dt / 3.0 + simplex_volume(at(a));
}

}  // namespace

TEST(Simplex, DegenerateConfigurations) {
  const HPoint<2> a = at_distance<2>(Eigen::Vector2d(1, 0), 0.5);
  const HPoint<2> b = at_distance<2>(Eigen::Vector2d(1, 0), 1.0);
  EXPECT_EQ(simplex_volume<2>({HPoint<2>::base(), a, b}), 0.0);
  EXPECT_THROW(Simplex<2>({HPoint<2>::base(), a, b}), PreconditionViolation);
  const HPoint<3> p = at_distance<3>(Eigen::Vector3d(1, 0, 0), 0.5), q = at_distance<3>(Eigen::Vector3d(0, 1, 0), 0.5),
                  r = at_distance<3>(Eigen::Vector3d(1, 1, 0), 0.9);
  EXPECT_EQ(simplex_volume<3>({HPoint<3>::base(), p, q, r}), 0.0);
  const auto s = Simplex<2>({HPoint<2>::base(), a, at_distance<2>(Eigen::Vector2d(0, 1), 0.5)});
  EXPECT_THROW(dihedral_angle(s, 1, 1), PreconditionViolation);
  EXPECT_THROW(dihedral_angle(s, 0, 3), PreconditionViolation);
}

TEST(Simplex, TriangleAnglesAndArea) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 100; ++k) {
    const auto s = random_simplex<2>(rng);
    const auto& v = s.vertices();
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) {
      // the face missing i and j is the third vertex
      const int j = (i + 1) % 3, m = (i + 2) % 3;
      const double a = dihedral_angle(s, i, j);
      EXPECT_NEAR(a, detail::vertex_angle(v[i], v[m], v[j]), 1e-10);
      sum += a;
    }
    EXPECT_NEAR(simplex_volume(s), kPi - sum, 1e-10);
    EXPECT_NEAR(simplex_volume(s), std::abs(signed_area(v[0].coords(), v[1].coords(), v[2].coords())), 1e-10);
  }
}

TEST(Simplex, NearIdealTriangleApproachesPi) {
  // equilateral with circumradius r: cosh r = cot(pi/3) cot(alpha/2)
  auto tri = [](double r) {
    return Simplex<2>({at_distance<2>(Eigen::Vector2d(1, 0), r),
                       at_distance<2>(Eigen::Vector2d(std::cos(2 * kPi / 3), std::sin(2 * kPi / 3)), r),
                       at_distance<2>(Eigen::Vector2d(std::cos(4 * kPi / 3), std::sin(4 * kPi / 3)), r)});
  };
  for (double r : {0.5, 3.0, 6.0, 12.0}) {
    const double alpha = 2.0 * std::atan(1.0 / std::tan(kPi / 3) / std::cosh(r));
    EXPECT_NEAR(simplex_volume(tri(r)), kPi - 3.0 * alpha, 1e-12 * std::cosh(r));
  }
  EXPECT_NEAR(simplex_volume(tri(16.0)), kPi, 1e-6);
}

TEST(Simplex, FacetNormalsPointOutward) {
  std::mt19937_64 rng(2);
  const auto s = random_simplex<3>(rng);
  HPoint<3> c(Vec<3>(s.vertex(0).coords() + s.vertex(1).coords() + s.vertex(2).coords() + s.vertex(3).coords()));
  for (int i = 0; i < 4; ++i) {
    const Vec<3> n = s.facet_normal(i);
    EXPECT_NEAR(minkowski<3>(n, n), 1.0, 1e-12);
    EXPECT_LT(minkowski<3>(n, c.coords()), 0.0);
    for (int k = 0; k < 4; ++k)
      if (k != i) EXPECT_NEAR(minkowski<3>(n, s.vertex(k).coords()), 0.0, 1e-12);
  }
}

TEST(Simplex, AdditiveUnderSubdivision) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 10; ++k) {
    const auto t = random_simplex<2>(rng);
    const HPoint<2> m(Vec<2>(t.vertex(0).coords() + 2 * t.vertex(1).coords() + t.vertex(2).coords()));
    double parts = 0.0;
    for (int i = 0; i < 3; ++i) parts += simplex_volume<2>({m, t.vertex(i), t.vertex((i + 1) % 3)});
    EXPECT_NEAR(parts, simplex_volume(t), 1e-12);

    const auto s = random_simplex<3>(rng);
    const HPoint<3> c(Vec<3>(s.vertex(0).coords() + s.vertex(1).coords() + 3 * s.vertex(2).coords() + s.vertex(3).coords()));
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
      auto v = s.vertices();
      v[i] = c;
      sum += simplex_volume<3>(v);
    }
    EXPECT_NEAR(sum, simplex_volume(s), 1e-10 * simplex_volume(s));
  }
}

TEST(Simplex, IsometryInvariance) {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 10; ++k) {
    const auto g2 = test_support::random_isometry<2>(rng, 1.5);
    const auto t = random_simplex<2>(rng);
    EXPECT_NEAR(simplex_volume(t.moved(g2)), simplex_volume(t), 1e-9);
    const auto g3 = test_support::random_isometry<3>(rng, 1.5);
    const auto s = random_simplex<3>(rng);
    EXPECT_NEAR(simplex_volume(s.moved(g3)), simplex_volume(s), 1e-9);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) EXPECT_NEAR(dihedral_angle(s.moved(g3), i, j), dihedral_angle(s, i, j), 1e-9);
  }
}

TEST(Simplex, RegularTetrahedron) {
  double prev = 10.0;
  for (double r : {1e-3, 0.5, 1.0, 2.0, 4.0}) {
    const auto s = regular_tetrahedron(r);
    const double a = dihedral_angle(s, 0, 1);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) EXPECT_NEAR(dihedral_angle(s, i, j), a, 1e-10);
    EXPECT_LT(a, prev);  // larger simplices have smaller angles
    prev = a;
  }
  EXPECT_NEAR(dihedral_angle(regular_tetrahedron(1e-4), 0, 1), std::acos(1.0 / 3.0), 1e-7);
  // far out the angles approach the ideal value pi/3
  EXPECT_NEAR(dihedral_angle(regular_tetrahedron(12.0), 0, 1), kPi / 3, 1e-4);
}

TEST(Simplex, VolumeAgreesWithAngleIntegration) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 3; ++k) {
    const auto s = random_simplex<3>(rng);
    EXPECT_NEAR(simplex_volume(s), volume_by_schlafli_integration(s), 1e-6);
  }
  const auto reg = regular_tetrahedron(1.5);
  EXPECT_NEAR(simplex_volume(reg), volume_by_schlafli_integration(reg), 1e-6);
}

TEST(Schlafli, ConstantsOnRandomPaths) {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 20; ++k) {
    const auto r2 = schlafli_check(random_simplex_path<2>(rng));
    EXPECT_NEAR(r2.c, -1.0, 1e-3);
    EXPECT_TRUE(r2.second_order);
    const auto r3 = schlafli_check(random_simplex_path<3>(rng));
    EXPECT_NEAR(r3.c, -0.5, 1e-3);
    EXPECT_TRUE(r3.second_order);
    EXPECT_EQ(r3.residuals.size(), 4u);
  }
  EXPECT_EQ(schlafli_constant<2>(), -1.0);
  EXPECT_EQ(schlafli_constant<3>(), -0.5);
}

TEST(Schlafli, IsometryFamilyIsStationary) {
  std::mt19937_64 rng(7);
  const auto s = random_simplex<3>(rng);
  const auto u = test_support::random_algebra<3>(rng, 1.0);
  SimplexPath<3> p;
  p.at = [s, u](double t) { return s.moved(group_exp(u * t)); };
  p.times = {-0.05, 0.0, 0.05};
  const auto r = schlafli_check(p);
  EXPECT_LT(r.max_dvol, 1e-7);
  EXPECT_LT(r.max_rhs, 1e-7);
  EXPECT_THROW(schlafli_check(SimplexPath<3>{p.at, {}}), PreconditionViolation);
}

TEST(Schlafli, PathCsv) {
  std::mt19937_64 rng(8);
  const auto p = random_simplex_path<3>(rng);
  std::ostringstream os;
  write_path_csv(os, p, {0.0, 0.01});
  std::istringstream is(os.str());
  std::string header, row;
  std::getline(is, header);
  EXPECT_EQ(header,
            "t,volume,theta_01,theta_02,theta_03,theta_12,theta_13,theta_23,length_01,length_02,length_03,length_12,"
            "length_13,length_23");
  int rows = 0;
  while (std::getline(is, row)) {
    ++rows;
    EXPECT_EQ(std::count(row.begin(), row.end(), ','), 13);
  }
  EXPECT_EQ(rows, 2);
}
