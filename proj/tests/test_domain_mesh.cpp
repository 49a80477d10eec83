#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "hypvol/domain.hpp"
#include "hypvol/mesh.hpp"
#include "test_util.hpp"

using namespace hypvol;

namespace {

const double kPi = std::numbers::pi;

double det3(const Vec<2>& a, const Vec<2>& b, const Vec<2>& c) {
  Mat<2> m;
  m << a, b, c;
  return m.determinant();
}

// Each quotient edge carries two half-edges, so chi = V - 3F/2 + F.
int quotient_euler(const Mesh& m) {
  return static_cast<int>(orbit_representatives(m).size()) - m.triangle_count() / 2;
}

// Finite part of a cusped mesh, a surface with one boundary circle per
// cusp: chord half-edges along the horocycles stay unpaired.
int truncated_euler(const Mesh& m) {
  int v = 0, f = 0, chord = 0;
  for (int r : orbit_representatives(m)) v += !m.ideal[r];
  for (int t = 0; t < m.triangle_count(); ++t) {
    if (m.triangle_is_ideal(t)) continue;
    ++f;
    for (int i = 0; i < 3; ++i) {
      const int a = m.triangles[t][i], b = m.triangles[t][(i + 1) % 3];
      chord += !m.is_free(a) && m.cusp[a] == m.cusp[b];
    }
  }
  return v - (3 * f + chord) / 2 + f;
}

}  // namespace

TEST(Domain, ClosedGenusTwoArea) {
  const auto s = closed_surface(2);
  EXPECT_EQ(s.domain.size(), 8);
  EXPECT_NEAR(s.domain.area(), 4.0 * kPi, 1e-10);
  ASSERT_EQ(s.domain.cycles().size(), 1u);
  EXPECT_EQ(s.domain.cycles()[0].members.size(), 8u);
  double sum = 0.0;
  for (int k = 0; k < 8; ++k) sum += s.domain.angle(k);
  EXPECT_NEAR(sum, 2.0 * kPi, 1e-10);
  EXPECT_NEAR(closed_surface(3).domain.area(), 8.0 * kPi, 1e-9);
}

TEST(Domain, PunctureIsParabolic) {
  const auto s = punctured_torus_surface();
  EXPECT_TRUE(s.domain.has_cusps());
  EXPECT_NEAR(s.domain.area(), 2.0 * kPi, 1e-12);
  int ideal_cycles = 0;
  for (const auto& c : s.domain.cycles()) {
    if (!c.ideal) continue;
    ++ideal_cycles;
    ASSERT_FALSE(c.loops.empty());
    const Isometry<2> g = s.j(c.loops[0]);
    const Vec<2>& q = s.domain.vertex(c.members[0]);
    EXPECT_LT((g.matrix() * q - q).norm(), 1e-9 * q.norm());
    EXPECT_NEAR(g.matrix().trace(), 3.0, 1e-9);  // parabolic, not the identity
    EXPECT_GT((g.matrix() - Mat<2>::Identity()).norm(), 0.1);
  }
  EXPECT_EQ(ideal_cycles, 1);
}

TEST(Domain, BrokenPairingRejected) {
  const auto s = closed_surface(2);
  std::vector<Vec<2>> v;
  for (int k = 0; k < 8; ++k) v.push_back(s.domain.vertex(k));
  auto p = s.domain.pairings();
  std::swap(p[0].word, p[1].word);
  EXPECT_THROW(FundamentalDomain(s.j, v, std::vector<bool>(8, false), p), InvariantViolation);
  p = s.domain.pairings();
  p.pop_back();
  EXPECT_THROW(FundamentalDomain(s.j, v, std::vector<bool>(8, false), p), PreconditionViolation);
}

TEST(Domain, ReduceLandsInsideAndRecordsWord) {
  for (const auto& s : {closed_surface(2), punctured_torus_surface()}) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
      const HPoint<2> x = test_support::random_point<2>(rng, 3.0);
      const auto r = s.domain.reduce(x);
      EXPECT_TRUE(s.domain.contains(r.point, 1e-9));
      EXPECT_LT(dist(s.j(r.word)(r.point), x), 1e-8);
    }
  }
}

TEST(Domain, StandardSurfaces) {
  EXPECT_EQ(standard_surface(2, 0).domain.size(), 8);
  EXPECT_EQ(standard_surface(1, 1).domain.size(), 4);
  EXPECT_THROW(standard_surface(2, 1), PreconditionViolation);
}

TEST(Mesh, TrianglesPositivelyOriented) {
  for (const auto& s : {closed_surface(2), punctured_torus_surface()}) {
    const Mesh m = build_mesh(s.domain, 2);
    for (const auto& t : m.triangles) EXPECT_GT(det3(m.points[t[0]], m.points[t[1]], m.points[t[2]]), 0.0);
  }
}

TEST(Mesh, IdentificationsAndOrbitWords) {
  for (const auto& s : {closed_surface(2), punctured_torus_surface()}) {
    const Mesh m = build_mesh(s.domain, 3);
    EXPECT_FALSE(m.identifications.empty());
    for (const auto& id : m.identifications) {
      const Vec<2> y = s.j(id.word).matrix() * m.points[id.from];
      EXPECT_LT((y - m.points[id.to]).norm(), 1e-9 * std::max(1.0, y.norm()));
    }
    for (int v = 0; v < m.vertex_count(); ++v) {
      const Vec<2> y = s.j(m.word[v]).matrix() * m.points[m.rep[v]];
      EXPECT_LT((y - m.points[v]).norm(), 1e-9 * std::max(1.0, y.norm()));
      EXPECT_LE(m.rep[v], v);
    }
  }
}

TEST(Mesh, QuotientEulerCharacteristic) {
  for (int r = 0; r <= 3; ++r) {
    EXPECT_EQ(quotient_euler(build_mesh(closed_surface(2).domain, r)), -2);
    EXPECT_EQ(quotient_euler(build_mesh(closed_surface(3).domain, r)), -4);
    EXPECT_EQ(truncated_euler(build_mesh(punctured_torus_surface().domain, r)), -1);
  }
}

TEST(Mesh, RefinementHalvesEdges) {
  const auto s = closed_surface(2);
  const double h3 = build_mesh(s.domain, 3).h, h4 = build_mesh(s.domain, 4).h;
  EXPECT_GT(h3 / h4, 1.8);
  EXPECT_LT(h3 / h4, 2.2);
  const int r = refine_for_h(s.domain, 0.1);
  EXPECT_LE(build_mesh(s.domain, r).h, 0.1);
  EXPECT_GT(build_mesh(s.domain, r - 1).h, 0.1);
  EXPECT_THROW(refine_for_h(s.domain, 0.0), PreconditionViolation);
}

TEST(Mesh, CuspMembership) {
  const auto s = punctured_torus_surface();
  const Mesh m = build_mesh(s.domain, 3);
  int in_cusp = 0;
  for (int v = 0; v < m.vertex_count(); ++v) {
    if (m.is_free(v)) {
      EXPECT_FALSE(m.ideal[v]);
      continue;
    }
    ++in_cusp;
    const Vec<2>& q = s.domain.vertex(m.cusp[v]);
    EXPECT_LE(-minkowski<2>(m.points[v], q), s.domain.cusp_level() * (1.0 + 1e-9));
  }
  EXPECT_GE(in_cusp, 4);
  for (int t = 0; t < m.triangle_count(); ++t) {
    int ideal = 0;
    for (int v : m.triangles[t]) ideal += m.ideal[v];
    EXPECT_EQ(m.triangle_is_ideal(t), ideal > 0);
    EXPECT_LE(ideal, 1);
  }
}

TEST(Mesh, HorocycleCut) {
  const Vec<2> q(1.0, 0.0, 1.0);
  const Vec<2> p = HPoint<2>::base().coords();
  const Vec<2> x = detail::horocycle_cut(q, p, 0.3);
  EXPECT_NEAR(minkowski<2>(x, x), -1.0, 1e-12);
  EXPECT_NEAR(-minkowski<2>(x, q), 0.3, 1e-12);
  EXPECT_NEAR(det3(x, p, q), 0.0, 1e-12);
}

TEST(Mesh, AspectRatio) {
  EXPECT_NEAR(detail::aspect_ratio(1.0, 1.0, 1.0), 2.0 / std::sqrt(3.0), 1e-12);
  EXPECT_TRUE(std::isinf(detail::aspect_ratio(1.0, 1.0, 2.0)));
  for (const auto& s : {closed_surface(2), punctured_torus_surface()}) {
    const Mesh m = build_mesh(s.domain, 3);
    for (int t = 0; t < m.triangle_count(); ++t) {
      if (m.triangle_is_ideal(t)) continue;
      const auto& c = m.triangles[t];
      const HPoint<2> a(m.points[c[0]]), b(m.points[c[1]]), d(m.points[c[2]]);
      EXPECT_LT(detail::aspect_ratio(dist(a, b), dist(b, d), dist(d, a)), kMaxAspectRatio);
    }
  }
}

TEST(Mesh, KleinBarycentricLocatesVertices) {
  const Mesh m = build_mesh(closed_surface(2).domain, 2);
  for (int t = 0; t < m.triangle_count(); t += 7) {
    const Eigen::Vector3d b = m.klein_barycentric(t, m.points[m.triangles[t][1]]);
    EXPECT_NEAR(b(0), 0.0, 1e-12);
    EXPECT_NEAR(b(1), 1.0, 1e-12);
    EXPECT_NEAR(b(2), 0.0, 1e-12);
  }
}
