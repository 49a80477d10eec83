#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "hypvol/equivariant_map.hpp"
#include "test_util.hpp"

using namespace hypvol;
using test_support::meshed;

namespace {

const double kPi = std::numbers::pi;

std::vector<HPoint<2>> sample_points(std::uint64_t seed, int n, double radius = 2.0) {
  std::mt19937_64 rng(seed);
  std::vector<HPoint<2>> out;
  for (int i = 0; i < n; ++i) out.push_back(test_support::random_point<2>(rng, radius));
  return out;
}

Representation<2> random_free_rep(std::mt19937_64& rng) {
  return Representation<2>(Presentation::punctured(1, 1),
                           {test_support::random_isometry<2>(rng, 1.5), test_support::random_isometry<2>(rng, 1.5)});
}

}  // namespace

TEST(EquivariantMap, IdentityReproducesPoints) {
  const auto ms = meshed(closed_surface(2), 2);
  const auto f = identity_map(ms.domain, ms.mesh);
  EXPECT_LT(f.equivariance_residual(), 1e-10);
  for (const auto& x : sample_points(1, 100)) {
    EXPECT_LT(dist(f(x), x), 1e-10);
    EXPECT_LT((f.differential(x) - Eigen::Matrix2d::Identity()).norm(), 1e-9);
  }
  EXPECT_THROW(identity_map(meshed(punctured_torus_surface(), 1).domain, meshed(punctured_torus_surface(), 1).mesh),
               PreconditionViolation);
}

TEST(EquivariantMap, ConstantMap) {
  const auto ms = meshed(closed_surface(2), 2);
  const auto triv = trivial_representation<2>(ms.surface.j.presentation());
  const HPoint<2> x0 = exp_map(HPoint<2>::base(), Vec<2>(0.3, -0.2, 0.0));
  const auto f = constant_map(ms.domain, ms.mesh, triv, x0);
  for (const auto& x : sample_points(2, 50)) {
    EXPECT_LT(dist(f(x), x0), 1e-12);
    EXPECT_LT(f.differential(x).norm(), 1e-12);
  }
  EXPECT_DOUBLE_EQ(f.energy(), 0.0);
  EXPECT_THROW(constant_map(ms.domain, ms.mesh, ms.surface.j, HPoint<2>::base()), PreconditionViolation);
}

TEST(EquivariantMap, EquivariantAcrossPairings) {
  const auto ms = meshed(closed_surface(2), 3);
  const auto f = test_support::relaxed_elliptic_map(ms, 3);
  EXPECT_LT(f.equivariance_residual(), 1e-12);
  const auto& j = ms.surface.j;
  int k = 0;
  for (const auto& x : sample_points(4, 200)) {
    const int gen = k++ % j.generator_count();
    EXPECT_LT(dist(f(j.image(gen)(x)), f.rho().image(gen)(f(x))), 1e-9);
  }
}

TEST(EquivariantMap, SampleFlagsMeshVertices) {
  const auto ms = meshed(closed_surface(2), 2);
  const auto f = identity_map(ms.domain, ms.mesh);
  const auto s = f.sample(HPoint<2>::adopt(ms.mesh->points[ms.mesh->triangles[5][0]], 1e-9));
  EXPECT_NEAR(s.min_barycentric, 0.0, 1e-12);
  const Vec<2> c = ms.mesh->points[ms.mesh->triangles[5][0]] + ms.mesh->points[ms.mesh->triangles[5][1]] +
                   ms.mesh->points[ms.mesh->triangles[5][2]];
  const auto sc = f.sample(HPoint<2>(c));
  EXPECT_EQ(sc.triangle, 5);
  EXPECT_GT(sc.min_barycentric, 0.2);
}

TEST(Relax, EnergyNeverIncreasesAndReachesContraction) {
  const auto ms = meshed(closed_surface(2), 3);
  std::mt19937_64 rng(9);
  const auto rho = random_elliptic_representation<2>(ms.surface.j.presentation(), rng);
  const auto f0 = random_map(ms.domain, ms.mesh, rho, HPoint<2>::base(), 1.0, 10);
  EXPECT_GT(measure_lipschitz(f0, 1).lambda, 1.0);
  RelaxReport rep;
  const auto f = relax(f0, 40, 0.5, &rep);
  ASSERT_EQ(rep.energy.size(), 41u);
  for (std::size_t i = 1; i < rep.energy.size(); ++i) EXPECT_LE(rep.energy[i], rep.energy[i - 1]);
  EXPECT_LT(rep.energy.back(), 0.1 * rep.energy.front());
  EXPECT_LT(measure_lipschitz(f, 2).lambda, 1.0);
  EXPECT_LT(f.equivariance_residual(), 1e-12);
  EXPECT_THROW(relax(f0, 1, 0.0), PreconditionViolation);
}

TEST(Relax, ConstantAndIdentityAreFixed) {
  const auto ms = meshed(closed_surface(2), 3);
  const auto triv = trivial_representation<2>(ms.surface.j.presentation());
  const auto c = relax(constant_map(ms.domain, ms.mesh, triv, HPoint<2>::base()), 5, 0.5);
  for (const auto& y : c.images()) EXPECT_LT((y - HPoint<2>::base().coords()).norm(), 1e-12);
  const auto id = relax(identity_map(ms.domain, ms.mesh), 10, 0.5);
  EXPECT_NEAR(measure_lipschitz(id, 2).lambda, 1.0, 1e-6);
}

TEST(Lipschitz, ConstantAndIdentity) {
  const auto ms = meshed(closed_surface(2), 3);
  const auto triv = trivial_representation<2>(ms.surface.j.presentation());
  const auto c = constant_map(ms.domain, ms.mesh, triv, HPoint<2>::base());
  const auto id = identity_map(ms.domain, ms.mesh);
  for (auto m : {LipschitzMethod::EdgeRatio, LipschitzMethod::DifferentialBound}) {
    EXPECT_NEAR(measure_lipschitz(c, 2, m).lambda, 0.0, 1e-12);
    EXPECT_NEAR(measure_lipschitz(id, 2, m).lambda, 1.0, 1e-6);
  }
  const auto cert = measure_lipschitz(id, 2);
  EXPECT_NEAR(cert.h, ms.mesh->h / 4.0, 1e-15);
  EXPECT_NEAR(cert.margin, 1.0 - cert.lambda, 1e-15);
  EXPECT_THROW(measure_lipschitz(id, 7), PreconditionViolation);
}

TEST(Lipschitz, InvariantUnderTargetIsometry) {
  const auto ms = meshed(closed_surface(2), 3);
  const auto f = test_support::relaxed_elliptic_map(ms, 5);
  std::mt19937_64 rng(6);
  const Isometry<2> h = test_support::random_isometry<2>(rng, 1.0);
  const auto rho_h = conjugate(f.rho(), h.matrix());
  std::vector<Vec<2>> imgs;
  for (const auto& y : f.images()) imgs.push_back(h.matrix() * y);
  const EquivariantMap g(ms.domain, ms.mesh, rho_h, imgs);
  for (auto m : {LipschitzMethod::EdgeRatio, LipschitzMethod::DifferentialBound})
    EXPECT_NEAR(measure_lipschitz(g, 2, m).lambda, measure_lipschitz(f, 2, m).lambda, 1e-9);
}

TEST(LengthSpectrum, Basics) {
  const auto j = fuchsian_closed(2);
  EXPECT_NEAR(length_spectrum_ratio(j, j, 3), 1.0, 1e-9);
  EXPECT_EQ(length_spectrum_ratio(j, trivial_representation<2>(j.presentation()), 3), 0.0);
  std::mt19937_64 rng(1);
  EXPECT_NEAR(length_spectrum_ratio(j, random_elliptic_representation<2>(j.presentation(), rng), 3), 0.0, 1e-12);
  EXPECT_THROW(length_spectrum_ratio(j, fuchsian_punctured_torus(), 2), DimensionMismatch);
}

TEST(LengthSpectrum, MonotoneInWordLength) {
  const auto j = fuchsian_punctured_torus();
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    const auto rho = random_free_rep(rng);
    double prev = 0.0;
    for (int L = 1; L <= 5; ++L) {
      const double r = length_spectrum_ratio(j, rho, L);
      EXPECT_GE(r, prev);
      prev = r;
    }
  }
}

TEST(PinCusps, TrivialRhoRelaxesToConstant) {
  const auto ms = meshed(punctured_torus_surface(), 3);
  const auto triv = trivial_representation<2>(ms.surface.j.presentation());
  const auto c = pin_cusps(constant_map(ms.domain, ms.mesh, triv, HPoint<2>::base()), {HPoint<2>::base()});
  for (const auto& y : c.images()) EXPECT_LT((y - HPoint<2>::base().coords()).norm(), 1e-12);
  const auto f0 = pin_cusps(random_map(ms.domain, ms.mesh, triv, HPoint<2>::base(), 0.5, 3), {HPoint<2>::base()});
  for (int v = 0; v < ms.mesh->vertex_count(); ++v)
    if (!ms.mesh->is_free(v)) EXPECT_LT((f0.image(v) - HPoint<2>::base().coords()).norm(), 1e-12);
  RelaxReport rep;
  const auto f = relax(f0, 200, 0.5, &rep);
  EXPECT_LT(rep.energy.back(), 1e-3 * rep.energy.front());
  EXPECT_LT(measure_lipschitz(f, 1).lambda, 0.1);
}

TEST(PinCusps, RejectsParabolicAndWrongCount) {
  const auto ms = meshed(punctured_torus_surface(), 2);
  const auto triv = trivial_representation<2>(ms.surface.j.presentation());
  const EquivariantMap fj(ms.domain, ms.mesh, ms.surface.j, std::vector<Vec<2>>(ms.mesh->vertex_count(), HPoint<2>::base().coords()));
  EXPECT_THROW(pin_cusps(fj, {HPoint<2>::base()}), PreconditionViolation);
  const auto c = constant_map(ms.domain, ms.mesh, triv, HPoint<2>::base());
  EXPECT_THROW(pin_cusps(c, {}), DimensionMismatch);
}

TEST(PinCusps, EllipticPuncturedTorusContracts) {
  const auto ms = meshed(punctured_torus_surface(), 3);
  const auto f = test_support::relaxed_elliptic_map(ms, 7);
  EXPECT_TRUE(f.pinned());
  EXPECT_LT(measure_lipschitz(f, 2).lambda, 1.0);
  EXPECT_LT(f.equivariance_residual(), 1e-12);
}

TEST(KarcherMean, SymmetricConfiguration) {
  const HPoint<2> c = exp_map(HPoint<2>::base(), Vec<2>(0.4, 0.1, 0.0));
  const Frame<2> e = frame(c);
  std::vector<HPoint<2>> pts;
  for (int k = 0; k < 5; ++k) {
    const double t = 2.0 * kPi * k / 5;
    pts.push_back(exp_map(c, Vec<2>(0.8 * (std::cos(t) * e.col(0) + std::sin(t) * e.col(1)))));
  }
  EXPECT_LT(dist(karcher_mean(pts, std::vector<double>(5, 1.0), HPoint<2>::base()), c), 1e-10);
  // two points: the weighted mean sits at the weighted fraction of the geodesic
  const auto m = karcher_mean({pts[0], pts[1]}, {1.0, 3.0}, pts[0]);
  EXPECT_LT(dist(m, geodesic_point(pts[0], pts[1], 0.75)), 1e-10);
}

TEST(RefineMap, AgreesWithCoarseMap) {
  const auto ms = meshed(closed_surface(2), 2);
  const auto f = test_support::relaxed_elliptic_map(ms, 8);
  const auto g = refine_map(f);
  EXPECT_EQ(g.mesh().refine, 3);
  for (int v = 0; v < g.mesh().vertex_count(); ++v)
    EXPECT_LT(dist(HPoint<2>(g.image(v)), f(HPoint<2>::adopt(g.mesh().points[v], 1e-9))), 1e-9);
  EXPECT_NEAR(measure_lipschitz(g, 1).lambda, measure_lipschitz(f, 2).lambda, 0.05);
}

TEST(MapFile, RoundTripIsExact) {
  for (const auto& s : {closed_surface(2), punctured_torus_surface()}) {
    const auto ms = meshed(s, 2);
    const auto f = test_support::relaxed_elliptic_map(ms, 12, 5);
    std::stringstream ss;
    write_map(ss, f, 42);
    const auto text = ss.str();
    const auto loaded = read_map(ss);
    EXPECT_EQ(loaded.seed, 42u);
    EXPECT_EQ(loaded.map.pinned(), f.pinned());
    for (int v = 0; v < f.mesh().vertex_count(); ++v) EXPECT_EQ(loaded.map.image(v), f.image(v));
    std::stringstream again;
    write_map(again, loaded.map, 42);
    EXPECT_EQ(again.str(), text);
  }
}

TEST(MapFile, MalformedInputRejected) {
  const auto ms = meshed(closed_surface(2), 1);
  const auto f = test_support::relaxed_elliptic_map(ms, 12, 2);
  std::stringstream ss;
  write_map(ss, f);
  const std::string text = ss.str();
  auto load = [](std::string t) {
    std::istringstream is(t);
    return read_map(is);
  };
  EXPECT_THROW(load("hypvol-map 2\n" + text.substr(text.find('\n') + 1)), ParseError);
  EXPECT_THROW(load(text.substr(0, text.size() / 2)), ParseError);
  std::string wrong_refine = text;
  wrong_refine.replace(wrong_refine.find("refine 1"), 8, "refine 2");
  EXPECT_THROW(load(wrong_refine), InvariantViolation);
  std::string bad_number = text;
  bad_number.replace(bad_number.find("images"), 6, "imagez");
  EXPECT_THROW(load(bad_number), ParseError);
}
