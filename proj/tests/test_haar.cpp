#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "hypvol/haar.hpp"

using namespace hypvol;

namespace {

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

}  // namespace

TEST(HaarSample, RotationInvariants) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 1000; ++t) {
    const Eigen::Matrix4d u = haar_sample<4>(rng).matrix();
    EXPECT_LT((u.transpose() * u - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(u.determinant(), 1.0, 1e-12);
  }
  for (int n = 2; n <= 6; ++n) {
    const Eigen::MatrixXd u = haar_sample(n, rng);
    EXPECT_EQ(u.rows(), n);
    EXPECT_NEAR(u.determinant(), 1.0, 1e-12);
  }
  EXPECT_THROW(haar_sample(7, rng), PreconditionViolation);
}

TEST(HaarSample, SameSeedSameStream) {
  std::mt19937_64 a(42), b(42);
  for (int t = 0; t < 100; ++t) EXPECT_EQ(haar_sample<3>(a).matrix(), haar_sample<3>(b).matrix());
}

TEST(HaarSample, MeanEntryVanishes) {
  std::mt19937_64 rng(2);
  McAccumulator acc;
  for (int t = 0; t < 100000; ++t) acc.add(haar_sample<3>(rng).matrix()(0, 0));
  const auto e = acc.estimate(2);
  EXPECT_LT(std::abs(e.value), 3.0 * e.std_error);
}

TEST(HaarSample, LeftInvariance) {
  std::mt19937_64 rng(3);
  const Eigen::Matrix3d v = Eigen::AngleAxisd(1.1, Eigen::Vector3d(0.3, -1.0, 0.5).normalized()).toRotationMatrix();
  const int m = 100000;
  std::vector<double> plain(m), moved(m);
  for (int t = 0; t < m; ++t) plain[t] = haar_sample<3>(rng).matrix().trace();
  for (int t = 0; t < m; ++t) moved[t] = (v * haar_sample<3>(rng).matrix()).trace();
  // two-sample KS critical value at the 1% level
  const double crit = 1.628 * std::sqrt(2.0 / m);
  EXPECT_LT(ks_statistic(plain, moved), crit);
}

TEST(HaarSample, TraceDistributionIsNotTheIdentity) {
  // sanity: a biased "sampler" is caught by the same KS statistic
  std::mt19937_64 rng(4);
  const int m = 20000;
  std::vector<double> plain(m), biased(m);
  for (int t = 0; t < m; ++t) plain[t] = haar_sample<3>(rng).matrix().trace();
  for (int t = 0; t < m; ++t) biased[t] = std::abs(haar_sample<3>(rng).matrix().trace());
  EXPECT_GT(ks_statistic(plain, biased), 1.628 * std::sqrt(2.0 / m));
}

TEST(McAccumulator, MergeMatchesSequential) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(1.0, 2.0);
  McAccumulator all, left, right;
  for (int i = 0; i < 1000; ++i) {
    const double x = g(rng);
    all.add(x);
    (i < 300 ? left : right).add(x);
  }
  left.merge(right);
  EXPECT_NEAR(left.mean(), all.mean(), 1e-12);
  EXPECT_NEAR(left.variance(), all.variance(), 1e-10);
}

TEST(DetIntegral, ZeroMatrixIsExact) {
  const auto e = det_integral_mc(Eigen::MatrixXd::Zero(3, 3), 2000, 7);
  EXPECT_EQ(e.value, 1.0);
  EXPECT_EQ(e.std_error, 0.0);
  EXPECT_EQ(e.samples, 2000);
  EXPECT_EQ(e.seed, 7u);
}

TEST(DetIntegral, TwoByTwoClosedForm) {
  // det(I - U diag(a,b)) = 1 - (a+b) cos t + ab averages to 1 + ab
  const Eigen::MatrixXd a = Eigen::Vector2d(0.3, -0.5).asDiagonal();
  const auto e = det_integral_mc(a, 100000, 11);
  EXPECT_LT(std::abs(e.value - 0.85), 3.0 * e.std_error);
  EXPECT_GT(e.std_error, 0.0);
}

TEST(DetIntegral, IdentityInOddDimension) {
  // U in SO(3) always has eigenvalue 1, so every sample vanishes
  const auto e = det_integral_mc(Eigen::MatrixXd::Identity(3, 3), 10000, 12);
  EXPECT_LT(std::abs(e.value), std::max(3.0 * e.std_error, 1e-12));
}

TEST(DetIntegral, RandomMatricesMatchIdentity) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n = 2; n <= 4; ++n) {
    int hits = 0;
    for (int t = 0; t < 100; ++t) {
      Eigen::MatrixXd a(n, n);
      for (int i = 0; i < a.size(); ++i) a.data()[i] = u(rng);
      const double exact = 1.0 + (n % 2 ? -1.0 : 1.0) * a.determinant();
      const auto e = det_integral_mc(a, 20000, 1000 * n + t);
      if (std::abs(e.value - exact) < 3.0 * e.std_error) ++hits;
    }
    EXPECT_GE(hits, 95) << "n = " << n;
  }
}

TEST(DetIntegral, Deterministic) {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Random(3, 3);
  const auto e1 = det_integral_mc(a, 20000, 99);
  const auto e2 = det_integral_mc(a, 20000, 99);
  EXPECT_EQ(e1.value, e2.value);
  EXPECT_EQ(e1.std_error, e2.std_error);
}

TEST(DetIntegral, RejectsSmallSampleCounts) {
  EXPECT_THROW(det_integral_mc(Eigen::MatrixXd::Zero(2, 2), 999, 1), PreconditionViolation);
  EXPECT_THROW(det_integral_mc(Eigen::MatrixXd::Zero(2, 3), 1000, 1), DimensionMismatch);
}

TEST(MinorAverage, IntermediateMinorsVanish) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd a(4, 4);
  for (int i = 0; i < a.size(); ++i) a.data()[i] = u(rng);
  const std::vector<std::vector<int>> subsets{{0}, {2}, {0, 1}, {1, 3}, {0, 2, 3}};
  for (const auto& p : subsets) {
    const auto e = minor_average_mc(a, p, 40000, 15);
    EXPECT_LT(std::abs(e.value), 3.0 * e.std_error) << "removed " << p.size();
  }
  // the full determinant does not vanish: E[det(UA)] = det A
  const auto full = minor_average_mc(a, {}, 4000, 16);
  EXPECT_NEAR(full.value, a.determinant(), 1e-10);
}

TEST(Volumes, Spheres) {
  const double pi = std::numbers::pi;
  EXPECT_NEAR(sphere_volume(1), 2 * pi, 1e-14);
  EXPECT_NEAR(sphere_volume(2), 4 * pi, 1e-14);
  EXPECT_NEAR(sphere_volume(3), 2 * pi * pi, 1e-13);
  EXPECT_NEAR(sphere_volume(4), 8 * pi * pi / 3, 1e-13);
}

TEST(Volumes, SpecialOrthogonalGroups) {
  const double pi = std::numbers::pi;
  EXPECT_EQ(vn(1), 1.0);
  EXPECT_NEAR(vn(2), 2 * pi, 1e-14);
  EXPECT_NEAR(vn(3), 8 * pi * pi, 1e-12);
  EXPECT_NEAR(vn(4), 16 * std::pow(pi, 4), 1e-10);
  EXPECT_THROW(vn(0), PreconditionViolation);
  EXPECT_THROW(vn(7), PreconditionViolation);
}
