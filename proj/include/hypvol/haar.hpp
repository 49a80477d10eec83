#ifndef HYPVOL_HAAR_HPP
#define HYPVOL_HAAR_HPP

// Haar sampling on SO(n), Monte-Carlo averages of det(I - U A) over it, and
// the volumes V_n of SO(n) for the Killing normalization.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "hypvol/error.hpp"

namespace hypvol {

/// Result of a Monte-Carlo average. std_error is the sample standard
/// deviation divided by sqrt(samples).
struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
};

/// Welford accumulator with an order-deterministic merge.
class McAccumulator {
 public:
  void add(double x) {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }

  void merge(const McAccumulator& o) {
    if (o.count_ == 0) return;
    if (count_ == 0) {
      *this = o;
      return;
    }
    const double n = static_cast<double>(count_ + o.count_);
    const double delta = o.mean_ - mean_;
    mean_ += delta * static_cast<double>(o.count_) / n;
    m2_ += o.m2_ + delta * delta * static_cast<double>(count_) * static_cast<double>(o.count_) / n;
    count_ += o.count_;
  }

  std::int64_t count() const { return count_; }
  double mean() const { return mean_; }
  double variance() const { return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0; }

  McEstimate estimate(std::uint64_t seed) const {
    McEstimate e;
    e.value = mean_;
    e.samples = count_;
    e.seed = seed;
    e.std_error = count_ > 0 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0;
    return e;
  }

 private:
  std::int64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Independent generator for work chunk `chunk` of a run seeded by `seed`.
/// Results depend only on (seed, chunk), never on scheduling.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  return std::mt19937_64(seq);
}

/// Element of SO(n).
template <int N>
class Rotation {
 public:
  using Matrix = Eigen::Matrix<double, N, N>;

  Rotation() : u_(Matrix::Identity()) {}
  explicit Rotation(const Matrix& u) : u_(u) {
    if ((u_.transpose() * u_ - Matrix::Identity()).cwiseAbs().maxCoeff() > 1e-12 ||
        std::abs(u_.determinant() - 1.0) > 1e-12)
      throw InvariantViolation("Rotation: matrix is not in SO(n)");
  }

  const Matrix& matrix() const { return u_; }

 private:
  Matrix u_;
};

/// Haar-distributed rotation: Gaussian matrix, QR with positive R diagonal
/// (modified Gram-Schmidt), samples with det = -1 rejected and redrawn.
/// det Q has the sign of det G, so the rejection is decided before the QR.
template <int N, class Rng>
Rotation<N> haar_sample(Rng& rng) {
  static_assert(N >= 1 && N <= 6);
  using Matrix = Eigen::Matrix<double, N, N>;
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g;
  for (;;) {
    for (int c = 0; c < N; ++c)
      for (int r = 0; r < N; ++r) g(r, c) = normal(rng);
    if (g.determinant() > 0.0) break;
  }
  for (int c = 0; c < N; ++c) {
    for (int pass = 0; pass < 2; ++pass)
      for (int k = 0; k < c; ++k) g.col(c) -= g.col(k).dot(g.col(c)) * g.col(k);
    g.col(c).normalize();
  }
  return Rotation<N>(g);
}

/// Runtime-dimension Haar sample, 2 <= n <= 6.
template <class Rng>
Eigen::MatrixXd haar_sample(int n, Rng& rng) {
  switch (n) {
    case 2: return haar_sample<2>(rng).matrix();
    case 3: return haar_sample<3>(rng).matrix();
    case 4: return haar_sample<4>(rng).matrix();
    case 5: return haar_sample<5>(rng).matrix();
    case 6: return haar_sample<6>(rng).matrix();
    default: throw PreconditionViolation("haar_sample: need 2 <= n <= 6");
  }
}

namespace detail {

inline constexpr std::int64_t kMcChunk = 8192;

// Chunked Monte-Carlo driver: chunk c draws from substream(seed, c) and
// the per-chunk accumulators are merged in chunk order.
template <class Sampler>
McEstimate chunked_mc(std::int64_t samples, std::uint64_t seed, Sampler&& sample) {
  McAccumulator total;
  std::uint64_t chunk = 0;
  for (std::int64_t start = 0; start < samples; start += kMcChunk, ++chunk) {
    auto rng = substream(seed, chunk);
    McAccumulator acc;
    const std::int64_t stop = std::min(samples, start + kMcChunk);
    for (std::int64_t i = start; i < stop; ++i) acc.add(sample(rng));
    total.merge(acc);
  }
  return total.estimate(seed);
}

template <int N>
McEstimate det_integral_mc_fixed(const Eigen::MatrixXd& a_dyn, std::int64_t samples, std::uint64_t seed) {
  using Matrix = Eigen::Matrix<double, N, N>;
  const Matrix a = a_dyn;
  const Matrix id = Matrix::Identity();
  return chunked_mc(samples, seed, [&](std::mt19937_64& rng) {
    const Matrix u = haar_sample<N>(rng).matrix();
    return (id - u * a).determinant();
  });
}

inline Eigen::MatrixXd principal_minor(const Eigen::MatrixXd& b, const std::vector<int>& removed) {
  std::vector<int> keep;
  for (int i = 0; i < b.rows(); ++i)
    if (std::find(removed.begin(), removed.end(), i) == removed.end()) keep.push_back(i);
  Eigen::MatrixXd m(keep.size(), keep.size());
  for (std::size_t r = 0; r < keep.size(); ++r)
    for (std::size_t c = 0; c < keep.size(); ++c) m(r, c) = b(keep[r], keep[c]);
  return m;
}

}  // namespace detail

/// E_U[det(I - U A)] over Haar-distributed U in SO(n), n = A.rows().
inline McEstimate det_integral_mc(const Eigen::MatrixXd& a, std::int64_t samples, std::uint64_t seed) {
  if (a.rows() != a.cols()) throw DimensionMismatch("det_integral_mc: A must be square");
  if (samples < 1000) throw PreconditionViolation("det_integral_mc: need at least 1000 samples");
  switch (a.rows()) {
    case 2: return detail::det_integral_mc_fixed<2>(a, samples, seed);
    case 3: return detail::det_integral_mc_fixed<3>(a, samples, seed);
    case 4: return detail::det_integral_mc_fixed<4>(a, samples, seed);
    case 5: return detail::det_integral_mc_fixed<5>(a, samples, seed);
    case 6: return detail::det_integral_mc_fixed<6>(a, samples, seed);
    default: throw PreconditionViolation("det_integral_mc: need 2 <= n <= 6");
  }
}

/// E_U[det((U A)_P)], the principal minor with rows/columns in P removed.
/// Vanishes for 1 <= |P| <= n-1.
inline McEstimate minor_average_mc(const Eigen::MatrixXd& a, const std::vector<int>& removed,
                                   std::int64_t samples, std::uint64_t seed) {
  if (a.rows() != a.cols()) throw DimensionMismatch("minor_average_mc: A must be square");
  const int n = static_cast<int>(a.rows());
  for (int i : removed)
    if (i < 0 || i >= n) throw PreconditionViolation("minor_average_mc: index out of range");
  return detail::chunked_mc(samples, seed, [&](std::mt19937_64& rng) {
    const Eigen::MatrixXd u = haar_sample(n, rng);
    const Eigen::MatrixXd m = detail::principal_minor(u * a, removed);
    return m.size() == 0 ? 1.0 : m.determinant();
  });
}

/// Volume of the unit n-sphere, 2 pi^{(n+1)/2} / Gamma((n+1)/2).
inline double sphere_volume(int n) {
  if (n < 0) throw PreconditionViolation("sphere_volume: need n >= 0");
  const double h = 0.5 * (n + 1);
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

/// Volume of SO(n): V_1 = 1, V_{n+1} = V_n Vol(S^n).
inline double vn(int n) {
  if (n < 1 || n > 6) throw PreconditionViolation("vn: need 1 <= n <= 6");
  double v = 1.0;
  for (int k = 1; k < n; ++k) v *= sphere_volume(k);
  return v;
}

}  // namespace hypvol

#endif  // HYPVOL_HAAR_HPP
