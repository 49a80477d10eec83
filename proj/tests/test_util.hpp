#ifndef HYPVOL_TEST_UTIL_HPP
#define HYPVOL_TEST_UTIL_HPP

#include <random>

#include "hypvol/lorentz.hpp"

namespace hypvol::test_support {

template <int N>
AlgebraVector<N> random_algebra(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  typename AlgebraVector<N>::Coeffs c;
  for (int i = 0; i < c.size(); ++i) c(i) = u(rng);
  return AlgebraVector<N>::from_coeffs(c * (scale / c.norm()));
}

template <int N>
Isometry<N> random_isometry(std::mt19937_64& rng, double scale = 1.0) {
  return group_exp(random_algebra<N>(rng, scale));
}

template <int N>
HPoint<N> random_point(std::mt19937_64& rng, double radius = 2.0) {
  return random_isometry<N>(rng, radius)(HPoint<N>::base());
}

}  // namespace hypvol::test_support

#endif
