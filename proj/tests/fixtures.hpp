#ifndef HYPVOL_TEST_FIXTURES_HPP
#define HYPVOL_TEST_FIXTURES_HPP

#include <memory>
#include <random>

#include "hypvol/equivariant_map.hpp"

namespace hypvol::test_support {

struct MeshedSurface {
  Surface surface;
  std::shared_ptr<const FundamentalDomain> domain;
  std::shared_ptr<const Mesh> mesh;
};

inline MeshedSurface meshed(Surface s, int refine) {
  auto d = std::make_shared<const FundamentalDomain>(s.domain);
  auto m = std::make_shared<const Mesh>(build_mesh(*d, refine));
  return {std::move(s), d, m};
}

// Random elliptic rho fixing the base point, random start, relaxed until
// the map is a contraction.
inline EquivariantMap relaxed_elliptic_map(const MeshedSurface& ms, std::uint64_t seed, int sweeps = 60) {
  std::mt19937_64 rng(seed);
  const auto rho = random_elliptic_representation<2>(ms.surface.j.presentation(), rng);
  EquivariantMap f = random_map(ms.domain, ms.mesh, rho, HPoint<2>::base(), 1.0, seed + 1);
  if (ms.domain->has_cusps()) f = pin_cusps(f, {HPoint<2>::base()});
  return relax(f, sweeps, 0.5);
}

}  // namespace hypvol::test_support

#endif
