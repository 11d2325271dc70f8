#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "thinobs/closed_forms.hpp"

namespace thinobs::test {

inline Jet3 seed_jet(int slot, double value) { return Jet3::variable(value, slot); }

// Uniform points in [-1,1] x [lo,1] of the (x_n, x_{n+1}) plane.
inline std::vector<HalfPoint> random_half_points(int count, std::uint64_t seed, double lo = 0.05) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> xn(-1.0, 1.0), xp(lo, 1.0);
  std::vector<HalfPoint> out;
  for (int i = 0; i < count; ++i) out.emplace_back(xn(rng), xp(rng));
  return out;
}

}  // namespace thinobs::test
