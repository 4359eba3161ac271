#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "osgood/osgood.hpp"

namespace testing {

using namespace osgood;

/// White-noise samples with a fixed seed.
inline GridField noise(int n, unsigned seed, Domain d = Domain::UnitizedTorus) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  GridField f(n, d);
  for (double& v : f.data()) v = g(rng);
  return f;
}

/// Sum of a few random low modes; mean zero by construction.
inline GridField band_limited(int n, unsigned seed, int kmax = 6, Domain d = Domain::Torus2Pi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GridField f(n, d);
  const double w = 2.0 * std::numbers::pi / f.side();
  for (int m = 0; m < 12; ++m) {
    const int kx = static_cast<int>(std::lround(u(rng) * kmax)), ky = static_cast<int>(std::lround(u(rng) * kmax));
    if (kx == 0 && ky == 0) continue;
    const double a = u(rng), ph = 3.0 * u(rng);
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) f.at(ix, iy) += a * std::cos(w * (kx * f.coord(ix) + ky * f.coord(iy)) + ph);
  }
  return f.remove_mean();
}

/// Indicator of the first `count` cells in row-major order.
inline GridField indicator(int n, int count, Domain d = Domain::UnitizedTorus) {
  GridField f(n, d);
  for (int i = 0; i < count; ++i) f.data()[i] = 1.0;
  return f;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing
