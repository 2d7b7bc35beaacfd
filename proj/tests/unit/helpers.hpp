#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "fracwell/mesh.hpp"

namespace testing {

// Smooth random field: a few sine modes with decaying random amplitudes.
inline fracwell::GridFunction random_smooth(const fracwell::Mesh1D& mesh, std::mt19937_64& rng,
                                            int modes = 5) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> amp(modes);
  for (int k = 0; k < modes; ++k) amp[k] = n(rng) / (1.0 + k);
  return fracwell::GridFunction::from(mesh, [&](double x) {
    double v = 0.0;
    for (int k = 0; k < modes; ++k) v += amp[k] * std::sin((k + 1) * std::numbers::pi * x / mesh.L);
    return v;
  });
}

inline fracwell::GridFunction hat(const fracwell::Mesh1D& mesh) {
  return fracwell::GridFunction::from(
      mesh, [&](double x) { return 1.0 - std::abs(2.0 * x / mesh.L - 1.0); });
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing
