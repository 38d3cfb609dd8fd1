#pragma once

#include "feann/homogenization/voxel_rve.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace feann {

/// Scatter statistic sum (a_i - <a>)^2 / <a>. Throws InvalidParameters for
/// fewer than two samples and ZeroMean when <a> = 0.
double chi_square_test(std::span<const double> samples);

struct RveScatter {
  std::vector<double> samples;  // P11 of each realisation
  double chi_square;
  bool accepted;                // chi_square <= tolerance
};

/// Solves `count` seeded random-fiber RVEs of n^3 voxels under uniaxial
/// tension along x1 (lateral stresses free) and tests the scatter of P11.
/// Fibers are `fiber_width` voxels wide, so a larger n holds more fibers.
RveScatter rve_scatter(int n, double fiber_fraction, int count, std::uint64_t seed, int fiber_width = 1,
                       double stretch = 1.1, double tolerance = 0.025);

}  // namespace feann
