#include "feann/homogenization/statistics.hpp"

#include "feann/errors.hpp"

#include <numeric>

namespace feann {

double chi_square_test(std::span<const double> samples) {
  if (samples.size() < 2) throw InvalidParameters("chi-square test needs at least two samples");
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
  if (mean == 0.0) throw ZeroMean();
  double sum = 0.0;
  for (double a : samples) sum += (a - mean) * (a - mean);
  return sum / mean;
}

RveScatter rve_scatter(int n, double fiber_fraction, int count, std::uint64_t seed, int fiber_width, double stretch,
                       double tolerance) {
  LoadCase load{LoadKind::uniaxial, {0, -1}, stretch, 1};
  const MixedControl ctrl = load.control(1.0);
  RveScatter out;
  for (int r = 0; r < count; ++r) {
    const VoxelRVE rve = VoxelRVE::random_fibers(n, fiber_fraction, seed + static_cast<std::uint64_t>(r), fiber_width);
    out.samples.push_back(homogenize_voxel(rve, ctrl).P_bar(0, 0));
  }
  out.chi_square = chi_square_test(out.samples);
  out.accepted = out.chi_square <= tolerance;
  return out;
}

}  // namespace feann
