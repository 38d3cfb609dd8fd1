#include "feann/mining/detection.hpp"

#include "feann/kinematics/kinematics.hpp"

#include <algorithm>
#include <cmath>

namespace feann {

InvariantVector invariant_map(const Tensor2& F, const StructuralTensorSet& M) {
  return invariants(right_cauchy_green(F), M);
}

InvariantRanges InvariantRanges::from_invariants(const std::vector<InvariantVector>& I) {
  InvariantRanges r;
  if (I.empty()) return r;
  for (int s = 0; s < kInvariantCount; ++s) {
    double lo = I.front()[s], hi = lo;
    for (const auto& v : I) {
      lo = std::min(lo, v[s]);
      hi = std::max(hi, v[s]);
    }
    r.range[s] = hi > lo ? hi - lo : 1.0;
  }
  return r;
}

InvariantRanges InvariantRanges::from_dataset(const DataSet& D, const StructuralTensorSet& M_rve) {
  std::vector<InvariantVector> I;
  I.reserve(D.size());
  for (const auto& d : D.tuples) I.push_back(invariant_map(d.F, M_rve));
  return from_invariants(I);
}

double uniqueness_distance(const InvariantVector& a, const InvariantVector& b, const InvariantRanges& ranges) {
  double d = 0.0;
  for (int s = 0; s < kInvariantCount; ++s) d = std::max(d, std::abs(a[s] - b[s]) / ranges.range[s]);
  return d;
}

bool distinct(const InvariantVector& a, const InvariantVector& b, const InvariantRanges& ranges, double tolerance) {
  return uniqueness_distance(a, b, ranges) > tolerance;
}

bool InvariantIndex::unique(const InvariantVector& p) const {
  return std::all_of(points_.begin(), points_.end(),
                     [&](const InvariantVector& q) { return distinct(p, q, ranges_, tolerance_); });
}

std::vector<DeformationPath> detect_unknown(const std::vector<DeformationPath>& paths,
                                            const std::vector<InvariantVector>& known, const InvariantRanges& ranges,
                                            const StructuralTensorSet& M_macro, const DetectionOptions& options) {
  InvariantIndex index(ranges, options.tolerance);
  for (const auto& k : known) index.insert(k);
  std::vector<DeformationPath> emitted;
  for (const auto& path : paths) {
    std::vector<InvariantVector> I;
    I.reserve(path.F.size());
    for (const auto& F : path.F) I.push_back(invariant_map(F, M_macro));
    for (int n = static_cast<int>(path.F.size()) - 1; n >= 0; --n) {
      if (!index.unique(I[n])) continue;
      DeformationPath out{path.id, {path.times.begin(), path.times.begin() + n + 1},
                          {path.F.begin(), path.F.begin() + n + 1}};
      if (options.include_emitted)
        for (int k = 0; k <= n; ++k) index.insert(I[k]);
      emitted.push_back(std::move(out));
      break;
    }
  }
  return emitted;
}

}  // namespace feann
