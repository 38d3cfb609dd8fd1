#pragma once

#include "feann/kinematics/invariants.hpp"
#include "feann/macro/solver.hpp"
#include "feann/training/dataset.hpp"

#include <array>
#include <vector>

namespace feann {

/// (I1, ..., I5, I3*) of C = F^T F with the given structural tensor.
InvariantVector invariant_map(const Tensor2& F, const StructuralTensorSet& M);

/// Per-invariant normalisation ranges of the uniqueness metric.
struct InvariantRanges {
  std::array<double, kInvariantCount> range{1, 1, 1, 1, 1, 1};

  /// max - min over the tuples' invariants in the RVE frame. A zero range
  /// (e.g. a single tuple) falls back to 1, i.e. an absolute tolerance.
  static InvariantRanges from_dataset(const DataSet& D, const StructuralTensorSet& M_rve);
  static InvariantRanges from_invariants(const std::vector<InvariantVector>& I);
};

/// max_a |a_a - b_a| / range_a
double uniqueness_distance(const InvariantVector& a, const InvariantVector& b, const InvariantRanges& ranges);
/// True iff the distance exceeds the tolerance.
bool distinct(const InvariantVector& a, const InvariantVector& b, const InvariantRanges& ranges, double tolerance);

/// A growing set of invariant points with brute-force uniqueness queries.
class InvariantIndex {
 public:
  InvariantIndex(InvariantRanges ranges, double tolerance) : ranges_(ranges), tolerance_(tolerance) {}
  /// True iff p is distinct from every stored point.
  bool unique(const InvariantVector& p) const;
  void insert(const InvariantVector& p) { points_.push_back(p); }
  std::size_t size() const { return points_.size(); }

 private:
  InvariantRanges ranges_;
  double tolerance_;
  std::vector<InvariantVector> points_;
};

struct DetectionOptions {
  double tolerance = 0.05;
  /// Also compare against states of paths already emitted in this sweep.
  bool include_emitted = true;
};

/// Reverse scan of every path from its last step: the first state that is
/// unique with respect to the known set ends the emitted (truncated) path
/// F(t_0) ... F(t_n). Paths without a unique state emit nothing. Known
/// invariants are in the RVE frame; path states are mapped with M_macro,
/// which gives the same invariants as the rotated pair.
std::vector<DeformationPath> detect_unknown(const std::vector<DeformationPath>& paths,
                                            const std::vector<InvariantVector>& known, const InvariantRanges& ranges,
                                            const StructuralTensorSet& M_macro, const DetectionOptions& options = {});

}  // namespace feann
