#pragma once

#include "feann/macro/solver.hpp"
#include "feann/mining/enrichment.hpp"

#include <string>
#include <vector>

namespace feann {

struct ErrorStatistics {
  std::size_t count = 0;
  double p50 = 0.0;
  double p95 = 0.0;
  double max = 0.0;

  static ErrorStatistics of(std::vector<double> errors);
};

struct ValidationReport {
  std::size_t states = 0;     // macro states examined (all points, all steps)
  std::size_t uncovered = 0;  // not within the C-space tolerance of D
  ErrorStatistics held_out;   // surrogate vs oracle on uncovered states
  ErrorStatistics all;        // surrogate vs oracle on every state

  std::string to_json() const;
};

struct ValidationOptions {
  double coverage_tolerance = 0.05;
  /// Denominator floor of the relative error, as a fraction of the stress scale.
  double stress_floor = 0.01;
};

/// Maps every stored macro state into the RVE frame, marks those farther
/// than the tolerance from all tuples of D in range-normalised C space
/// (max over the six components of C), evaluates the backend on all states
/// and reports per-tuple relative errors |P_ann - P|_F / max(|P|_F, floor).
ValidationReport validate_against_oracle(const MacroState& state, const DataSet& D, const SurrogateWeights& W,
                                         const MicroBackend& backend, const Vector3& A_macro, const Vector3& A_rve,
                                         double stress_scale, const ValidationOptions& options = {});

}  // namespace feann
