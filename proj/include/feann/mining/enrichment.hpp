#pragma once

#include "feann/homogenization/material_point.hpp"
#include "feann/homogenization/voxel_rve.hpp"
#include "feann/mining/detection.hpp"

#include <functional>
#include <memory>
#include <string>

namespace feann {

/// Microscale stress source in the RVE frame.
struct MicroBackend {
  std::string name;
  /// Stresses along a fully prescribed deformation path.
  std::function<std::vector<Tensor2>(const std::vector<Tensor2>&)> path;
  /// Mixed-control driving of one load case, for the initial data.
  std::function<std::vector<PathPoint>(const LoadCase&)> drive;
};

MicroBackend analytic_backend(const OracleParameters& oracle);
MicroBackend response_backend(const NominalResponse& response, double stress_scale);
MicroBackend voxel_backend(const VoxelRVE& rve, const VoxelSolverOptions& options = {});

/// Greedy dedup in the given order: a tuple is kept iff it is distinct
/// (tolerance) from every tuple of `reference` and every tuple kept before it.
DataSet filter_tuples(const DataSet& candidates, const DataSet& reference, const InvariantRanges& ranges,
                      const StructuralTensorSet& M_rve, double tolerance);

struct EnrichOptions {
  double tolerance = 0.01;
  int iteration = 0;
  int threads = 1;
};

struct EnrichResult {
  DataSet rve_data;  // D^RVE before filtering
  DataSet added;     // D_new
  std::vector<std::string> warnings;
};

/// Rotates each path into the RVE frame with Q = rodrigues(A_macro, A_rve),
/// evaluates the backend along it and filters the tuples (canonical order:
/// path id, then step) against D and each other. Failed paths are skipped
/// with a warning.
EnrichResult enrich(const std::vector<DeformationPath>& paths, const DataSet& D, const MicroBackend& backend,
                    const Vector3& A_macro, const Vector3& A_rve, const InvariantRanges& ranges,
                    const EnrichOptions& options = {});

}  // namespace feann
