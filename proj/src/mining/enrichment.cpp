#include "feann/mining/enrichment.hpp"

#include "feann/errors.hpp"
#include "feann/kinematics/kinematics.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace feann {

MicroBackend analytic_backend(const OracleParameters& oracle) {
  oracle.validate();
  MicroBackend b;
  b.name = "analytic";
  b.path = [oracle](const std::vector<Tensor2>& F) {
    std::vector<Tensor2> P;
    P.reserve(F.size());
    for (const auto& f : F) P.push_back(nominal_stress(f, oracle_stress(f, oracle)));
    return P;
  };
  b.drive = [oracle](const LoadCase& load) { return drive_material_point(oracle, load); };
  return b;
}

MicroBackend response_backend(const NominalResponse& response, double stress_scale) {
  MicroBackend b;
  b.name = "response";
  b.path = [response](const std::vector<Tensor2>& F) {
    std::vector<Tensor2> P;
    P.reserve(F.size());
    for (const auto& f : F) P.push_back(response(f));
    return P;
  };
  b.drive = [response, stress_scale](const LoadCase& load) {
    return drive_material_point(response, load, stress_scale);
  };
  return b;
}

MicroBackend voxel_backend(const VoxelRVE& rve, const VoxelSolverOptions& options) {
  rve.validate();
  MicroBackend b;
  b.name = "voxel";
  b.path = [rve, options](const std::vector<Tensor2>& F) {
    std::vector<Tensor2> P;
    for (const auto& s : homogenize_voxel_path(rve, F, options)) P.push_back(s.P_bar);
    return P;
  };
  b.drive = [rve, options](const LoadCase& load) {
    load.validate();
    std::vector<PathPoint> path;
    VoxelSolverOptions o = options;
    MicroSolution previous;
    for (int k = 0; k <= load.steps; ++k) {
      const double t = double(k) / load.steps;
      if (k > 0) o.warm_start = &previous.fluctuation;
      MicroSolution s = homogenize_voxel(rve, load.control(t), o);
      path.push_back({t, s.F_bar, s.P_bar});
      previous = std::move(s);
    }
    return path;
  };
  return b;
}

DataSet filter_tuples(const DataSet& candidates, const DataSet& reference, const InvariantRanges& ranges,
                      const StructuralTensorSet& M_rve, double tolerance) {
  InvariantIndex index(ranges, tolerance);
  for (const auto& d : reference.tuples) index.insert(invariant_map(d.F, M_rve));
  DataSet kept;
  kept.iteration = candidates.iteration;
  for (const auto& d : candidates.tuples) {
    const InvariantVector I = invariant_map(d.F, M_rve);
    if (!index.unique(I)) continue;
    index.insert(I);
    kept.tuples.push_back(d);
  }
  return kept;
}

EnrichResult enrich(const std::vector<DeformationPath>& paths, const DataSet& D, const MicroBackend& backend,
                    const Vector3& A_macro, const Vector3& A_rve, const InvariantRanges& ranges,
                    const EnrichOptions& options) {
  const Tensor2 Q = rodrigues(A_macro, A_rve);
  const StructuralTensorSet M_rve(A_rve);

  std::vector<DeformationPath> ordered = paths;
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) { return a.id < b.id; });

  struct Outcome {
    std::vector<Tensor2> F, P;
    std::string error;
  };
  std::vector<Outcome> outcomes(ordered.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t p; (p = next++) < ordered.size();) {
      auto& o = outcomes[p];
      for (const auto& F : ordered[p].F) o.F.push_back(rotate_deformation(F, Q));
      try {
        o.P = backend.path(o.F);
      } catch (const Error& e) {
        o.error = e.what();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(options.threads, static_cast<int>(ordered.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  EnrichResult r;
  r.rve_data.iteration = options.iteration;
  for (std::size_t p = 0; p < ordered.size(); ++p) {
    if (!outcomes[p].error.empty()) {
      r.warnings.push_back("path " + std::to_string(ordered[p].id) + " skipped: " + outcomes[p].error);
      continue;
    }
    for (std::size_t k = 0; k < outcomes[p].F.size(); ++k)
      r.rve_data.tuples.push_back({outcomes[p].F[k], outcomes[p].P[k], ordered[p].id, static_cast<int>(k),
                                   ordered[p].times[k], TupleSource::mined, options.iteration});
  }
  r.added = filter_tuples(r.rve_data, D, ranges, M_rve, options.tolerance);
  return r;
}

}  // namespace feann
