#pragma once

#include "feann/macro/geometry.hpp"
#include "feann/mining/config.hpp"
#include "feann/mining/enrichment.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace feann {

struct LoopIteration {
  int iteration = 0;
  std::size_t dataset_size = 0;  // |D_i| used for training
  int inner_repeats = 0;         // extra train/solve rounds needed
  int t_end = 0;
  int t_goal = 0;
  std::size_t detected_paths = 0;
  std::size_t new_tuples = 0;  // |D_i^new|
  double train_loss = 0.0;
  double test_loss = 0.0;
  std::vector<std::string> warnings;
};

enum class LoopStatus { converged, max_iterations, solver_failure };

const char* to_string(LoopStatus s);

struct LoopReport {
  std::string geometry;
  std::string backend;
  std::size_t initial_size = 0;
  std::vector<LoopIteration> iterations;
  LoopStatus status = LoopStatus::converged;
  std::string message;

  /// Deterministic summary (no timings).
  std::string to_json() const;
};

struct LoopResult {
  SurrogateWeights weights;
  DataSet dataset;  // final D
  LoopReport report;
  MacroProblemSpec problem;
  MacroState state;  // last macroscopic solve
};

/// D_1: every initial load case driven through the backend, tagged with its
/// case index as path id, then filtered against itself.
DataSet initial_dataset(const MicroBackend& backend, const LoopConfig& cfg, const InvariantRanges* ranges = nullptr);

MicroBackend make_backend(const LoopConfig& cfg);

using LoopObserver = std::function<void(const LoopIteration&)>;

/// The mining loop. Starts from `initial` when given (warm start), else from
/// initial_dataset. Metric ranges are fixed from D_1 for the whole run. Each
/// iteration repeats {train, solve, detect} until the macro solve reaches its
/// goal or new states are found; it stops when nothing new is detected or
/// everything detected is filtered out. Running out of iterations or inner
/// repeats is reported in the status, with the state reached so far.
LoopResult run_loop(const LoopConfig& cfg, const std::optional<DataSet>& initial = std::nullopt,
                    const std::optional<MicroBackend>& backend = std::nullopt, const LoopObserver& observer = {});

/// Throws MaxIterationsExceeded or FirstStepDivergence for failed runs.
void throw_on_failure(const LoopResult& r, const LoopConfig& cfg);

}  // namespace feann
