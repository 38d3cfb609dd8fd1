#include "feann/mining/loop.hpp"

#include "feann/errors.hpp"
#include "feann/homogenization/load_cases.hpp"

#include <json.hpp>

namespace feann {

const char* to_string(LoopStatus s) {
  switch (s) {
    case LoopStatus::converged: return "converged";
    case LoopStatus::max_iterations: return "max_iterations";
    case LoopStatus::solver_failure: return "solver_failure";
  }
  return "?";
}

std::string LoopReport::to_json() const {
  nlohmann::ordered_json j;
  j["geometry"] = geometry;
  j["backend"] = backend;
  j["initial_size"] = initial_size;
  j["status"] = to_string(status);
  j["message"] = message;
  j["iterations"] = nlohmann::ordered_json::array();
  for (const auto& it : iterations) {
    nlohmann::ordered_json e;
    e["iteration"] = it.iteration;
    e["dataset_size"] = it.dataset_size;
    e["inner_repeats"] = it.inner_repeats;
    e["t_end"] = it.t_end;
    e["t_goal"] = it.t_goal;
    e["detected_paths"] = it.detected_paths;
    e["new_tuples"] = it.new_tuples;
    e["train_loss"] = it.train_loss;
    e["test_loss"] = it.test_loss;
    e["warnings"] = it.warnings;
    j["iterations"].push_back(e);
  }
  return j.dump(2);
}

MicroBackend make_backend(const LoopConfig& cfg) {
  if (cfg.backend == OracleBackend::voxel) return voxel_backend(cfg.voxel_rve());
  return analytic_backend(cfg.oracle());
}

DataSet initial_dataset(const MicroBackend& backend, const LoopConfig& cfg, const InvariantRanges* ranges) {
  DataSet raw;
  const auto suite = initial_load_suite(cfg.initial_steps);
  for (std::size_t c = 0; c < suite.size(); ++c) {
    const auto path = backend.drive(suite[c]);
    for (std::size_t k = 0; k < path.size(); ++k)
      raw.tuples.push_back({path[k].F, path[k].P, static_cast<int>(c), static_cast<int>(k), path[k].t,
                            TupleSource::initial, 0});
  }
  const StructuralTensorSet M_rve(cfg.A_rve);
  const InvariantRanges r = ranges ? *ranges : InvariantRanges::from_dataset(raw, M_rve);
  DataSet D = filter_tuples(raw, DataSet{}, r, M_rve, cfg.eps_filter);
  D.iteration = 1;
  return D;
}

LoopResult run_loop(const LoopConfig& cfg, const std::optional<DataSet>& initial,
                    const std::optional<MicroBackend>& backend_override, const LoopObserver& observer) {
  cfg.validate();
  const MicroBackend backend = backend_override ? *backend_override : make_backend(cfg);
  LoopResult out;
  out.problem = builtin_geometry(cfg.geometry, cfg.resolution);
  if (cfg.macro_steps > 0) out.problem.steps = cfg.macro_steps;
  const StructuralTensorSet M_rve(cfg.A_rve);
  const StructuralTensorSet M_macro(out.problem.fiber_direction);

  DataSet D = initial ? *initial : initial_dataset(backend, cfg);
  if (D.empty()) throw EmptyDataSet();
  const InvariantRanges ranges = InvariantRanges::from_dataset(D, M_rve);
  out.report.geometry = out.problem.name;
  out.report.backend = backend.name;
  out.report.initial_size = D.size();

  MacroOptions macro_opt;
  macro_opt.steps = out.problem.steps;

  for (int i = 1; i <= cfg.n_max; ++i) {
    LoopIteration rec;
    rec.iteration = i;
    rec.dataset_size = D.size();
    rec.t_goal = out.problem.steps;
    std::vector<DeformationPath> detected;
    std::vector<InvariantVector> known;
    known.reserve(D.size());
    for (const auto& d : D.tuples) known.push_back(invariant_map(d.F, M_rve));

    for (int repeat = 0;; ++repeat) {
      const TrainingResult trained = train(D, cfg.training_for(i, repeat));
      out.weights = trained.weights;
      rec.train_loss = trained.report.best_loss;
      rec.test_loss = trained.report.test_loss;
      rec.inner_repeats = repeat;
      try {
        out.state = solve_macro(out.problem.mesh, out.problem.bcs, out.weights, M_macro, macro_opt);
      } catch (const FirstStepDivergence&) {
        out.state = MacroState{};
        out.state.t_goal = out.problem.steps;
      }
      rec.t_end = std::max(out.state.t_end(), 0);
      detected = detect_unknown(collect_deformations(out.state), known, ranges, M_macro, {cfg.eps_detect, true});
      if (out.state.reached_goal() || !detected.empty()) break;
      if (repeat + 1 >= cfg.max_inner_repeats) {
        rec.detected_paths = 0;
        out.report.iterations.push_back(rec);
        if (observer) observer(rec);
        out.report.status = LoopStatus::solver_failure;
        out.report.message = "macroscopic solve failed in " + std::to_string(cfg.max_inner_repeats) +
                             " consecutive training rounds without new data";
        out.dataset = D;
        return out;
      }
    }
    rec.detected_paths = detected.size();

    if (!detected.empty()) {
      EnrichOptions eo;
      eo.tolerance = cfg.eps_filter;
      eo.iteration = i;
      eo.threads = cfg.threads;
      const EnrichResult er = enrich(detected, D, backend, out.problem.fiber_direction, cfg.A_rve, ranges, eo);
      rec.new_tuples = er.added.size();
      rec.warnings = er.warnings;
      D.append(er.added);
    }
    out.report.iterations.push_back(rec);
    if (observer) observer(rec);
    if (rec.new_tuples == 0) {
      D.iteration = i;
      out.dataset = D;
      out.report.status = LoopStatus::converged;
      return out;
    }
    D.iteration = i + 1;
  }
  out.dataset = D;
  out.report.status = LoopStatus::max_iterations;
  out.report.message = "n_max = " + std::to_string(cfg.n_max) + " reached with new data still appearing";
  return out;
}

void throw_on_failure(const LoopResult& r, const LoopConfig& cfg) {
  if (r.report.status == LoopStatus::max_iterations) throw MaxIterationsExceeded(cfg.n_max);
  if (r.report.status == LoopStatus::solver_failure) throw FirstStepDivergence();
}

}  // namespace feann
