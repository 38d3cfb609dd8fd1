#include "feann/errors.hpp"
#include "feann/macro/geometry.hpp"
#include "feann/macro/results_io.hpp"
#include "feann/mining/config.hpp"
#include "feann/mining/detection.hpp"
#include "feann/mining/enrichment.hpp"
#include "feann/mining/loop.hpp"
#include "feann/mining/validation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace feann;
using nlohmann::json;

namespace {

constexpr int kExitMaxIterations = 2;
constexpr int kExitSolverFailure = 3;
constexpr int kExitFormat = 4;
constexpr int kPathsFormatVersion = 1;

struct Options {
  std::string config;
  std::string dataset;
  std::string model;
  std::string results;
  std::string paths;
  std::string output;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> geometry;
  std::optional<std::string> oracle;
  std::optional<double> eps_detect;
  std::optional<double> eps_filter;
  std::optional<int> n_max;
  std::optional<int> threads;
  std::optional<int> resolution;
};

LoopConfig effective_config(const Options& o) {
  LoopConfig cfg = o.config.empty() ? LoopConfig{} : load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.geometry) cfg.geometry = *o.geometry;
  if (o.oracle) cfg.backend = oracle_backend_from_string(*o.oracle);
  if (o.eps_detect) cfg.eps_detect = *o.eps_detect;
  if (o.eps_filter) cfg.eps_filter = *o.eps_filter;
  if (o.n_max) cfg.n_max = *o.n_max;
  if (o.threads) cfg.threads = *o.threads;
  if (o.resolution) cfg.resolution = *o.resolution;
  cfg.validate();
  return cfg;
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw InvalidParameters(std::string("missing required option ") + flag);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  out << text << '\n';
}

/// Frozen metric ranges: taken from the initial-suite tuples when present.
InvariantRanges frozen_ranges(const DataSet& D, const StructuralTensorSet& M) {
  DataSet initial;
  for (const auto& t : D.tuples)
    if (t.source == TupleSource::initial) initial.tuples.push_back(t);
  return InvariantRanges::from_dataset(initial.empty() ? D : initial, M);
}

MacroProblemSpec problem_for(const LoopConfig& cfg, const std::string& geometry) {
  MacroProblemSpec p = builtin_geometry(geometry, cfg.resolution);
  if (cfg.macro_steps > 0) p.steps = cfg.macro_steps;
  return p;
}

void save_paths(const std::string& file, const std::string& geometry, const Vector3& A_macro,
                const std::vector<DeformationPath>& paths) {
  json j;
  j["format_version"] = kPathsFormatVersion;
  j["geometry"] = geometry;
  j["fiber_direction"] = {A_macro.x(), A_macro.y(), A_macro.z()};
  j["paths"] = json::array();
  for (const auto& p : paths) {
    json F = json::array();
    for (const auto& f : p.F) {
      json row = json::array();
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) row.push_back(f(i, k));
      F.push_back(row);
    }
    j["paths"].push_back({{"id", p.id}, {"times", p.times}, {"F", F}});
  }
  write_text(file, j.dump(1));
}

std::vector<DeformationPath> load_paths(const std::string& file, std::string& geometry, Vector3& A_macro) {
  std::ifstream in(file);
  if (!in) throw FormatError("cannot open '" + file + "'");
  try {
    const json j = json::parse(in);
    if (j.at("format_version").get<int>() != kPathsFormatVersion)
      throw FormatVersionMismatch("paths", j.at("format_version").get<int>(), kPathsFormatVersion);
    geometry = j.at("geometry").get<std::string>();
    const auto a = j.at("fiber_direction").get<std::vector<double>>();
    if (a.size() != 3) throw FormatError("fiber_direction needs three components");
    A_macro = Vector3(a[0], a[1], a[2]);
    std::vector<DeformationPath> out;
    for (const auto& p : j.at("paths")) {
      DeformationPath path;
      path.id = p.at("id").get<int>();
      path.times = p.at("times").get<std::vector<double>>();
      for (const auto& row : p.at("F")) {
        const auto v = row.get<std::vector<double>>();
        if (v.size() != 9) throw FormatError("deformation gradients need nine components");
        path.F.push_back(Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(v.data()));
      }
      out.push_back(std::move(path));
    }
    return out;
  } catch (const json::exception& e) {
    throw FormatError("paths file '" + file + "': " + e.what());
  }
}

void print_iteration(const LoopIteration& it) {
  std::cout << "iteration " << it.iteration << ": |D| = " << it.dataset_size << ", t_end = " << it.t_end << "/"
            << it.t_goal << ", repeats = " << it.inner_repeats << ", paths = " << it.detected_paths
            << ", new tuples = " << it.new_tuples << ", train loss = " << it.train_loss << std::endl;
  for (const auto& w : it.warnings) std::cerr << "warning: " << w << '\n';
}

int cmd_init_data(const Options& o) {
  require(o.dataset, "--dataset");
  const LoopConfig cfg = effective_config(o);
  const DataSet D = initial_dataset(make_backend(cfg), cfg);
  knowledge_base::save(D, o.dataset);
  std::cout << "wrote " << D.size() << " tuples to " << o.dataset << '\n';
  return 0;
}

int cmd_train(const Options& o) {
  require(o.dataset, "--dataset");
  require(o.model, "--model");
  const LoopConfig cfg = effective_config(o);
  const DataSet D = knowledge_base::load(o.dataset);
  const TrainingResult r = train(D, cfg.training_for(1, 0));
  surrogate::save(r.weights, o.model);
  std::cout << "trained on " << r.report.train_size << " tuples (" << r.report.test_size
            << " held out): loss " << r.report.best_loss << ", test loss " << r.report.test_loss << ", restart "
            << r.report.chosen_restart << '\n';
  return 0;
}

int cmd_solve(const Options& o) {
  require(o.model, "--model");
  require(o.results, "--results");
  const LoopConfig cfg = effective_config(o);
  const MacroProblemSpec p = problem_for(cfg, cfg.geometry);
  const SurrogateWeights W = surrogate::load(o.model);
  MacroOptions mo;
  mo.steps = p.steps;
  const MacroState s = solve_macro(p.mesh, p.bcs, W, StructuralTensorSet(p.fiber_direction), mo);
  save_results({p.name, p.mesh, s}, o.results);
  std::cout << p.name << ": reached t_" << s.t_end() << " of t_" << s.t_goal << " (" << p.mesh.element_count()
            << " elements)\n";
  return 0;
}

int cmd_detect(const Options& o) {
  require(o.results, "--results");
  require(o.dataset, "--dataset");
  require(o.paths, "--paths");
  const LoopConfig cfg = effective_config(o);
  const MacroResults r = load_results(o.results);
  const MacroProblemSpec p = problem_for(cfg, r.geometry);
  const DataSet D = knowledge_base::load(o.dataset);
  if (D.empty()) throw EmptyDataSet();
  const StructuralTensorSet M_rve(cfg.A_rve);
  std::vector<InvariantVector> known;
  for (const auto& t : D.tuples) known.push_back(invariant_map(t.F, M_rve));
  const auto found = detect_unknown(collect_deformations(r.state), known, frozen_ranges(D, M_rve),
                                    StructuralTensorSet(p.fiber_direction), {cfg.eps_detect, true});
  save_paths(o.paths, p.name, p.fiber_direction, found);
  std::cout << found.size() << " unknown deformation paths written to " << o.paths << '\n';
  return 0;
}

int cmd_enrich(const Options& o) {
  require(o.paths, "--paths");
  require(o.dataset, "--dataset");
  const LoopConfig cfg = effective_config(o);
  std::string geometry;
  Vector3 A_macro;
  const auto paths = load_paths(o.paths, geometry, A_macro);
  DataSet D = knowledge_base::load(o.dataset);
  const StructuralTensorSet M_rve(cfg.A_rve);
  EnrichOptions eo;
  eo.tolerance = cfg.eps_filter;
  eo.iteration = D.iteration + 1;
  eo.threads = cfg.threads;
  const EnrichResult er = enrich(paths, D, make_backend(cfg), A_macro, cfg.A_rve, frozen_ranges(D, M_rve), eo);
  for (const auto& w : er.warnings) std::cerr << "warning: " << w << '\n';
  D.append(er.added);
  D.iteration = eo.iteration;
  const std::string out = o.output.empty() ? o.dataset : o.output;
  knowledge_base::save(D, out);
  std::cout << er.rve_data.size() << " homogenized tuples, " << er.added.size() << " added; " << D.size()
            << " tuples written to " << out << '\n';
  return 0;
}

int cmd_run(const Options& o) {
  require(o.output, "--output");
  const LoopConfig cfg = effective_config(o);
  std::optional<DataSet> initial;
  if (!o.dataset.empty()) initial = knowledge_base::load(o.dataset);
  const LoopResult r = run_loop(cfg, initial, std::nullopt, print_iteration);
  const std::filesystem::path dir(o.output);
  std::filesystem::create_directories(dir);
  knowledge_base::save(r.dataset, (dir / "dataset.kb").string());
  surrogate::save(r.weights, (dir / "model.json").string());
  write_text((dir / "report.json").string(), r.report.to_json());
  write_text((dir / "config.ini").string(), write_config(cfg));
  save_results({r.problem.name, r.problem.mesh, r.state}, (dir / "results.txt").string());
  std::cout << to_string(r.report.status) << " after " << r.report.iterations.size() << " iterations, "
            << r.report.initial_size << " -> " << r.dataset.size() << " tuples; outputs in " << dir.string() << '\n';
  if (!r.report.message.empty()) std::cerr << r.report.message << '\n';
  throw_on_failure(r, cfg);
  return 0;
}

int cmd_validate(const Options& o) {
  require(o.results, "--results");
  require(o.dataset, "--dataset");
  require(o.model, "--model");
  const LoopConfig cfg = effective_config(o);
  const MacroResults r = load_results(o.results);
  const MacroProblemSpec p = problem_for(cfg, r.geometry);
  const ValidationReport v =
      validate_against_oracle(r.state, knowledge_base::load(o.dataset), surrogate::load(o.model), make_backend(cfg),
                              p.fiber_direction, cfg.A_rve, initial_moduli(cfg.matrix).G);
  std::cout << v.to_json() << '\n';
  if (!o.output.empty()) write_text(o.output, v.to_json());
  return 0;
}

int cmd_convert(const Options& o) {
  require(o.results, "--results");
  require(o.output, "--output");
  const auto parent = std::filesystem::path(o.output).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  const auto files = write_vtk_series(load_results(o.results), o.output);
  std::cout << "wrote " << files.size() << " VTK files\n";
  return 0;
}

int cmd_show_config(const Options& o) {
  std::cout << write_config(effective_config(o));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-driven multiscale finite elements with a neural network surrogate"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--dataset", o.dataset, "Knowledge base file");
  app.add_option("--model", o.model, "Surrogate model file (JSON)");
  app.add_option("--results", o.results, "Macroscopic results file");
  app.add_option("--paths", o.paths, "Deformation path file (JSON)");
  app.add_option("--output", o.output, "Output file, directory or file stem");
  app.add_option("--seed", o.seed, "Random seed");
  app.add_option("--geometry", o.geometry, "Macroscopic problem")
      ->check(CLI::IsMember(builtin_geometry_names()));
  app.add_option("--oracle", o.oracle, "Micro backend")->check(CLI::IsMember({"analytic", "voxel"}));
  app.add_option("--eps-detect", o.eps_detect, "Detection tolerance");
  app.add_option("--eps-filter", o.eps_filter, "Filter tolerance");
  app.add_option("--n-max", o.n_max, "Maximum loop iterations");
  app.add_option("--threads", o.threads, "Worker threads");
  app.add_option("--resolution", o.resolution, "Macroscopic mesh resolution");

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Options&);
  };
  const Command commands[] = {
      {"init-data", "Homogenize the initial load suite and write the filtered dataset (--dataset)", cmd_init_data},
      {"train", "Train a surrogate on --dataset and write it to --model", cmd_train},
      {"solve", "Solve --geometry with --model and write --results", cmd_solve},
      {"detect", "Find unknown deformation paths in --results w.r.t. --dataset, write --paths", cmd_detect},
      {"enrich", "Homogenize --paths, filter, append to --dataset (or write --output)", cmd_enrich},
      {"run", "Full mining loop; --dataset warm-starts, outputs go to directory --output", cmd_run},
      {"validate", "Compare --model against the oracle on the states in --results", cmd_validate},
      {"convert", "Write --results as a legacy VTK series with file stem --output", cmd_convert},
      {"show-config", "Print the effective configuration with every key", cmd_show_config},
  };
  for (const auto& c : commands) app.add_subcommand(c.name, c.help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    for (const auto& c : commands)
      if (app.got_subcommand(c.name)) return c.run(o);
  } catch (const MaxIterationsExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitMaxIterations;
  } catch (const FirstStepDivergence& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolverFailure;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFormat;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFormat;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
