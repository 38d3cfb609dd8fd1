#include "feann/mining/config.hpp"

#include "feann/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace feann {

const char* to_string(OracleBackend b) { return b == OracleBackend::analytic ? "analytic" : "voxel"; }

OracleBackend oracle_backend_from_string(const std::string& s) {
  if (s == "analytic") return OracleBackend::analytic;
  if (s == "voxel") return OracleBackend::voxel;
  throw InvalidParameters("unknown oracle backend '" + s + "'");
}

void LoopConfig::validate() const {
  if (!(eps_filter > 0.0 && eps_filter < eps_detect && eps_detect < 1.0))
    throw InvalidParameters("tolerances must satisfy 0 < eps_filter < eps_detect < 1");
  if (n_max < 1) throw InvalidParameters("n_max must be at least 1");
  if (max_inner_repeats < 1) throw InvalidParameters("max_inner_repeats must be at least 1");
  if (initial_steps < 1) throw InvalidParameters("initial_steps must be at least 1");
  if (resolution < 1) throw InvalidParameters("resolution must be at least 1");
  if (macro_steps < 0) throw InvalidParameters("macro steps must not be negative");
  if (threads < 1) throw InvalidParameters("threads must be at least 1");
  if (voxel_n < 1 || !(voxel_fiber_fraction >= 0.0 && voxel_fiber_fraction <= 1.0))
    throw InvalidParameters("invalid voxel RVE settings");
  oracle().validate();
  if (backend == OracleBackend::voxel) fiber.validate();
  training_for(1, 0).validate();
}

OracleParameters LoopConfig::oracle() const {
  OracleParameters p;
  p.matrix = matrix;
  p.c_f = c_f;
  p.fiber = StructuralTensorSet(A_rve);
  return p;
}

VoxelRVE LoopConfig::voxel_rve() const {
  VoxelRVE r = VoxelRVE::random_fibers(voxel_n, voxel_fiber_fraction, voxel_seed);
  r.matrix = matrix;
  r.fiber = fiber;
  return r;
}

TrainingConfig LoopConfig::training_for(int iteration, int repeat) const {
  TrainingConfig t = training;
  t.fiber_direction = A_rve;
  t.threads = threads;
  t.seed = seed + 1000003ULL * static_cast<std::uint64_t>(iteration) + 7919ULL * static_cast<std::uint64_t>(repeat);
  return t;
}

namespace {

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::istringstream ss(text);
  std::vector<double> v;
  for (std::string tok; ss >> tok;) {
    try {
      v.push_back(parse_double(tok));
    } catch (const FormatError&) {
      throw FormatError("key '" + key + "': bad number '" + tok + "'");
    }
  }
  return v;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? " " : "") + format_double(v[k]);
  return s;
}

Vector3 parse_vector(const std::string& key, const std::string& text) {
  const auto v = parse_list(key, text);
  if (v.size() != 3) throw FormatError("key '" + key + "' needs three components");
  const Vector3 a(v[0], v[1], v[2]);
  if (!(a.norm() > 0.0)) throw InvalidParameters("key '" + key + "' must be a non-zero vector");
  return a.normalized();
}

class Reader {
 public:
  explicit Reader(const boost::property_tree::ptree& tree) : tree_(tree) {}

  template <class T>
  void get(const std::string& key, T& value) {
    seen_.insert(key);
    const auto v = tree_.get_optional<std::string>(boost::property_tree::ptree::path_type(key, '.'));
    if (!v) return;
    try {
      if constexpr (std::is_same_v<T, std::string>) {
        value = *v;
      } else if constexpr (std::is_same_v<T, double>) {
        value = parse_double(*v);
      } else {
        std::size_t pos = 0;
        const long long x = std::stoll(*v, &pos);
        if (pos != v->size()) throw std::invalid_argument(*v);
        value = static_cast<T>(x);
      }
    } catch (const std::exception&) {
      throw FormatError("key '" + key + "': cannot parse '" + *v + "'");
    }
  }
  std::optional<std::string> raw(const std::string& key) {
    seen_.insert(key);
    const auto v = tree_.get_optional<std::string>(boost::property_tree::ptree::path_type(key, '.'));
    return v ? std::optional<std::string>(*v) : std::nullopt;
  }
  void reject_unknown() const {
    for (const auto& [section, body] : tree_) {
      if (body.empty() && !body.data().empty()) throw FormatError("key '" + section + "' outside of a section");
      for (const auto& [key, value] : body)
        if (!seen_.count(section + "." + key)) throw FormatError("unknown key '" + section + "." + key + "'");
    }
  }

 private:
  const boost::property_tree::ptree& tree_;
  std::set<std::string> seen_;
};

}  // namespace

LoopConfig parse_config(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  LoopConfig cfg;
  Reader r(tree);
  if (auto v = r.raw("material.matrix_mu")) cfg.matrix.mu = parse_list("material.matrix_mu", *v);
  if (auto v = r.raw("material.matrix_alpha")) cfg.matrix.alpha = parse_list("material.matrix_alpha", *v);
  r.get("material.matrix_kappa", cfg.matrix.kappa);
  if (auto v = r.raw("material.fiber_mu")) cfg.fiber.mu = parse_list("material.fiber_mu", *v);
  if (auto v = r.raw("material.fiber_alpha")) cfg.fiber.alpha = parse_list("material.fiber_alpha", *v);
  r.get("material.fiber_kappa", cfg.fiber.kappa);

  if (auto v = r.raw("oracle.backend")) cfg.backend = oracle_backend_from_string(*v);
  r.get("oracle.c_f", cfg.c_f);
  if (auto v = r.raw("oracle.fiber_direction")) cfg.A_rve = parse_vector("oracle.fiber_direction", *v);
  r.get("oracle.voxel_n", cfg.voxel_n);
  r.get("oracle.voxel_fiber_fraction", cfg.voxel_fiber_fraction);
  r.get("oracle.voxel_seed", cfg.voxel_seed);

  r.get("network.hidden", cfg.training.hidden);
  if (auto v = r.raw("network.anisotropy")) cfg.training.anisotropy = anisotropy_from_string(*v);
  if (auto v = r.raw("network.growth")) {
    if (*v != "on" && *v != "off") throw FormatError("key 'network.growth' must be on or off");
    cfg.training.growth = *v == "on" ? GrowthMode::on : GrowthMode::off;
  }

  r.get("training.restarts", cfg.training.restarts);
  r.get("training.max_iterations", cfg.training.max_iterations);
  r.get("training.tolerance", cfg.training.tolerance);
  r.get("training.train_fraction", cfg.training.train_fraction);
  r.get("training.init_scale", cfg.training.init_scale);

  r.get("loop.eps_detect", cfg.eps_detect);
  r.get("loop.eps_filter", cfg.eps_filter);
  r.get("loop.n_max", cfg.n_max);
  r.get("loop.max_inner_repeats", cfg.max_inner_repeats);
  r.get("loop.initial_steps", cfg.initial_steps);
  r.get("loop.seed", cfg.seed);
  r.get("loop.threads", cfg.threads);

  r.get("geometry.name", cfg.geometry);
  r.get("geometry.resolution", cfg.resolution);
  r.get("geometry.steps", cfg.macro_steps);
  r.reject_unknown();
  cfg.validate();
  return cfg;
}

LoopConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read config file '" + path + "'");
  return parse_config(in);
}

std::string write_config(const LoopConfig& c) {
  std::ostringstream o;
  const auto& t = c.training;
  o << "[material]\n"
    << "matrix_mu = " << join(c.matrix.mu) << "\n"
    << "matrix_alpha = " << join(c.matrix.alpha) << "\n"
    << "matrix_kappa = " << format_double(c.matrix.kappa) << "\n"
    << "fiber_mu = " << join(c.fiber.mu) << "\n"
    << "fiber_alpha = " << join(c.fiber.alpha) << "\n"
    << "fiber_kappa = " << format_double(c.fiber.kappa) << "\n\n"
    << "[oracle]\n"
    << "backend = " << to_string(c.backend) << "\n"
    << "c_f = " << format_double(c.c_f) << "\n"
    << "fiber_direction = " << format_double(c.A_rve[0]) << ' ' << format_double(c.A_rve[1]) << ' '
    << format_double(c.A_rve[2]) << "\n"
    << "voxel_n = " << c.voxel_n << "\n"
    << "voxel_fiber_fraction = " << format_double(c.voxel_fiber_fraction) << "\n"
    << "voxel_seed = " << c.voxel_seed << "\n\n"
    << "[network]\n"
    << "hidden = " << t.hidden << "\n"
    << "anisotropy = " << to_string(t.anisotropy) << "\n"
    << "growth = " << (t.growth == GrowthMode::on ? "on" : "off") << "\n\n"
    << "[training]\n"
    << "restarts = " << t.restarts << "\n"
    << "max_iterations = " << t.max_iterations << "\n"
    << "tolerance = " << format_double(t.tolerance) << "\n"
    << "train_fraction = " << format_double(t.train_fraction) << "\n"
    << "init_scale = " << format_double(t.init_scale) << "\n\n"
    << "[loop]\n"
    << "eps_detect = " << format_double(c.eps_detect) << "\n"
    << "eps_filter = " << format_double(c.eps_filter) << "\n"
    << "n_max = " << c.n_max << "\n"
    << "max_inner_repeats = " << c.max_inner_repeats << "\n"
    << "initial_steps = " << c.initial_steps << "\n"
    << "seed = " << c.seed << "\n"
    << "threads = " << c.threads << "\n\n"
    << "[geometry]\n"
    << "name = " << c.geometry << "\n"
    << "resolution = " << c.resolution << "\n"
    << "steps = " << c.macro_steps << "\n";
  return o.str();
}

}  // namespace feann
