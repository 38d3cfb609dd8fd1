#include "feann/training/training.hpp"

#include "feann/errors.hpp"
#include "feann/kinematics/kinematics.hpp"

#include <ceres/ceres.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

namespace feann {

void TrainingConfig::validate() const {
  if (restarts < 1) throw InvalidParameters("restart count must be at least 1");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw InvalidParameters("train fraction must lie in (0, 1)");
  if (max_iterations < 1) throw InvalidParameters("max optimizer iterations must be at least 1");
  if (hidden < 1) throw InvalidParameters("hidden width must be at least 1");
  if (!(init_scale > 0.0)) throw InvalidParameters("weight-initialization scale must be positive");
  if (threads < 1) throw InvalidParameters("thread count must be at least 1");
}

std::string TrainingReport::to_json() const {
  nlohmann::json j;
  j["best_loss"] = best_loss;
  j["test_loss"] = test_loss;
  j["restart_losses"] = restart_losses;
  j["restart_feasible"] = restart_feasible;
  j["chosen_restart"] = chosen_restart;
  j["wall_seconds"] = wall_seconds;
  j["constraint_satisfied"] = constraint_satisfied;
  j["train_size"] = train_size;
  j["test_size"] = test_size;
  j["seed"] = seed;
  j["growth_constrained"] = growth == GrowthMode::on;
  return j.dump(2);
}

SymTensor2 second_piola_target(const DataTuple& d) {
  const Tensor2 T = d.F.inverse() * d.P;
  const double asym = (T - T.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8 * std::max(1.0, T.norm()))
    throw InvalidParameters("pulled-back stress of tuple (path " + std::to_string(d.path_id) + ", step " +
                            std::to_string(d.step) + ") is not symmetric");
  return SymTensor2::from_matrix(T);
}

std::vector<InvariantVector> dataset_invariants(const DataSet& D, const StructuralTensorSet& M, AnisotropyClass c) {
  std::vector<InvariantVector> out;
  out.reserve(D.size());
  const auto m = c == AnisotropyClass::isotropic ? std::nullopt : std::optional<StructuralTensorSet>(M);
  for (const auto& d : D.tuples) out.push_back(invariants(right_cauchy_green(d.F), m));
  return out;
}

std::vector<TrainingSample> prepare_samples(const DataSet& D, const StructuralTensorSet& M,
                                            const NormalizationBounds& bounds, AnisotropyClass c) {
  const auto m = c == AnisotropyClass::isotropic ? std::nullopt : std::optional<StructuralTensorSet>(M);
  const auto slots = active_slots(c);
  std::vector<TrainingSample> out;
  out.reserve(D.size());
  for (const auto& d : D.tuples) {
    const SymTensor2 C = right_cauchy_green(d.F);
    TrainingSample s;
    s.inputs = surrogate::normalize(invariants(C, m), bounds);
    const auto G = invariant_gradients(C, m);
    for (auto& g : s.generators) g.setZero();
    for (int slot : slots) s.generators[slot] = bounds.scale(slot) * G[slot].components();
    s.target = second_piola_target(d).components();
    out.push_back(s);
  }
  return out;
}

namespace {

struct NeuronState {
  double sigma;
  double dsigma;
};

/// Stress residual of one sample; fills per-neuron activations.
Vector6 residual(const TrainingSample& s, const SurrogateWeights& W, const std::vector<int>& slots,
                 std::vector<NeuronState>& neurons, std::array<double, kInvariantCount>& g) {
  g.fill(0.0);
  for (int a = 0; a < W.hidden(); ++a) {
    double z = W.b[a];
    for (int slot : slots) z += W.input_weight(a, slot) * s.inputs[slot];
    const double sig = sigmoid(z);
    neurons[a] = {sig, sig * (1.0 - sig)};
    for (int slot : slots) g[slot] += W.W[a] * sig * W.input_weight(a, slot);
  }
  Vector6 T = Vector6::Zero();
  for (int slot : slots) T += (2.0 * g[slot]) * s.generators[slot];
  return T - s.target;
}

int per_neuron(AnisotropyClass c) { return 2 + static_cast<int>(active_slots(c).size()); }

}  // namespace

double sobolev_loss(const std::vector<TrainingSample>& samples, const SurrogateWeights& W) {
  if (samples.empty()) throw EmptyDataSet();
  const auto slots = active_slots(W.anisotropy);
  std::vector<NeuronState> neurons(W.hidden());
  std::array<double, kInvariantCount> g;
  double L = 0.0;
  for (const auto& s : samples) L += residual(s, W, slots, neurons, g).norm();
  return L;
}

double sobolev_loss(const DataSet& D, const SurrogateWeights& W, const StructuralTensorSet& M) {
  if (D.empty()) throw EmptyDataSet();
  return sobolev_loss(prepare_samples(D, M, W.bounds, W.anisotropy), W);
}

Eigen::VectorXd pack_parameters(const SurrogateWeights& W) {
  const auto slots = active_slots(W.anisotropy);
  const int stride = per_neuron(W.anisotropy);
  Eigen::VectorXd theta(W.hidden() * stride);
  for (int a = 0; a < W.hidden(); ++a) {
    theta[a * stride] = W.W[a];
    theta[a * stride + 1] = W.b[a];
    for (std::size_t k = 0; k < slots.size(); ++k) theta[a * stride + 2 + k] = W.input_weight(a, slots[k]);
  }
  return theta;
}

void unpack_parameters(const Eigen::VectorXd& theta, SurrogateWeights& W) {
  const auto slots = active_slots(W.anisotropy);
  const int stride = per_neuron(W.anisotropy);
  if (theta.size() != W.hidden() * stride) throw InvalidParameters("parameter vector has wrong length");
  for (int a = 0; a < W.hidden(); ++a) {
    W.W[a] = theta[a * stride];
    W.b[a] = theta[a * stride + 1];
    for (std::size_t k = 0; k < slots.size(); ++k) {
      const double v = theta[a * stride + 2 + k];
      if (slots[k] == kI3s)
        W.w_star[a] = v;
      else
        W.w(a, slots[k]) = v;
    }
  }
}

Eigen::VectorXd sobolev_loss_gradient(const std::vector<TrainingSample>& samples, const SurrogateWeights& W) {
  if (samples.empty()) throw EmptyDataSet();
  const auto slots = active_slots(W.anisotropy);
  const int stride = per_neuron(W.anisotropy);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(W.hidden() * stride);
  std::vector<NeuronState> neurons(W.hidden());
  std::array<double, kInvariantCount> g;
  std::array<double, kInvariantCount> u{};
  for (const auto& s : samples) {
    const Vector6 r = residual(s, W, slots, neurons, g);
    const double e = r.norm();
    if (e == 0.0) continue;
    for (int slot : slots) u[slot] = 2.0 * s.generators[slot].dot(r) / e;
    for (int a = 0; a < W.hidden(); ++a) {
      double wu = 0.0;
      for (int slot : slots) wu += W.input_weight(a, slot) * u[slot];
      const auto [sig, dsig] = neurons[a];
      double* ga = grad.data() + a * stride;
      ga[0] += sig * wu;
      ga[1] += W.W[a] * dsig * wu;
      for (std::size_t k = 0; k < slots.size(); ++k)
        ga[2 + k] += W.W[a] * (sig * u[slots[k]] + dsig * wu * s.inputs[slots[k]]);
    }
  }
  return grad;
}

std::pair<DataSet, DataSet> split(const DataSet& D, const TrainingConfig& cfg) {
  const std::size_t n = D.size();
  if (n < 2) throw InvalidParameters("split needs at least two tuples");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(cfg.seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng() % (i + 1)]);
  const auto n_train = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(cfg.train_fraction * n)), 1, n - 1);
  std::sort(order.begin(), order.begin() + n_train);
  std::sort(order.begin() + n_train, order.end());
  DataSet train, test;
  train.iteration = test.iteration = D.iteration;
  for (std::size_t k = 0; k < n; ++k) (k < n_train ? train : test).tuples.push_back(D.tuples[order[k]]);
  return {train, test};
}

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double inverse_softplus(double y) { return y > 30.0 ? y : std::log(std::expm1(y)); }

/// Optimizer view of the weights: W_a = S x_W (or S SP(x_W) with growth), and
/// in growth mode neuron 0's w_a3 and w*_a3 pass through softplus.
class Parameterization {
 public:
  Parameterization(const SurrogateWeights& shape, double stress_scale, bool growth)
      : shape_(shape), S_(stress_scale), growth_(growth), stride_(per_neuron(shape.anisotropy)) {
    const auto slots = active_slots(shape.anisotropy);
    for (std::size_t k = 0; k < slots.size(); ++k) {
      if (slots[k] == kI3) i3_ = 2 + static_cast<int>(k);
      if (slots[k] == kI3s) i3s_ = 2 + static_cast<int>(k);
    }
  }

  int size() const { return shape_.hidden() * stride_; }

  SurrogateWeights weights(const double* x) const {
    Eigen::VectorXd theta = Eigen::Map<const Eigen::VectorXd>(x, size());
    for (int a = 0; a < shape_.hidden(); ++a) theta[a * stride_] = S_ * (growth_ ? softplus(x[a * stride_]) : x[a * stride_]);
    if (growth_) {
      theta[i3_] = softplus(x[i3_]);
      theta[i3s_] = softplus(x[i3s_]);
    }
    SurrogateWeights W = shape_;
    unpack_parameters(theta, W);
    return W;
  }

  /// Maps d/d(theta) to d/dx in place.
  void chain(const double* x, Eigen::VectorXd& grad) const {
    for (int a = 0; a < shape_.hidden(); ++a) grad[a * stride_] *= S_ * (growth_ ? sigmoid(x[a * stride_]) : 1.0);
    if (growth_) {
      grad[i3_] *= sigmoid(x[i3_]);
      grad[i3s_] *= sigmoid(x[i3s_]);
    }
  }

  /// Optimizer coordinates of a weight set (projected to the feasible
  /// interior in growth mode).
  Eigen::VectorXd coordinates(const SurrogateWeights& W) const {
    Eigen::VectorXd x = pack_parameters(W);
    for (int a = 0; a < shape_.hidden(); ++a) {
      const double v = x[a * stride_] / S_;
      x[a * stride_] = growth_ ? inverse_softplus(std::max(v, 1e-3)) : v;
    }
    if (growth_) {
      x[i3_] = inverse_softplus(std::max(x[i3_], 1e-3));
      x[i3s_] = inverse_softplus(std::max(x[i3s_], 1e-3));
    }
    return x;
  }

 private:
  SurrogateWeights shape_;
  double S_;
  bool growth_;
  int stride_;
  int i3_ = -1;
  int i3s_ = -1;
};

class LossFunction final : public ceres::FirstOrderFunction {
 public:
  LossFunction(const std::vector<TrainingSample>& samples, const Parameterization& param, double normalizer)
      : samples_(samples), param_(param), normalizer_(normalizer) {}

  bool Evaluate(const double* x, double* cost, double* gradient) const override {
    const SurrogateWeights W = param_.weights(x);
    cost[0] = sobolev_loss(samples_, W) / normalizer_;
    if (!std::isfinite(cost[0])) return false;
    if (gradient) {
      Eigen::VectorXd g = sobolev_loss_gradient(samples_, W) / normalizer_;
      param_.chain(x, g);
      if (!g.allFinite()) return false;
      std::copy(g.data(), g.data() + g.size(), gradient);
    }
    return true;
  }

  int NumParameters() const override { return param_.size(); }

 private:
  const std::vector<TrainingSample>& samples_;
  const Parameterization& param_;
  double normalizer_;
};

SurrogateWeights initial_weights(const SurrogateWeights& shape, double stress_scale, double init_scale,
                                 std::uint64_t seed, int restart) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(restart) + 1);
  SurrogateWeights W = shape;
  const auto slots = active_slots(shape.anisotropy);
  for (int a = 0; a < W.hidden(); ++a) {
    W.W[a] = stress_scale * (0.05 + 0.45 * uniform01(rng));
    W.b[a] = 0.0;
    for (int slot : slots) {
      const double v = init_scale * (2.0 * uniform01(rng) - 1.0);
      if (slot == kI3s)
        W.w_star[a] = v;
      else
        W.w(a, slot) = v;
    }
  }
  return W;
}

struct RestartOutcome {
  SurrogateWeights weights;
  double loss = std::numeric_limits<double>::infinity();
  bool feasible = false;
};

}  // namespace

TrainingResult train(const DataSet& D, const TrainingConfig& cfg) {
  cfg.validate();
  if (D.empty()) throw EmptyDataSet();
  const auto t0 = std::chrono::steady_clock::now();
  const auto [train_set, test_set] = split(D, cfg);
  const StructuralTensorSet M = StructuralTensorSet::from_direction(cfg.fiber_direction);

  SurrogateWeights shape = SurrogateWeights::zeros(cfg.hidden, cfg.anisotropy);
  shape.bounds = NormalizationBounds::from_samples(dataset_invariants(train_set, M, cfg.anisotropy), cfg.anisotropy);
  shape.growth_constrained = cfg.growth == GrowthMode::on;
  const auto samples = prepare_samples(train_set, M, shape.bounds, cfg.anisotropy);
  const auto test_samples = prepare_samples(test_set, M, shape.bounds, cfg.anisotropy);

  double stress_scale = 0.0;
  for (const auto& s : samples) stress_scale += s.target.norm();
  stress_scale /= static_cast<double>(samples.size());
  if (!(stress_scale > 0.0)) stress_scale = 1.0;

  const bool growth = cfg.growth == GrowthMode::on;
  const Parameterization param(shape, stress_scale, growth);
  const double normalizer = stress_scale * static_cast<double>(samples.size());

  std::vector<RestartOutcome> outcomes(cfg.restarts);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k = next++; k < cfg.restarts; k = next++) {
      const auto init = initial_weights(shape, stress_scale, cfg.init_scale, cfg.seed, k);
      Eigen::VectorXd x = param.coordinates(init);
      ceres::GradientProblem problem(new LossFunction(samples, param, normalizer));
      ceres::GradientProblemSolver::Options options;
      options.line_search_direction_type = ceres::BFGS;
      options.max_num_iterations = cfg.max_iterations;
      options.function_tolerance = cfg.tolerance;
      options.gradient_tolerance = 1e-12;
      options.parameter_tolerance = 1e-14;
      options.logging_type = ceres::SILENT;
      ceres::GradientProblemSolver::Summary summary;
      ceres::Solve(options, problem, x.data(), &summary);
      RestartOutcome out;
      out.weights = surrogate::fix_normalization_bias(param.weights(x.data()));
      out.loss = sobolev_loss(samples, out.weights);
      out.feasible = std::isfinite(out.loss) && (!growth || surrogate::check_growth_constraint(out.weights).satisfied);
      outcomes[k] = std::move(out);
    }
  };
  const int nthreads = std::min(cfg.threads, cfg.restarts);
  std::vector<std::thread> pool;
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  TrainingReport report;
  report.seed = cfg.seed;
  report.growth = cfg.growth;
  report.train_size = train_set.size();
  report.test_size = test_set.size();
  for (int k = 0; k < cfg.restarts; ++k) {
    report.restart_losses.push_back(outcomes[k].loss);
    report.restart_feasible.push_back(outcomes[k].feasible);
    if (outcomes[k].feasible && (report.chosen_restart < 0 || outcomes[k].loss < outcomes[report.chosen_restart].loss))
      report.chosen_restart = k;
  }
  if (report.chosen_restart < 0) {
    if (growth) throw NoFeasibleRestart();
    throw NonFiniteValue("every training restart produced a non-finite loss");
  }
  TrainingResult result{outcomes[report.chosen_restart].weights, {}};
  report.best_loss = outcomes[report.chosen_restart].loss;
  report.test_loss = test_samples.empty() ? 0.0 : sobolev_loss(test_samples, result.weights);
  report.constraint_satisfied = surrogate::check_growth_constraint(result.weights).satisfied;
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  result.report = std::move(report);
  return result;
}

}  // namespace feann
