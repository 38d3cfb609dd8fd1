#pragma once

#include "feann/surrogate/surrogate.hpp"
#include "feann/training/dataset.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace feann {

enum class GrowthMode { off, on };

struct TrainingConfig {
  int restarts = 25;
  int max_iterations = 1000;
  double tolerance = 1e-10;  // relative loss decrease
  double train_fraction = 0.8;
  std::uint64_t seed = 1;
  GrowthMode growth = GrowthMode::off;
  double init_scale = 1.0;
  int hidden = kDefaultHiddenWidth;
  AnisotropyClass anisotropy = AnisotropyClass::transversely_isotropic;
  Vector3 fiber_direction = Vector3::UnitZ();  // RVE frame
  int threads = 1;

  void validate() const;
};

struct TrainingReport {
  double best_loss = 0.0;
  double test_loss = 0.0;
  std::vector<double> restart_losses;
  std::vector<bool> restart_feasible;
  int chosen_restart = -1;
  double wall_seconds = 0.0;
  bool constraint_satisfied = false;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::uint64_t seed = 0;
  GrowthMode growth = GrowthMode::off;

  std::string to_json() const;
};

struct TrainingResult {
  SurrogateWeights weights;
  TrainingReport report;
};

/// Per-tuple pull-back T = sym(F^-1 P) together with the invariant
/// information the loss needs; built once per data set.
struct TrainingSample {
  std::array<double, kInvariantCount> inputs{};     // normalized invariants
  std::array<Vector6, kInvariantCount> generators;  // scale(s) * dI_s/dC
  Vector6 target;                                   // T components
};

/// Throws InvalidParameters if F^-1 P is asymmetric beyond 1e-8 max(1, |T|).
SymTensor2 second_piola_target(const DataTuple& d);

std::vector<TrainingSample> prepare_samples(const DataSet& D, const StructuralTensorSet& M,
                                            const NormalizationBounds& bounds, AnisotropyClass c);

/// Sum over tuples of the Euclidean norm of the six-slot stress residual.
double sobolev_loss(const DataSet& D, const SurrogateWeights& W, const StructuralTensorSet& M);
double sobolev_loss(const std::vector<TrainingSample>& samples, const SurrogateWeights& W);

/// Flat parameter layout used by the optimizer: per neuron (W_a, b_a, then
/// the input weights of the active slots in slot order). B is not a parameter.
Eigen::VectorXd pack_parameters(const SurrogateWeights& W);
void unpack_parameters(const Eigen::VectorXd& theta, SurrogateWeights& W);
/// Analytic d(loss)/d(theta) in the pack_parameters layout.
Eigen::VectorXd sobolev_loss_gradient(const std::vector<TrainingSample>& samples, const SurrogateWeights& W);

/// Seeded shuffle; train size round(fraction n) clamped to [1, n - 1].
std::pair<DataSet, DataSet> split(const DataSet& D, const TrainingConfig& cfg);

/// Multi-restart fit; returns the best feasible restart by training loss with
/// the bias fixed. Throws EmptyDataSet, NoFeasibleRestart.
TrainingResult train(const DataSet& D, const TrainingConfig& cfg);

/// Invariants of every tuple (RVE frame).
std::vector<InvariantVector> dataset_invariants(const DataSet& D, const StructuralTensorSet& M, AnisotropyClass c);

}  // namespace feann
