#pragma once

#include "feann/kinematics/invariants.hpp"

#include <Eigen/Dense>

#include <array>
#include <string>

namespace feann {

inline constexpr int kSurrogateFormatVersion = 1;
inline constexpr int kDefaultHiddenWidth = 15;

/// Per-invariant min/max of the training data, used to map each invariant
/// affinely onto [-1, 1] inside the data hull.
struct NormalizationBounds {
  std::array<double, kInvariantCount> min{};
  std::array<double, kInvariantCount> max{};

  /// Bounds of the given samples over the active slots of the class; unused
  /// slots get (-1, 1). Throws InvalidParameters on a degenerate range.
  static NormalizationBounds from_samples(const std::vector<InvariantVector>& samples, AnisotropyClass c);
  /// Throws InvalidParameters unless max > min on every active slot.
  void validate(AnisotropyClass c) const;
  /// d(normalized)/d(invariant) = 2 / (max - min)
  double scale(int slot) const { return 2.0 / (max[slot] - min[slot]); }
};

/// Weights of the one-hidden-layer Softplus energy network. Input column
/// order is I1, I2, I3, I4, I5; the extra invariant I3* has its own column.
struct SurrogateWeights {
  AnisotropyClass anisotropy = AnisotropyClass::transversely_isotropic;
  bool growth_constrained = false;
  Eigen::MatrixXd w;       // N x 5
  Eigen::VectorXd w_star;  // N, weights of I3*
  Eigen::VectorXd b;       // N
  Eigen::VectorXd W;       // N
  double B = 0.0;
  NormalizationBounds bounds;

  static SurrogateWeights zeros(int hidden, AnisotropyClass c);
  int hidden() const { return static_cast<int>(W.size()); }
  /// Throws InvalidParameters on inconsistent shapes or non-finite entries.
  void validate() const;
  /// Input weight of neuron a on slot s (s = kI3s selects w_star).
  double input_weight(int a, int slot) const { return slot == kI3s ? w_star[a] : w(a, slot); }
};

double softplus(double x);
/// Logistic sigmoid, the derivative of softplus.
double sigmoid(double x);

struct GrowthReport {
  bool satisfied;
  double C3;
  double C3_star;
};

namespace surrogate {

/// (I - mid) * 2 / (max - min) per slot, unclamped. Inactive slots map to 0.
std::array<double, kInvariantCount> normalize(const InvariantVector& I, const NormalizationBounds& bounds);

double energy(const SymTensor2& C, const StructuralTensorSet& M, const SurrogateWeights& W);
/// T = 2 d(psi)/dC via the invariant generators.
SymTensor2 stress(const SymTensor2& C, const StructuralTensorSet& M, const SurrogateWeights& W);
/// 4 d2(psi)/dCdC
Tensor4Sym tangent(const SymTensor2& C, const StructuralTensorSet& M, const SurrogateWeights& W);

struct StressTangent {
  SymTensor2 stress;
  Tensor4Sym tangent;
};
StressTangent stress_and_tangent(const SymTensor2& C, const StructuralTensorSet& M, const SurrogateWeights& W);

/// All output weights positive, at least one positive w_a3 and one positive w*_a3.
GrowthReport check_growth_constraint(const SurrogateWeights& W);

/// Sets B so that the energy at C = 1 is exactly zero.
SurrogateWeights fix_normalization_bias(SurrogateWeights W);

std::string to_json(const SurrogateWeights& W);
/// Throws FormatVersionMismatch or FormatError.
SurrogateWeights from_json(const std::string& text);
void save(const SurrogateWeights& W, const std::string& path);
SurrogateWeights load(const std::string& path);

}  // namespace surrogate
}  // namespace feann
