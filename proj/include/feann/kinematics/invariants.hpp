#pragma once

#include "feann/kinematics/tensor.hpp"

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace feann {

enum class AnisotropyClass { isotropic, transversely_isotropic };

const char* to_string(AnisotropyClass c);
AnisotropyClass anisotropy_from_string(const std::string& s);

/// Slots of the invariant vector. I3s is the reciprocal 1/I3, handled as an
/// independent input of the surrogate.
enum InvariantSlot : int { kI1 = 0, kI2 = 1, kI3 = 2, kI4 = 3, kI5 = 4, kI3s = 5 };
inline constexpr int kInvariantCount = 6;

/// Invariant slots that carry information for a given class.
std::vector<int> active_slots(AnisotropyClass c);

struct InvariantVector {
  std::array<double, kInvariantCount> values{};
  AnisotropyClass anisotropy = AnisotropyClass::transversely_isotropic;

  double operator[](int slot) const { return values[slot]; }
  double& operator[](int slot) { return values[slot]; }
};

/// Fiber direction A (unit) and M = A (x) A.
class StructuralTensorSet {
 public:
  /// Requires |a| = 1 within 1e-12; throws InvalidParameters otherwise.
  explicit StructuralTensorSet(const Vector3& a);
  static StructuralTensorSet from_direction(const Vector3& a) { return StructuralTensorSet(a.normalized()); }

  const Vector3& direction() const { return a_; }
  const SymTensor2& M() const { return m_; }
  StructuralTensorSet rotated(const Tensor2& Q) const { return StructuralTensorSet::from_direction(Q * a_); }

 private:
  Vector3 a_;
  SymTensor2 m_;
};

/// I1 = tr C, I2 = tr(Cof C), I3 = det C, I3s = 1/I3 and, with a structural
/// tensor, I4 = M : C and I5 = M : C^2. Requires C positive definite.
InvariantVector invariants(const SymTensor2& C, const std::optional<StructuralTensorSet>& M = std::nullopt);

/// (I1, I2, I3) from cluster stretches and multiplicities.
std::array<double, 3> invariants_from_stretches(std::span<const double> stretches, std::span<const int> multiplicities);

/// dI/dC for all six slots; I4 and I5 entries are zero without a structural tensor.
std::array<SymTensor2, kInvariantCount> invariant_gradients(const SymTensor2& C,
                                                            const std::optional<StructuralTensorSet>& M = std::nullopt);

/// d2I/dCdC for all six slots, same layout as invariant_gradients.
std::array<Tensor4Sym, kInvariantCount> invariant_hessians(const SymTensor2& C,
                                                           const std::optional<StructuralTensorSet>& M = std::nullopt);

}  // namespace feann
