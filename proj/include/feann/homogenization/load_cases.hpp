#pragma once

#include "feann/kinematics/tensor.hpp"

#include <array>
#include <string>
#include <vector>

namespace feann {

/// Per-component control of the macroscopic state: each F component is either
/// prescribed (with a value) or free with the matching P component held at zero.
struct MixedControl {
  std::array<std::array<bool, 3>, 3> prescribed{};
  Tensor2 value = Tensor2::Identity();

  static MixedControl full(const Tensor2& F);
  /// Throws InvalidParameters if no component is prescribed.
  void validate() const;
  int free_count() const;
  /// Row-major component indices (3 i + J) of the free components.
  std::vector<int> free_components() const;
};

enum class LoadKind { uniaxial, equibiaxial, uniaxial_compression, equibiaxial_compression, simple_shear };

const char* to_string(LoadKind k);

struct LoadCase {
  LoadKind kind = LoadKind::uniaxial;
  /// Loaded axis (and second axis for pairs; for shear F(axes[0], axes[1]) = gamma).
  std::array<int, 2> axes{0, -1};
  double amplitude = 1.0;  // stretch, or shear for simple_shear
  int steps = 20;

  /// Throws InvalidParameters on out-of-range axes, repeated pair axes or non-positive stretch.
  void validate() const;
  /// Control at pseudo-time t in [0, 1] with a linear ramp from the identity.
  MixedControl control(double t) const;
  std::string name() const;
};

/// The 18 initial load cases: uniaxial tension 1.60 and compression 0.70 along
/// each axis, equibiaxial tension 1.30 and compression 0.85 for each axis pair,
/// and simple shear 0.50 for the six ordered axis pairs.
std::vector<LoadCase> initial_load_suite(int steps = 20);

}  // namespace feann
