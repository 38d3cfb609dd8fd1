#pragma once

#include "feann/kinematics/tensor.hpp"

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace feann {

/// Local node a of a hex8 sits at reference corner
/// ((a & 1) ? 1 : -1, (a & 2) ? 1 : -1, (a & 4) ? 1 : -1).
using HexConnectivity = std::array<int, 8>;
using QuadFace = std::array<int, 4>;

inline constexpr int kHexQuadraturePoints = 8;

/// Shape functions and reference gradients of the trilinear hexahedron.
struct HexShape {
  Eigen::Matrix<double, 8, 1> N;
  Eigen::Matrix<double, 8, 3> dN;  // d N_a / d xi_J

  static HexShape at(const Vector3& xi);
  /// Gauss point q of the 2x2x2 rule (weights 1).
  static const Vector3& gauss_point(int q);
};

struct MacroMesh {
  std::vector<Vector3> nodes;  // mm
  std::vector<HexConnectivity> elements;
  std::map<std::string, std::vector<int>> node_sets;
  std::map<std::string, std::vector<QuadFace>> face_sets;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int element_count() const { return static_cast<int>(elements.size()); }
  int point_count() const { return element_count() * kHexQuadraturePoints; }
  /// Throws InvalidParameters on bad indices and NonPositiveJacobian if some
  /// reference Jacobian at a quadrature point is not positive.
  void validate() const;
  /// Reference-configuration volume by quadrature.
  double volume() const;

  /// Structured nx x ny x nz grid of the unit cube mapped through `map`;
  /// cells whose mapped centre satisfies `remove` are dropped and unused
  /// nodes compacted. Node sets "x1_min", "x1_max", ... collect the nodes on
  /// the six logical faces, and face sets of the same names their quads.
  static MacroMesh structured(std::array<int, 3> divisions, const std::function<Vector3(const Vector3&)>& map,
                              const std::function<bool(const Vector3&)>& remove = {});
  static MacroMesh box(const Vector3& size, std::array<int, 3> divisions);
};

}  // namespace feann
