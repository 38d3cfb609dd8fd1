#pragma once

#include "feann/macro/solver.hpp"

#include <string>
#include <vector>

namespace feann {

/// A built-in macroscopic boundary value problem.
struct MacroProblemSpec {
  std::string name;
  MacroMesh mesh;
  std::vector<BoundaryCondition> bcs;
  Vector3 fiber_direction = Vector3::UnitX();  // A_macro
  int steps = 15;
};

/// "cuboid-hole", "torsion-bar" or "cook-membrane" at the given mesh
/// resolution (>= 1). Holes are carved voxel-wise: cells whose centre lies
/// inside the cylinder are removed. Throws UnknownGeometry.
MacroProblemSpec builtin_geometry(const std::string& name, int resolution = 1);

std::vector<std::string> builtin_geometry_names();

}  // namespace feann
