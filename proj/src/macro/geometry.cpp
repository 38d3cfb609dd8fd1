#include "feann/macro/geometry.hpp"

#include "feann/errors.hpp"

#include <cmath>
#include <numbers>

namespace feann {

namespace {

MacroProblemSpec cuboid_hole(int r) {
  MacroProblemSpec p;
  p.name = "cuboid-hole";
  const Vector3 size(100.0, 100.0, 25.0);
  p.mesh = MacroMesh::structured(
      {4 * r, 4 * r, r}, [size](const Vector3& s) { return Vector3(s.cwiseProduct(size)); },
      [](const Vector3& x) { return std::hypot(x[0] - 50.0, x[1] - 50.0) < 30.0; });
  p.bcs = {BoundaryCondition::clamp("x1_min"), BoundaryCondition::displacement("x1_max", Vector3(40.0, 0.0, 0.0))};
  p.fiber_direction = Vector3::UnitX();
  p.steps = 15;
  return p;
}

MacroProblemSpec torsion_bar(int r) {
  MacroProblemSpec p;
  p.name = "torsion-bar";
  const Vector3 size(200.0, 100.0, 100.0);
  p.mesh = MacroMesh::structured(
      {8 * r, 5 * r, 5 * r}, [size](const Vector3& s) { return Vector3(s.cwiseProduct(size)); },
      [](const Vector3& x) { return std::hypot(x[0] - 100.0, x[1] - 50.0) < 40.0; });
  p.bcs = {BoundaryCondition::clamp("x1_min"),
           BoundaryCondition::rotation("x1_max", Vector3::UnitX(), Vector3(200.0, 50.0, 50.0), std::numbers::pi / 4)};
  p.fiber_direction = Vector3::UnitY();
  p.steps = 15;
  return p;
}

MacroProblemSpec cook_membrane(int r) {
  MacroProblemSpec p;
  p.name = "cook-membrane";
  // Trapezoid (0,0), (48,44), (48,60), (0,44), 10 mm thick.
  p.mesh = MacroMesh::structured({4 * r, 4 * r, 1}, [](const Vector3& s) {
    const double x = 48.0 * s[0];
    const double bottom = 44.0 * s[0];
    const double top = 44.0 + 16.0 * s[0];
    return Vector3(x, bottom + s[1] * (top - bottom), 10.0 * s[2]);
  });
  p.bcs = {BoundaryCondition::clamp("x1_min"), BoundaryCondition::traction("x1_max", Vector3(0.0, 0.5, 0.0))};
  p.fiber_direction = Vector3(1.0, 0.0, 1.0) / std::sqrt(2.0);
  p.steps = 25;
  return p;
}

}  // namespace

std::vector<std::string> builtin_geometry_names() { return {"cuboid-hole", "torsion-bar", "cook-membrane"}; }

MacroProblemSpec builtin_geometry(const std::string& name, int resolution) {
  if (resolution < 1) throw InvalidParameters("mesh resolution must be at least 1");
  if (name == "cuboid-hole") return cuboid_hole(resolution);
  if (name == "torsion-bar") return torsion_bar(resolution);
  if (name == "cook-membrane") return cook_membrane(resolution);
  throw UnknownGeometry(name);
}

}  // namespace feann
