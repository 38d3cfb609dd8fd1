#pragma once

#include "feann/macro/mesh.hpp"
#include "feann/surrogate/surrogate.hpp"

#include <optional>
#include <string>
#include <vector>

namespace feann {

enum class BcKind { displacement, rotation, traction };

/// Loads ramp linearly in pseudo-time t in [0, 1].
struct BoundaryCondition {
  BcKind kind = BcKind::displacement;
  std::string set;  // node set (displacement, rotation) or face set (traction)
  /// Final displacement (mm) or dead-load nominal traction (kPa).
  Vector3 value = Vector3::Zero();
  /// Constrained components of a displacement condition.
  std::array<bool, 3> components{true, true, true};
  Vector3 axis = Vector3::UnitX();  // rotation: u = (Q(t angle) - 1)(X - centre)
  Vector3 centre = Vector3::Zero();
  double angle = 0.0;  // rad

  static BoundaryCondition clamp(const std::string& set);
  static BoundaryCondition displacement(const std::string& set, const Vector3& u);
  /// Single-component displacement (roller) condition.
  static BoundaryCondition roller(const std::string& set, int component, double u = 0.0);
  static BoundaryCondition rotation(const std::string& set, const Vector3& axis, const Vector3& centre, double angle);
  static BoundaryCondition traction(const std::string& set, const Vector3& t);

  /// Throws InvalidParameters on a non-unit axis or non-finite values.
  void validate() const;
};

struct MacroOptions {
  int steps = 15;
  int max_iterations = 20;
  int max_cutbacks = 3;
  double tolerance_factor = 1e-8;  // times the force scale
  /// Force scale G_init * area; 0 picks the surrogate's initial shear
  /// modulus times the largest bounding-box face area.
  double force_scale = 0.0;
};

/// Converged states at t_0 ... t_end of the schedule t_k = k / steps.
struct MacroState {
  int t_goal = 0;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> displacements;   // 3 per node
  std::vector<std::vector<Tensor2>> point_F;    // [step][element * 8 + q]
  std::vector<std::vector<Tensor2>> point_P;
  std::vector<std::vector<double>> residual_history;  // normalized, last attempt of each step
  double force_scale = 0.0;

  int t_end() const { return static_cast<int>(times.size()) - 1; }
  bool reached_goal() const { return t_end() == t_goal; }
};

/// One quadrature point's history F(t_0) ... F(t_end).
struct DeformationPath {
  int id = 0;
  std::vector<double> times;
  std::vector<Tensor2> F;
};

/// Incremental Newton solve of the macroscopic problem with the surrogate's
/// analytic stress and tangent. A step that still fails after the allowed
/// cutbacks ends the solve early with a partial state; failure in the first
/// step throws FirstStepDivergence.
MacroState solve_macro(const MacroMesh& mesh, const std::vector<BoundaryCondition>& bcs, const SurrogateWeights& W,
                       const StructuralTensorSet& M_macro, const MacroOptions& options = {});

std::vector<DeformationPath> collect_deformations(const MacroState& state);

/// Stored energy sum over quadrature points of w psi(F) at one step.
double internal_energy(const MacroMesh& mesh, const MacroState& state, int step, const SurrogateWeights& W,
                       const StructuralTensorSet& M);
/// Trapezoidal work of the dead loads between two stored steps.
double external_work(const MacroMesh& mesh, const std::vector<BoundaryCondition>& bcs, const MacroState& state,
                     int from, int to);

}  // namespace feann
