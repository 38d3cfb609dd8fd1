#pragma once

#include "feann/constitutive/oracle.hpp"
#include "feann/homogenization/load_cases.hpp"

#include <functional>
#include <vector>

namespace feann {

/// Nominal stress P(F) of some homogeneous material.
using NominalResponse = std::function<Tensor2(const Tensor2&)>;

struct PathPoint {
  double t;
  Tensor2 F;
  Tensor2 P;
};

struct MaterialPointOptions {
  double tolerance_factor = 1e-9;  // times the stress scale
  int max_iterations = 25;
};

/// Solves the free F components so that the matching P components vanish
/// (|P_free|_inf <= tolerance_factor * stress_scale), starting from guess.
/// Throws NewtonDivergence.
Tensor2 solve_mixed_control(const NominalResponse& response, const MixedControl& ctrl, const Tensor2& guess,
                            double stress_scale, const MaterialPointOptions& options = {}, int step = 0);

/// Drives a material point along a load case, returning t_0 ... t_steps.
std::vector<PathPoint> drive_material_point(const NominalResponse& response, const LoadCase& load, double stress_scale,
                                            const MaterialPointOptions& options = {});
std::vector<PathPoint> drive_material_point(const OracleParameters& oracle, const LoadCase& load,
                                            const MaterialPointOptions& options = {});

/// Evaluates a fully prescribed deformation path.
std::vector<PathPoint> evaluate_path(const OracleParameters& oracle, const std::vector<Tensor2>& F,
                                     const std::vector<double>& t);

NominalResponse oracle_response(const OracleParameters& oracle);

}  // namespace feann
