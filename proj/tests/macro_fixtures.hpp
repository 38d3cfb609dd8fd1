#pragma once

#include "feann/constitutive/ogden.hpp"
#include "feann/homogenization/material_point.hpp"
#include "feann/kinematics/kinematics.hpp"
#include "feann/macro/solver.hpp"
#include "feann/training/training.hpp"

#include <string>
#include <vector>

namespace feann::testing {

inline const StructuralTensorSet kE1(Vector3::UnitX());

/// Small hand-made isotropic potential, stress free at the identity: a
/// neuron on I1 balanced by I3*, and a volumetric neuron on I3 and I3*.
inline SurrogateWeights toy_surrogate() {
  SurrogateWeights W = SurrogateWeights::zeros(2, AnisotropyClass::isotropic);
  W.bounds.min = {2.0, 2.0, 0.5, -1.0, -1.0, 0.5};
  W.bounds.max = {4.0, 4.0, 1.5, 1.0, 1.0, 1.5};
  W.w(0, kI1) = 1.0;
  W.w_star[0] = 0.5;
  W.w(1, kI3) = 1.0;
  W.w_star[1] = 1.0;
  W.W << 60.0, 80.0;
  return surrogate::fix_normalization_bias(W);
}

inline NominalResponse surrogate_response(const SurrogateWeights& W, const StructuralTensorSet& M) {
  return [W, M](const Tensor2& F) { return Tensor2(F * surrogate::stress(right_cauchy_green(F), M, W).matrix()); };
}

inline NominalResponse ogden_response(const OgdenParameters& p) {
  return [p](const Tensor2& F) { return nominal_stress(F, ogden_stress(F, p)); };
}

/// Isotropic surrogate fitted to the matrix material on uniaxial and
/// equibiaxial paths.
inline const SurrogateWeights& fitted_matrix_surrogate() {
  static const SurrogateWeights W = [] {
    const auto p = OgdenParameters::matrix_defaults();
    const double G = initial_moduli(p).G;
    DataSet D;
    int id = 0;
    for (const LoadCase& load : {LoadCase{LoadKind::uniaxial, {0, -1}, 1.6, 12},
                                 LoadCase{LoadKind::uniaxial_compression, {0, -1}, 0.7, 8},
                                 LoadCase{LoadKind::equibiaxial, {0, 1}, 1.3, 8},
                                 LoadCase{LoadKind::simple_shear, {0, 1}, 0.5, 8}}) {
      const auto path = drive_material_point(ogden_response(p), load, G);
      for (std::size_t k = 0; k < path.size(); ++k) D.tuples.push_back({path[k].F, path[k].P, id, int(k), path[k].t});
      ++id;
    }
    TrainingConfig cfg;
    cfg.anisotropy = AnisotropyClass::isotropic;
    cfg.train_fraction = 0.9;
    cfg.restarts = 3;
    cfg.max_iterations = 3000;
    cfg.seed = 5;
    return train(D, cfg).weights;
  }();
  return W;
}

inline std::vector<BoundaryCondition> uniaxial_bar_bcs(double length, double lambda) {
  return {BoundaryCondition::roller("x1_min", 0), BoundaryCondition::roller("x2_min", 1),
          BoundaryCondition::roller("x3_min", 2), BoundaryCondition::roller("x1_max", 0, (lambda - 1.0) * length)};
}

}  // namespace feann::testing
