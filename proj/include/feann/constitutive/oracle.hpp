#pragma once

#include "feann/constitutive/ogden.hpp"
#include "feann/kinematics/invariants.hpp"

namespace feann {

/// Analytical transversely isotropic stand-in for the fiber composite:
/// psi = psi_Ogden(matrix) + (c_f / 2)(I4 - 1)^2.
struct OracleParameters {
  OgdenParameters matrix = OgdenParameters::matrix_defaults();
  double c_f = 450.0;  // kPa
  StructuralTensorSet fiber{Vector3::UnitZ()};

  void validate() const;
};

double oracle_energy(const Tensor2& F, const OracleParameters& p);
double oracle_energy(const SymTensor2& C, const OracleParameters& p);
SymTensor2 oracle_stress(const Tensor2& F, const OracleParameters& p);
SymTensor2 oracle_stress(const SymTensor2& C, const OracleParameters& p);
Tensor4Sym oracle_tangent(const SymTensor2& C, const OracleParameters& p);

/// First Piola-Kirchhoff stress P = F T.
inline Tensor2 nominal_stress(const Tensor2& F, const SymTensor2& T) { return F * T.matrix(); }

/// Second Piola-Kirchhoff stress T = F^-1 P, returned unsymmetrised.
inline Tensor2 pull_back(const Tensor2& F, const Tensor2& P) { return F.inverse() * P; }

}  // namespace feann
