#pragma once

#include "feann/kinematics/tensor.hpp"

#include <vector>

namespace feann {

/// Compressible Ogden model with a Flory split: N_O isochoric terms and the
/// volumetric function (kappa/4)(J^2 - 2 ln J - 1).
struct OgdenParameters {
  std::vector<double> mu;     // kPa
  std::vector<double> alpha;  // dimensionless
  double kappa = 0.0;         // kPa

  /// Throws InvalidParameters unless every term has (alpha < -1 or alpha >= 2)
  /// and mu * alpha > 0, and kappa > 0.
  void validate() const;
  int terms() const { return static_cast<int>(mu.size()); }

  static OgdenParameters matrix_defaults();
  static OgdenParameters fiber_defaults();
  static OgdenParameters neo_hookean(double mu1, double kappa);
};

struct InitialModuli {
  double G;
  double nu;
};

/// G = sum(alpha mu) / 2 and nu from kappa = (2/3) G (1 + nu) / (1 - 2 nu).
InitialModuli initial_moduli(const OgdenParameters& p);
/// kappa = (2/3) G (1 + nu) / (1 - 2 nu)
double bulk_from_moduli(double G, double nu);

double ogden_energy(const Tensor2& F, const OgdenParameters& p);
double ogden_energy(const SymTensor2& C, const OgdenParameters& p);

/// Second Piola-Kirchhoff stress assembled over the spectral projectors of C.
SymTensor2 ogden_stress(const Tensor2& F, const OgdenParameters& p);
SymTensor2 ogden_stress(const SymTensor2& C, const OgdenParameters& p);

/// Material tangent 2 dT/dC by central differences of ogden_stress (step h).
Tensor4Sym ogden_tangent(const SymTensor2& C, const OgdenParameters& p, double h = 1e-6);

}  // namespace feann
