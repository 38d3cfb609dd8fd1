#pragma once

#include "feann/kinematics/tensor.hpp"

#include <vector>

namespace feann {

/// C = F^T F. Throws NonPositiveJacobian if det F <= 0.
SymTensor2 right_cauchy_green(const Tensor2& F);

/// det F, throwing NonPositiveJacobian unless strictly positive.
double jacobian(const Tensor2& F);

inline constexpr double kDefaultClusterTolerance = 1e-8;

/// Spectral form C = sum_b lambda_b^2 P^b with eigenvalues grouped into
/// clusters of (relatively) coincident values.
struct SpectralDecomposition {
  std::vector<double> eigenvalues;      // lambda_b^2, descending
  std::vector<int> multiplicities;      // nu_b, sums to 3
  std::vector<SymTensor2> projectors;   // P^b

  int cluster_count() const { return static_cast<int>(eigenvalues.size()); }
  /// Principal stretches lambda_b = sqrt(eigenvalue).
  std::vector<double> stretches() const;
  SymTensor2 reconstruct() const;
};

/// Eigenvalues whose relative gap is at most cluster_tol share one projector,
/// built as the sum of the eigenvector dyads of the cluster.
SpectralDecomposition spectral(const SymTensor2& C, double cluster_tol = kDefaultClusterTolerance);

struct FlorySplit {
  double J;
  Tensor2 F_iso;                    // J^(-1/3) F
  std::vector<double> stretches_iso;  // J^(-1/3) lambda_b, per cluster, descending
  std::vector<int> multiplicities;
};

FlorySplit flory_split(const Tensor2& F, double cluster_tol = kDefaultClusterTolerance);

inline constexpr double kRodriguesAngleTolerance = 1e-10;

/// Rotation Q with Q a_macro = a_rve, about the axis a_macro x a_rve.
/// Parallel inputs give the identity; antiparallel inputs give a half turn
/// about the coordinate axis least aligned with a_rve (projected orthogonal
/// to it; the first such axis on ties).
Tensor2 rodrigues(const Vector3& a_macro, const Vector3& a_rve);

/// Q F Q^T
Tensor2 rotate_deformation(const Tensor2& F, const Tensor2& Q);

/// Rotation by angle (radians) about a unit axis.
Tensor2 axis_angle_rotation(const Vector3& axis, double angle);

}  // namespace feann
