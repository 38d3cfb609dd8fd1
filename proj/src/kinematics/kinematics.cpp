#include "feann/kinematics/kinematics.hpp"

#include "feann/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace feann {

double jacobian(const Tensor2& F) {
  const double J = F.determinant();
  if (!(J > 0.0)) throw NonPositiveJacobian(J);
  return J;
}

SymTensor2 right_cauchy_green(const Tensor2& F) {
  jacobian(F);
  return SymTensor2::from_matrix(F.transpose() * F);
}

std::vector<double> SpectralDecomposition::stretches() const {
  std::vector<double> out;
  out.reserve(eigenvalues.size());
  for (double e : eigenvalues) out.push_back(std::sqrt(e));
  return out;
}

SymTensor2 SpectralDecomposition::reconstruct() const {
  SymTensor2 C;
  for (std::size_t b = 0; b < eigenvalues.size(); ++b) C += eigenvalues[b] * projectors[b];
  return C;
}

SpectralDecomposition spectral(const SymTensor2& C, double cluster_tol) {
  Eigen::SelfAdjointEigenSolver<Tensor2> solver(C.matrix());
  const Vector3 values = solver.eigenvalues();  // ascending
  const Tensor2 vectors = solver.eigenvectors();
  if (!(values[0] > 0.0)) throw NotPositiveDefinite("tensor is not positive definite");

  SpectralDecomposition out;
  // Walk in descending order, merging neighbours within the relative gap.
  int b = 2;
  while (b >= 0) {
    double sum = values[b];
    int count = 1;
    SymTensor2 P = SymTensor2::dyad(vectors.col(b));
    int next = b - 1;
    while (next >= 0 && values[b] - values[next] <= cluster_tol * values[b]) {
      sum += values[next];
      P += SymTensor2::dyad(vectors.col(next));
      ++count;
      --next;
    }
    out.eigenvalues.push_back(sum / count);
    out.multiplicities.push_back(count);
    out.projectors.push_back(P);
    b = next;
  }
  return out;
}

FlorySplit flory_split(const Tensor2& F, double cluster_tol) {
  const double J = jacobian(F);
  const double scale = std::cbrt(1.0 / J);
  const auto sd = spectral(SymTensor2::from_matrix(F.transpose() * F), cluster_tol);
  FlorySplit out{J, scale * F, {}, sd.multiplicities};
  for (double l : sd.stretches()) out.stretches_iso.push_back(scale * l);
  return out;
}

Tensor2 axis_angle_rotation(const Vector3& axis, double angle) {
  const Vector3 n = axis.normalized();
  Tensor2 skew;
  skew << 0, -n[2], n[1], n[2], 0, -n[0], -n[1], n[0], 0;
  const Tensor2 nn = n * n.transpose();
  return nn + std::cos(angle) * (Tensor2::Identity() - nn) + std::sin(angle) * skew;
}

Tensor2 rodrigues(const Vector3& a_macro, const Vector3& a_rve) {
  const Vector3 cross = a_macro.cross(a_rve);
  const double angle = std::atan2(cross.norm(), a_macro.dot(a_rve));
  if (angle < kRodriguesAngleTolerance) return Tensor2::Identity();
  if (M_PI - angle < kRodriguesAngleTolerance) {
    int axis = 0;
    for (int k = 1; k < 3; ++k)
      if (std::abs(a_rve[k]) < std::abs(a_rve[axis])) axis = k;
    Vector3 n = Vector3::Unit(axis);
    n -= n.dot(a_rve) * a_rve;
    return axis_angle_rotation(n.normalized(), M_PI);
  }
  return axis_angle_rotation(cross / cross.norm(), angle);
}

Tensor2 rotate_deformation(const Tensor2& F, const Tensor2& Q) { return Q * F * Q.transpose(); }

}  // namespace feann
