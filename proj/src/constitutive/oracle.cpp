#include "feann/constitutive/oracle.hpp"

#include "feann/errors.hpp"
#include "feann/kinematics/kinematics.hpp"

namespace feann {

void OracleParameters::validate() const {
  matrix.validate();
  if (!(c_f >= 0.0) || !std::isfinite(c_f)) throw InvalidParameters("fiber coefficient c_f must be non-negative");
}

double oracle_energy(const SymTensor2& C, const OracleParameters& p) {
  const double e = double_dot(p.fiber.M(), C) - 1.0;
  return ogden_energy(C, p.matrix) + 0.5 * p.c_f * e * e;
}

double oracle_energy(const Tensor2& F, const OracleParameters& p) { return oracle_energy(right_cauchy_green(F), p); }

SymTensor2 oracle_stress(const SymTensor2& C, const OracleParameters& p) {
  const double e = double_dot(p.fiber.M(), C) - 1.0;
  return ogden_stress(C, p.matrix) + (2.0 * p.c_f * e) * p.fiber.M();
}

SymTensor2 oracle_stress(const Tensor2& F, const OracleParameters& p) { return oracle_stress(right_cauchy_green(F), p); }

Tensor4Sym oracle_tangent(const SymTensor2& C, const OracleParameters& p) {
  return ogden_tangent(C, p.matrix) + (4.0 * p.c_f) * Tensor4Sym::outer(p.fiber.M(), p.fiber.M());
}

}  // namespace feann
