#include "feann/constitutive/ogden.hpp"

#include "feann/errors.hpp"
#include "feann/kinematics/kinematics.hpp"

#include <cmath>

namespace feann {

void OgdenParameters::validate() const {
  if (mu.empty() || mu.size() != alpha.size()) throw InvalidParameters("Ogden mu and alpha must be non-empty and equally sized");
  for (std::size_t p = 0; p < mu.size(); ++p) {
    const double a = alpha[p];
    if (!std::isfinite(a) || !std::isfinite(mu[p]) || !(a < -1.0 || a >= 2.0))
      throw InvalidParameters("Ogden exponent alpha = " + std::to_string(a) + " outside (-inf, -1) u [2, inf)");
    if (!(mu[p] * a > 0.0)) throw InvalidParameters("Ogden term requires mu * alpha > 0");
  }
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InvalidParameters("Ogden kappa must be positive");
}

OgdenParameters OgdenParameters::matrix_defaults() { return {{-26.62, 29.04, 0.0098}, {-5.0, 2.3, 12.0}, 800.0}; }

OgdenParameters OgdenParameters::fiber_defaults() { return {{1000.0}, {2.0}, 4666.7}; }

OgdenParameters OgdenParameters::neo_hookean(double mu1, double kappa) { return {{mu1}, {2.0}, kappa}; }

InitialModuli initial_moduli(const OgdenParameters& p) {
  double G = 0.0;
  for (int k = 0; k < p.terms(); ++k) G += 0.5 * p.alpha[k] * p.mu[k];
  const double r = 1.5 * p.kappa / G;
  return {G, (r - 1.0) / (2.0 * r + 1.0)};
}

double bulk_from_moduli(double G, double nu) { return 2.0 / 3.0 * G * (1.0 + nu) / (1.0 - 2.0 * nu); }

namespace {

void require_spd_finite(const SymTensor2& C) {
  if (!C.components().allFinite()) throw NonFiniteValue("right Cauchy-Green tensor has non-finite components");
  const double det = C.det();
  if (!(det > 0.0) || !C.is_positive_definite()) throw NonPositiveJacobian(det > 0.0 ? std::sqrt(det) : det);
}

}  // namespace

double ogden_energy(const SymTensor2& C, const OgdenParameters& p) {
  require_spd_finite(C);
  const auto sd = spectral(C);
  const double J = std::sqrt(C.det());
  const double iso_scale = std::pow(J, -2.0 / 3.0);  // on eigenvalues of C
  double psi = 0.0;
  for (int k = 0; k < p.terms(); ++k) {
    double sum = 0.0;
    for (int b = 0; b < sd.cluster_count(); ++b)
      sum += sd.multiplicities[b] * std::pow(iso_scale * sd.eigenvalues[b], 0.5 * p.alpha[k]);
    psi += p.mu[k] / p.alpha[k] * (sum - 3.0);
  }
  return psi + 0.25 * p.kappa * (J * J - 2.0 * std::log(J) - 1.0);
}

double ogden_energy(const Tensor2& F, const OgdenParameters& p) { return ogden_energy(right_cauchy_green(F), p); }

SymTensor2 ogden_stress(const SymTensor2& C, const OgdenParameters& p) {
  require_spd_finite(C);
  const auto sd = spectral(C);
  const double J2 = C.det();
  const double iso_scale = std::pow(J2, -1.0 / 3.0);
  const int n = sd.cluster_count();
  std::vector<double> coeff(n, 0.0);
  for (int k = 0; k < p.terms(); ++k) {
    std::vector<double> powered(n);
    double mean = 0.0;
    for (int b = 0; b < n; ++b) {
      powered[b] = std::pow(iso_scale * sd.eigenvalues[b], 0.5 * p.alpha[k]);
      mean += sd.multiplicities[b] * powered[b];
    }
    mean /= 3.0;
    for (int b = 0; b < n; ++b) coeff[b] += p.mu[k] * (powered[b] - mean);
  }
  SymTensor2 T;
  for (int b = 0; b < n; ++b) T += ((coeff[b] + 0.5 * p.kappa * (J2 - 1.0)) / sd.eigenvalues[b]) * sd.projectors[b];
  return T;
}

SymTensor2 ogden_stress(const Tensor2& F, const OgdenParameters& p) { return ogden_stress(right_cauchy_green(F), p); }

Tensor4Sym ogden_tangent(const SymTensor2& C, const OgdenParameters& p, double h) {
  Matrix6 m;
  for (int s = 0; s < 6; ++s) {
    const SymTensor2 d = h * SymTensor2::unit_direction(s);
    m.col(s) = (ogden_stress(C + d, p).components() - ogden_stress(C - d, p).components()) / h;
  }
  // Symmetrise away the O(h^2) differencing noise.
  return Tensor4Sym(0.5 * (m + m.transpose()));
}

}  // namespace feann
