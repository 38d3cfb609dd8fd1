#include "feann/kinematics/invariants.hpp"

#include "feann/errors.hpp"

#include <cmath>

namespace feann {

const char* to_string(AnisotropyClass c) {
  return c == AnisotropyClass::isotropic ? "isotropic" : "transversely_isotropic";
}

AnisotropyClass anisotropy_from_string(const std::string& s) {
  if (s == "isotropic") return AnisotropyClass::isotropic;
  if (s == "transversely_isotropic") return AnisotropyClass::transversely_isotropic;
  throw InvalidParameters("unknown anisotropy class '" + s + "'");
}

std::vector<int> active_slots(AnisotropyClass c) {
  if (c == AnisotropyClass::isotropic) return {kI1, kI2, kI3, kI3s};
  return {kI1, kI2, kI3, kI4, kI5, kI3s};
}

StructuralTensorSet::StructuralTensorSet(const Vector3& a) : a_(a), m_(SymTensor2::dyad(a)) {
  if (!a.allFinite() || std::abs(a.norm() - 1.0) > 1e-12)
    throw InvalidParameters("fiber direction must be a unit vector");
}

namespace {

void require_spd(const SymTensor2& C) {
  if (!C.components().allFinite()) throw NonFiniteValue("right Cauchy-Green tensor has non-finite components");
  if (!C.is_positive_definite()) throw NotPositiveDefinite("right Cauchy-Green tensor is not positive definite");
}

SymTensor2 square(const SymTensor2& C) {
  const Tensor2 c = C.matrix();
  return SymTensor2::from_matrix(c * c);
}

}  // namespace

InvariantVector invariants(const SymTensor2& C, const std::optional<StructuralTensorSet>& M) {
  require_spd(C);
  InvariantVector out;
  const auto& c = C.components();
  out[kI1] = C.trace();
  out[kI2] = (c[0] * c[1] - c[5] * c[5]) + (c[0] * c[2] - c[4] * c[4]) + (c[1] * c[2] - c[3] * c[3]);
  out[kI3] = C.det();
  out[kI3s] = 1.0 / out[kI3];
  if (M) {
    out.anisotropy = AnisotropyClass::transversely_isotropic;
    out[kI4] = double_dot(M->M(), C);
    out[kI5] = double_dot(M->M(), square(C));
  } else {
    out.anisotropy = AnisotropyClass::isotropic;
    out[kI4] = 0.0;
    out[kI5] = 0.0;
  }
  return out;
}

std::array<double, 3> invariants_from_stretches(std::span<const double> stretches,
                                                std::span<const int> multiplicities) {
  if (stretches.size() != multiplicities.size()) throw InvalidParameters("stretch/multiplicity size mismatch");
  int total = 0;
  double i1 = 0.0, i3 = 1.0, inv_sum = 0.0;
  for (std::size_t a = 0; a < stretches.size(); ++a) {
    const double l2 = stretches[a] * stretches[a];
    if (!(stretches[a] > 0.0)) throw InvalidParameters("principal stretches must be positive");
    i1 += multiplicities[a] * l2;
    i3 *= std::pow(l2, multiplicities[a]);
    inv_sum += multiplicities[a] / l2;
    total += multiplicities[a];
  }
  if (total != 3) throw InvalidParameters("multiplicities must sum to 3");
  return {i1, i3 * inv_sum, i3};
}

std::array<SymTensor2, kInvariantCount> invariant_gradients(const SymTensor2& C,
                                                            const std::optional<StructuralTensorSet>& M) {
  require_spd(C);
  std::array<SymTensor2, kInvariantCount> g;
  const SymTensor2 I = SymTensor2::identity();
  const double i3 = C.det();
  const SymTensor2 Cinv = C.inverse();
  g[kI1] = I;
  g[kI2] = C.trace() * I - C;
  g[kI3] = i3 * Cinv;
  g[kI3s] = (-1.0 / i3) * Cinv;  // -I3^-2 dI3/dC
  if (M) {
    const Tensor2 m = M->M().matrix();
    const Tensor2 c = C.matrix();
    g[kI4] = M->M();
    g[kI5] = SymTensor2::from_matrix(m * c + c * m);
  }
  return g;
}

std::array<Tensor4Sym, kInvariantCount> invariant_hessians(const SymTensor2& C,
                                                           const std::optional<StructuralTensorSet>& M) {
  require_spd(C);
  std::array<Tensor4Sym, kInvariantCount> h;
  const SymTensor2 I = SymTensor2::identity();
  const double i3 = C.det();
  const SymTensor2 Cinv = C.inverse();
  const Tensor4Sym inv_outer = Tensor4Sym::outer(Cinv, Cinv);
  const Tensor4Sym inv_sym = Tensor4Sym::sym_product(Cinv, Cinv);
  h[kI2] = Tensor4Sym::outer(I, I) - Tensor4Sym::identity();
  // dC^-1/dC = -(C^-1 (.) C^-1)
  h[kI3] = i3 * (inv_outer - inv_sym);
  h[kI3s] = (1.0 / i3) * (inv_outer + inv_sym);
  if (M) {
    // d(MC + CM)_ij / dC_kl, minor-symmetrised in (kl) and (ij).
    h[kI5] = Tensor4Sym::sym_product(M->M(), I) + Tensor4Sym::sym_product(I, M->M());
  }
  return h;
}

}  // namespace feann
