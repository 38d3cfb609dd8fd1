#include "feann/errors.hpp"
#include "feann/kinematics/invariants.hpp"
#include "feann/kinematics/kinematics.hpp"
#include "test_utils.hpp"

#include <gtest/gtest.h>

using namespace feann;
using namespace feann::testing;

namespace {

Tensor2 simple_shear(double gamma) {
  Tensor2 F = Tensor2::Identity();
  F(0, 1) = gamma;
  return F;
}

const StructuralTensorSet kE3(Vector3::UnitZ());

}  // namespace

TEST(RightCauchyGreen, IdentityDilationAndShear) {
  EXPECT_EQ(right_cauchy_green(Tensor2::Identity()).components(), SymTensor2::identity().components());
  EXPECT_EQ(right_cauchy_green(2.0 * Tensor2::Identity()).components(), (4.0 * SymTensor2::identity()).components());

  Tensor2 expected;
  expected << 1, 0.5, 0, 0.5, 1.25, 0, 0, 0, 1;
  EXPECT_LT((right_cauchy_green(simple_shear(0.5)).matrix() - expected).norm(), 1e-15);
}

TEST(RightCauchyGreen, RejectsInvertedDeformation) {
  Tensor2 F = Tensor2::Identity();
  F(2, 2) = -1.0;
  EXPECT_THROW(right_cauchy_green(F), NonPositiveJacobian);
  EXPECT_THROW(right_cauchy_green(Tensor2::Zero()), NonPositiveJacobian);
}

TEST(Spectral, IdentityHasSingleCluster) {
  const auto sd = spectral(SymTensor2::identity());
  ASSERT_EQ(sd.cluster_count(), 1);
  EXPECT_EQ(sd.multiplicities[0], 3);
  EXPECT_LT((sd.projectors[0].matrix() - Tensor2::Identity()).norm(), 1e-12);
}

TEST(Spectral, DiagonalPairCluster) {
  SymTensor2 C;
  C[0] = 4;
  C[1] = 1;
  C[2] = 1;
  const auto sd = spectral(C);
  ASSERT_EQ(sd.cluster_count(), 2);
  EXPECT_DOUBLE_EQ(sd.eigenvalues[0], 4.0);
  EXPECT_DOUBLE_EQ(sd.eigenvalues[1], 1.0);
  const Tensor2 e11 = Vector3::UnitX() * Vector3::UnitX().transpose();
  EXPECT_LT((sd.projectors[0].matrix() - e11).norm(), 1e-12);
  EXPECT_LT((sd.projectors[1].matrix() - (Tensor2::Identity() - e11)).norm(), 1e-12);
}

TEST(Spectral, NearDegeneratePairMerged) {
  // Gap oracle: relative gaps are 3/4 and 1e-12, only the second is <= 1e-8.
  SymTensor2 C;
  C[0] = 4;
  C[1] = 1 + 1e-12;
  C[2] = 1;
  EXPECT_EQ(spectral(C, 1e-8).cluster_count(), 2);
  EXPECT_EQ(spectral(C, 1e-14).cluster_count(), 3);
}

TEST(Spectral, RejectsIndefinite) {
  SymTensor2 C;
  C[0] = 1;
  C[1] = -1;
  C[2] = 1;
  EXPECT_THROW(spectral(C), NotPositiveDefinite);
}

TEST(Spectral, ProjectorPropertiesOnRandomTensors) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    // Mix in exactly repeated eigenvalues every few trials.
    SymTensor2 C = random_spd(rng);
    if (trial % 5 == 0) {
      const Tensor2 R = random_rotation(rng);
      const double a = uniform(rng, 0.3, 3), b = uniform(rng, 0.3, 3);
      C = SymTensor2::from_matrix(R * Vector3(a, b, b).asDiagonal() * R.transpose());
    }
    const auto sd = spectral(C);
    SymTensor2 sum;
    for (int a = 0; a < sd.cluster_count(); ++a) {
      sum += sd.projectors[a];
      const Tensor2 Pa = sd.projectors[a].matrix();
      EXPECT_LT((Pa * Pa - Pa).norm(), 1e-10);
      for (int b = a + 1; b < sd.cluster_count(); ++b)
        EXPECT_LT(std::abs(double_dot(sd.projectors[a], sd.projectors[b])), 1e-10);
    }
    EXPECT_LT((sum.matrix() - Tensor2::Identity()).norm(), 1e-10);
    EXPECT_LT((sd.reconstruct() - C).norm() / C.norm(), 1e-10);
  }
}

TEST(Invariants, IdentityIsExact) {
  const auto inv = invariants(SymTensor2::identity(), kE3);
  const std::array<double, 6> expected{3, 3, 1, 1, 1, 1};
  EXPECT_EQ(inv.values, expected);
}

TEST(Invariants, PureDilation) {
  const auto inv = invariants(right_cauchy_green(2.0 * Tensor2::Identity()), kE3);
  const std::array<double, 6> expected{12, 48, 64, 4, 16, 1.0 / 64};
  for (int s = 0; s < 6; ++s) EXPECT_DOUBLE_EQ(inv[s], expected[s]) << "slot " << s;
}

TEST(Invariants, SimpleShear) {
  // C = [[1,.5,0],[.5,1.25,0],[0,0,1]]: tr = 3.25, det = 1.25 - .25 = 1,
  // Cof trace = (1.25 - .25) + 1 + 1.25 = 3.25, A = e3 sees C33 = 1, (C^2)33 = 1.
  const auto inv = invariants(right_cauchy_green(simple_shear(0.5)), kE3);
  const std::array<double, 6> expected{3.25, 3.25, 1, 1, 1, 1};
  for (int s = 0; s < 6; ++s) EXPECT_NEAR(inv[s], expected[s], 1e-14) << "slot " << s;
}

TEST(Invariants, FromStretches) {
  const std::array<double, 1> one{1.0};
  const std::array<int, 1> three{3};
  EXPECT_EQ(invariants_from_stretches(one, three), (std::array<double, 3>{3, 3, 1}));

  const std::array<double, 1> two{2.0};
  EXPECT_EQ(invariants_from_stretches(two, three), (std::array<double, 3>{12, 48, 64}));

  const std::array<double, 2> l{2.0, 1.0};
  const std::array<int, 2> nu{1, 2};
  const auto got = invariants_from_stretches(l, nu);
  EXPECT_DOUBLE_EQ(got[0], 6.0);
  EXPECT_DOUBLE_EQ(got[1], 9.0);
  EXPECT_DOUBLE_EQ(got[2], 4.0);
  // Cross-check against diag(4,1,1).
  SymTensor2 C;
  C[0] = 4;
  C[1] = 1;
  C[2] = 1;
  const auto inv = invariants(C);
  EXPECT_DOUBLE_EQ(inv[kI1], got[0]);
  EXPECT_DOUBLE_EQ(inv[kI2], got[1]);
  EXPECT_DOUBLE_EQ(inv[kI3], got[2]);
}

TEST(Invariants, FromStretchesMatchesSpectralOnRandomTensors) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const SymTensor2 C = random_spd(rng);
    const auto sd = spectral(C);
    const auto s = sd.stretches();
    const auto got = invariants_from_stretches(s, sd.multiplicities);
    const auto inv = invariants(C);
    for (int k = 0; k < 3; ++k) EXPECT_LT(rel_err(got[k], inv[k]), 1e-12);
  }
}

TEST(Invariants, SecondInvariantTwoRoutes) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const SymTensor2 C = random_spd(rng);
    const Tensor2 c = C.matrix();
    const double alt = 0.5 * (c.trace() * c.trace() - (c * c).trace());
    EXPECT_LT(rel_err(invariants(C)[kI2], alt), 1e-12);
  }
}

TEST(Invariants, ObjectivityUnderSuperposedRotation) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 1000; ++trial) {
    const Tensor2 F = random_deformation(rng);
    const Tensor2 Q = random_rotation(rng);
    const StructuralTensorSet M = StructuralTensorSet::from_direction(random_unit(rng));
    const auto a = invariants(right_cauchy_green(F), M);
    const auto b = invariants(right_cauchy_green(Q * F), M);
    for (int s = 0; s < 6; ++s) EXPECT_LT(rel_err(a[s], b[s]), 1e-12) << "slot " << s;
  }
}

TEST(Invariants, IsotropicTensorFunctionProperty) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    const SymTensor2 C = random_spd(rng);
    const Tensor2 Q = random_rotation(rng);
    const StructuralTensorSet M = StructuralTensorSet::from_direction(random_unit(rng));
    const auto a = invariants(C, M);
    const auto b = invariants(SymTensor2::from_matrix(Q * C.matrix() * Q.transpose()), M.rotated(Q));
    for (int s = 0; s < 6; ++s) EXPECT_LT(rel_err(a[s], b[s]), 1e-12) << "slot " << s;
  }
}

TEST(Invariants, StructuralTensorValidation) {
  EXPECT_THROW(StructuralTensorSet(Vector3(1, 1, 0)), InvalidParameters);
  const StructuralTensorSet m = StructuralTensorSet::from_direction(Vector3(1, 2, 3));
  const Tensor2 M = m.M().matrix();
  EXPECT_NEAR(M.trace(), 1.0, 1e-15);
  EXPECT_LT((M * M - M).norm(), 1e-15);
}

TEST(InvariantGradients, IdentityValues) {
  const auto g = invariant_gradients(SymTensor2::identity(), kE3);
  EXPECT_EQ(g[kI1].components(), SymTensor2::identity().components());
  EXPECT_EQ(g[kI2].components(), (2.0 * SymTensor2::identity()).components());
  EXPECT_EQ(g[kI3].components(), SymTensor2::identity().components());
}

TEST(InvariantGradients, DiagonalThirdInvariant) {
  SymTensor2 C;
  C[0] = 4;
  C[1] = 1;
  C[2] = 1;
  const auto g = invariant_gradients(C);
  EXPECT_DOUBLE_EQ(g[kI3][0], 1.0);
  EXPECT_DOUBLE_EQ(g[kI3][1], 4.0);
  EXPECT_DOUBLE_EQ(g[kI3][2], 4.0);
}

TEST(InvariantGradients, MatchFiniteDifferences) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    const SymTensor2 C = random_spd(rng);
    const StructuralTensorSet M = StructuralTensorSet::from_direction(random_unit(rng));
    const auto g = invariant_gradients(C, M);
    for (int slot = 0; slot < kInvariantCount; ++slot) {
      const auto fd = fd_gradient([&](const SymTensor2& c) { return invariants(c, M)[slot]; }, C);
      EXPECT_LT(rel_err_norm(g[slot].components(), fd.components(), 1e-8), 1e-6) << "slot " << slot;
    }
  }
}

TEST(InvariantHessians, LinearInvariantsVanish) {
  std::mt19937_64 rng(23);
  const SymTensor2 C = random_spd(rng);
  const auto h = invariant_hessians(C, kE3);
  EXPECT_EQ(h[kI1].matrix(), Matrix6::Zero());
  EXPECT_EQ(h[kI4].matrix(), Matrix6::Zero());
}

TEST(InvariantHessians, MatchFiniteDifferences) {
  std::mt19937_64 rng(29);
  std::vector<SymTensor2> points{SymTensor2::identity()};
  for (int trial = 0; trial < 200; ++trial) points.push_back(random_spd(rng));
  for (const auto& C : points) {
    const StructuralTensorSet M = StructuralTensorSet::from_direction(random_unit(rng));
    const auto h = invariant_hessians(C, M);
    for (int slot = 0; slot < kInvariantCount; ++slot) {
      const auto fd = fd_jacobian([&](const SymTensor2& c) { return invariant_gradients(c, M)[slot]; }, C);
      EXPECT_LT(rel_err_norm(h[slot].matrix(), fd.matrix(), 1e-8), 1e-6) << "slot " << slot;
      EXPECT_LT(h[slot].major_asymmetry(), 1e-12 * std::max(1.0, h[slot].matrix().norm()));
    }
  }
}

TEST(FlorySplit, Cases) {
  auto a = flory_split(Tensor2::Identity());
  EXPECT_EQ(a.J, 1.0);
  EXPECT_LT((a.F_iso - Tensor2::Identity()).norm(), 1e-15);

  auto b = flory_split(2.0 * Tensor2::Identity());
  EXPECT_DOUBLE_EQ(b.J, 8.0);
  EXPECT_LT((b.F_iso - Tensor2::Identity()).norm(), 1e-15);

  auto c = flory_split(Vector3(2, 1, 1).asDiagonal());
  EXPECT_DOUBLE_EQ(c.J, 2.0);
  ASSERT_EQ(c.stretches_iso.size(), 2u);
  const double s = std::pow(2.0, -1.0 / 3.0);
  EXPECT_NEAR(c.stretches_iso[0], 2.0 * s, 1e-15);
  EXPECT_NEAR(c.stretches_iso[1], s, 1e-15);
  EXPECT_EQ(c.multiplicities, (std::vector<int>{1, 2}));
}

TEST(FlorySplit, UnitIsochoricDeterminant) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const auto fs = flory_split(random_deformation(rng));
    EXPECT_NEAR(fs.F_iso.determinant(), 1.0, 1e-12);
  }
  Tensor2 bad = Tensor2::Identity();
  bad(0, 0) = -2;
  EXPECT_THROW(flory_split(bad), NonPositiveJacobian);
}

TEST(Rodrigues, ZeroAngleIsIdentity) {
  EXPECT_EQ(rodrigues(Vector3::UnitZ(), Vector3::UnitZ()), Tensor2::Identity());
}

TEST(Rodrigues, QuarterTurnAboutMinusE2) {
  const Tensor2 Q = rodrigues(Vector3::UnitX(), Vector3::UnitZ());
  EXPECT_LT((Q.transpose() * Vector3::UnitZ() - Vector3::UnitX()).norm(), 1e-12);
  EXPECT_LT((Q - axis_angle_rotation(-Vector3::UnitY(), M_PI / 2)).norm(), 1e-12);
}

TEST(Rodrigues, AntiparallelUsesFallbackAxis) {
  const Tensor2 Q = rodrigues(-Vector3::UnitZ(), Vector3::UnitZ());
  EXPECT_LT((Q - axis_angle_rotation(Vector3::UnitX(), M_PI)).norm(), 1e-12);
  EXPECT_LT((Q * -Vector3::UnitZ() - Vector3::UnitZ()).norm(), 1e-12);
  // Oblique antiparallel pair.
  const Vector3 a = Vector3(1, 2, 3).normalized();
  const Tensor2 Q2 = rodrigues(-a, a);
  EXPECT_LT((Q2 * -a - a).norm(), 1e-12);
}

TEST(Rodrigues, ProperOrthogonalAndAligning) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 500; ++trial) {
    const Vector3 a = random_unit(rng), b = random_unit(rng);
    const Tensor2 Q = rodrigues(a, b);
    EXPECT_LT((Q.transpose() * Q - Tensor2::Identity()).norm(), 1e-12);
    EXPECT_NEAR(Q.determinant(), 1.0, 1e-12);
    EXPECT_LT((Q * a - b).norm(), 1e-12);
  }
}

TEST(RotateDeformation, Cases) {
  const Tensor2 F = Vector3(2, 1, 1).asDiagonal();
  EXPECT_EQ(rotate_deformation(F, Tensor2::Identity()), F);
  const Tensor2 Q = axis_angle_rotation(Vector3::UnitZ(), M_PI / 2);
  const Tensor2 expected = Vector3(1, 2, 1).asDiagonal();
  EXPECT_LT((rotate_deformation(F, Q) - expected).norm(), 1e-15);
}

TEST(RotateDeformation, InvariantsFollowStructuralTensor) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 500; ++trial) {
    const Tensor2 F = random_deformation(rng);
    const Tensor2 Q = random_rotation(rng);
    const StructuralTensorSet M = StructuralTensorSet::from_direction(random_unit(rng));
    const auto a = invariants(right_cauchy_green(F), M);
    const auto b = invariants(right_cauchy_green(rotate_deformation(F, Q)), M.rotated(Q));
    for (int s = 0; s < 6; ++s) EXPECT_LT(rel_err(a[s], b[s]), 1e-12);
  }
}

TEST(TensorText, RoundTripIsBitExact) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    const Tensor2 F = random_deformation(rng);
    EXPECT_EQ(parse_tensor(format_tensor(F)), F);
  }
  EXPECT_THROW(parse_tensor("1 2 3"), FormatError);
  EXPECT_THROW(parse_tensor("1 2 3 4 5 6 7 8 x"), FormatError);
}

TEST(NominalTangent, MatchesFiniteDifferenceOfFirstPiola) {
  // P = F T(C) with T = a C + b C^-1 has material tangent 2a I_s - 2b C^-1 (.) C^-1.
  const double a = 3.0, b = 2.0;
  auto T_of = [&](const SymTensor2& C) { return a * C + b * C.inverse(); };
  std::mt19937_64 rng(47);
  const Tensor2 F = random_deformation(rng);
  const SymTensor2 C = right_cauchy_green(F);
  const Tensor4Sym D = 2.0 * a * Tensor4Sym::identity() - 2.0 * b * Tensor4Sym::sym_product(C.inverse(), C.inverse());
  const auto A = nominal_tangent(F, T_of(C), D);
  const double h = 1e-6;
  for (int k = 0; k < 3; ++k)
    for (int L = 0; L < 3; ++L) {
      Tensor2 dF = Tensor2::Zero();
      dF(k, L) = h;
      const Tensor2 Pp = (F + dF) * T_of(SymTensor2::from_matrix((F + dF).transpose() * (F + dF))).matrix();
      const Tensor2 Pm = (F - dF) * T_of(SymTensor2::from_matrix((F - dF).transpose() * (F - dF))).matrix();
      const Tensor2 dP = (Pp - Pm) / (2 * h);
      for (int i = 0; i < 3; ++i)
        for (int J = 0; J < 3; ++J) EXPECT_NEAR(A(3 * i + J, 3 * k + L), dP(i, J), 1e-6 * A.norm());
    }
}
