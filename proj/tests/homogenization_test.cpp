#include "feann/constitutive/oracle.hpp"
#include "feann/errors.hpp"
#include "feann/homogenization/load_cases.hpp"
#include "feann/homogenization/material_point.hpp"
#include "feann/homogenization/statistics.hpp"
#include "feann/homogenization/voxel_rve.hpp"
#include "oracles.hpp"
#include "test_utils.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace feann;
using feann::testing::laminate_oracle;
using feann::testing::stretch_shear;
using feann::testing::rel_err;
using feann::testing::rel_err_norm;

TEST(LoadSuite, HasEighteenCasesWithTableAmplitudes) {
  const auto suite = initial_load_suite();
  ASSERT_EQ(suite.size(), 18u);
  int counts[5] = {0, 0, 0, 0, 0};
  std::set<std::pair<int, int>> shears;
  for (const auto& c : suite) {
    counts[static_cast<int>(c.kind)]++;
    switch (c.kind) {
      case LoadKind::uniaxial: EXPECT_DOUBLE_EQ(c.amplitude, 1.60); break;
      case LoadKind::equibiaxial: EXPECT_DOUBLE_EQ(c.amplitude, 1.30); break;
      case LoadKind::uniaxial_compression: EXPECT_DOUBLE_EQ(c.amplitude, 0.70); break;
      case LoadKind::equibiaxial_compression: EXPECT_DOUBLE_EQ(c.amplitude, 0.85); break;
      case LoadKind::simple_shear:
        EXPECT_DOUBLE_EQ(c.amplitude, 0.50);
        shears.insert({c.axes[0], c.axes[1]});
        break;
    }
  }
  for (int k : {0, 1, 2, 3}) EXPECT_EQ(counts[k], 3);
  EXPECT_EQ(counts[4], 6);
  EXPECT_EQ(shears.size(), 6u);
  for (const auto& [a, b] : shears) EXPECT_NE(a, b);
}

TEST(LoadSuite, RejectsInvalidCases) {
  EXPECT_THROW((LoadCase{LoadKind::uniaxial, {3, -1}, 1.2}.validate()), InvalidParameters);
  EXPECT_THROW((LoadCase{LoadKind::equibiaxial, {1, 1}, 1.2}.validate()), InvalidParameters);
  EXPECT_THROW((LoadCase{LoadKind::uniaxial, {0, -1}, -1.0}.validate()), InvalidParameters);
  MixedControl none;
  for (auto& row : none.prescribed) row.fill(false);
  EXPECT_THROW(none.validate(), InvalidParameters);
}

TEST(LoadSuite, ControlRampsLinearly) {
  const LoadCase c{LoadKind::uniaxial, {1, -1}, 1.6, 4};
  const auto m = c.control(0.5);
  EXPECT_TRUE(m.prescribed[1][1]);
  EXPECT_FALSE(m.prescribed[0][0]);
  EXPECT_FALSE(m.prescribed[2][2]);
  EXPECT_DOUBLE_EQ(m.value(1, 1), 1.3);
  EXPECT_EQ(m.free_count(), 2);
  const LoadCase s{LoadKind::simple_shear, {2, 0}, 0.5, 4};
  const auto ms = s.control(1.0);
  EXPECT_EQ(ms.free_count(), 0);
  EXPECT_DOUBLE_EQ(ms.value(2, 0), 0.5);
}

TEST(MaterialPoint, UnloadedCaseStaysAtIdentity) {
  const OracleParameters oracle;
  const auto path = drive_material_point(oracle, LoadCase{LoadKind::uniaxial, {0, -1}, 1.0, 3});
  ASSERT_EQ(path.size(), 4u);
  for (const auto& p : path) {
    EXPECT_LT((p.F - Tensor2::Identity()).norm(), 1e-12);
    EXPECT_LT(p.P.norm(), 1e-9);
  }
}

TEST(MaterialPoint, SimpleShearIsFullyPrescribed) {
  const OracleParameters oracle;
  const auto path = drive_material_point(oracle, LoadCase{LoadKind::simple_shear, {0, 1}, 0.5, 5});
  const auto& last = path.back();
  Tensor2 expected = Tensor2::Identity();
  expected(0, 1) = 0.5;
  EXPECT_EQ(last.F, expected);
  EXPECT_GT(std::abs(last.P(0, 1)), 1.0);
}

TEST(MaterialPoint, FreeStressComponentsVanishAlongEveryPath) {
  const OracleParameters oracle;
  const double G = initial_moduli(oracle.matrix).G;
  for (const auto& load : initial_load_suite(5)) {
    const auto path = drive_material_point(oracle, load);
    ASSERT_EQ(path.size(), 6u);
    for (const auto& p : path) {
      const auto ctrl = load.control(p.t);
      for (int c : ctrl.free_components()) EXPECT_LE(std::abs(p.P(c / 3, c % 3)), 1e-9 * G) << load.name();
      EXPECT_GT(p.F.determinant(), 0.0);
    }
  }
}

TEST(MaterialPoint, NeoHookeanIncompressibleLimit) {
  const double mu = 100.0;
  OracleParameters oracle;
  oracle.matrix = OgdenParameters::neo_hookean(mu, 1e6 * mu);
  oracle.c_f = 0.0;
  const auto path = drive_material_point(oracle, LoadCase{LoadKind::uniaxial, {0, -1}, 1.5, 10});
  const double l = 1.5;
  EXPECT_LT(rel_err(path.back().P(0, 0), mu * (l - 1 / (l * l))), 0.01);
}

TEST(MaterialPoint, ReportsDivergence) {
  const NominalResponse stuck = [](const Tensor2&) {
    Tensor2 P = Tensor2::Identity();
    return P;
  };
  EXPECT_THROW(drive_material_point(stuck, LoadCase{LoadKind::uniaxial, {0, -1}, 1.2, 2}, 1.0), NewtonDivergence);
}

TEST(Average, ConstantAndPairs) {
  const std::vector<double> v{2.0, 2.0, 2.0}, w{0.1, 0.5, 0.4};
  EXPECT_DOUBLE_EQ(average(v, w), 2.0);
  const std::vector<double> ab{1.0, 5.0}, eq{0.5, 0.5};
  EXPECT_DOUBLE_EQ(average(ab, eq), 3.0);
  const std::vector<double> bad{-1.0, 1.0};
  EXPECT_THROW(average(ab, bad), InvalidParameters);
  EXPECT_THROW(average(v, eq), InvalidParameters);
}

TEST(Average, QuadratureOfLinearFieldIsMidpoint) {
  // F = 1 + grad(u) with u linear in X gives a constant field; use the
  // quadrature points of a solved RVE as the sample grid for a linear scalar.
  const auto rve = VoxelRVE::homogeneous(3, OgdenParameters::matrix_defaults());
  const auto s = homogenize_voxel(rve, Tensor2::Identity());
  const double h = rve.element_size();
  const double g = 1 / std::sqrt(3.0);
  std::vector<double> f;
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i)
        for (int q = 0; q < 8; ++q) {
          const double x = (i + 0.5 + 0.5 * ((q & 1) ? g : -g)) * h;
          const double y = (j + 0.5 + 0.5 * ((q & 2) ? g : -g)) * h;
          const double z = (k + 0.5 + 0.5 * ((q & 4) ? g : -g)) * h;
          f.push_back(1.5 + 2 * x - 3 * y + 0.25 * z);
        }
  ASSERT_EQ(f.size(), s.qp_volume.size());
  EXPECT_NEAR(average(f, s.qp_volume), 1.5 + 2 * 0.5 - 3 * 0.5 + 0.25 * 0.5, 1e-12);
}

TEST(VoxelRVE, Construction) {
  const auto layered = VoxelRVE::layered(4, 1);
  EXPECT_DOUBLE_EQ(layered.fiber_fraction(), 0.25);
  for (int n : {4, 6, 8}) {
    const auto r = VoxelRVE::random_fibers(n, 0.3, 7);
    EXPECT_LE(std::abs(r.fiber_fraction() - 0.3), 1.0 / (n * n));
    EXPECT_EQ(r.phase, VoxelRVE::random_fibers(n, 0.3, 7).phase);
    // columns along e3
    for (int k = 1; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) EXPECT_EQ(r.phase[r.voxel(i, j, k)], r.phase[r.voxel(i, j, 0)]);
  }
  EXPECT_NE(VoxelRVE::random_fibers(8, 0.3, 1).phase, VoxelRVE::random_fibers(8, 0.3, 2).phase);
  VoxelRVE broken = VoxelRVE::homogeneous(3, OgdenParameters::matrix_defaults());
  broken.phase.pop_back();
  EXPECT_THROW(homogenize_voxel(broken, Tensor2::Identity()), NonPeriodicMesh);
}

TEST(VoxelRVE, IdentityGivesZeroStress) {
  const auto rve = VoxelRVE::layered(4, 2);
  const auto s = homogenize_voxel(rve, Tensor2::Identity());
  EXPECT_TRUE(s.converged);
  EXPECT_LT(s.P_bar.norm(), 1e-12);
  EXPECT_LT(s.fluctuation.norm(), 1e-14);
}

TEST(VoxelRVE, HomogeneousReproducesPhaseStress) {
  const auto p = OgdenParameters::matrix_defaults();
  const auto rve = VoxelRVE::homogeneous(3, p);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 3; ++trial) {
    const Tensor2 F = feann::testing::random_deformation(rng, 0.8, 1.25);
    const auto s = homogenize_voxel(rve, F);
    const Tensor2 P = nominal_stress(F, ogden_stress(F, p));
    EXPECT_LT(rel_err_norm(s.P_bar, P, 1e-300), 1e-8);
    EXPECT_LT(s.fluctuation.cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_NEAR(s.psi_bar, ogden_energy(F, p), 1e-10 * std::abs(ogden_energy(F, p)));
  }
}

TEST(VoxelRVE, LayeredMatchesLaminateOracle) {
  const auto rve = VoxelRVE::layered(4, 1);
  for (double lambda : {1.1, 0.9}) {
    const Tensor2 F = Eigen::Vector3d(lambda, 1, 1).asDiagonal();
    const auto s = homogenize_voxel(rve, F);
    const auto ref = laminate_oracle(lambda, 0.25, rve.fiber, rve.matrix);
    EXPECT_LT(rel_err(s.P_bar(0, 0), ref.P11), 1e-3) << lambda;
    EXPECT_LT(rel_err(s.P_bar(1, 1), ref.P22), 1e-3) << lambda;
    // the fiber layer stretches less than the soft matrix
    const double u_fiber = s.displacement(rve, 1, 0, 0)[0] - s.displacement(rve, 0, 0, 0)[0];
    EXPECT_NEAR(u_fiber / rve.element_size(), ref.lambda_fiber - 1, 1e-4);
  }
}

TEST(VoxelRVE, MixedControlFreesLateralStress) {
  const auto rve = VoxelRVE::layered(4, 1);
  const LoadCase load{LoadKind::uniaxial, {0, -1}, 1.1, 1};
  const auto s = homogenize_voxel(rve, load.control(1.0));
  const double G = rve.stress_scale();
  EXPECT_DOUBLE_EQ(s.F_bar(0, 0), 1.1);
  EXPECT_LT(s.F_bar(1, 1), 1.0);
  for (int c : load.control(1.0).free_components()) EXPECT_LE(std::abs(s.P_bar(c / 3, c % 3)), 1e-9 * G);
  EXPECT_GT(s.P_bar(0, 0), 0.0);
}

TEST(VoxelRVE, PeriodicTiesAreExact) {
  const auto rve = VoxelRVE::random_fibers(4, 0.3, 3);
  const Tensor2 F = stretch_shear(1.08, 0.05);
  const auto s = homogenize_voxel(rve, F);
  const int n = rve.n;
  for (int a = 0; a <= n; ++a)
    for (int b = 0; b <= n; ++b) {
      const Vector3 dx = (F - Tensor2::Identity()).col(0) * rve.edge;
      const Vector3 dy = (F - Tensor2::Identity()).col(1) * rve.edge;
      const Vector3 dz = (F - Tensor2::Identity()).col(2) * rve.edge;
      EXPECT_LT((s.displacement(rve, n, a, b) - s.displacement(rve, 0, a, b) - dx).norm(), 1e-12);
      EXPECT_LT((s.displacement(rve, a, n, b) - s.displacement(rve, a, 0, b) - dy).norm(), 1e-12);
      EXPECT_LT((s.displacement(rve, a, b, n) - s.displacement(rve, a, b, 0) - dz).norm(), 1e-12);
    }
  EXPECT_GT(s.fluctuation.cwiseAbs().maxCoeff(), 1e-6);
}

TEST(VoxelRVE, HillMandelHolds) {
  const auto rve = VoxelRVE::random_fibers(4, 0.3, 5);
  const auto path = homogenize_voxel_path(rve, {stretch_shear(1.05, 0.02), stretch_shear(1.06, 0.03)});
  EXPECT_LE(hill_mandel_check(path[0], path[1]).relative_residual, 1e-6);
  const auto homog = homogenize_voxel_path(VoxelRVE::homogeneous(3, OgdenParameters::matrix_defaults()),
                                           {stretch_shear(1.05, 0.02), stretch_shear(1.06, 0.03)});
  EXPECT_LE(hill_mandel_check(homog[0], homog[1]).relative_residual, 1e-10);
}

TEST(VoxelRVE, BrokenTiesViolateHillMandel) {
  const auto rve = VoxelRVE::random_fibers(4, 0.3, 5);
  VoxelSolverOptions faulty;
  faulty.tie_fault = 0.2;
  const auto path = homogenize_voxel_path(rve, {stretch_shear(1.05, 0.02), stretch_shear(1.06, 0.03)}, faulty);
  EXPECT_GT(hill_mandel_check(path[0], path[1]).relative_residual, 1e-2);
}

TEST(VoxelRVE, EnergyMatchesStressPower) {
  const auto rve = VoxelRVE::random_fibers(4, 0.3, 9);
  std::vector<Tensor2> Fs;
  for (int k = 0; k <= 8; ++k) Fs.push_back(stretch_shear(1.0 + 0.01 * k, 0.005 * k));
  const auto path = homogenize_voxel_path(rve, Fs);
  const auto e = path_energy_consistency(path);
  EXPECT_GT(e.energy_change, 0.0);
  EXPECT_LT(e.relative_gap, 0.01);
}

TEST(ChiSquare, HandValues) {
  const std::vector<double> same{4.0, 4.0, 4.0}, pair{1.0, 3.0}, zero{-1.0, 1.0}, one{1.0};
  EXPECT_DOUBLE_EQ(chi_square_test(same), 0.0);
  EXPECT_DOUBLE_EQ(chi_square_test(pair), 1.0);
  EXPECT_THROW(chi_square_test(zero), ZeroMean);
  EXPECT_THROW(chi_square_test(one), InvalidParameters);
}

TEST(ChiSquare, ScatterShrinksWithRveSize) {
  double previous = INFINITY;
  for (int n : {4, 6, 8}) {
    const auto r = rve_scatter(n, 0.3, 10, 100);
    ASSERT_EQ(r.samples.size(), 10u);
    EXPECT_GE(r.chi_square, 0.0);
    EXPECT_LE(r.chi_square, previous) << "n = " << n;
    previous = r.chi_square;
  }
}
