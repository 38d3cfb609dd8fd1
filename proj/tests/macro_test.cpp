#include "feann/constitutive/ogden.hpp"
#include "feann/constitutive/oracle.hpp"
#include "feann/errors.hpp"
#include "feann/homogenization/material_point.hpp"
#include "feann/macro/geometry.hpp"
#include "feann/macro/results_io.hpp"
#include "feann/macro/solver.hpp"
#include "feann/training/training.hpp"
#include "macro_fixtures.hpp"
#include "test_utils.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace feann;
using namespace feann::testing;

TEST(MacroMesh, BoxHasPositiveJacobiansAndVolume) {
  const auto mesh = MacroMesh::box(Vector3(2, 3, 4), {2, 3, 1});
  EXPECT_EQ(mesh.element_count(), 6);
  EXPECT_EQ(mesh.node_count(), 3 * 4 * 2);
  EXPECT_NO_THROW(mesh.validate());
  EXPECT_NEAR(mesh.volume(), 24.0, 1e-12);
  EXPECT_EQ(mesh.node_sets.at("x1_min").size(), 8u);
  EXPECT_EQ(mesh.face_sets.at("x3_max").size(), 6u);
  auto inverted = mesh;
  std::swap(inverted.elements[0][0], inverted.elements[0][1]);
  EXPECT_THROW(inverted.validate(), NonPositiveJacobian);
}

TEST(MacroMesh, ShapeFunctionsPartitionUnity) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const Vector3 xi(feann::testing::uniform(rng, -1, 1), feann::testing::uniform(rng, -1, 1),
                     feann::testing::uniform(rng, -1, 1));
    const HexShape s = HexShape::at(xi);
    EXPECT_NEAR(s.N.sum(), 1.0, 1e-15);
    EXPECT_LT(s.dN.colwise().sum().norm(), 1e-15);
  }
}

TEST(Geometry, BuiltinDimensions) {
  const auto cuboid = builtin_geometry("cuboid-hole", 2);
  Vector3 lo = cuboid.mesh.nodes[0], hi = lo;
  for (const auto& x : cuboid.mesh.nodes) {
    lo = lo.cwiseMin(x);
    hi = hi.cwiseMax(x);
  }
  EXPECT_LT((hi - lo - Vector3(100, 100, 25)).norm(), 1e-12);
  EXPECT_EQ(cuboid.steps, 15);
  EXPECT_EQ(cuboid.fiber_direction, Vector3::UnitX());
  // the carved hole approximates the pi r^2 section within one layer of cells
  const double hole = 100.0 * 100.0 * 25.0 - cuboid.mesh.volume();
  EXPECT_NEAR(hole / 25.0, M_PI * 900.0, 0.35 * M_PI * 900.0);

  const auto torsion = builtin_geometry("torsion-bar");
  EXPECT_EQ(torsion.fiber_direction, Vector3::UnitY());
  EXPECT_EQ(torsion.bcs[1].kind, BcKind::rotation);
  EXPECT_DOUBLE_EQ(torsion.bcs[1].angle, M_PI / 4);
  EXPECT_LT(torsion.mesh.volume(), 200.0 * 100.0 * 100.0);

  const auto cook = builtin_geometry("cook-membrane");
  EXPECT_EQ(cook.steps, 25);
  EXPECT_NEAR(cook.fiber_direction.norm(), 1.0, 1e-15);
  EXPECT_NEAR(cook.mesh.volume(), 10.0 * 48.0 * (44.0 + 16.0) / 2.0, 1e-9);
  for (const auto& name : builtin_geometry_names()) EXPECT_NO_THROW(builtin_geometry(name).mesh.validate());
  EXPECT_THROW(builtin_geometry("sphere"), UnknownGeometry);
  EXPECT_THROW(builtin_geometry("cuboid-hole", 0), InvalidParameters);
}

TEST(MacroSolver, ZeroLoadKeepsIdentity) {
  const auto W = toy_surrogate();
  ASSERT_LT(surrogate::stress(SymTensor2::identity(), kE1, W).norm(), 1e-12);
  const auto mesh = MacroMesh::box(Vector3(10, 10, 10), {2, 2, 2});
  MacroOptions opt;
  opt.steps = 2;
  const auto state = solve_macro(mesh, {BoundaryCondition::clamp("x1_min")}, W, kE1, opt);
  EXPECT_TRUE(state.reached_goal());
  for (const auto& step : state.displacements) EXPECT_LT(step.norm(), 1e-12);
  const auto paths = collect_deformations(state);
  ASSERT_EQ(paths.size(), static_cast<std::size_t>(mesh.point_count()));
  for (const auto& p : paths) {
    ASSERT_EQ(p.F.size(), 3u);
    EXPECT_DOUBLE_EQ(p.times.front(), 0.0);
    for (const auto& F : p.F) EXPECT_LT((F - Tensor2::Identity()).norm(), 1e-12);
  }
}

TEST(MacroSolver, PatchTestIsExact) {
  const auto W = toy_surrogate();
  auto mesh = MacroMesh::box(Vector3(2, 2, 2), {2, 2, 2});
  // distort the single interior node so the elements are genuinely irregular
  for (auto& x : mesh.nodes)
    if ((x - Vector3(1, 1, 1)).norm() < 1e-12) x += Vector3(0.17, -0.11, 0.08);
  mesh.validate();
  Tensor2 Fhat;
  Fhat << 1.2, 0.1, -0.05, 0.03, 0.9, 0.12, -0.02, 0.07, 1.1;
  std::vector<int> boundary;
  for (int n = 0; n < mesh.node_count(); ++n)
    if ((mesh.nodes[n] - Vector3(1.17, 0.89, 1.08)).norm() > 1e-12) boundary.push_back(n);
  mesh.node_sets["boundary"] = boundary;
  // one displacement condition per boundary node with its affine value
  std::vector<BoundaryCondition> bcs;
  for (int n : boundary) {
    const std::string name = "n" + std::to_string(n);
    mesh.node_sets[name] = {n};
    bcs.push_back(BoundaryCondition::displacement(name, (Fhat - Tensor2::Identity()) * mesh.nodes[n]));
  }
  MacroOptions opt;
  opt.steps = 3;
  opt.tolerance_factor = 1e-14;
  const auto state = solve_macro(mesh, bcs, W, kE1, opt);
  ASSERT_TRUE(state.reached_goal());
  for (const auto& F : state.point_F.back()) EXPECT_LT((F - Fhat).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(MacroSolver, HomogeneousBarMatchesMaterialPoint) {
  const auto& W = fitted_matrix_surrogate();
  const auto mesh = MacroMesh::box(Vector3(20, 10, 10), {2, 1, 1});
  MacroOptions opt;
  opt.steps = 10;
  const auto state = solve_macro(mesh, uniaxial_bar_bcs(20.0, 1.5), W, kE1, opt);
  ASSERT_TRUE(state.reached_goal());

  const LoadCase load{LoadKind::uniaxial, {0, -1}, 1.5, 10};
  const auto mp_surrogate = drive_material_point(surrogate_response(W, kE1), load, 100.0);
  const auto p = OgdenParameters::matrix_defaults();
  const auto mp_ogden = drive_material_point(ogden_response(p), load, initial_moduli(p).G);
  for (int k = 1; k <= 10; ++k) {
    for (const auto& F : state.point_F[k]) EXPECT_LT((F - state.point_F[k][0]).norm(), 1e-8);
    const double P11 = state.point_P[k][0](0, 0);
    EXPECT_NEAR(state.point_F[k][0](0, 0), mp_ogden[k].F(0, 0), 1e-12);
    EXPECT_LT(rel_err(P11, mp_surrogate[k].P(0, 0)), 1e-6) << k;
    EXPECT_LT(rel_err(state.point_F[k][0](1, 1), mp_surrogate[k].F(1, 1)), 1e-6) << k;
    EXPECT_LT(rel_err(P11, mp_ogden[k].P(0, 0)), 0.01) << k;
  }
}

TEST(MacroSolver, NewtonConvergesQuadratically) {
  const auto& W = fitted_matrix_surrogate();
  const auto mesh = MacroMesh::box(Vector3(20, 10, 10), {2, 1, 1});
  MacroOptions opt;
  opt.steps = 4;
  opt.tolerance_factor = 1e-12;
  // initial shear modulus times the loaded cross-section
  opt.force_scale = surrogate::tangent(SymTensor2::identity(), kE1, W).matrix()(5, 5) * 100.0;
  const auto state = solve_macro(mesh, uniaxial_bar_bcs(20.0, 1.4), W, kE1, opt);
  ASSERT_TRUE(state.reached_goal());
  for (int k = 1; k <= 4; ++k) {
    // drop iterations that only reflect round-off
    std::vector<double> h;
    for (double r : state.residual_history[k])
      if (r > 1e-13) h.push_back(r);
    ASSERT_GE(h.size(), 3u) << k;
    const std::size_t n = h.size() - 1;
    EXPECT_LE(h[n], 0.1 * h[n - 1] * h[n - 1]) << "step " << k;
    const double order = std::log(h[n] / h[n - 1]) / std::log(h[n - 1] / h[n - 2]);
    EXPECT_GE(order, 1.8) << "step " << k;
  }
}

TEST(MacroSolver, DeadLoadEnergyBalance) {
  const auto W = toy_surrogate();
  auto cook = builtin_geometry("cook-membrane");
  cook.bcs[1].value = Vector3(0.0, 4.0, 0.0);
  MacroOptions opt;
  opt.steps = 10;
  const StructuralTensorSet M(cook.fiber_direction);
  const auto state = solve_macro(cook.mesh, cook.bcs, W, M, opt);
  ASSERT_TRUE(state.reached_goal());
  for (int k = 0; k < 10; ++k) {
    const double dE = internal_energy(cook.mesh, state, k + 1, W, M) - internal_energy(cook.mesh, state, k, W, M);
    const double work = external_work(cook.mesh, cook.bcs, state, k, k + 1);
    EXPECT_GT(work, 0.0);
    EXPECT_LT(rel_err(dE, work), 0.01) << "step " << k;
  }
}

TEST(MacroSolver, TorsionRotatesEndFace) {
  const auto W = toy_surrogate();
  const auto torsion = builtin_geometry("torsion-bar");
  MacroOptions opt;
  opt.steps = 3;
  const auto state = solve_macro(torsion.mesh, torsion.bcs, W, StructuralTensorSet(torsion.fiber_direction), opt);
  ASSERT_TRUE(state.reached_goal());
  const Tensor2 Q = axis_angle_rotation(Vector3::UnitX(), M_PI / 4);
  for (int n : torsion.mesh.node_sets.at("x1_max")) {
    const Vector3 X = torsion.mesh.nodes[n] - Vector3(200, 50, 50);
    EXPECT_LT((state.displacements.back().segment<3>(3 * n) - (Q - Tensor2::Identity()) * X).norm(), 1e-12);
  }
  for (const auto& F : state.point_F.back()) EXPECT_GT(F.determinant(), 0.0);
}

TEST(MacroSolver, FirstStepFailureThrows) {
  const auto W = toy_surrogate();
  const auto mesh = MacroMesh::box(Vector3(10, 10, 10), {1, 1, 1});
  MacroOptions opt;
  opt.steps = 1;
  opt.max_cutbacks = 0;
  // collapsing the bar through itself cannot converge
  EXPECT_THROW(solve_macro(mesh, {BoundaryCondition::clamp("x1_min"), BoundaryCondition::displacement("x1_max", Vector3(-15, 0, 0))},
                           W, kE1, opt),
               FirstStepDivergence);
}

TEST(MacroSolver, LaterFailureReturnsPartialState) {
  const auto W = toy_surrogate();
  const auto mesh = MacroMesh::box(Vector3(10, 10, 10), {1, 1, 1});
  MacroOptions opt;
  opt.steps = 4;
  opt.max_cutbacks = 1;
  const auto state = solve_macro(
      mesh, {BoundaryCondition::clamp("x1_min"), BoundaryCondition::displacement("x1_max", Vector3(-12, 0, 0))}, W,
      kE1, opt);
  EXPECT_GE(state.t_end(), 1);
  EXPECT_LT(state.t_end(), state.t_goal);
  EXPECT_EQ(collect_deformations(state).front().F.size(), static_cast<std::size_t>(state.t_end() + 1));
}

TEST(ResultsIO, RoundTripAndVtk) {
  const auto W = toy_surrogate();
  const auto mesh = MacroMesh::box(Vector3(10, 10, 10), {2, 1, 1});
  MacroOptions opt;
  opt.steps = 2;
  MacroResults r{"bar", mesh, solve_macro(mesh, uniaxial_bar_bcs(10.0, 1.1), W, kE1, opt)};
  std::stringstream ss;
  write_results(ss, r);
  const auto back = read_results(ss);
  EXPECT_EQ(back.geometry, "bar");
  EXPECT_EQ(back.mesh.nodes, r.mesh.nodes);
  EXPECT_EQ(back.mesh.elements, r.mesh.elements);
  EXPECT_EQ(back.state.t_goal, 2);
  EXPECT_EQ(back.state.times, r.state.times);
  for (std::size_t k = 0; k < r.state.times.size(); ++k) {
    EXPECT_EQ(back.state.displacements[k], r.state.displacements[k]);
    EXPECT_EQ(back.state.point_F[k], r.state.point_F[k]);
    EXPECT_EQ(back.state.point_P[k], r.state.point_P[k]);
  }

  const auto dir = std::filesystem::temp_directory_path() / "feann_results_test";
  std::filesystem::create_directories(dir);
  const auto files = write_vtk_series(r, (dir / "bar").string());
  ASSERT_EQ(files.size(), 3u);
  std::ifstream vtk(files.back());
  std::string text((std::istreambuf_iterator<char>(vtk)), {});
  EXPECT_NE(text.find("CELL_TYPES 2"), std::string::npos);
  EXPECT_NE(text.find("TENSORS P double"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(ResultsIO, RejectsBadFiles) {
  std::istringstream wrong_version("# feann-results 9\n");
  EXPECT_THROW(read_results(wrong_version), FormatVersionMismatch);
  std::istringstream truncated("# feann-results 1\ngeometry x\nnodes 2\n0 0 0\n");
  try {
    read_results(truncated);
    FAIL();
  } catch (const CorruptRecord& e) {
    EXPECT_EQ(e.line(), 5u);
  }
}
