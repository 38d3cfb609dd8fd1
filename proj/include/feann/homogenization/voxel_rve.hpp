#pragma once

#include "feann/constitutive/ogden.hpp"
#include "feann/homogenization/load_cases.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace feann {

enum class Phase : std::uint8_t { matrix = 0, fiber = 1 };

/// Periodic n x n x n voxel microstructure on a cube of edge length `edge`,
/// one trilinear hexahedron per voxel. Voxel (i, j, k) has index i + n (j + n k)
/// with i along x1.
struct VoxelRVE {
  int n = 8;
  std::vector<Phase> phase;
  OgdenParameters matrix = OgdenParameters::matrix_defaults();
  OgdenParameters fiber = OgdenParameters::fiber_defaults();
  double edge = 1.0;

  int voxel(int i, int j, int k) const { return i + n * (j + n * k); }
  double fiber_fraction() const;
  double element_size() const { return edge / n; }
  /// Initial shear modulus of the matrix; the force scale of the solver.
  double stress_scale() const;
  /// Throws NonPeriodicMesh if the phase field does not cover the n^3 grid,
  /// InvalidParameters on bad sizes or material data.
  void validate() const;

  static VoxelRVE homogeneous(int n, const OgdenParameters& p);
  /// Voxels with i < fiber_layers are fiber: a laminate with normal e1.
  static VoxelRVE layered(int n, int fiber_layers);
  /// Fiber columns along e3: the cross-section gets exactly round(vf n^2)
  /// fiber pixels, placed as random periodic squares of side `width` (0 picks
  /// max(1, n / 4)) and topped up with single pixels. Seeded and deterministic.
  static VoxelRVE random_fibers(int n, double vf, std::uint64_t seed, int width = 0);
};

struct VoxelSolverOptions {
  double tolerance_factor = 1e-9;
  int max_iterations = 25;
  int load_steps = 1;
  /// Fault injection: the +x1 face nodes get an extra offset
  /// tie_fault * edge * (F - 1) e1, breaking the periodic tie.
  double tie_fault = 0.0;
  /// Starting fluctuation field (3 n^3 entries), e.g. from the previous path step.
  const Eigen::VectorXd* warm_start = nullptr;
};

struct MicroSolution {
  Tensor2 F_bar = Tensor2::Identity();
  Tensor2 P_bar = Tensor2::Zero();
  double psi_bar = 0.0;
  Eigen::VectorXd fluctuation;  // 3 per periodic node, node 0 pinned
  bool converged = false;
  int iterations = 0;
  double residual_norm = 0.0;
  std::vector<Tensor2> qp_F;
  std::vector<Tensor2> qp_P;
  std::vector<double> qp_psi;
  std::vector<double> qp_volume;

  /// Total displacement (F - 1) X + u~ at grid point (i, j, k), 0 <= i, j, k <= n.
  Vector3 displacement(const VoxelRVE& rve, int i, int j, int k) const;
};

/// Periodic micro problem with u = (F - 1) X + u~ and u~ periodic, the tie
/// realised by sharing the degrees of freedom of opposite faces.
/// Throws NewtonDivergence, NonPeriodicMesh.
MicroSolution homogenize_voxel(const VoxelRVE& rve, const Tensor2& F_bar, const VoxelSolverOptions& options = {});
/// Mixed control: free macroscopic components are solved together with u~.
MicroSolution homogenize_voxel(const VoxelRVE& rve, const MixedControl& ctrl, const VoxelSolverOptions& options = {});

/// Chains solves along a prescribed path, warm-starting each step.
std::vector<MicroSolution> homogenize_voxel_path(const VoxelRVE& rve, const std::vector<Tensor2>& F_path,
                                                 const VoxelSolverOptions& options = {});

/// Volume-weighted average; throws InvalidParameters on size mismatch or non-positive volumes.
Tensor2 average(std::span<const Tensor2> values, std::span<const double> volumes);
double average(std::span<const double> values, std::span<const double> volumes);

struct HillMandelReport {
  double relative_residual;  // |P : dF - <P : dF>| / |P : dF|
  double macro_power;
  double micro_power;
};

/// Stress-power audit between two consecutive solutions of one path.
HillMandelReport hill_mandel_check(const MicroSolution& previous, const MicroSolution& current);

struct EnergyConsistency {
  double work;           // trapezoidal integral of P : dF along the path
  double energy_change;  // <psi>(end) - <psi>(start)
  double relative_gap;
};

EnergyConsistency path_energy_consistency(const std::vector<MicroSolution>& path);

}  // namespace feann
