#include "feann/homogenization/voxel_rve.hpp"

#include "feann/constitutive/oracle.hpp"
#include "feann/errors.hpp"
#include "feann/kinematics/kinematics.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>
#include <random>

namespace feann {

double VoxelRVE::fiber_fraction() const {
  if (phase.empty()) return 0.0;
  std::size_t count = 0;
  for (Phase p : phase) count += p == Phase::fiber;
  return static_cast<double>(count) / static_cast<double>(phase.size());
}

double VoxelRVE::stress_scale() const { return initial_moduli(matrix).G; }

void VoxelRVE::validate() const {
  if (n < 1) throw InvalidParameters("voxel grid needs at least one voxel per edge");
  if (phase.size() != static_cast<std::size_t>(n) * n * n)
    throw NonPeriodicMesh("phase field has " + std::to_string(phase.size()) + " voxels, expected n^3 = " +
                          std::to_string(n * n * n));
  if (!(edge > 0.0)) throw InvalidParameters("RVE edge length must be positive");
  matrix.validate();
  fiber.validate();
}

VoxelRVE VoxelRVE::homogeneous(int n, const OgdenParameters& p) {
  VoxelRVE r;
  r.n = n;
  r.phase.assign(static_cast<std::size_t>(n) * n * n, Phase::matrix);
  r.matrix = p;
  r.fiber = p;
  return r;
}

VoxelRVE VoxelRVE::layered(int n, int fiber_layers) {
  VoxelRVE r;
  r.n = n;
  r.phase.assign(static_cast<std::size_t>(n) * n * n, Phase::matrix);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < std::min(fiber_layers, n); ++i) r.phase[r.voxel(i, j, k)] = Phase::fiber;
  return r;
}

VoxelRVE VoxelRVE::random_fibers(int n, double vf, std::uint64_t seed, int width) {
  if (!(vf >= 0.0 && vf <= 1.0)) throw InvalidParameters("fiber volume fraction must lie in [0, 1]");
  if (width <= 0) width = std::max(1, n / 4);
  const int target = static_cast<int>(std::lround(vf * n * n));
  std::vector<bool> pixel(static_cast<std::size_t>(n) * n, false);
  std::mt19937_64 rng(seed);
  int count = 0;
  for (int attempt = 0; attempt < 200 * n * n && count + width * width <= target; ++attempt) {
    const int i0 = static_cast<int>(rng() % n), j0 = static_cast<int>(rng() % n);
    bool free = true;
    for (int di = 0; di < width && free; ++di)
      for (int dj = 0; dj < width && free; ++dj) free = !pixel[(i0 + di) % n + n * ((j0 + dj) % n)];
    if (!free) continue;
    for (int di = 0; di < width; ++di)
      for (int dj = 0; dj < width; ++dj) pixel[(i0 + di) % n + n * ((j0 + dj) % n)] = true;
    count += width * width;
  }
  while (count < target) {
    const std::size_t p = rng() % pixel.size();
    if (pixel[p]) continue;
    pixel[p] = true;
    ++count;
  }
  VoxelRVE r;
  r.n = n;
  r.phase.assign(static_cast<std::size_t>(n) * n * n, Phase::matrix);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        if (pixel[i + n * j]) r.phase[r.voxel(i, j, k)] = Phase::fiber;
  return r;
}

Vector3 MicroSolution::displacement(const VoxelRVE& rve, int i, int j, int k) const {
  const int n = rve.n;
  const double h = rve.element_size();
  const Vector3 X(i * h, j * h, k * h);
  const int node = (i % n) + n * ((j % n) + n * (k % n));
  return (F_bar - Tensor2::Identity()) * X + fluctuation.segment<3>(3 * node);
}

namespace {

/// Shape-function gradients of the unit hexahedron at its 2x2x2 Gauss points,
/// scaled to an element of size h: grad[q](a, J).
struct HexRule {
  std::array<Eigen::Matrix<double, 8, 3>, 8> grad;
  double weight;

  explicit HexRule(double h) : weight(h * h * h / 8.0) {
    const double g = 1.0 / std::sqrt(3.0);
    for (int q = 0; q < 8; ++q) {
      const Vector3 xi((q & 1) ? g : -g, (q & 2) ? g : -g, (q & 4) ? g : -g);
      for (int a = 0; a < 8; ++a) {
        const Vector3 s((a & 1) ? 1.0 : -1.0, (a & 2) ? 1.0 : -1.0, (a & 4) ? 1.0 : -1.0);
        for (int J = 0; J < 3; ++J) {
          double d = 0.125 * s[J];
          for (int m = 0; m < 3; ++m)
            if (m != J) d *= 1.0 + s[m] * xi[m];
          grad[q](a, J) = d * 2.0 / h;
        }
      }
    }
  }
};

struct Element {
  std::array<int, 8> node;
  std::array<bool, 8> plus_x1;  // node reached through the +x1 face wrap
  const OgdenParameters* params;
};

std::vector<Element> elements(const VoxelRVE& rve) {
  const int n = rve.n;
  std::vector<Element> out;
  out.reserve(rve.phase.size());
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        Element e;
        for (int a = 0; a < 8; ++a) {
          const int di = a & 1, dj = (a >> 1) & 1, dk = (a >> 2) & 1;
          e.node[a] = (i + di) % n + n * (((j + dj) % n) + n * ((k + dk) % n));
          e.plus_x1[a] = i + di == n;
        }
        e.params = rve.phase[rve.voxel(i, j, k)] == Phase::fiber ? &rve.fiber : &rve.matrix;
        out.push_back(e);
      }
  return out;
}

struct Assembly {
  Eigen::VectorXd residual;
  Eigen::SparseMatrix<double> stiffness;
};

class PeriodicProblem {
 public:
  PeriodicProblem(const VoxelRVE& rve, const MixedControl& ctrl, const VoxelSolverOptions& options)
      : rve_(rve), ctrl_(ctrl), options_(options), rule_(rve.element_size()), elements_(elements(rve)),
        free_(ctrl.free_components()) {
    nodes_ = rve.n * rve.n * rve.n;
    unknowns_ = 3 * (nodes_ - 1) + static_cast<int>(free_.size());
  }

  int unknowns() const { return unknowns_; }
  int fluctuation_unknowns() const { return 3 * (nodes_ - 1); }

  Tensor2 macro(const Eigen::VectorXd& x, const Tensor2& prescribed) const {
    Tensor2 F = prescribed;
    for (std::size_t c = 0; c < free_.size(); ++c) F(free_[c] / 3, free_[c] % 3) = x[fluctuation_unknowns() + c];
    return F;
  }

  /// Fluctuation of node m (node 0 is pinned).
  Vector3 node_value(const Eigen::VectorXd& x, int m) const {
    return m == 0 ? Vector3::Zero() : Vector3(x.segment<3>(3 * (m - 1)));
  }

  Eigen::Matrix<double, 8, 3> local_displacement(const Element& e, const Eigen::VectorXd& x, const Tensor2& F) const {
    Eigen::Matrix<double, 8, 3> u;
    const Vector3 offset = options_.tie_fault * rve_.edge * (F - Tensor2::Identity()).col(0);
    for (int a = 0; a < 8; ++a) {
      u.row(a) = node_value(x, e.node[a]).transpose();
      if (e.plus_x1[a]) u.row(a) += offset.transpose();
    }
    return u;
  }

  Tensor2 qp_deformation(const Eigen::Matrix<double, 8, 3>& u, int q, const Tensor2& F) const {
    return F + u.transpose() * rule_.grad[q];
  }

  /// Residual (and optionally stiffness); throws NonPositiveJacobian on inversion.
  Assembly assemble(const Eigen::VectorXd& x, const Tensor2& prescribed, bool with_stiffness) const {
    const Tensor2 F = macro(x, prescribed);
    Assembly out;
    out.residual = Eigen::VectorXd::Zero(unknowns_);
    std::vector<Eigen::Triplet<double>> triplets;
    if (with_stiffness) triplets.reserve(elements_.size() * 24 * 24 + elements_.size() * 8 * 24 * free_.size());
    const int nf = static_cast<int>(free_.size());
    const int f0 = fluctuation_unknowns();
    auto dof = [](int node, int c) { return node == 0 ? -1 : 3 * (node - 1) + c; };

    for (const auto& e : elements_) {
      const auto u = local_displacement(e, x, F);
      Eigen::Matrix<double, 24, 1> re = Eigen::Matrix<double, 24, 1>::Zero();
      Eigen::Matrix<double, 24, 24> ke = Eigen::Matrix<double, 24, 24>::Zero();
      Eigen::MatrixXd kef = Eigen::MatrixXd::Zero(24, nf);
      Eigen::MatrixXd kff = Eigen::MatrixXd::Zero(nf, nf);
      Eigen::VectorXd rf = Eigen::VectorXd::Zero(nf);
      for (int q = 0; q < 8; ++q) {
        const Tensor2 Fq = qp_deformation(u, q, F);
        const SymTensor2 C = right_cauchy_green(Fq);
        const SymTensor2 T = ogden_stress(C, *e.params);
        const Tensor2 P = nominal_stress(Fq, T);
        const auto& G = rule_.grad[q];
        const double w = rule_.weight;
        // B maps the 24 local values to the 9 row-major components of grad u.
        Eigen::Matrix<double, 9, 24> B = Eigen::Matrix<double, 9, 24>::Zero();
        for (int a = 0; a < 8; ++a)
          for (int i = 0; i < 3; ++i)
            for (int J = 0; J < 3; ++J) B(3 * i + J, 3 * a + i) = G(a, J);
        const Tensor2 Pt = P.transpose();
        const Eigen::Map<const Eigen::Matrix<double, 9, 1>> Pv(Pt.data());
        re += w * B.transpose() * Pv;
        for (int c = 0; c < nf; ++c) rf[c] += w * Pv[free_[c]];
        if (!with_stiffness) continue;
        const Eigen::Matrix<double, 9, 9> A = nominal_tangent(Fq, T, ogden_tangent(C, *e.params));
        ke += w * B.transpose() * A * B;
        for (int c = 0; c < nf; ++c) {
          kef.col(c) += w * B.transpose() * A.col(free_[c]);
          for (int c2 = 0; c2 < nf; ++c2) kff(c, c2) += w * A(free_[c], free_[c2]);
        }
      }
      for (int a = 0; a < 8; ++a)
        for (int i = 0; i < 3; ++i) {
          const int r = dof(e.node[a], i);
          if (r < 0) continue;
          out.residual[r] += re[3 * a + i];
          if (!with_stiffness) continue;
          for (int b = 0; b < 8; ++b)
            for (int k = 0; k < 3; ++k) {
              const int s = dof(e.node[b], k);
              if (s >= 0) triplets.emplace_back(r, s, ke(3 * a + i, 3 * b + k));
            }
          for (int c = 0; c < nf; ++c) {
            triplets.emplace_back(r, f0 + c, kef(3 * a + i, c));
            triplets.emplace_back(f0 + c, r, kef(3 * a + i, c));
          }
        }
      for (int c = 0; c < nf; ++c) {
        out.residual[f0 + c] += rf[c];
        if (!with_stiffness) continue;
        for (int c2 = 0; c2 < nf; ++c2) triplets.emplace_back(f0 + c, f0 + c2, kff(c, c2));
      }
    }
    if (with_stiffness) {
      out.stiffness.resize(unknowns_, unknowns_);
      out.stiffness.setFromTriplets(triplets.begin(), triplets.end());
    }
    return out;
  }

  /// Scaled convergence measure: max over nodal and macroscopic residuals of |r| / tolerance.
  double scaled_residual(const Eigen::VectorXd& r) const {
    const double G = rve_.stress_scale();
    const double h = rve_.element_size();
    const double tol_u = options_.tolerance_factor * G * h * h * h;
    const double tol_f = options_.tolerance_factor * G * std::pow(rve_.edge, 3);
    double m = 0.0;
    const int f0 = fluctuation_unknowns();
    for (int k = 0; k < f0; ++k) m = std::max(m, std::abs(r[k]) / tol_u);
    for (int k = f0; k < unknowns_; ++k) m = std::max(m, std::abs(r[k]) / tol_f);
    return m;
  }

  MicroSolution finish(const Eigen::VectorXd& x, const Tensor2& prescribed) const {
    MicroSolution s;
    s.F_bar = macro(x, prescribed);
    s.fluctuation = Eigen::VectorXd::Zero(3 * nodes_);
    s.fluctuation.tail(3 * (nodes_ - 1)) = x.head(fluctuation_unknowns());
    const std::size_t nq = elements_.size() * 8;
    s.qp_F.reserve(nq);
    s.qp_P.reserve(nq);
    s.qp_psi.reserve(nq);
    s.qp_volume.assign(nq, rule_.weight);
    for (const auto& e : elements_) {
      const auto u = local_displacement(e, x, s.F_bar);
      for (int q = 0; q < 8; ++q) {
        const Tensor2 Fq = qp_deformation(u, q, s.F_bar);
        const SymTensor2 C = right_cauchy_green(Fq);
        s.qp_F.push_back(Fq);
        s.qp_P.push_back(nominal_stress(Fq, ogden_stress(C, *e.params)));
        s.qp_psi.push_back(ogden_energy(C, *e.params));
      }
    }
    s.P_bar = average(s.qp_P, s.qp_volume);
    s.psi_bar = average(s.qp_psi, s.qp_volume);
    return s;
  }

  const std::vector<int>& free() const { return free_; }

 private:
  const VoxelRVE& rve_;
  const MixedControl& ctrl_;
  const VoxelSolverOptions& options_;
  HexRule rule_;
  std::vector<Element> elements_;
  std::vector<int> free_;
  int nodes_ = 0;
  int unknowns_ = 0;
};

Eigen::VectorXd solve_linear(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& rhs) {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
  if (ldlt.info() == Eigen::Success) {
    Eigen::VectorXd x = ldlt.solve(rhs);
    if (ldlt.info() == Eigen::Success && x.allFinite()) return x;
  }
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(K);
  if (lu.info() != Eigen::Success) return Eigen::VectorXd::Constant(rhs.size(), NAN);
  return lu.solve(rhs);
}

MicroSolution solve_step(const PeriodicProblem& problem, const MixedControl& ctrl, Eigen::VectorXd& x,
                         const VoxelSolverOptions& options, int step) {
  const Tensor2 prescribed = ctrl.value;
  auto current = problem.assemble(x, prescribed, true);
  double measure = problem.scaled_residual(current.residual);
  int it = 0;
  for (; measure > 1.0; ++it) {
    if (it >= options.max_iterations) throw NewtonDivergence("voxel RVE", step, current.residual.cwiseAbs().maxCoeff());
    const Eigen::VectorXd dx = solve_linear(current.stiffness, -current.residual);
    if (!dx.allFinite()) throw NewtonDivergence("voxel RVE", step, current.residual.cwiseAbs().maxCoeff());
    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 10 && !accepted; ++ls, alpha *= 0.5) {
      const Eigen::VectorXd trial = x + alpha * dx;
      try {
        auto next = problem.assemble(trial, prescribed, true);
        const double m = problem.scaled_residual(next.residual);
        if (!std::isfinite(m)) continue;
        if (next.residual.norm() < current.residual.norm() || m <= 1.0 || ls == 9) {
          x = trial;
          current = std::move(next);
          measure = m;
          accepted = true;
        }
      } catch (const NonPositiveJacobian&) {
      }
    }
    if (!accepted) throw NewtonDivergence("voxel RVE", step, current.residual.cwiseAbs().maxCoeff());
  }
  MicroSolution s = problem.finish(x, prescribed);
  s.converged = true;
  s.iterations = it;
  s.residual_norm = current.residual.cwiseAbs().maxCoeff();
  return s;
}

}  // namespace

MicroSolution homogenize_voxel(const VoxelRVE& rve, const MixedControl& ctrl, const VoxelSolverOptions& options) {
  rve.validate();
  ctrl.validate();
  if (options.load_steps < 1) throw InvalidParameters("voxel solve needs at least one load step");
  const PeriodicProblem problem(rve, ctrl, options);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(problem.unknowns());
  const int nodes = rve.n * rve.n * rve.n;
  if (options.warm_start) {
    if (options.warm_start->size() != 3 * nodes) throw InvalidParameters("warm start has the wrong size");
    x.head(problem.fluctuation_unknowns()) = options.warm_start->tail(3 * (nodes - 1));
  }
  const auto free = ctrl.free_components();
  for (std::size_t c = 0; c < free.size(); ++c) x[problem.fluctuation_unknowns() + c] = free[c] % 4 == 0 ? 1.0 : 0.0;

  MicroSolution s;
  for (int step = 1; step <= options.load_steps; ++step) {
    const double t = static_cast<double>(step) / options.load_steps;
    MixedControl c = ctrl;
    c.value = Tensor2::Identity() + t * (ctrl.value - Tensor2::Identity());
    s = solve_step(problem, c, x, options, step);
  }
  if (!(s.F_bar.determinant() > 0.0)) throw NonPositiveJacobian(s.F_bar.determinant());
  return s;
}

MicroSolution homogenize_voxel(const VoxelRVE& rve, const Tensor2& F_bar, const VoxelSolverOptions& options) {
  jacobian(F_bar);
  return homogenize_voxel(rve, MixedControl::full(F_bar), options);
}

std::vector<MicroSolution> homogenize_voxel_path(const VoxelRVE& rve, const std::vector<Tensor2>& F_path,
                                                 const VoxelSolverOptions& options) {
  std::vector<MicroSolution> out;
  VoxelSolverOptions o = options;
  for (const auto& F : F_path) {
    if (!out.empty()) o.warm_start = &out.back().fluctuation;
    out.push_back(homogenize_voxel(rve, F, o));
  }
  return out;
}

Tensor2 average(std::span<const Tensor2> values, std::span<const double> volumes) {
  if (values.size() != volumes.size() || values.empty()) throw InvalidParameters("average needs matching, non-empty inputs");
  Tensor2 sum = Tensor2::Zero();
  double V = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!(volumes[k] > 0.0)) throw InvalidParameters("average needs positive volumes");
    sum += volumes[k] * values[k];
    V += volumes[k];
  }
  return sum / V;
}

double average(std::span<const double> values, std::span<const double> volumes) {
  if (values.size() != volumes.size() || values.empty()) throw InvalidParameters("average needs matching, non-empty inputs");
  double sum = 0.0, V = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!(volumes[k] > 0.0)) throw InvalidParameters("average needs positive volumes");
    sum += volumes[k] * values[k];
    V += volumes[k];
  }
  return sum / V;
}

HillMandelReport hill_mandel_check(const MicroSolution& previous, const MicroSolution& current) {
  if (previous.qp_F.size() != current.qp_F.size()) throw InvalidParameters("solutions belong to different RVEs");
  const Tensor2 dF = current.F_bar - previous.F_bar;
  const double macro = (current.P_bar.array() * dF.array()).sum();
  std::vector<double> local(current.qp_F.size());
  for (std::size_t q = 0; q < local.size(); ++q)
    local[q] = (current.qp_P[q].array() * (current.qp_F[q] - previous.qp_F[q]).array()).sum();
  const double micro = average(local, current.qp_volume);
  return {std::abs(macro - micro) / std::max(std::abs(macro), 1e-300), macro, micro};
}

EnergyConsistency path_energy_consistency(const std::vector<MicroSolution>& path) {
  if (path.size() < 2) throw InvalidParameters("energy consistency needs at least two path steps");
  double work = 0.0;
  for (std::size_t k = 1; k < path.size(); ++k) {
    const Tensor2 dF = path[k].F_bar - path[k - 1].F_bar;
    work += 0.5 * ((path[k].P_bar + path[k - 1].P_bar).array() * dF.array()).sum();
  }
  const double change = path.back().psi_bar - path.front().psi_bar;
  return {work, change, std::abs(work - change) / std::max(std::abs(change), 1e-300)};
}

}  // namespace feann
