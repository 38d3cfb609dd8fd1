#include "feann/macro/solver.hpp"

#include "feann/errors.hpp"
#include "feann/kinematics/kinematics.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>

namespace feann {

BoundaryCondition BoundaryCondition::clamp(const std::string& set) { return displacement(set, Vector3::Zero()); }

BoundaryCondition BoundaryCondition::displacement(const std::string& set, const Vector3& u) {
  BoundaryCondition bc;
  bc.kind = BcKind::displacement;
  bc.set = set;
  bc.value = u;
  return bc;
}

BoundaryCondition BoundaryCondition::roller(const std::string& set, int component, double u) {
  BoundaryCondition bc = displacement(set, Vector3::Zero());
  bc.components = {false, false, false};
  bc.components.at(component) = true;
  bc.value[component] = u;
  return bc;
}

BoundaryCondition BoundaryCondition::rotation(const std::string& set, const Vector3& axis, const Vector3& centre,
                                              double angle) {
  BoundaryCondition bc;
  bc.kind = BcKind::rotation;
  bc.set = set;
  bc.axis = axis;
  bc.centre = centre;
  bc.angle = angle;
  return bc;
}

BoundaryCondition BoundaryCondition::traction(const std::string& set, const Vector3& t) {
  BoundaryCondition bc;
  bc.kind = BcKind::traction;
  bc.set = set;
  bc.value = t;
  return bc;
}

void BoundaryCondition::validate() const {
  if (set.empty()) throw InvalidParameters("boundary condition needs a node or face set");
  if (!value.allFinite() || !centre.allFinite() || !std::isfinite(angle))
    throw InvalidParameters("boundary condition has non-finite data");
  if (kind == BcKind::rotation && std::abs(axis.norm() - 1.0) > 1e-12)
    throw InvalidParameters("rotation axis must be a unit vector");
}

namespace {

struct PointKinematics {
  Eigen::Matrix<double, 8, 3> dNdX;
  double weight;
};

/// Consistent nodal forces of the dead loads at t = 1.
Eigen::VectorXd dead_loads(const MacroMesh& mesh, const std::vector<BoundaryCondition>& bcs) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(3 * mesh.node_count());
  const double g = 1.0 / std::sqrt(3.0);
  for (const auto& bc : bcs) {
    if (bc.kind != BcKind::traction) continue;
    for (const auto& face : mesh.face_sets.at(bc.set))
      for (int qa = 0; qa < 2; ++qa)
        for (int qb = 0; qb < 2; ++qb) {
          const double r = qa ? g : -g, s = qb ? g : -g;
          const double N[4] = {0.25 * (1 - r) * (1 - s), 0.25 * (1 + r) * (1 - s), 0.25 * (1 + r) * (1 + s),
                               0.25 * (1 - r) * (1 + s)};
          const double dr[4] = {-0.25 * (1 - s), 0.25 * (1 - s), 0.25 * (1 + s), -0.25 * (1 + s)};
          const double ds[4] = {-0.25 * (1 - r), -0.25 * (1 + r), 0.25 * (1 + r), 0.25 * (1 - r)};
          Vector3 xr = Vector3::Zero(), xs = Vector3::Zero();
          for (int m = 0; m < 4; ++m) {
            xr += dr[m] * mesh.nodes[face[m]];
            xs += ds[m] * mesh.nodes[face[m]];
          }
          const double area = xr.cross(xs).norm();
          for (int m = 0; m < 4; ++m) f.segment<3>(3 * face[m]) += N[m] * area * bc.value;
        }
  }
  return f;
}

class MacroProblem {
 public:
  MacroProblem(const MacroMesh& mesh, const std::vector<BoundaryCondition>& bcs, const SurrogateWeights& W,
               const StructuralTensorSet& M)
      : mesh_(mesh), bcs_(bcs), W_(W), M_(M) {
    mesh.validate();
    W.validate();
    const int ndof = 3 * mesh.node_count();
    constrained_.assign(ndof, -1);
    for (std::size_t b = 0; b < bcs.size(); ++b) {
      bcs[b].validate();
      if (bcs[b].kind == BcKind::traction) {
        if (!mesh.face_sets.count(bcs[b].set)) throw InvalidParameters("unknown face set '" + bcs[b].set + "'");
        continue;
      }
      const auto it = mesh.node_sets.find(bcs[b].set);
      if (it == mesh.node_sets.end()) throw InvalidParameters("unknown node set '" + bcs[b].set + "'");
      for (int n : it->second)
        for (int c = 0; c < 3; ++c)
          if (bcs[b].kind == BcKind::rotation || bcs[b].components[c]) constrained_[3 * n + c] = static_cast<int>(b);
    }
    equation_.assign(ndof, -1);
    for (int d = 0; d < ndof; ++d)
      if (constrained_[d] < 0) equation_[d] = free_count_++;

    points_.reserve(mesh.point_count());
    for (const auto& e : mesh.elements)
      for (int q = 0; q < kHexQuadraturePoints; ++q) {
        const HexShape s = HexShape::at(HexShape::gauss_point(q));
        Tensor2 J = Tensor2::Zero();
        for (int a = 0; a < 8; ++a) J += mesh.nodes[e[a]] * s.dN.row(a);
        points_.push_back({s.dN * J.inverse(), J.determinant()});
      }

    dead_load_ = dead_loads(mesh, bcs);
  }

  int free_count() const { return free_count_; }
  const std::vector<PointKinematics>& points() const { return points_; }
  const Eigen::VectorXd& dead_load() const { return dead_load_; }

  /// Writes the prescribed values at time t into u.
  void apply_dirichlet(Eigen::VectorXd& u, double t) const {
    for (int n = 0; n < mesh_.node_count(); ++n)
      for (int c = 0; c < 3; ++c) {
        const int b = constrained_[3 * n + c];
        if (b < 0) continue;
        const auto& bc = bcs_[b];
        if (bc.kind == BcKind::rotation) {
          const Tensor2 Q = axis_angle_rotation(bc.axis, t * bc.angle);
          const Vector3 X = mesh_.nodes[n] - bc.centre;
          u[3 * n + c] = ((Q - Tensor2::Identity()) * X)[c];
        } else {
          u[3 * n + c] = t * bc.value[c];
        }
      }
  }

  Tensor2 deformation(const Eigen::VectorXd& u, int e, int q) const {
    const auto& conn = mesh_.elements[e];
    Tensor2 F = Tensor2::Identity();
    const auto& G = points_[e * kHexQuadraturePoints + q].dNdX;
    for (int a = 0; a < 8; ++a) F += u.segment<3>(3 * conn[a]) * G.row(a);
    return F;
  }

  struct System {
    Eigen::VectorXd residual;           // free rows
    Eigen::SparseMatrix<double> K;      // free x free
    Eigen::VectorXd coupling;           // K_fd du_d when requested
  };

  /// Internal minus external forces on the free rows at load level t.
  System assemble(const Eigen::VectorXd& u, double t, const Eigen::VectorXd* dirichlet_increment) const {
    System sys;
    sys.residual = Eigen::VectorXd::Zero(free_count_);
    if (dirichlet_increment) sys.coupling = Eigen::VectorXd::Zero(free_count_);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(mesh_.element_count()) * 24 * 24);
    for (int e = 0; e < mesh_.element_count(); ++e) {
      const auto& conn = mesh_.elements[e];
      Eigen::Matrix<double, 24, 1> re = Eigen::Matrix<double, 24, 1>::Zero();
      Eigen::Matrix<double, 24, 24> ke = Eigen::Matrix<double, 24, 24>::Zero();
      for (int q = 0; q < kHexQuadraturePoints; ++q) {
        const auto& pk = points_[e * kHexQuadraturePoints + q];
        const Tensor2 F = deformation(u, e, q);
        const double J = F.determinant();
        if (!(J > 0.0)) throw NonPositiveJacobian(J);
        const SymTensor2 C = right_cauchy_green(F);
        const auto st = surrogate::stress_and_tangent(C, M_, W_);
        const Tensor2 P = F * st.stress.matrix();
        const Eigen::Matrix<double, 9, 9> A = nominal_tangent(F, st.stress, st.tangent);
        Eigen::Matrix<double, 9, 24> B = Eigen::Matrix<double, 9, 24>::Zero();
        for (int a = 0; a < 8; ++a)
          for (int i = 0; i < 3; ++i)
            for (int L = 0; L < 3; ++L) B(3 * i + L, 3 * a + i) = pk.dNdX(a, L);
        const Tensor2 Pt = P.transpose();
        const Eigen::Map<const Eigen::Matrix<double, 9, 1>> Pv(Pt.data());
        re += pk.weight * B.transpose() * Pv;
        ke += pk.weight * B.transpose() * A * B;
      }
      if (!re.allFinite()) throw NonFiniteValue("non-finite element forces");
      for (int a = 0; a < 8; ++a)
        for (int i = 0; i < 3; ++i) {
          const int r = equation_[3 * conn[a] + i];
          if (r < 0) continue;
          sys.residual[r] += re[3 * a + i];
          for (int b = 0; b < 8; ++b)
            for (int k = 0; k < 3; ++k) {
              const int dof = 3 * conn[b] + k;
              const int s = equation_[dof];
              if (s >= 0)
                triplets.emplace_back(r, s, ke(3 * a + i, 3 * b + k));
              else if (dirichlet_increment)
                sys.coupling[r] += ke(3 * a + i, 3 * b + k) * (*dirichlet_increment)[dof];
            }
        }
    }
    for (int d = 0; d < static_cast<int>(equation_.size()); ++d)
      if (equation_[d] >= 0) sys.residual[equation_[d]] -= t * dead_load_[d];
    sys.K.resize(free_count_, free_count_);
    sys.K.setFromTriplets(triplets.begin(), triplets.end());
    return sys;
  }

  void add_free(Eigen::VectorXd& u, const Eigen::VectorXd& du, double alpha) const {
    for (int d = 0; d < static_cast<int>(equation_.size()); ++d)
      if (equation_[d] >= 0) u[d] += alpha * du[equation_[d]];
  }

  void point_fields(const Eigen::VectorXd& u, std::vector<Tensor2>& Fs, std::vector<Tensor2>& Ps) const {
    Fs.clear();
    Ps.clear();
    for (int e = 0; e < mesh_.element_count(); ++e)
      for (int q = 0; q < kHexQuadraturePoints; ++q) {
        const Tensor2 F = deformation(u, e, q);
        Fs.push_back(F);
        Ps.push_back(F * surrogate::stress(right_cauchy_green(F), M_, W_).matrix());
      }
  }

 private:
  const MacroMesh& mesh_;
  const std::vector<BoundaryCondition>& bcs_;
  const SurrogateWeights& W_;
  const StructuralTensorSet& M_;
  std::vector<int> constrained_;  // bc index per dof, -1 if free
  std::vector<int> equation_;     // free equation per dof, -1 if prescribed
  int free_count_ = 0;
  std::vector<PointKinematics> points_;
  Eigen::VectorXd dead_load_;
};

Eigen::VectorXd solve_linear(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& rhs) {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
  if (ldlt.info() == Eigen::Success) {
    Eigen::VectorXd x = ldlt.solve(rhs);
    if (ldlt.info() == Eigen::Success && x.allFinite() && (K * x - rhs).norm() <= 1e-8 * rhs.norm() + 1e-300) return x;
  }
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(K);
  if (lu.info() != Eigen::Success) return Eigen::VectorXd::Constant(rhs.size(), NAN);
  return lu.solve(rhs);
}

class Stepper {
 public:
  Stepper(const MacroProblem& problem, const MacroOptions& options, double force_scale)
      : problem_(problem), options_(options), tol_(options.tolerance_factor * force_scale), scale_(force_scale) {}

  /// Newton from the converged state u to load level t_b; u is updated only on success.
  bool newton(Eigen::VectorXd& u, double t_b) {
    history_.clear();
    Eigen::VectorXd trial = u;
    try {
      // Linearised predictor for the Dirichlet and load increments.
      Eigen::VectorXd target = u;
      problem_.apply_dirichlet(target, t_b);
      const Eigen::VectorXd du_d = target - u;
      const auto sys = problem_.assemble(u, t_b, &du_d);
      const Eigen::VectorXd dx = solve_linear(sys.K, -(sys.residual + sys.coupling));
      if (!dx.allFinite()) return false;
      trial = target;
      problem_.add_free(trial, dx, 1.0);
    } catch (const Error&) {
      return false;
    }

    std::optional<MacroProblem::System> sys;
    try {
      sys = problem_.assemble(trial, t_b, nullptr);
    } catch (const Error&) {
      return false;
    }
    for (int it = 0;; ++it) {
      const double r = sys->residual.size() ? sys->residual.cwiseAbs().maxCoeff() : 0.0;
      history_.push_back(r / scale_);
      if (!std::isfinite(r)) return false;
      if (r <= tol_) break;
      if (it >= options_.max_iterations) return false;
      const Eigen::VectorXd dx = solve_linear(sys->K, -sys->residual);
      if (!dx.allFinite()) return false;
      bool accepted = false;
      double alpha = 1.0;
      for (int ls = 0; ls < 8 && !accepted; ++ls, alpha *= 0.5) {
        Eigen::VectorXd next = trial;
        problem_.add_free(next, dx, alpha);
        try {
          auto s = problem_.assemble(next, t_b, nullptr);
          if (s.residual.norm() < sys->residual.norm() || ls == 7) {
            trial = std::move(next);
            sys = std::move(s);
            accepted = true;
          }
        } catch (const Error&) {
        }
      }
      if (!accepted) return false;
    }
    u = std::move(trial);
    return true;
  }

  /// Advances with recursive step halving.
  bool advance(Eigen::VectorXd& u, double t_a, double t_b, int level) {
    if (newton(u, t_b)) return true;
    if (level >= options_.max_cutbacks) return false;
    const double mid = 0.5 * (t_a + t_b);
    Eigen::VectorXd v = u;
    if (!advance(v, t_a, mid, level + 1)) return false;
    if (!advance(v, mid, t_b, level + 1)) return false;
    u = std::move(v);
    return true;
  }

  const std::vector<double>& history() const { return history_; }

 private:
  const MacroProblem& problem_;
  const MacroOptions& options_;
  double tol_;
  double scale_;
  std::vector<double> history_;
};

double default_force_scale(const MacroMesh& mesh, const SurrogateWeights& W, const StructuralTensorSet& M) {
  const Matrix6 D = surrogate::tangent(SymTensor2::identity(), M, W).matrix();
  double G = (D(3, 3) + D(4, 4) + D(5, 5)) / 3.0;
  if (!(G > 0.0) || !std::isfinite(G)) G = 1.0;
  Vector3 lo = mesh.nodes.front(), hi = lo;
  for (const auto& x : mesh.nodes) {
    lo = lo.cwiseMin(x);
    hi = hi.cwiseMax(x);
  }
  Vector3 d = hi - lo;
  std::sort(d.data(), d.data() + 3);
  return G * d[1] * d[2];
}

}  // namespace

MacroState solve_macro(const MacroMesh& mesh, const std::vector<BoundaryCondition>& bcs, const SurrogateWeights& W,
                       const StructuralTensorSet& M_macro, const MacroOptions& options) {
  if (options.steps < 1) throw InvalidParameters("macro solve needs at least one load step");
  const MacroProblem problem(mesh, bcs, W, M_macro);
  MacroState state;
  state.t_goal = options.steps;
  state.force_scale = options.force_scale > 0.0 ? options.force_scale : default_force_scale(mesh, W, M_macro);
  Stepper stepper(problem, options, state.force_scale);

  Eigen::VectorXd u = Eigen::VectorXd::Zero(3 * mesh.node_count());
  auto record = [&](double t) {
    state.times.push_back(t);
    state.displacements.push_back(u);
    state.point_F.emplace_back();
    state.point_P.emplace_back();
    problem.point_fields(u, state.point_F.back(), state.point_P.back());
  };
  record(0.0);
  state.residual_history.emplace_back();
  for (int k = 1; k <= options.steps; ++k) {
    const double t_a = double(k - 1) / options.steps, t_b = double(k) / options.steps;
    if (!stepper.advance(u, t_a, t_b, 0)) {
      if (k == 1) throw FirstStepDivergence();
      break;
    }
    record(t_b);
    state.residual_history.push_back(stepper.history());
  }
  return state;
}

std::vector<DeformationPath> collect_deformations(const MacroState& state) {
  std::vector<DeformationPath> paths;
  if (state.point_F.empty()) return paths;
  const std::size_t n = state.point_F.front().size();
  paths.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    paths[p].id = static_cast<int>(p);
    paths[p].times = state.times;
    for (const auto& step : state.point_F) paths[p].F.push_back(step[p]);
  }
  return paths;
}

double internal_energy(const MacroMesh& mesh, const MacroState& state, int step, const SurrogateWeights& W,
                       const StructuralTensorSet& M) {
  double e = 0.0;
  for (int el = 0; el < mesh.element_count(); ++el)
    for (int q = 0; q < kHexQuadraturePoints; ++q) {
      const HexShape s = HexShape::at(HexShape::gauss_point(q));
      Tensor2 J = Tensor2::Zero();
      for (int a = 0; a < 8; ++a) J += mesh.nodes[mesh.elements[el][a]] * s.dN.row(a);
      const Tensor2& F = state.point_F.at(step)[el * kHexQuadraturePoints + q];
      e += J.determinant() * surrogate::energy(right_cauchy_green(F), M, W);
    }
  return e;
}

double external_work(const MacroMesh& mesh, const std::vector<BoundaryCondition>& bcs, const MacroState& state,
                     int from, int to) {
  const Eigen::VectorXd f = dead_loads(mesh, bcs);
  double work = 0.0;
  for (int k = from; k < to; ++k) {
    const double tm = 0.5 * (state.times.at(k) + state.times.at(k + 1));
    work += tm * f.dot(state.displacements.at(k + 1) - state.displacements.at(k));
  }
  return work;
}

}  // namespace feann
