#include "feann/homogenization/material_point.hpp"

#include "feann/errors.hpp"
#include "feann/kinematics/kinematics.hpp"

#include <cmath>

namespace feann {

NominalResponse oracle_response(const OracleParameters& oracle) {
  return [oracle](const Tensor2& F) { return nominal_stress(F, oracle_stress(F, oracle)); };
}

namespace {

Eigen::VectorXd free_values(const Tensor2& P, const std::vector<int>& free) {
  Eigen::VectorXd r(free.size());
  for (std::size_t k = 0; k < free.size(); ++k) r[k] = P(free[k] / 3, free[k] % 3);
  return r;
}

}  // namespace

Tensor2 solve_mixed_control(const NominalResponse& response, const MixedControl& ctrl, const Tensor2& guess,
                            double stress_scale, const MaterialPointOptions& options, int step) {
  ctrl.validate();
  const auto free = ctrl.free_components();
  Tensor2 F = guess;
  for (int i = 0; i < 3; ++i)
    for (int J = 0; J < 3; ++J)
      if (ctrl.prescribed[i][J]) F(i, J) = ctrl.value(i, J);
  const double tol = options.tolerance_factor * stress_scale;
  if (free.empty()) return F;

  auto eval = [&](const Tensor2& x) { return free_values(response(x), free); };
  Eigen::VectorXd r = eval(F);
  for (int it = 0; it <= options.max_iterations; ++it) {
    if (!r.allFinite()) break;
    if (r.cwiseAbs().maxCoeff() <= tol) return F;
    if (it == options.max_iterations) break;
    Eigen::MatrixXd Jm(free.size(), free.size());
    for (std::size_t c = 0; c < free.size(); ++c) {
      const double h = 1e-7 * std::max(1.0, std::abs(F(free[c] / 3, free[c] % 3)));
      Tensor2 Fp = F, Fm = F;
      Fp(free[c] / 3, free[c] % 3) += h;
      Fm(free[c] / 3, free[c] % 3) -= h;
      Jm.col(c) = (eval(Fp) - eval(Fm)) / (2.0 * h);
    }
    const Eigen::VectorXd dx = Jm.fullPivLu().solve(-r);
    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 12; ++ls, alpha *= 0.5) {
      Tensor2 trial = F;
      for (std::size_t c = 0; c < free.size(); ++c) trial(free[c] / 3, free[c] % 3) += alpha * dx[c];
      if (!(trial.determinant() > 0.0)) continue;
      Eigen::VectorXd rt;
      try {
        rt = eval(trial);
      } catch (const Error&) {
        continue;
      }
      if (rt.allFinite() && (rt.norm() < r.norm() || ls == 11)) {
        F = trial;
        r = rt;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  throw NewtonDivergence("material point", step, r.allFinite() ? r.cwiseAbs().maxCoeff() : INFINITY);
}

std::vector<PathPoint> drive_material_point(const NominalResponse& response, const LoadCase& load, double stress_scale,
                                            const MaterialPointOptions& options) {
  load.validate();
  std::vector<PathPoint> path;
  Tensor2 F = Tensor2::Identity();
  Tensor2 previous = F;
  for (int k = 0; k <= load.steps; ++k) {
    const double t = static_cast<double>(k) / load.steps;
    // Linear extrapolation of the free components from the last two steps.
    const Tensor2 guess = k >= 2 ? Tensor2(2.0 * F - previous) : F;
    const Tensor2 next = solve_mixed_control(response, load.control(t), guess, stress_scale, options, k);
    previous = F;
    F = next;
    path.push_back({t, F, response(F)});
  }
  return path;
}

std::vector<PathPoint> drive_material_point(const OracleParameters& oracle, const LoadCase& load,
                                            const MaterialPointOptions& options) {
  return drive_material_point(oracle_response(oracle), load, initial_moduli(oracle.matrix).G, options);
}

std::vector<PathPoint> evaluate_path(const OracleParameters& oracle, const std::vector<Tensor2>& F,
                                     const std::vector<double>& t) {
  if (F.size() != t.size()) throw InvalidParameters("path times and deformations differ in length");
  std::vector<PathPoint> out;
  out.reserve(F.size());
  for (std::size_t k = 0; k < F.size(); ++k) out.push_back({t[k], F[k], nominal_stress(F[k], oracle_stress(F[k], oracle))});
  return out;
}

}  // namespace feann
