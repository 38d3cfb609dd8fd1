#include "feann/mining/validation.hpp"

#include "feann/errors.hpp"
#include "feann/kinematics/kinematics.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace feann {

ErrorStatistics ErrorStatistics::of(std::vector<double> e) {
  ErrorStatistics s;
  s.count = e.size();
  if (e.empty()) return s;
  std::sort(e.begin(), e.end());
  // nearest-rank percentiles
  auto rank = [&](double p) { return e[std::min(e.size() - 1, static_cast<std::size_t>(std::ceil(p * e.size())) - 1)]; };
  s.p50 = rank(0.5);
  s.p95 = rank(0.95);
  s.max = e.back();
  return s;
}

std::string ValidationReport::to_json() const {
  nlohmann::ordered_json j;
  j["states"] = states;
  j["uncovered"] = uncovered;
  auto stats = [](const ErrorStatistics& s) {
    return nlohmann::ordered_json{{"count", s.count}, {"p50", s.p50}, {"p95", s.p95}, {"max", s.max}};
  };
  j["held_out"] = stats(held_out);
  j["all"] = stats(all);
  return j.dump(2);
}

ValidationReport validate_against_oracle(const MacroState& state, const DataSet& D, const SurrogateWeights& W,
                                         const MicroBackend& backend, const Vector3& A_macro, const Vector3& A_rve,
                                         double stress_scale, const ValidationOptions& options) {
  if (D.empty()) throw EmptyDataSet();
  const Tensor2 Q = rodrigues(A_macro, A_rve);
  const StructuralTensorSet M_rve(A_rve);

  std::vector<Vector6> known;
  known.reserve(D.size());
  Vector6 lo = Vector6::Constant(INFINITY), hi = Vector6::Constant(-INFINITY);
  for (const auto& d : D.tuples) {
    known.push_back(right_cauchy_green(d.F).components());
    lo = lo.cwiseMin(known.back());
    hi = hi.cwiseMax(known.back());
  }
  Vector6 range = hi - lo;
  for (int s = 0; s < 6; ++s)
    if (!(range[s] > 0.0)) range[s] = 1.0;

  ValidationReport rep;
  std::vector<double> held, all;
  const auto paths = collect_deformations(state);
  for (const auto& path : paths) {
    std::vector<Tensor2> F;
    for (const auto& f : path.F) F.push_back(rotate_deformation(f, Q));
    const auto P = backend.path(F);
    for (std::size_t k = 0; k < F.size(); ++k) {
      const SymTensor2 C = right_cauchy_green(F[k]);
      const Vector6 c = C.components();
      const bool covered = std::any_of(known.begin(), known.end(), [&](const Vector6& x) {
        return ((c - x).cwiseAbs().cwiseQuotient(range)).maxCoeff() <= options.coverage_tolerance;
      });
      const Tensor2 P_ann = F[k] * surrogate::stress(C, M_rve, W).matrix();
      const double e = (P_ann - P[k]).norm() / std::max(P[k].norm(), options.stress_floor * stress_scale);
      ++rep.states;
      all.push_back(e);
      if (!covered) {
        ++rep.uncovered;
        held.push_back(e);
      }
    }
  }
  rep.held_out = ErrorStatistics::of(held);
  rep.all = ErrorStatistics::of(all);
  return rep;
}

}  // namespace feann
