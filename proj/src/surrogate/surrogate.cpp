#include "feann/surrogate/surrogate.hpp"

#include "feann/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace feann {

namespace {

bool is_active(AnisotropyClass c, int slot) {
  return c == AnisotropyClass::transversely_isotropic || (slot != kI4 && slot != kI5);
}

}  // namespace

NormalizationBounds NormalizationBounds::from_samples(const std::vector<InvariantVector>& samples, AnisotropyClass c) {
  if (samples.empty()) throw EmptyDataSet();
  NormalizationBounds out;
  for (int s = 0; s < kInvariantCount; ++s) {
    if (!is_active(c, s)) {
      out.min[s] = -1.0;
      out.max[s] = 1.0;
      continue;
    }
    out.min[s] = out.max[s] = samples.front()[s];
    for (const auto& inv : samples) {
      out.min[s] = std::min(out.min[s], inv[s]);
      out.max[s] = std::max(out.max[s], inv[s]);
    }
  }
  out.validate(c);
  return out;
}

void NormalizationBounds::validate(AnisotropyClass c) const {
  for (int s = 0; s < kInvariantCount; ++s) {
    if (!is_active(c, s)) continue;
    if (!std::isfinite(min[s]) || !std::isfinite(max[s]) || !(max[s] > min[s]))
      throw InvalidParameters("degenerate normalization range for invariant slot " + std::to_string(s));
  }
}

SurrogateWeights SurrogateWeights::zeros(int hidden, AnisotropyClass c) {
  if (hidden < 1) throw InvalidParameters("hidden width must be at least 1");
  SurrogateWeights W;
  W.anisotropy = c;
  W.w = Eigen::MatrixXd::Zero(hidden, 5);
  W.w_star = Eigen::VectorXd::Zero(hidden);
  W.b = Eigen::VectorXd::Zero(hidden);
  W.W = Eigen::VectorXd::Zero(hidden);
  for (int s = 0; s < kInvariantCount; ++s) {
    W.bounds.min[s] = -1.0;
    W.bounds.max[s] = 1.0;
  }
  return W;
}

void SurrogateWeights::validate() const {
  const auto n = W.size();
  if (n < 1 || w.rows() != n || w.cols() != 5 || w_star.size() != n || b.size() != n)
    throw InvalidParameters("surrogate weight shapes are inconsistent");
  if (!w.allFinite() || !w_star.allFinite() || !b.allFinite() || !W.allFinite() || !std::isfinite(B))
    throw InvalidParameters("surrogate weights contain non-finite values");
  bounds.validate(anisotropy);
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

namespace surrogate {

namespace {

std::optional<StructuralTensorSet> structural(const StructuralTensorSet& M, const SurrogateWeights& W) {
  if (W.anisotropy == AnisotropyClass::isotropic) return std::nullopt;
  return M;
}

/// Pre-activations z_a for normalized inputs.
Eigen::VectorXd activations(const std::array<double, kInvariantCount>& i, const SurrogateWeights& W) {
  Eigen::VectorXd z = W.b;
  for (int s = 0; s < kInvariantCount; ++s) {
    if (i[s] == 0.0) continue;
    for (int a = 0; a < W.hidden(); ++a) z[a] += W.input_weight(a, s) * i[s];
  }
  return z;
}

double hidden_sum(const Eigen::VectorXd& z, const SurrogateWeights& W) {
  double sum = 0.0;
  for (int a = 0; a < W.hidden(); ++a) sum += W.W[a] * softplus(z[a]);
  return sum;
}

}  // namespace

std::array<double, kInvariantCount> normalize(const InvariantVector& I, const NormalizationBounds& bounds) {
  std::array<double, kInvariantCount> out{};
  for (int s = 0; s < kInvariantCount; ++s) {
    if (!is_active(I.anisotropy, s)) continue;
    out[s] = (I[s] - 0.5 * (bounds.max[s] + bounds.min[s])) * bounds.scale(s);
  }
  return out;
}

double energy(const SymTensor2& C, const StructuralTensorSet& M, const SurrogateWeights& W) {
  const auto i = normalize(invariants(C, structural(M, W)), W.bounds);
  return hidden_sum(activations(i, W), W) + W.B;
}

SymTensor2 stress(const SymTensor2& C, const StructuralTensorSet& M, const SurrogateWeights& W) {
  const auto m = structural(M, W);
  const auto inv = invariants(C, m);
  const auto z = activations(normalize(inv, W.bounds), W);
  const auto G = invariant_gradients(C, m);
  SymTensor2 T;
  for (int s = 0; s < kInvariantCount; ++s) {
    if (!is_active(W.anisotropy, s)) continue;
    double g = 0.0;
    for (int a = 0; a < W.hidden(); ++a) g += W.W[a] * sigmoid(z[a]) * W.input_weight(a, s);
    T += (2.0 * g * W.bounds.scale(s)) * G[s];
  }
  return T;
}

StressTangent stress_and_tangent(const SymTensor2& C, const StructuralTensorSet& M, const SurrogateWeights& W) {
  const auto m = structural(M, W);
  const auto inv = invariants(C, m);
  const auto z = activations(normalize(inv, W.bounds), W);
  const auto G = invariant_gradients(C, m);
  const auto H = invariant_hessians(C, m);
  const auto slots = active_slots(W.anisotropy);

  std::vector<double> sig(W.hidden()), dsig(W.hidden());
  for (int a = 0; a < W.hidden(); ++a) {
    sig[a] = sigmoid(z[a]);
    dsig[a] = sig[a] * (1.0 - sig[a]);
  }
  std::array<SymTensor2, kInvariantCount> sG;
  StressTangent out;
  Matrix6 K = Matrix6::Zero();
  for (int s : slots) {
    double g = 0.0;
    for (int a = 0; a < W.hidden(); ++a) g += W.W[a] * sig[a] * W.input_weight(a, s);
    sG[s] = W.bounds.scale(s) * G[s];
    out.stress += (2.0 * g) * sG[s];
    K += (g * W.bounds.scale(s)) * H[s].matrix();
  }
  for (int s : slots)
    for (int t : slots) {
      double e = 0.0;
      for (int a = 0; a < W.hidden(); ++a) e += W.W[a] * dsig[a] * W.input_weight(a, s) * W.input_weight(a, t);
      K += e * sG[s].components() * sG[t].components().transpose();
    }
  out.tangent = Tensor4Sym(4.0 * K);
  return out;
}

Tensor4Sym tangent(const SymTensor2& C, const StructuralTensorSet& M, const SurrogateWeights& W) {
  return stress_and_tangent(C, M, W).tangent;
}

GrowthReport check_growth_constraint(const SurrogateWeights& W) {
  GrowthReport r{true, 0.0, 0.0};
  bool any_w3 = false, any_star = false;
  for (int a = 0; a < W.hidden(); ++a) {
    if (!(W.W[a] > 0.0)) r.satisfied = false;
    if (W.w(a, kI3) > 0.0) {
      any_w3 = true;
      r.C3 += W.W[a] * W.w(a, kI3);
    }
    if (W.w_star[a] > 0.0) {
      any_star = true;
      r.C3_star += W.W[a] * W.w_star[a];
    }
  }
  r.satisfied = r.satisfied && any_w3 && any_star;
  return r;
}

SurrogateWeights fix_normalization_bias(SurrogateWeights W) {
  const auto m = W.anisotropy == AnisotropyClass::isotropic ? std::nullopt
                                                            : std::optional<StructuralTensorSet>(Vector3::UnitZ());
  // Every invariant at C = 1 is independent of the fiber direction.
  const auto i = normalize(invariants(SymTensor2::identity(), m), W.bounds);
  W.B = -hidden_sum(activations(i, W), W);
  return W;
}

namespace {

using nlohmann::json;

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd from_vec(const json& j, const char* key) {
  const auto v = j.at(key).get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::string to_json(const SurrogateWeights& W) {
  json j;
  j["format"] = "feann-surrogate";
  j["format_version"] = kSurrogateFormatVersion;
  j["anisotropy"] = to_string(W.anisotropy);
  j["growth_constrained"] = W.growth_constrained;
  j["hidden"] = W.hidden();
  std::vector<std::vector<double>> rows;
  for (int a = 0; a < W.hidden(); ++a) rows.push_back(to_vec(W.w.row(a).transpose()));
  j["w"] = rows;
  j["w_star"] = to_vec(W.w_star);
  j["b"] = to_vec(W.b);
  j["W"] = to_vec(W.W);
  j["B"] = W.B;
  j["bounds_min"] = W.bounds.min;
  j["bounds_max"] = W.bounds.max;
  return j.dump(2);
}

SurrogateWeights from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("model document is not valid JSON: ") + e.what());
  }
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kSurrogateFormatVersion) throw FormatVersionMismatch("model", version, kSurrogateFormatVersion);
    SurrogateWeights W;
    W.anisotropy = anisotropy_from_string(j.at("anisotropy").get<std::string>());
    W.growth_constrained = j.at("growth_constrained").get<bool>();
    const int n = j.at("hidden").get<int>();
    const auto rows = j.at("w").get<std::vector<std::vector<double>>>();
    if (n < 1 || static_cast<int>(rows.size()) != n) throw FormatError("model weight matrix has wrong row count");
    W.w.resize(n, 5);
    for (int a = 0; a < n; ++a) {
      if (rows[a].size() != 5) throw FormatError("model weight matrix row must have 5 entries");
      for (int c = 0; c < 5; ++c) W.w(a, c) = rows[a][c];
    }
    W.w_star = from_vec(j, "w_star");
    W.b = from_vec(j, "b");
    W.W = from_vec(j, "W");
    W.B = j.at("B").get<double>();
    W.bounds.min = j.at("bounds_min").get<std::array<double, kInvariantCount>>();
    W.bounds.max = j.at("bounds_max").get<std::array<double, kInvariantCount>>();
    W.validate();
    return W;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed model document: ") + e.what());
  } catch (const InvalidParameters& e) {
    throw FormatError(std::string("inconsistent model document: ") + e.what());
  }
}

void save(const SurrogateWeights& W, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  out << to_json(W) << '\n';
  if (!out) throw FormatError("failed writing '" + path + "'");
}

SurrogateWeights load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

}  // namespace surrogate
}  // namespace feann
