#include "feann/homogenization/load_cases.hpp"

#include "feann/errors.hpp"

namespace feann {

MixedControl MixedControl::full(const Tensor2& F) {
  MixedControl c;
  for (auto& row : c.prescribed) row.fill(true);
  c.value = F;
  return c;
}

void MixedControl::validate() const {
  if (free_count() == 9) throw InvalidParameters("mixed control needs at least one prescribed F component");
  if (!value.allFinite()) throw NonFiniteValue("mixed control has non-finite prescribed values");
}

int MixedControl::free_count() const { return static_cast<int>(free_components().size()); }

std::vector<int> MixedControl::free_components() const {
  std::vector<int> out;
  for (int i = 0; i < 3; ++i)
    for (int J = 0; J < 3; ++J)
      if (!prescribed[i][J]) out.push_back(3 * i + J);
  return out;
}

const char* to_string(LoadKind k) {
  switch (k) {
    case LoadKind::uniaxial:
      return "uniaxial-tension";
    case LoadKind::equibiaxial:
      return "equibiaxial-tension";
    case LoadKind::uniaxial_compression:
      return "uniaxial-compression";
    case LoadKind::equibiaxial_compression:
      return "equibiaxial-compression";
    case LoadKind::simple_shear:
      return "simple-shear";
  }
  return "unknown";
}

namespace {

bool is_pair(LoadKind k) {
  return k == LoadKind::equibiaxial || k == LoadKind::equibiaxial_compression || k == LoadKind::simple_shear;
}

}  // namespace

void LoadCase::validate() const {
  auto bad_axis = [](int a) { return a < 0 || a > 2; };
  if (bad_axis(axes[0])) throw InvalidParameters("load case axis out of range");
  if (is_pair(kind) && (bad_axis(axes[1]) || axes[1] == axes[0]))
    throw InvalidParameters("load case needs two distinct axes");
  if (kind != LoadKind::simple_shear && !(amplitude > 0.0)) throw InvalidParameters("stretch amplitude must be positive");
  if (!std::isfinite(amplitude)) throw InvalidParameters("load amplitude must be finite");
  if (steps < 1) throw InvalidParameters("load case needs at least one step");
}

MixedControl LoadCase::control(double t) const {
  MixedControl c;
  for (auto& row : c.prescribed) row.fill(true);
  c.value = Tensor2::Identity();
  if (kind == LoadKind::simple_shear) {
    c.value(axes[0], axes[1]) = t * amplitude;
    return c;
  }
  const double lambda = 1.0 + t * (amplitude - 1.0);
  for (int i = 0; i < 3; ++i) c.prescribed[i][i] = false;
  c.prescribed[axes[0]][axes[0]] = true;
  c.value(axes[0], axes[0]) = lambda;
  if (is_pair(kind)) {
    c.prescribed[axes[1]][axes[1]] = true;
    c.value(axes[1], axes[1]) = lambda;
  }
  return c;
}

std::string LoadCase::name() const {
  std::string out = to_string(kind);
  out += " x" + std::to_string(axes[0] + 1);
  if (is_pair(kind)) out += "-x" + std::to_string(axes[1] + 1);
  return out;
}

std::vector<LoadCase> initial_load_suite(int steps) {
  const std::array<std::array<int, 2>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
  std::vector<LoadCase> out;
  for (int a = 0; a < 3; ++a) out.push_back({LoadKind::uniaxial, {a, -1}, 1.60, steps});
  for (const auto& p : pairs) out.push_back({LoadKind::equibiaxial, p, 1.30, steps});
  for (int a = 0; a < 3; ++a) out.push_back({LoadKind::uniaxial_compression, {a, -1}, 0.70, steps});
  for (const auto& p : pairs) out.push_back({LoadKind::equibiaxial_compression, p, 0.85, steps});
  for (const auto& p : pairs) out.push_back({LoadKind::simple_shear, p, 0.50, steps});
  for (const auto& p : pairs) out.push_back({LoadKind::simple_shear, {p[1], p[0]}, 0.50, steps});
  return out;
}

}  // namespace feann
