#include "feann/macro/mesh.hpp"

#include "feann/errors.hpp"

#include <cmath>

namespace feann {

HexShape HexShape::at(const Vector3& xi) {
  HexShape s;
  for (int a = 0; a < 8; ++a) {
    const Vector3 c((a & 1) ? 1.0 : -1.0, (a & 2) ? 1.0 : -1.0, (a & 4) ? 1.0 : -1.0);
    const Vector3 f(1.0 + c[0] * xi[0], 1.0 + c[1] * xi[1], 1.0 + c[2] * xi[2]);
    s.N[a] = 0.125 * f[0] * f[1] * f[2];
    s.dN(a, 0) = 0.125 * c[0] * f[1] * f[2];
    s.dN(a, 1) = 0.125 * f[0] * c[1] * f[2];
    s.dN(a, 2) = 0.125 * f[0] * f[1] * c[2];
  }
  return s;
}

const Vector3& HexShape::gauss_point(int q) {
  static const std::array<Vector3, 8> points = [] {
    std::array<Vector3, 8> p;
    const double g = 1.0 / std::sqrt(3.0);
    for (int k = 0; k < 8; ++k) p[k] = Vector3((k & 1) ? g : -g, (k & 2) ? g : -g, (k & 4) ? g : -g);
    return p;
  }();
  return points.at(q);
}

namespace {

Tensor2 reference_jacobian(const MacroMesh& mesh, const HexConnectivity& e, const HexShape& s) {
  Tensor2 J = Tensor2::Zero();
  for (int a = 0; a < 8; ++a) J += mesh.nodes[e[a]] * s.dN.row(a);
  return J;
}

}  // namespace

void MacroMesh::validate() const {
  if (elements.empty()) throw InvalidParameters("mesh has no elements");
  for (const auto& e : elements)
    for (int n : e)
      if (n < 0 || n >= node_count()) throw InvalidParameters("element references a missing node");
  for (const auto& [name, set] : node_sets)
    for (int n : set)
      if (n < 0 || n >= node_count()) throw InvalidParameters("node set '" + name + "' references a missing node");
  for (const auto& e : elements)
    for (int q = 0; q < kHexQuadraturePoints; ++q) {
      const double d = reference_jacobian(*this, e, HexShape::at(HexShape::gauss_point(q))).determinant();
      if (!(d > 0.0)) throw NonPositiveJacobian(d);
    }
}

double MacroMesh::volume() const {
  double v = 0.0;
  for (const auto& e : elements)
    for (int q = 0; q < kHexQuadraturePoints; ++q)
      v += reference_jacobian(*this, e, HexShape::at(HexShape::gauss_point(q))).determinant();
  return v;
}

MacroMesh MacroMesh::structured(std::array<int, 3> div, const std::function<Vector3(const Vector3&)>& map,
                                const std::function<bool(const Vector3&)>& remove) {
  for (int d : div)
    if (d < 1) throw InvalidParameters("structured mesh needs at least one division per direction");
  const int nx = div[0] + 1, ny = div[1] + 1;
  auto grid = [&](int i, int j, int k) { return i + nx * (j + ny * k); };
  auto coord = [&](int i, int j, int k) {
    return map(Vector3(double(i) / div[0], double(j) / div[1], double(k) / div[2]));
  };

  MacroMesh mesh;
  std::vector<int> index(static_cast<std::size_t>(nx) * ny * (div[2] + 1), -1);
  std::vector<std::array<int, 3>> cells;
  for (int k = 0; k < div[2]; ++k)
    for (int j = 0; j < div[1]; ++j)
      for (int i = 0; i < div[0]; ++i) {
        const Vector3 centre = map(Vector3((i + 0.5) / div[0], (j + 0.5) / div[1], (k + 0.5) / div[2]));
        if (remove && remove(centre)) continue;
        HexConnectivity e;
        for (int a = 0; a < 8; ++a) {
          const int g = grid(i + (a & 1), j + ((a >> 1) & 1), k + ((a >> 2) & 1));
          if (index[g] < 0) {
            index[g] = static_cast<int>(mesh.nodes.size());
            mesh.nodes.push_back(coord(i + (a & 1), j + ((a >> 1) & 1), k + ((a >> 2) & 1)));
          }
          e[a] = index[g];
        }
        mesh.elements.push_back(e);
        cells.push_back({i, j, k});
      }
  if (mesh.elements.empty()) throw InvalidParameters("structured mesh lost all of its cells");

  static const char* names[3][2] = {{"x1_min", "x1_max"}, {"x2_min", "x2_max"}, {"x3_min", "x3_max"}};
  for (int axis = 0; axis < 3; ++axis)
    for (int side = 0; side < 2; ++side) {
      const int layer = side == 0 ? 0 : div[axis];
      auto& nodes = mesh.node_sets[names[axis][side]];
      for (int k = 0; k <= div[2]; ++k)
        for (int j = 0; j <= div[1]; ++j)
          for (int i = 0; i <= div[0]; ++i) {
            const int ijk[3] = {i, j, k};
            if (ijk[axis] == layer && index[grid(i, j, k)] >= 0) nodes.push_back(index[grid(i, j, k)]);
          }
      // Quads on this face, ordered counter-clockwise seen from outside.
      auto& faces = mesh.face_sets[names[axis][side]];
      const int u = (axis + 1) % 3, v = (axis + 2) % 3;
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (cells[c][axis] != (side == 0 ? 0 : div[axis] - 1)) continue;
        std::array<int, 4> corner;
        const int du[4] = {0, 1, 1, 0}, dv[4] = {0, 0, 1, 1};
        for (int m = 0; m < 4; ++m) {
          int bits = (side << axis) | (du[m] << u) | (dv[m] << v);
          corner[m] = mesh.elements[c][bits];
        }
        if (side == 0) std::swap(corner[1], corner[3]);
        faces.push_back(corner);
      }
    }
  return mesh;
}

MacroMesh MacroMesh::box(const Vector3& size, std::array<int, 3> divisions) {
  return structured(divisions, [size](const Vector3& s) { return Vector3(s.cwiseProduct(size)); });
}

}  // namespace feann
