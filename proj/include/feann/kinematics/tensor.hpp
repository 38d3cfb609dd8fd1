#pragma once

#include <Eigen/Dense>

#include <array>
#include <iosfwd>
#include <string>
#include <string_view>

namespace feann {

/// General second-order tensor, row-major component access T(i, j).
using Tensor2 = Eigen::Matrix3d;
using Vector3 = Eigen::Vector3d;
using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;

/// Throws NonFiniteValue if any component is NaN or infinite.
const Tensor2& require_finite(const Tensor2& t);

/// Voigt slot of the symmetric index pair (i, j): 11, 22, 33, 23, 13, 12.
constexpr int voigt_index(int i, int j) {
  constexpr int map[3][3] = {{0, 5, 4}, {5, 1, 3}, {4, 3, 2}};
  return map[i][j];
}
constexpr std::array<std::array<int, 2>, 6> kVoigtPairs{{{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}}};

/// Symmetric second-order tensor stored by its six independent components.
/// Slots hold tensor components (no engineering-shear factor).
class SymTensor2 {
 public:
  SymTensor2() : v_(Vector6::Zero()) {}
  explicit SymTensor2(const Vector6& components) : v_(components) {}

  static SymTensor2 zero() { return {}; }
  static SymTensor2 identity();
  /// Symmetric part of m.
  static SymTensor2 from_matrix(const Tensor2& m);
  /// Unit symmetric direction S_J = (e_i (x) e_j + e_j (x) e_i) / 2 for slot J.
  static SymTensor2 unit_direction(int slot);
  /// a (x) a
  static SymTensor2 dyad(const Vector3& a);

  Tensor2 matrix() const;
  double operator()(int i, int j) const { return v_[voigt_index(i, j)]; }
  double operator[](int slot) const { return v_[slot]; }
  double& operator[](int slot) { return v_[slot]; }
  const Vector6& components() const { return v_; }

  double trace() const { return v_[0] + v_[1] + v_[2]; }
  double det() const;
  SymTensor2 inverse() const;
  double norm() const;  // Frobenius
  bool is_positive_definite() const;

  SymTensor2& operator+=(const SymTensor2& o) {
    v_ += o.v_;
    return *this;
  }
  SymTensor2& operator-=(const SymTensor2& o) {
    v_ -= o.v_;
    return *this;
  }
  SymTensor2& operator*=(double s) {
    v_ *= s;
    return *this;
  }
  friend SymTensor2 operator+(SymTensor2 a, const SymTensor2& b) { return a += b; }
  friend SymTensor2 operator-(SymTensor2 a, const SymTensor2& b) { return a -= b; }
  friend SymTensor2 operator*(SymTensor2 a, double s) { return a *= s; }
  friend SymTensor2 operator*(double s, SymTensor2 a) { return a *= s; }
  friend SymTensor2 operator-(SymTensor2 a) { return a *= -1.0; }

 private:
  Vector6 v_;
};

/// Full contraction A : B.
double double_dot(const SymTensor2& a, const SymTensor2& b);
/// Sum of squared differences over the six independent slots, each counted once.
double slot_distance_squared(const SymTensor2& a, const SymTensor2& b);

/// Fourth-order tensor with both minor symmetries, stored as a 6x6 matrix whose
/// entry (I, J) is the tensor component D_ijkl with I = (ij) and J = (kl).
/// No Voigt factors are folded into the storage; contraction with a symmetric
/// tensor applies the factor 2 on shear slots explicitly.
class Tensor4Sym {
 public:
  Tensor4Sym() : m_(Matrix6::Zero()) {}
  explicit Tensor4Sym(const Matrix6& m) : m_(m) {}

  static Tensor4Sym zero() { return {}; }
  /// A (x) B, components A_ij B_kl.
  static Tensor4Sym outer(const SymTensor2& a, const SymTensor2& b);
  /// Minor-symmetrised A (.) B, components (A_ik B_jl + A_il B_jk) / 2.
  static Tensor4Sym sym_product(const SymTensor2& a, const SymTensor2& b);
  /// Symmetric fourth-order identity, components (d_ik d_jl + d_il d_jk) / 2.
  static Tensor4Sym identity();

  double operator()(int i, int j, int k, int l) const { return m_(voigt_index(i, j), voigt_index(k, l)); }
  double operator()(int row, int col) const { return m_(row, col); }
  double& operator()(int row, int col) { return m_(row, col); }
  const Matrix6& matrix() const { return m_; }

  /// D : B
  SymTensor2 contract(const SymTensor2& b) const;
  /// max |D_ijkl - D_klij|
  double major_asymmetry() const { return (m_ - m_.transpose()).cwiseAbs().maxCoeff(); }

  Tensor4Sym& operator+=(const Tensor4Sym& o) {
    m_ += o.m_;
    return *this;
  }
  Tensor4Sym& operator*=(double s) {
    m_ *= s;
    return *this;
  }
  friend Tensor4Sym operator+(Tensor4Sym a, const Tensor4Sym& b) { return a += b; }
  friend Tensor4Sym operator-(Tensor4Sym a, const Tensor4Sym& b) {
    a.m_ -= b.m_;
    return a;
  }
  friend Tensor4Sym operator*(Tensor4Sym a, double s) { return a *= s; }
  friend Tensor4Sym operator*(double s, Tensor4Sym a) { return a *= s; }

 private:
  Matrix6 m_;
};

/// Nominal tangent dP/dF (9x9, row-major pairs iJ, kL) from F, the second
/// Piola-Kirchhoff stress T and the material tangent 2 dT/dC.
Eigen::Matrix<double, 9, 9> nominal_tangent(const Tensor2& F, const SymTensor2& T, const Tensor4Sym& material_tangent);

/// Nine components in row-major order, shortest round-trip decimal form,
/// separated by single spaces.
std::string format_tensor(const Tensor2& t);
/// Inverse of format_tensor; throws FormatError on malformed input.
Tensor2 parse_tensor(std::string_view text);

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double x);
/// Parses a full token as double; throws FormatError on failure.
double parse_double(std::string_view token);

}  // namespace feann
