#include "feann/kinematics/tensor.hpp"

#include "feann/errors.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace feann {

const Tensor2& require_finite(const Tensor2& t) {
  if (!t.allFinite()) throw NonFiniteValue("tensor has non-finite components");
  return t;
}

SymTensor2 SymTensor2::identity() {
  Vector6 v;
  v << 1, 1, 1, 0, 0, 0;
  return SymTensor2(v);
}

SymTensor2 SymTensor2::from_matrix(const Tensor2& m) {
  Vector6 v;
  for (int s = 0; s < 6; ++s) {
    const auto [i, j] = kVoigtPairs[s];
    v[s] = 0.5 * (m(i, j) + m(j, i));
  }
  return SymTensor2(v);
}

SymTensor2 SymTensor2::unit_direction(int slot) {
  SymTensor2 s;
  s.v_[slot] = slot < 3 ? 1.0 : 0.5;
  return s;
}

SymTensor2 SymTensor2::dyad(const Vector3& a) {
  Vector6 v;
  v << a[0] * a[0], a[1] * a[1], a[2] * a[2], a[1] * a[2], a[0] * a[2], a[0] * a[1];
  return SymTensor2(v);
}

Tensor2 SymTensor2::matrix() const {
  Tensor2 m;
  m << v_[0], v_[5], v_[4], v_[5], v_[1], v_[3], v_[4], v_[3], v_[2];
  return m;
}

double SymTensor2::det() const {
  return v_[0] * (v_[1] * v_[2] - v_[3] * v_[3]) - v_[5] * (v_[5] * v_[2] - v_[3] * v_[4]) +
         v_[4] * (v_[5] * v_[3] - v_[1] * v_[4]);
}

SymTensor2 SymTensor2::inverse() const {
  const double d = det();
  Vector6 c;
  c[0] = v_[1] * v_[2] - v_[3] * v_[3];
  c[1] = v_[0] * v_[2] - v_[4] * v_[4];
  c[2] = v_[0] * v_[1] - v_[5] * v_[5];
  c[3] = v_[4] * v_[5] - v_[0] * v_[3];
  c[4] = v_[5] * v_[3] - v_[1] * v_[4];
  c[5] = v_[3] * v_[4] - v_[2] * v_[5];
  return SymTensor2(c / d);
}

double SymTensor2::norm() const { return std::sqrt(double_dot(*this, *this)); }

bool SymTensor2::is_positive_definite() const {
  // Sylvester's criterion on leading minors.
  return v_[0] > 0.0 && v_[0] * v_[1] - v_[5] * v_[5] > 0.0 && det() > 0.0;
}

double double_dot(const SymTensor2& a, const SymTensor2& b) {
  const auto& x = a.components();
  const auto& y = b.components();
  return x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + 2.0 * (x[3] * y[3] + x[4] * y[4] + x[5] * y[5]);
}

double slot_distance_squared(const SymTensor2& a, const SymTensor2& b) {
  return (a.components() - b.components()).squaredNorm();
}

Tensor4Sym Tensor4Sym::outer(const SymTensor2& a, const SymTensor2& b) {
  return Tensor4Sym(a.components() * b.components().transpose());
}

Tensor4Sym Tensor4Sym::sym_product(const SymTensor2& a, const SymTensor2& b) {
  Matrix6 m;
  for (int I = 0; I < 6; ++I) {
    const auto [i, j] = kVoigtPairs[I];
    for (int J = 0; J < 6; ++J) {
      const auto [k, l] = kVoigtPairs[J];
      m(I, J) = 0.5 * (a(i, k) * b(j, l) + a(i, l) * b(j, k));
    }
  }
  return Tensor4Sym(m);
}

Tensor4Sym Tensor4Sym::identity() { return sym_product(SymTensor2::identity(), SymTensor2::identity()); }

SymTensor2 Tensor4Sym::contract(const SymTensor2& b) const {
  Vector6 weighted = b.components();
  weighted.tail<3>() *= 2.0;
  return SymTensor2(m_ * weighted);
}

Eigen::Matrix<double, 9, 9> nominal_tangent(const Tensor2& F, const SymTensor2& T, const Tensor4Sym& D) {
  // A_iJkL = d_ik T_JL + F_iM D_MJNL F_kN
  Eigen::Matrix<double, 9, 9> A = Eigen::Matrix<double, 9, 9>::Zero();
  // G_(MJ),(kL) = D_MJNL F_kN
  double G[3][3][3][3];
  for (int M = 0; M < 3; ++M)
    for (int J = 0; J < 3; ++J)
      for (int k = 0; k < 3; ++k)
        for (int L = 0; L < 3; ++L) {
          double s = 0.0;
          for (int N = 0; N < 3; ++N) s += D(M, J, N, L) * F(k, N);
          G[M][J][k][L] = s;
        }
  for (int i = 0; i < 3; ++i)
    for (int J = 0; J < 3; ++J)
      for (int k = 0; k < 3; ++k)
        for (int L = 0; L < 3; ++L) {
          double s = (i == k) ? T(J, L) : 0.0;
          for (int M = 0; M < 3; ++M) s += F(i, M) * G[M][J][k][L];
          A(3 * i + J, 3 * k + L) = s;
        }
  return A;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view token) {
  double x = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, x);
  if (res.ec != std::errc() || res.ptr != last) throw FormatError("cannot parse number '" + std::string(token) + "'");
  return x;
}

std::string format_tensor(const Tensor2& t) {
  std::string out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (!out.empty()) out += ' ';
      out += format_double(t(i, j));
    }
  return out;
}

Tensor2 parse_tensor(std::string_view text) {
  Tensor2 t;
  std::istringstream in{std::string(text)};
  std::string token;
  int n = 0;
  while (in >> token) {
    if (n >= 9) throw FormatError("tensor has more than nine components");
    t(n / 3, n % 3) = parse_double(token);
    ++n;
  }
  if (n != 9) throw FormatError("tensor needs nine components, got " + std::to_string(n));
  return t;
}

}  // namespace feann
