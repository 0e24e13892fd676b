#pragma once

#include <Eigen/Dense>

#include <array>
#include <span>

#include "qstiefel/quaternion.hpp"

namespace qstiefel {

using Index = Eigen::Index;

/// Dense quaternionic matrix A = A0 + A1 i + A2 j + A3 k, stored as four real
/// component planes of identical shape. Empty (0-row or 0-col) shapes are
/// valid and propagate through every operation.
class QuatMatrix {
 public:
  QuatMatrix() = default;
  QuatMatrix(Index rows, Index cols);
  QuatMatrix(Eigen::MatrixXd c0, Eigen::MatrixXd c1, Eigen::MatrixXd c2, Eigen::MatrixXd c3);

  static QuatMatrix zeros(Index rows, Index cols) { return {rows, cols}; }
  static QuatMatrix identity(Index n);
  static QuatMatrix from_real(const Eigen::MatrixXd& a);
  /// Diagonal matrix with real diagonal `d`.
  static QuatMatrix diagonal(std::span<const double> d);

  Index rows() const { return planes_[0].rows(); }
  Index cols() const { return planes_[0].cols(); }
  bool empty() const { return rows() == 0 || cols() == 0; }

  const Eigen::MatrixXd& comp(int l) const { return planes_[static_cast<std::size_t>(l)]; }
  Eigen::MatrixXd& comp(int l) { return planes_[static_cast<std::size_t>(l)]; }

  Quaternion operator()(Index r, Index c) const {
    return {planes_[0](r, c), planes_[1](r, c), planes_[2](r, c), planes_[3](r, c)};
  }
  void set(Index r, Index c, const Quaternion& q) {
    planes_[0](r, c) = q.w;
    planes_[1](r, c) = q.x;
    planes_[2](r, c) = q.y;
    planes_[3](r, c) = q.z;
  }

  QuatMatrix col(Index c) const { return middle_cols(c, 1); }
  QuatMatrix middle_cols(Index start, Index count) const;
  QuatMatrix middle_rows(Index start, Index count) const;
  void set_middle_cols(Index start, const QuatMatrix& block);

  QuatMatrix& operator+=(const QuatMatrix& o);
  QuatMatrix& operator-=(const QuatMatrix& o);
  QuatMatrix& operator*=(double s);

  friend bool operator==(const QuatMatrix& a, const QuatMatrix& b);

 private:
  std::array<Eigen::MatrixXd, 4> planes_;
};

QuatMatrix operator+(QuatMatrix a, const QuatMatrix& b);
QuatMatrix operator-(QuatMatrix a, const QuatMatrix& b);
QuatMatrix operator-(const QuatMatrix& a);
QuatMatrix operator*(double s, QuatMatrix a);
QuatMatrix operator*(QuatMatrix a, double s);

/// Quaternionic product; entries (AB)_rs = sum_t A_rt B_ts in that order.
QuatMatrix matmul(const QuatMatrix& a, const QuatMatrix& b);
inline QuatMatrix operator*(const QuatMatrix& a, const QuatMatrix& b) { return matmul(a, b); }

/// A * q (every entry right-multiplied by the scalar q).
QuatMatrix mul_right(const QuatMatrix& a, const Quaternion& q);
/// q * A.
QuatMatrix mul_left(const Quaternion& q, const QuatMatrix& a);
/// A * diag(d) for real d; column c scaled by d[c].
QuatMatrix scale_cols(const QuatMatrix& a, std::span<const double> d);

/// A^H = A0^T - A1^T i - A2^T j - A3^T k.
QuatMatrix hermitian_conjugate(const QuatMatrix& a);
inline QuatMatrix adjoint(const QuatMatrix& a) { return hermitian_conjugate(a); }

/// (A + A^H) / 2. Throws ShapeError unless square.
QuatMatrix her_part(const QuatMatrix& a);
/// (A - A^H) / 2. Throws ShapeError unless square.
QuatMatrix skew_part(const QuatMatrix& a);

/// re(tr(X^H Y)) = sum_l tr(X_l^T Y_l).
double re_trace_inner(const QuatMatrix& x, const QuatMatrix& y);
double frobenius_norm(const QuatMatrix& a);
/// Quaternionic trace (sum of diagonal entries). Throws ShapeError unless square.
Quaternion trace(const QuatMatrix& a);

/// ||A - A^H||_F / 2, i.e. the Frobenius norm of skew(A).
double hermitian_residual(const QuatMatrix& a);

/// |a - b| <= atol + rtol * scale, the comparison used throughout.
struct Tolerance {
  double atol = 1e-12;
  double rtol = 1e-12;
  bool close(double a, double b, double scale) const {
    return std::abs(a - b) <= atol + rtol * scale;
  }
};

}  // namespace qstiefel
