#include "qstiefel/quat_matrix.hpp"

#include <sstream>
#include <string>

#include "qstiefel/errors.hpp"

namespace qstiefel {

namespace {

std::string dims(const QuatMatrix& a) {
  std::ostringstream os;
  os << a.rows() << 'x' << a.cols();
  return os.str();
}

void require_same_shape(const QuatMatrix& a, const QuatMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + dims(a) + " vs " + dims(b));
  }
}

void require_square(const QuatMatrix& a, const char* op) {
  if (a.rows() != a.cols()) {
    throw ShapeError(std::string(op) + ": expected a square matrix, got " + dims(a));
  }
}

}  // namespace

QuatMatrix::QuatMatrix(Index rows, Index cols) {
  for (auto& p : planes_) p = Eigen::MatrixXd::Zero(rows, cols);
}

QuatMatrix::QuatMatrix(Eigen::MatrixXd c0, Eigen::MatrixXd c1, Eigen::MatrixXd c2,
                       Eigen::MatrixXd c3)
    : planes_{std::move(c0), std::move(c1), std::move(c2), std::move(c3)} {
  for (const auto& p : planes_) {
    if (p.rows() != planes_[0].rows() || p.cols() != planes_[0].cols()) {
      throw ShapeError("QuatMatrix: component planes differ in shape");
    }
  }
}

QuatMatrix QuatMatrix::identity(Index n) {
  QuatMatrix m(n, n);
  m.planes_[0].setIdentity();
  return m;
}

QuatMatrix QuatMatrix::from_real(const Eigen::MatrixXd& a) {
  QuatMatrix m(a.rows(), a.cols());
  m.planes_[0] = a;
  return m;
}

QuatMatrix QuatMatrix::diagonal(std::span<const double> d) {
  const auto n = static_cast<Index>(d.size());
  QuatMatrix m(n, n);
  for (Index i = 0; i < n; ++i) m.planes_[0](i, i) = d[static_cast<std::size_t>(i)];
  return m;
}

QuatMatrix QuatMatrix::middle_cols(Index start, Index count) const {
  if (start < 0 || count < 0 || start + count > cols()) {
    throw ShapeError("middle_cols: column range out of bounds for " + dims(*this));
  }
  return {planes_[0].middleCols(start, count), planes_[1].middleCols(start, count),
          planes_[2].middleCols(start, count), planes_[3].middleCols(start, count)};
}

QuatMatrix QuatMatrix::middle_rows(Index start, Index count) const {
  if (start < 0 || count < 0 || start + count > rows()) {
    throw ShapeError("middle_rows: row range out of bounds for " + dims(*this));
  }
  return {planes_[0].middleRows(start, count), planes_[1].middleRows(start, count),
          planes_[2].middleRows(start, count), planes_[3].middleRows(start, count)};
}

void QuatMatrix::set_middle_cols(Index start, const QuatMatrix& block) {
  if (block.rows() != rows() || start < 0 || start + block.cols() > cols()) {
    throw ShapeError("set_middle_cols: block " + dims(block) + " does not fit " + dims(*this));
  }
  for (int l = 0; l < 4; ++l) {
    planes_[static_cast<std::size_t>(l)].middleCols(start, block.cols()) = block.comp(l);
  }
}

QuatMatrix& QuatMatrix::operator+=(const QuatMatrix& o) {
  require_same_shape(*this, o, "operator+");
  for (int l = 0; l < 4; ++l) planes_[static_cast<std::size_t>(l)] += o.comp(l);
  return *this;
}

QuatMatrix& QuatMatrix::operator-=(const QuatMatrix& o) {
  require_same_shape(*this, o, "operator-");
  for (int l = 0; l < 4; ++l) planes_[static_cast<std::size_t>(l)] -= o.comp(l);
  return *this;
}

QuatMatrix& QuatMatrix::operator*=(double s) {
  for (auto& p : planes_) p *= s;
  return *this;
}

bool operator==(const QuatMatrix& a, const QuatMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (int l = 0; l < 4; ++l) {
    if (a.comp(l) != b.comp(l)) return false;
  }
  return true;
}

QuatMatrix operator+(QuatMatrix a, const QuatMatrix& b) { return a += b; }
QuatMatrix operator-(QuatMatrix a, const QuatMatrix& b) { return a -= b; }
QuatMatrix operator-(const QuatMatrix& a) { return -1.0 * a; }
QuatMatrix operator*(double s, QuatMatrix a) { return a *= s; }
QuatMatrix operator*(QuatMatrix a, double s) { return a *= s; }

QuatMatrix matmul(const QuatMatrix& a, const QuatMatrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: inner dimensions differ, " + dims(a) + " * " + dims(b));
  }
  const auto& a0 = a.comp(0);
  const auto& a1 = a.comp(1);
  const auto& a2 = a.comp(2);
  const auto& a3 = a.comp(3);
  const auto& b0 = b.comp(0);
  const auto& b1 = b.comp(1);
  const auto& b2 = b.comp(2);
  const auto& b3 = b.comp(3);
  Eigen::MatrixXd c0 = a0 * b0;
  c0.noalias() -= a1 * b1;
  c0.noalias() -= a2 * b2;
  c0.noalias() -= a3 * b3;
  Eigen::MatrixXd c1 = a0 * b1;
  c1.noalias() += a1 * b0;
  c1.noalias() += a2 * b3;
  c1.noalias() -= a3 * b2;
  Eigen::MatrixXd c2 = a0 * b2;
  c2.noalias() -= a1 * b3;
  c2.noalias() += a2 * b0;
  c2.noalias() += a3 * b1;
  Eigen::MatrixXd c3 = a0 * b3;
  c3.noalias() += a1 * b2;
  c3.noalias() -= a2 * b1;
  c3.noalias() += a3 * b0;
  return {std::move(c0), std::move(c1), std::move(c2), std::move(c3)};
}

QuatMatrix mul_right(const QuatMatrix& a, const Quaternion& q) {
  const auto& a0 = a.comp(0);
  const auto& a1 = a.comp(1);
  const auto& a2 = a.comp(2);
  const auto& a3 = a.comp(3);
  return {q.w * a0 - q.x * a1 - q.y * a2 - q.z * a3, q.x * a0 + q.w * a1 + q.z * a2 - q.y * a3,
          q.y * a0 - q.z * a1 + q.w * a2 + q.x * a3, q.z * a0 + q.y * a1 - q.x * a2 + q.w * a3};
}

QuatMatrix mul_left(const Quaternion& q, const QuatMatrix& a) {
  const auto& a0 = a.comp(0);
  const auto& a1 = a.comp(1);
  const auto& a2 = a.comp(2);
  const auto& a3 = a.comp(3);
  return {q.w * a0 - q.x * a1 - q.y * a2 - q.z * a3, q.w * a1 + q.x * a0 + q.y * a3 - q.z * a2,
          q.w * a2 - q.x * a3 + q.y * a0 + q.z * a1, q.w * a3 + q.x * a2 - q.y * a1 + q.z * a0};
}

QuatMatrix scale_cols(const QuatMatrix& a, std::span<const double> d) {
  if (static_cast<Index>(d.size()) != a.cols()) {
    throw ShapeError("scale_cols: " + std::to_string(d.size()) + " factors for " + dims(a));
  }
  const Eigen::Map<const Eigen::VectorXd> dv(d.data(), static_cast<Index>(d.size()));
  QuatMatrix out = a;
  for (int l = 0; l < 4; ++l) out.comp(l) = a.comp(l) * dv.asDiagonal();
  return out;
}

QuatMatrix hermitian_conjugate(const QuatMatrix& a) {
  return {a.comp(0).transpose(), -a.comp(1).transpose(), -a.comp(2).transpose(),
          -a.comp(3).transpose()};
}

QuatMatrix her_part(const QuatMatrix& a) {
  require_square(a, "her_part");
  return 0.5 * (a + hermitian_conjugate(a));
}

QuatMatrix skew_part(const QuatMatrix& a) {
  require_square(a, "skew_part");
  return 0.5 * (a - hermitian_conjugate(a));
}

double re_trace_inner(const QuatMatrix& x, const QuatMatrix& y) {
  require_same_shape(x, y, "re_trace_inner");
  double s = 0.0;
  for (int l = 0; l < 4; ++l) s += x.comp(l).cwiseProduct(y.comp(l)).sum();
  return s;
}

double frobenius_norm(const QuatMatrix& a) {
  double s = 0.0;
  for (int l = 0; l < 4; ++l) s += a.comp(l).squaredNorm();
  return std::sqrt(s);
}

Quaternion trace(const QuatMatrix& a) {
  require_square(a, "trace");
  return {a.comp(0).trace(), a.comp(1).trace(), a.comp(2).trace(), a.comp(3).trace()};
}

double hermitian_residual(const QuatMatrix& a) { return frobenius_norm(skew_part(a)); }

}  // namespace qstiefel
