#pragma once

// Random generators and independent oracles shared by the unit tests.

#include <Eigen/Dense>

#include <array>
#include <random>
#include <utility>

#include "qstiefel/linalg.hpp"
#include "qstiefel/quat_matrix.hpp"
#include "qstiefel/quaternion.hpp"

namespace qstiefel::testing {

using Rng = std::mt19937_64;

inline Quaternion random_quaternion(Rng& rng) {
  std::normal_distribution<double> nd;
  return {nd(rng), nd(rng), nd(rng), nd(rng)};
}

inline QuatMatrix random_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> nd;
  QuatMatrix a(rows, cols);
  for (int l = 0; l < 4; ++l)
    for (Index c = 0; c < cols; ++c)
      for (Index r = 0; r < rows; ++r) a.comp(l)(r, c) = nd(rng);
  return a;
}

inline QuatMatrix random_hermitian(Index n, Rng& rng) { return her_part(random_matrix(n, n, rng)); }
inline QuatMatrix random_skew(Index n, Rng& rng) { return skew_part(random_matrix(n, n, rng)); }

/// V^H V + I, the positive definite construction used by the eigen application.
inline QuatMatrix random_hpd(Index n, Rng& rng) {
  const QuatMatrix v = random_matrix(n, n, rng);
  return her_part(hermitian_conjugate(v) * v) + QuatMatrix::identity(n);
}

/// Real 4x4 matrix of left multiplication by p, assembled from the unit table
/// ij = k = -ji, jk = i = -kj, ki = j = -ik, i^2 = j^2 = k^2 = -1.
inline Eigen::Matrix4d left_mult_matrix(const Quaternion& p) {
  // table[a][b] = (sign, index) of e_a * e_b with e = (1, i, j, k)
  static constexpr std::array<std::array<std::pair<int, int>, 4>, 4> table{{
      {{{1, 0}, {1, 1}, {1, 2}, {1, 3}}},
      {{{1, 1}, {-1, 0}, {1, 3}, {-1, 2}}},
      {{{1, 2}, {-1, 3}, {-1, 0}, {1, 1}}},
      {{{1, 3}, {1, 2}, {-1, 1}, {-1, 0}}},
  }};
  const std::array<double, 4> pc{p.w, p.x, p.y, p.z};
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const auto [sign, idx] = table[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
      m(idx, b) += sign * pc[static_cast<std::size_t>(a)];
    }
  return m;
}

inline Eigen::Vector4d as_vec(const Quaternion& q) { return {q.w, q.x, q.y, q.z}; }

inline double max_abs_diff(const QuatMatrix& a, const QuatMatrix& b) {
  double m = 0.0;
  for (int l = 0; l < 4; ++l) m = std::max(m, (a.comp(l) - b.comp(l)).cwiseAbs().maxCoeff());
  return m;
}

/// Eigenvalues of a Hermitian quaternion matrix via the complex adjoint and a
/// dense complex Hermitian solver; the 2n values come back sorted ascending.
inline Eigen::VectorXd adjoint_eigenvalues(const QuatMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(complex_adjoint(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace qstiefel::testing
