#pragma once

#include <Eigen/Dense>

#include <vector>

#include "qstiefel/quat_matrix.hpp"

namespace qstiefel {

using ComplexMatrix = Eigen::MatrixXcd;

/// Complex adjoint chi(A). With A = Ac + Bc j, Ac = A0 + A1 i, Bc = A2 + A3 i:
///   chi(A) = [[Ac, Bc], [-conj(Bc), conj(Ac)]]   (2m x 2n)
/// chi is a homomorphism, chi(AB) = chi(A) chi(B), and chi(A^H) = chi(A)^H.
ComplexMatrix complex_adjoint(const QuatMatrix& a);

/// Hermitian eigendecomposition A = U diag(lambda) U^H, lambda ascending.
struct EigDecomposition {
  QuatMatrix vectors;
  std::vector<double> values;

  /// U diag(f(lambda)) U^H
  template <class F>
  QuatMatrix spectral_map(F&& f) const {
    std::vector<double> d(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) d[i] = f(values[i]);
    return matmul(scale_cols(vectors, d), hermitian_conjugate(vectors));
  }
};

struct JacobiOptions {
  int max_sweeps = 60;
  /// Converged once the off-diagonal Frobenius mass is <= off_tol * ||A||_F.
  double off_tol = 1e-13;
  /// Hermitian precondition: ||skew(A)||_F <= her_tol * max(1, ||A||_F).
  double her_tol = 1e-10;
};

/// Cyclic Jacobi with quaternionic Givens rotations (threshold strategy).
/// Throws ContractError for non-Hermitian input and ConvergenceError when
/// max_sweeps is exhausted.
EigDecomposition eigh(const QuatMatrix& a, const JacobiOptions& opts = {});

struct SqrtPd {
  QuatMatrix sqrt;
  QuatMatrix inv_sqrt;
};

/// Principal square root of a Hermitian positive definite matrix, with its
/// inverse, both via the eigendecomposition.
SqrtPd sqrt_pd(const QuatMatrix& g);

/// Q-factor of the QR decomposition with positive real diagonal R.
/// Modified Gram-Schmidt with one full re-orthogonalisation pass.
/// Throws RankError when a pivot norm falls to rank_tol * ||A||_F or below.
QuatMatrix qf(const QuatMatrix& a, double rank_tol = 1e-12);

struct QrResult {
  QuatMatrix q;
  QuatMatrix r;
};
/// Thin QR with the same normalisation as qf; R is p x p upper triangular.
QrResult qr(const QuatMatrix& a, double rank_tol = 1e-12);

/// Unique Hermitian S with K S + S K = L, for K Hermitian PD and L Hermitian.
QuatMatrix solve_sylvester(const QuatMatrix& k, const QuatMatrix& l);
/// Same, reusing a precomputed decomposition of K (any column order).
QuatMatrix solve_sylvester(const EigDecomposition& k_eig, const QuatMatrix& l);

struct PdReport {
  bool positive_definite = false;
  double min_eigenvalue = 0.0;
  double max_abs_eigenvalue = 0.0;
  double her_residual = 0.0;
};

/// Hermitian within her_tol and min eigenvalue > 1e-10 * max|eigenvalue|.
/// Eigenvalues are taken from her(G) so the report is meaningful either way.
PdReport is_positive_definite(const QuatMatrix& g, double her_tol = 1e-10);

/// Default positive-definiteness threshold for a spectrum.
double pd_threshold(double max_abs_eigenvalue);

}  // namespace qstiefel
