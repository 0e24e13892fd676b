#pragma once

#include <cstdint>
#include <memory>
#include <random>

#include "qstiefel/linalg.hpp"
#include "qstiefel/metric.hpp"
#include "qstiefel/quat_matrix.hpp"

namespace qstiefel {

using Rng = std::mt19937_64;

struct ManifoldOptions {
  double feas_tol = 1e-8;
  double tangent_tol = 1e-8;
};

/// St_G(p, H^n) = { X in H^{n x p} : X^H G X = I_p } as a Riemannian
/// submanifold of H^{n x p}. Immutable after construction.
class ManifoldContext {
 public:
  /// Metric defaults to M_X == G.
  ManifoldContext(QuatMatrix g, Index p, ManifoldOptions opts = {});
  ManifoldContext(QuatMatrix g, Index p, std::shared_ptr<const MetricProvider> metric,
                  ManifoldOptions opts = {});

  Index n() const { return g_.rows(); }
  Index p() const { return p_; }
  const QuatMatrix& G() const { return g_; }
  const QuatMatrix& sqrt_g() const { return sqrt_g_; }
  const QuatMatrix& inv_sqrt_g() const { return inv_sqrt_g_; }
  const MetricProvider& metric() const { return *metric_; }
  std::shared_ptr<const MetricProvider> metric_ptr() const { return metric_; }
  const ManifoldOptions& options() const { return opts_; }

  /// Real dimension p(4n - 2p + 1).
  Index dimension() const { return p_ * (4 * n() - 2 * p_ + 1); }

 private:
  QuatMatrix g_;
  QuatMatrix sqrt_g_;
  QuatMatrix inv_sqrt_g_;
  Index p_;
  std::shared_ptr<const MetricProvider> metric_;
  ManifoldOptions opts_;
};

/// Content hash of a base point; tangent vectors carry it so that a vector is
/// never used at a point other than the one it was built for.
std::uint64_t fingerprint(const QuatMatrix& x);

struct TangentVector {
  std::uint64_t base = 0;
  QuatMatrix value;
};

enum class ProjectionPath {
  Auto,     ///< closed form when the metric is the constant G
  General,  ///< always solve the Sylvester equation
};

/// ||X^H G X - I_p||_F
double feasibility_residual(const ManifoldContext& ctx, const QuatMatrix& x);

/// ||her(X^H G xi)||_F, zero exactly on the tangent space at X.
double tangent_residual(const ManifoldContext& ctx, const QuatMatrix& x, const QuatMatrix& xi);

/// Stamps `value` as a tangent vector at X after checking the tangent condition.
TangentVector make_tangent(const ManifoldContext& ctx, const QuatMatrix& x, QuatMatrix value);

/// Orthogonal projection onto T_X under the metric:
///   P(Y) = Y - M_X^{-1} G X S,  K S + S K = 2 her(X^H G Y),  K = X^H G M_X^{-1} G X.
/// With M_X == G this reduces to Y - X her(X^H G Y).
TangentVector project_tangent(const ManifoldContext& ctx, const QuatMatrix& x, const QuatMatrix& y,
                              ProjectionPath path = ProjectionPath::Auto);

double inner(const ManifoldContext& ctx, const QuatMatrix& x, const QuatMatrix& xi,
             const QuatMatrix& eta);
double inner(const ManifoldContext& ctx, const QuatMatrix& x, const TangentVector& xi,
             const TangentVector& eta);
double norm(const ManifoldContext& ctx, const QuatMatrix& x, const TangentVector& xi);

/// grad f(X) = P_X(M_X^{-1} egrad).
TangentVector egrad_to_rgrad(const ManifoldContext& ctx, const QuatMatrix& x,
                             const QuatMatrix& egrad);

/// R_X(eta) = sqrt(G)^{-1} qf(sqrt(G) (X + eta)). R_X(0) returns X unchanged.
QuatMatrix retract(const ManifoldContext& ctx, const QuatMatrix& x, const TangentVector& eta);

struct Transported {
  QuatMatrix x_next;
  TangentVector vector;
};

/// Projection transport of xi along eta: P_{X+}(xi) with X+ = R_X(eta).
Transported transport(const ManifoldContext& ctx, const QuatMatrix& x, const TangentVector& eta,
                      const TangentVector& xi);

/// Entrywise standard normal in all four components. Fill order: component
/// plane, then column, then row.
QuatMatrix gaussian_matrix(Index rows, Index cols, Rng& rng);

/// sqrt(G)^{-1} qf(Z) for entrywise standard normal Z.
QuatMatrix random_point(const ManifoldContext& ctx, Rng& rng);
/// Projection of a standard normal ambient matrix, scaled to unit metric norm.
TangentVector random_tangent(const ManifoldContext& ctx, const QuatMatrix& x, Rng& rng);

/// X_perp with X_perp^H G X_perp = I_{n-p} and X^H G X_perp = 0.
QuatMatrix complete_basis(const ManifoldContext& ctx, const QuatMatrix& x);

}  // namespace qstiefel
