#pragma once

#include <memory>

#include "qstiefel/linalg.hpp"
#include "qstiefel/quat_matrix.hpp"

namespace qstiefel {

/// Riemannian metric <xi, eta>_X = re(tr(xi^H M_X eta)) on H^{n x p}.
///
/// Implementations supply the actions of M_X and its inverse at a base point;
/// M_X is never formed by the manifold code. M_X must be Hermitian positive
/// definite for every X.
class MetricProvider {
 public:
  virtual ~MetricProvider() = default;

  virtual QuatMatrix apply(const QuatMatrix& x, const QuatMatrix& y) const = 0;
  virtual QuatMatrix apply_inverse(const QuatMatrix& x, const QuatMatrix& y) const = 0;

  /// True when M_X == G for every X, which enables the closed-form projection.
  virtual bool is_constant_G() const { return false; }
};

/// M_X == M for a fixed Hermitian positive definite M. Caches M^{-1/2} so the
/// inverse action is two products.
class ConstantMetric final : public MetricProvider {
 public:
  /// `equals_g` marks M as the manifold's own G.
  explicit ConstantMetric(QuatMatrix m, bool equals_g = false);
  ConstantMetric(QuatMatrix m, SqrtPd factor, bool equals_g);

  QuatMatrix apply(const QuatMatrix& x, const QuatMatrix& y) const override;
  QuatMatrix apply_inverse(const QuatMatrix& x, const QuatMatrix& y) const override;
  bool is_constant_G() const override { return equals_g_; }

  const QuatMatrix& matrix() const { return m_; }

 private:
  QuatMatrix m_;
  QuatMatrix inv_sqrt_;
  bool equals_g_;
};

}  // namespace qstiefel
