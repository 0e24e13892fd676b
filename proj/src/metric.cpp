#include "qstiefel/metric.hpp"

#include "qstiefel/errors.hpp"

namespace qstiefel {

ConstantMetric::ConstantMetric(QuatMatrix m, bool equals_g)
    : ConstantMetric(m, sqrt_pd(m), equals_g) {}

ConstantMetric::ConstantMetric(QuatMatrix m, SqrtPd factor, bool equals_g)
    : m_(std::move(m)), inv_sqrt_(std::move(factor.inv_sqrt)), equals_g_(equals_g) {
  if (inv_sqrt_.rows() != m_.rows()) throw ShapeError("ConstantMetric: factor size mismatch");
}

QuatMatrix ConstantMetric::apply(const QuatMatrix& /*x*/, const QuatMatrix& y) const {
  return m_ * y;
}

QuatMatrix ConstantMetric::apply_inverse(const QuatMatrix& /*x*/, const QuatMatrix& y) const {
  // One step of iterative refinement recovers the digits lost to cond(M).
  const QuatMatrix w = inv_sqrt_ * (inv_sqrt_ * y);
  return w + inv_sqrt_ * (inv_sqrt_ * (y - m_ * w));
}

}  // namespace qstiefel
