#pragma once

#include <Eigen/Dense>

#include <memory>

#include "qstiefel/manifold.hpp"
#include "test_support.hpp"

namespace qstiefel::testing {

/// M_X = I + X X^H, a point-dependent metric. Its inverse uses the Woodbury
/// identity I - X (I + X^H X)^{-1} X^H.
class RankOneUpdateMetric final : public MetricProvider {
 public:
  QuatMatrix apply(const QuatMatrix& x, const QuatMatrix& y) const override {
    return y + x * (hermitian_conjugate(x) * y);
  }
  QuatMatrix apply_inverse(const QuatMatrix& x, const QuatMatrix& y) const override {
    const QuatMatrix small = her_part(QuatMatrix::identity(x.cols()) + hermitian_conjugate(x) * x);
    const QuatMatrix small_inv = eigh(small).spectral_map([](double l) { return 1.0 / l; });
    return y - x * (small_inv * (hermitian_conjugate(x) * y));
  }
};

enum class MetricKind { ConstantG, ConstantGGeneral, OtherConstant, PointDependent };

inline const char* metric_name(MetricKind k) {
  switch (k) {
    case MetricKind::ConstantG: return "constant G (closed form)";
    case MetricKind::ConstantGGeneral: return "constant G (Sylvester path)";
    case MetricKind::OtherConstant: return "constant M != G";
    case MetricKind::PointDependent: return "M_X = I + X X^H";
  }
  return "?";
}

inline ManifoldContext make_context(MetricKind kind, Index n, Index p, Rng& rng) {
  QuatMatrix g = random_hpd(n, rng);
  switch (kind) {
    case MetricKind::ConstantG:
    case MetricKind::ConstantGGeneral:
      return ManifoldContext(std::move(g), p);
    case MetricKind::OtherConstant:
      return ManifoldContext(std::move(g), p, std::make_shared<ConstantMetric>(random_hpd(n, rng)));
    case MetricKind::PointDependent:
      return ManifoldContext(std::move(g), p, std::make_shared<RankOneUpdateMetric>());
  }
  return ManifoldContext(std::move(g), p);
}

inline ProjectionPath path_for(MetricKind kind) {
  return kind == MetricKind::ConstantGGeneral ? ProjectionPath::General : ProjectionPath::Auto;
}

/// Flatten the four planes column-major into one real vector of length 4mn.
inline Eigen::VectorXd flatten(const QuatMatrix& a) {
  Eigen::VectorXd v(4 * a.rows() * a.cols());
  Index k = 0;
  for (int l = 0; l < 4; ++l)
    for (Index c = 0; c < a.cols(); ++c)
      for (Index r = 0; r < a.rows(); ++r) v(k++) = a.comp(l)(r, c);
  return v;
}

/// Real basis of Her(p): p real diagonals plus 4 per strict upper entry.
inline std::vector<QuatMatrix> hermitian_basis(Index p) {
  std::vector<QuatMatrix> out;
  for (Index i = 0; i < p; ++i) {
    QuatMatrix e(p, p);
    e.set(i, i, Quaternion{1.0});
    out.push_back(e);
  }
  for (Index i = 0; i < p; ++i)
    for (Index j = i + 1; j < p; ++j)
      for (int l = 0; l < 4; ++l) {
        QuatMatrix e(p, p);
        e.comp(l)(i, j) = 1.0;
        e.comp(l)(j, i) = l == 0 ? 1.0 : -1.0;
        out.push_back(e);
      }
  return out;
}

}  // namespace qstiefel::testing
