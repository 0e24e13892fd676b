#include "qstiefel/manifold.hpp"

#include <algorithm>
#include <cstring>
#include <sstream>

#include "qstiefel/errors.hpp"

namespace qstiefel {

namespace {

std::shared_ptr<const MetricProvider> constant_g_metric(const QuatMatrix& g, const SqrtPd& f) {
  return std::make_shared<ConstantMetric>(g, f, true);
}

void require_point_shape(const ManifoldContext& ctx, const QuatMatrix& x, const char* op) {
  if (x.rows() != ctx.n() || x.cols() != ctx.p()) {
    std::ostringstream os;
    os << op << ": expected a " << ctx.n() << "x" << ctx.p() << " matrix, got " << x.rows() << "x"
       << x.cols();
    throw ShapeError(os.str());
  }
}

void require_feasible(const ManifoldContext& ctx, const QuatMatrix& x, const char* op) {
  require_point_shape(ctx, x, op);
  const double res = feasibility_residual(ctx, x);
  if (!(res <= ctx.options().feas_tol)) {
    std::ostringstream os;
    os << op << ": base point is not on the manifold (||X^H G X - I||_F = " << res << ")";
    throw ContractError(os.str());
  }
}

void require_base(const TangentVector& v, const QuatMatrix& x, const char* op) {
  if (v.base != fingerprint(x)) {
    throw ContractError(std::string(op) + ": tangent vector belongs to a different base point");
  }
}

bool all_zero(const QuatMatrix& a) {
  for (int l = 0; l < 4; ++l)
    if (!a.comp(l).isZero(0.0)) return false;
  return true;
}

}  // namespace

ManifoldContext::ManifoldContext(QuatMatrix g, Index p, ManifoldOptions opts)
    : ManifoldContext(std::move(g), p, nullptr, opts) {}

ManifoldContext::ManifoldContext(QuatMatrix g, Index p,
                                 std::shared_ptr<const MetricProvider> metric,
                                 ManifoldOptions opts)
    : g_(std::move(g)), p_(p), metric_(std::move(metric)), opts_(opts) {
  if (g_.rows() != g_.cols()) throw ShapeError("ManifoldContext: G must be square");
  if (p_ < 1 || p_ > g_.rows()) {
    throw ShapeError("ManifoldContext: p must satisfy 1 <= p <= n");
  }
  SqrtPd f = sqrt_pd(g_);
  if (!metric_) metric_ = constant_g_metric(g_, f);
  sqrt_g_ = std::move(f.sqrt);
  inv_sqrt_g_ = std::move(f.inv_sqrt);
}

std::uint64_t fingerprint(const QuatMatrix& x) {
  // FNV-1a over the shape and the raw bytes of the component planes.
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* b = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= b[i];
      h *= 1099511628211ULL;
    }
  };
  const Index dims[2] = {x.rows(), x.cols()};
  mix(dims, sizeof dims);
  for (int l = 0; l < 4; ++l) {
    mix(x.comp(l).data(), static_cast<std::size_t>(x.comp(l).size()) * sizeof(double));
  }
  return h;
}

double feasibility_residual(const ManifoldContext& ctx, const QuatMatrix& x) {
  require_point_shape(ctx, x, "feasibility_residual");
  return frobenius_norm(hermitian_conjugate(x) * (ctx.G() * x) - QuatMatrix::identity(ctx.p()));
}

double tangent_residual(const ManifoldContext& ctx, const QuatMatrix& x, const QuatMatrix& xi) {
  require_point_shape(ctx, xi, "tangent_residual");
  return frobenius_norm(her_part(hermitian_conjugate(ctx.G() * x) * xi));
}

TangentVector make_tangent(const ManifoldContext& ctx, const QuatMatrix& x, QuatMatrix value) {
  require_feasible(ctx, x, "make_tangent");
  const QuatMatrix gram = hermitian_conjugate(ctx.G() * x) * value;
  const double res = frobenius_norm(her_part(gram));
  if (!(res <= ctx.options().tangent_tol * std::max(1.0, frobenius_norm(gram)))) {
    std::ostringstream os;
    os << "make_tangent: ||her(X^H G xi)||_F = " << res << " exceeds the tangent tolerance";
    throw ContractError(os.str());
  }
  return {fingerprint(x), std::move(value)};
}

TangentVector project_tangent(const ManifoldContext& ctx, const QuatMatrix& x, const QuatMatrix& y,
                              ProjectionPath path) {
  require_feasible(ctx, x, "project_tangent");
  require_point_shape(ctx, y, "project_tangent");
  const QuatMatrix gx = ctx.G() * x;
  const QuatMatrix xgy = hermitian_conjugate(gx) * y;

  if (path == ProjectionPath::Auto && ctx.metric().is_constant_G()) {
    return {fingerprint(x), y - x * her_part(xgy)};
  }

  const QuatMatrix w = ctx.metric().apply_inverse(x, gx);
  const QuatMatrix k = her_part(hermitian_conjugate(gx) * w);
  const QuatMatrix s = solve_sylvester(k, 2.0 * her_part(xgy));
  return {fingerprint(x), y - w * s};
}

double inner(const ManifoldContext& ctx, const QuatMatrix& x, const QuatMatrix& xi,
             const QuatMatrix& eta) {
  require_point_shape(ctx, xi, "inner");
  require_point_shape(ctx, eta, "inner");
  return re_trace_inner(xi, ctx.metric().apply(x, eta));
}

double inner(const ManifoldContext& ctx, const QuatMatrix& x, const TangentVector& xi,
             const TangentVector& eta) {
  require_base(xi, x, "inner");
  require_base(eta, x, "inner");
  return inner(ctx, x, xi.value, eta.value);
}

double norm(const ManifoldContext& ctx, const QuatMatrix& x, const TangentVector& xi) {
  return std::sqrt(std::max(0.0, inner(ctx, x, xi, xi)));
}

TangentVector egrad_to_rgrad(const ManifoldContext& ctx, const QuatMatrix& x,
                             const QuatMatrix& egrad) {
  require_point_shape(ctx, egrad, "egrad_to_rgrad");
  return project_tangent(ctx, x, ctx.metric().apply_inverse(x, egrad));
}

QuatMatrix retract(const ManifoldContext& ctx, const QuatMatrix& x, const TangentVector& eta) {
  require_base(eta, x, "retract");
  require_point_shape(ctx, eta.value, "retract");
  if (all_zero(eta.value)) return x;
  try {
    return ctx.inv_sqrt_g() * qf(ctx.sqrt_g() * (x + eta.value));
  } catch (const RankError& e) {
    throw ContractError(std::string("retract: X + eta lost full column rank, so eta is not "
                                    "tangent at X (") +
                        e.what() + ")");
  }
}

Transported transport(const ManifoldContext& ctx, const QuatMatrix& x, const TangentVector& eta,
                      const TangentVector& xi) {
  require_base(xi, x, "transport");
  QuatMatrix x_next = retract(ctx, x, eta);
  TangentVector moved = project_tangent(ctx, x_next, xi.value);
  return {std::move(x_next), std::move(moved)};
}

QuatMatrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> nd;
  QuatMatrix a(rows, cols);
  for (int l = 0; l < 4; ++l)
    for (Index c = 0; c < cols; ++c)
      for (Index r = 0; r < rows; ++r) a.comp(l)(r, c) = nd(rng);
  return a;
}

QuatMatrix random_point(const ManifoldContext& ctx, Rng& rng) {
  for (int attempt = 0;; ++attempt) {
    try {
      return ctx.inv_sqrt_g() * qf(gaussian_matrix(ctx.n(), ctx.p(), rng));
    } catch (const RankError&) {
      if (attempt >= 1) throw;
    }
  }
}

TangentVector random_tangent(const ManifoldContext& ctx, const QuatMatrix& x, Rng& rng) {
  TangentVector v = project_tangent(ctx, x, gaussian_matrix(ctx.n(), ctx.p(), rng));
  const double nv = norm(ctx, x, v);
  if (nv == 0.0) throw ContractError("random_tangent: projected direction vanished");
  v.value *= 1.0 / nv;
  return v;
}

QuatMatrix complete_basis(const ManifoldContext& ctx, const QuatMatrix& x) {
  require_feasible(ctx, x, "complete_basis");
  const Index n = ctx.n();
  const Index p = ctx.p();
  // Work in sqrt(G) coordinates, where X becomes an orthonormal frame Y.
  const QuatMatrix y = ctx.sqrt_g() * x;

  // Greedily pick standard basis vectors whose component orthogonal to the
  // current frame is largest; weight[i] tracks ||(I - B B^H) e_i||^2.
  std::vector<double> weight(static_cast<std::size_t>(n), 1.0);
  std::vector<QuatMatrix> frame;
  for (Index c = 0; c < p; ++c) frame.push_back(y.col(c));
  for (const auto& b : frame)
    for (Index i = 0; i < n; ++i) weight[static_cast<std::size_t>(i)] -= qnorm2(b(i, 0));

  std::vector<Index> picked;
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  while (static_cast<Index>(picked.size()) < n - p) {
    Index best = -1;
    for (Index i = 0; i < n; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      if (best < 0 || weight[static_cast<std::size_t>(i)] > weight[static_cast<std::size_t>(best)]) best = i;
    }
    used[static_cast<std::size_t>(best)] = true;
    picked.push_back(best);

    QuatMatrix v(n, 1);
    v.set(best, 0, Quaternion{1.0});
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : frame) v -= b * (hermitian_conjugate(b) * v);
    v *= 1.0 / frobenius_norm(v);
    for (Index i = 0; i < n; ++i) weight[static_cast<std::size_t>(i)] -= qnorm2(v(i, 0));
    frame.push_back(std::move(v));
  }

  QuatMatrix full(n, n);
  full.set_middle_cols(0, y);
  for (Index c = 0; c < n - p; ++c) {
    QuatMatrix e(n, 1);
    e.set(picked[static_cast<std::size_t>(c)], 0, Quaternion{1.0});
    full.set_middle_cols(p + c, e);
  }
  const QuatMatrix q = qf(full);
  return ctx.inv_sqrt_g() * q.middle_cols(p, n - p);
}

}  // namespace qstiefel
