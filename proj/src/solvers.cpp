#include "qstiefel/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "qstiefel/errors.hpp"

namespace qstiefel {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void require_start(const ManifoldContext& ctx, const QuatMatrix& x0, const char* op) {
  if (x0.rows() != ctx.n() || x0.cols() != ctx.p()) {
    throw ShapeError(std::string(op) + ": initial point has the wrong shape");
  }
  const double res = feasibility_residual(ctx, x0);
  if (!(res <= ctx.options().feas_tol)) {
    std::ostringstream os;
    os << op << ": initial point is infeasible (residual " << res << ")";
    throw ContractError(os.str());
  }
}

TangentVector scaled(const TangentVector& v, double s) { return {v.base, s * v.value}; }

// State shared by both solvers: current iterate, cost, gradient and trace.
struct Iterate {
  QuatMatrix x;
  double cost = 0.0;
  TangentVector grad;
  double grad_norm = 0.0;

  static Iterate at(const ManifoldContext& ctx, const Objective& obj, QuatMatrix x, double cost) {
    Iterate it;
    it.grad = egrad_to_rgrad(ctx, x, obj.egrad(x));
    it.grad_norm = norm(ctx, x, it.grad);
    it.x = std::move(x);
    it.cost = cost;
    return it;
  }
};

}  // namespace

void SolverConfig::validate() const {
  if (max_iters < 0) throw ContractError("SolverConfig: max_iters must be non-negative");
  if (!(grad_tol > 0.0)) throw ContractError("SolverConfig: grad_tol must be positive");
  if (!(armijo.initial_step > 0.0)) throw ContractError("SolverConfig: initial_step must be positive");
  if (!(armijo.contraction > 0.0 && armijo.contraction < 1.0)) {
    throw ContractError("SolverConfig: contraction must lie in (0, 1)");
  }
  if (!(armijo.sufficient_decrease > 0.0 && armijo.sufficient_decrease <= 0.5)) {
    throw ContractError("SolverConfig: sufficient_decrease must lie in (0, 0.5]");
  }
  if (armijo.max_backtracks <= 0) throw ContractError("SolverConfig: max_backtracks must be positive");
}

LineSearchResult armijo_linesearch(const ManifoldContext& ctx, const Objective& obj,
                                   const QuatMatrix& x, double cost_x,
                                   const TangentVector& direction, double slope,
                                   double initial_step, const ArmijoOptions& opts) {
  if (!(slope < 0.0)) {
    std::ostringstream os;
    os << "armijo_linesearch: direction is not a descent direction (slope " << slope << ")";
    throw ContractError(os.str());
  }
  LineSearchResult res;
  double t = initial_step;
  for (int k = 0; k <= opts.max_backtracks; ++k) {
    QuatMatrix candidate = retract(ctx, x, scaled(direction, t));
    const double c = obj.cost(candidate);
    if (c <= cost_x + opts.sufficient_decrease * t * slope) {
      res.success = true;
      res.step = t;
      res.x_next = std::move(candidate);
      res.cost_next = c;
      res.backtracks = k;
      return res;
    }
    t *= opts.contraction;
  }
  res.backtracks = opts.max_backtracks;
  return res;
}

double pr_plus_beta(double numerator, double prev_grad_norm_sq) {
  return std::max(0.0, numerator / prev_grad_norm_sq);
}

TangentVector cg_next_direction(const ManifoldContext& ctx, const QuatMatrix& x_next,
                                const TangentVector& grad_next, const TangentVector& moved_grad,
                                const TangentVector& moved_dir, double prev_grad_norm_sq,
                                const CgOptions& opts) {
  const TangentVector diff{grad_next.base, grad_next.value - moved_grad.value};
  const double beta = pr_plus_beta(inner(ctx, x_next, grad_next, diff), prev_grad_norm_sq);
  TangentVector next{grad_next.base, beta * moved_dir.value - grad_next.value};
  if (opts.restart_on_nondescent && !(inner(ctx, x_next, grad_next, next) < 0.0)) {
    next = scaled(grad_next, -1.0);
  }
  return next;
}

SolveReport solve_sd(const ManifoldContext& ctx, const Objective& obj, const QuatMatrix& x0,
                     const SolverConfig& config) {
  config.validate();
  require_start(ctx, x0, "solve_sd");

  Iterate cur = Iterate::at(ctx, obj, x0, obj.cost(x0));
  const auto start = Clock::now();
  SolveReport report;
  report.trace.push_back({0, 0.0, cur.cost, cur.grad_norm, 0.0});

  double prev_step = 0.0;
  for (int k = 0;; ++k) {
    if (cur.grad_norm <= config.grad_tol) {
      report.converged = true;
      report.message = "gradient norm below tolerance";
      break;
    }
    if (k >= config.max_iters) {
      report.message = "maximum number of iterations reached";
      break;
    }
    const double init = k == 0 ? config.armijo.initial_step : 2.0 * prev_step;
    const TangentVector dir = scaled(cur.grad, -1.0);
    LineSearchResult ls = armijo_linesearch(ctx, obj, cur.x, cur.cost, dir,
                                            -cur.grad_norm * cur.grad_norm, init, config.armijo);
    if (!ls.success) {
      report.message = "line search failed to find sufficient decrease";
      break;
    }
    prev_step = ls.step;
    cur = Iterate::at(ctx, obj, std::move(ls.x_next), ls.cost_next);
    report.trace.push_back({k + 1, seconds_since(start), cur.cost, cur.grad_norm, ls.step});
  }
  report.x = std::move(cur.x);
  return report;
}

SolveReport solve_cg(const ManifoldContext& ctx, const Objective& obj, const QuatMatrix& x0,
                     const SolverConfig& config) {
  config.validate();
  require_start(ctx, x0, "solve_cg");

  Iterate cur = Iterate::at(ctx, obj, x0, obj.cost(x0));
  const auto start = Clock::now();
  SolveReport report;
  report.trace.push_back({0, 0.0, cur.cost, cur.grad_norm, 0.0});

  TangentVector dir = scaled(cur.grad, -1.0);
  double prev_step = 0.0;
  for (int k = 0;; ++k) {
    if (cur.grad_norm <= config.grad_tol) {
      report.converged = true;
      report.message = "gradient norm below tolerance";
      break;
    }
    if (k >= config.max_iters) {
      report.message = "maximum number of iterations reached";
      break;
    }
    double slope = inner(ctx, cur.x, cur.grad, dir);
    bool steepest = k == 0;
    if (!(slope < 0.0)) {
      dir = scaled(cur.grad, -1.0);
      slope = -cur.grad_norm * cur.grad_norm;
      steepest = true;
    }
    const double init = k == 0 ? config.armijo.initial_step : 2.0 * prev_step;
    LineSearchResult ls = armijo_linesearch(ctx, obj, cur.x, cur.cost, dir, slope, init, config.armijo);
    if (!ls.success && !steepest) {
      // Fall back to steepest descent once before giving up.
      dir = scaled(cur.grad, -1.0);
      ls = armijo_linesearch(ctx, obj, cur.x, cur.cost, dir, -cur.grad_norm * cur.grad_norm,
                             config.armijo.initial_step, config.armijo);
    }
    if (!ls.success) {
      report.message = "line search failed to find sufficient decrease";
      break;
    }
    prev_step = ls.step;

    Iterate next = Iterate::at(ctx, obj, std::move(ls.x_next), ls.cost_next);
    dir = cg_next_direction(ctx, next.x, next.grad, project_tangent(ctx, next.x, cur.grad.value),
                            project_tangent(ctx, next.x, dir.value),
                            cur.grad_norm * cur.grad_norm, config.cg);
    cur = std::move(next);
    report.trace.push_back({k + 1, seconds_since(start), cur.cost, cur.grad_norm, ls.step});
  }
  report.x = std::move(cur.x);
  return report;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
  os << "iter,elapsed_s,cost,grad_norm,step_size\n";
  char buf[160];
  for (const auto& r : trace) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", r.iter, r.elapsed_s, r.cost,
                  r.grad_norm, r.step_size);
    os << buf;
  }
}

std::vector<TraceRow> read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "iter,elapsed_s,cost,grad_norm,step_size") {
    throw ParseError("trace CSV: unexpected header");
  }
  std::vector<TraceRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    TraceRow r;
    if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf,%lf", &r.iter, &r.elapsed_s, &r.cost,
                    &r.grad_norm, &r.step_size) != 5) {
      throw ParseError("trace CSV: malformed row '" + line + "'");
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace qstiefel
