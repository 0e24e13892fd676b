#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "qstiefel/manifold.hpp"
#include "qstiefel/quat_matrix.hpp"

namespace qstiefel {

/// Smooth objective on H^{n x p}: value and Euclidean gradient, where the
/// gradient satisfies re(tr(egrad^H Y)) = d/dt f(X + tY) at t = 0.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual double cost(const QuatMatrix& x) const = 0;
  virtual QuatMatrix egrad(const QuatMatrix& x) const = 0;
};

/// Objective assembled from two callables.
class FunctionObjective final : public Objective {
 public:
  using CostFn = std::function<double(const QuatMatrix&)>;
  using GradFn = std::function<QuatMatrix(const QuatMatrix&)>;

  FunctionObjective(CostFn cost, GradFn egrad) : cost_(std::move(cost)), egrad_(std::move(egrad)) {}

  double cost(const QuatMatrix& x) const override { return cost_(x); }
  QuatMatrix egrad(const QuatMatrix& x) const override { return egrad_(x); }

 private:
  CostFn cost_;
  GradFn egrad_;
};

struct ArmijoOptions {
  double initial_step = 1.0;
  double contraction = 0.5;
  double sufficient_decrease = 1e-4;
  int max_backtracks = 50;
};

enum class BetaRule { PolakRibierePlus };

struct CgOptions {
  BetaRule beta_rule = BetaRule::PolakRibierePlus;
  bool restart_on_nondescent = true;
};

struct SolverConfig {
  int max_iters = 250;
  double grad_tol = 1e-6;
  ArmijoOptions armijo;
  CgOptions cg;

  /// Throws ContractError on non-positive limits, contraction outside (0, 1)
  /// or sufficient_decrease outside (0, 0.5].
  void validate() const;
};

struct TraceRow {
  int iter = 0;
  double elapsed_s = 0.0;
  double cost = 0.0;
  double grad_norm = 0.0;
  double step_size = 0.0;
};

struct SolveReport {
  QuatMatrix x;
  bool converged = false;
  std::vector<TraceRow> trace;
  std::string message;

  int iterations() const { return trace.empty() ? 0 : trace.back().iter; }
};

struct LineSearchResult {
  bool success = false;
  double step = 0.0;
  QuatMatrix x_next;
  double cost_next = 0.0;
  int backtracks = 0;
};

/// Backtracking along R_X(t d): accepts the first t = initial * contraction^k,
/// k <= max_backtracks, with f(R_X(t d)) <= f(X) + sufficient_decrease * t * slope.
/// `slope` must be <d, grad f(X)>_X < 0 (ContractError otherwise); exhaustion is
/// reported through `success == false`.
LineSearchResult armijo_linesearch(const ManifoldContext& ctx, const Objective& obj,
                                   const QuatMatrix& x, double cost_x,
                                   const TangentVector& direction, double slope,
                                   double initial_step, const ArmijoOptions& opts = {});

/// PR+ coefficient max(0, <g+, g+ - T(g)> / <g, g>).
double pr_plus_beta(double numerator, double prev_grad_norm_sq);

/// d+ = -g+ + beta T(d), with T the projection transport to X+; falls back to
/// -g+ when d+ is not a descent direction and restarts are enabled.
/// `moved_grad` and `moved_dir` must already be projected onto T_{X+}.
TangentVector cg_next_direction(const ManifoldContext& ctx, const QuatMatrix& x_next,
                                const TangentVector& grad_next, const TangentVector& moved_grad,
                                const TangentVector& moved_dir, double prev_grad_norm_sq,
                                const CgOptions& opts = {});

/// Riemannian steepest descent with Armijo backtracking.
SolveReport solve_sd(const ManifoldContext& ctx, const Objective& obj, const QuatMatrix& x0,
                     const SolverConfig& config = {});

/// Riemannian conjugate gradient (PR+, projection transport, restart on
/// non-descent directions).
SolveReport solve_cg(const ManifoldContext& ctx, const Objective& obj, const QuatMatrix& x0,
                     const SolverConfig& config = {});

/// CSV with header `iter,elapsed_s,cost,grad_norm,step_size`, 17 significant digits.
void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace);
std::vector<TraceRow> read_trace_csv(std::istream& is);

}  // namespace qstiefel
