// qstiefel command-line driver: generate | solve | check | oracle.
//
// Exit codes: 0 success, 1 quality failure, 2 usage or parse error,
// 3 internal or oracle failure.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "qstiefel/eigapp.hpp"
#include "qstiefel/errors.hpp"
#include "qstiefel/qmat_io.hpp"
#include "qstiefel/solvers.hpp"

namespace fs = std::filesystem;
using namespace qstiefel;

namespace {

enum Exit { kOk = 0, kQuality = 1, kUsage = 2, kInternal = 3 };

struct UsageError : Error {
  using Error::Error;
};

struct Tolerances {
  double feas = ManifoldOptions{}.feas_tol;
  double grad = SolverConfig{}.grad_tol;
};

// QSTIEFEL_TOLS="feas=1e-8,grad=1e-6"; either key may be omitted.
Tolerances env_tolerances() {
  Tolerances t;
  const char* env = std::getenv("QSTIEFEL_TOLS");
  if (env == nullptr || *env == '\0') return t;
  std::stringstream ss(env);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("QSTIEFEL_TOLS: expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("QSTIEFEL_TOLS: bad number in '" + item + "'");
    }
    if (!(value > 0.0)) throw UsageError("QSTIEFEL_TOLS: tolerances must be positive");
    if (key == "feas") t.feas = value;
    else if (key == "grad") t.grad = value;
    else throw UsageError("QSTIEFEL_TOLS: unknown key '" + key + "'");
  }
  return t;
}

void print_residuals(const ResidualTriple& r, double norm_a) {
  std::printf("feasibility  %.6e\n", r.feasibility);
  std::printf("offdiag      %.6e  (%.6e relative to ||A||_F)\n", r.offdiag, r.offdiag / norm_a);
  std::printf("eigres       %.6e  (%.6e relative to ||A||_F)\n", r.eigres, r.eigres / norm_a);
}

void write_plot_script(const fs::path& script, const fs::path& trace, const std::string& label) {
  std::ofstream os(script);
  if (!os) throw Error("cannot write " + script.string());
  const std::string stem = script.parent_path().empty() ? script.stem().string()
                                                        : (script.parent_path() / script.stem()).string();
  os << "# gnuplot script; paths are relative to the directory solve ran in\n"
     << "set datafile separator ','\n"
     << "set key autotitle columnhead\n"
     << "set logscale y\n"
     << "set format y '%.0e'\n"
     << "set ylabel 'gradient norm'\n"
     << "set terminal pngcairo size 800,600\n"
     << "set output '" << stem << "_iter.png'\n"
     << "set xlabel 'iteration'\n"
     << "plot '" << trace.string() << "' using 1:4 with lines title '" << label << "'\n"
     << "set output '" << stem << "_time.png'\n"
     << "set xlabel 'time (s)'\n"
     << "plot '" << trace.string() << "' using 2:4 with lines title '" << label << "'\n";
}

int cmd_generate(Index n, Index p, std::uint64_t seed, const fs::path& out) {
  if (p < 1 || p > n) throw UsageError("p must satisfy p ≤ n (and p ≥ 1)");
  const EigProblem prob = generate_problem(n, p, seed);
  save_problem(out, prob);
  const PdReport pd = is_positive_definite(prob.G);
  std::printf("wrote %s (n = %lld, p = %lld, seed = %llu)\n", out.string().c_str(),
              static_cast<long long>(n), static_cast<long long>(p),
              static_cast<unsigned long long>(seed));
  std::printf("G min eigenvalue %.17g, max |eigenvalue| %.17g, positive definite: %s\n",
              pd.min_eigenvalue, pd.max_abs_eigenvalue, pd.positive_definite ? "yes" : "no");
  return pd.positive_definite ? kOk : kQuality;
}

struct SolveArgs {
  fs::path problem;
  std::string algorithm = "cg";
  std::uint64_t seed = 0;
  int max_iters = 250;
  std::optional<double> grad_tol;
  fs::path trace;
  fs::path plot_script;
  fs::path out_x;
  std::string metric = "g";
};

int cmd_solve(const SolveArgs& args, const Tolerances& tols) {
  const EigProblem prob = load_problem(args.problem);
  ManifoldOptions mopts;
  mopts.feas_tol = tols.feas;
  const ManifoldContext ctx = make_context(prob, mopts);
  const EigObjective obj(prob);

  Rng rng(args.seed);
  const QuatMatrix x0 = random_point(ctx, rng);

  SolverConfig cfg;
  cfg.max_iters = args.max_iters;
  cfg.grad_tol = args.grad_tol.value_or(tols.grad);
  cfg.validate();

  const SolveReport rep = args.algorithm == "sd" ? solve_sd(ctx, obj, x0, cfg) : solve_cg(ctx, obj, x0, cfg);

  const fs::path trace = args.trace.empty() ? args.problem / ("trace_" + args.algorithm + ".csv") : args.trace;
  {
    std::ofstream os(trace);
    if (!os) throw Error("cannot write " + trace.string());
    write_trace_csv(os, rep.trace);
  }
  if (!args.plot_script.empty()) write_plot_script(args.plot_script, trace, args.algorithm);
  const fs::path out_x = args.out_x.empty() ? args.problem / ("X_" + args.algorithm + ".qmat") : args.out_x;
  save_qmat(out_x, rep.x);

  const TraceRow& last = rep.trace.back();
  std::printf("algorithm %s: %s after %d iterations (%.3f s)\n", args.algorithm.c_str(),
              rep.message.c_str(), rep.iterations(), last.elapsed_s);
  std::printf("cost %.17g, gradient norm %.6e\n", last.cost, last.grad_norm);
  print_residuals(residuals(prob, rep.x), frobenius_norm(prob.A));
  std::printf("trace %s\nX %s\n", trace.string().c_str(), out_x.string().c_str());
  return rep.converged ? kOk : kQuality;
}

int cmd_check(const fs::path& problem, const fs::path& x_path, const Tolerances& tols) {
  const EigProblem prob = load_problem(problem);
  const QuatMatrix x = load_qmat(x_path);
  if (x.rows() != prob.n || x.cols() != prob.p) {
    std::ostringstream os;
    os << "X has shape " << x.rows() << "x" << x.cols() << ", expected " << prob.n << "x" << prob.p;
    throw ShapeError(os.str());
  }
  const ResidualTriple r = residuals(prob, x);
  print_residuals(r, frobenius_norm(prob.A));
  const Eigenpairs ep = extract_eigenpairs(prob, x);
  std::printf("%4s %25s %14s %14s\n", "col", "lambda", "|imag|", "residual");
  for (std::size_t c = 0; c < ep.lambdas.size(); ++c) {
    std::printf("%4zu %25.17g %14.6e %14.6e\n", c, ep.lambdas[c], ep.imag_parts[c], ep.residuals[c]);
  }
  const bool ok = r.feasibility <= tols.feas;
  std::printf("feasibility %s (tolerance %.1e)\n", ok ? "ok" : "FAILED", tols.feas);
  return ok ? kOk : kQuality;
}

int cmd_oracle(const fs::path& problem, std::optional<Index> k) {
  const EigProblem prob = load_problem(problem);
  const Index count = k.value_or(prob.p);
  if (count < 1 || count > prob.n) {
    throw UsageError("k must satisfy 1 ≤ k ≤ n (n = " + std::to_string(prob.n) + ")");
  }
  const std::vector<double> eigs = oracle_eigs(prob);
  for (Index i = 0; i < count; ++i) std::printf("%.17g\n", eigs[static_cast<std::size_t>(i)]);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riemannian optimization on the generalized quaternionic Stiefel manifold"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "generate a random generalized eigenproblem bundle");
  Index n = 0;
  Index p = 0;
  std::uint64_t gen_seed = 0;
  fs::path gen_out = "problem";
  gen->add_option("--n", n, "matrix size")->required();
  gen->add_option("--p", p, "number of eigenpairs")->required();
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output directory");

  auto* solve = app.add_subcommand("solve", "run a solver on a bundle");
  SolveArgs sargs;
  double grad_tol = 0.0;
  solve->add_option("--problem", sargs.problem, "bundle directory")->required();
  solve->add_option("--algorithm", sargs.algorithm, "sd or cg")->check(CLI::IsMember({"sd", "cg"}));
  solve->add_option("--seed", sargs.seed, "seed of the initial point");
  solve->add_option("--max-iters", sargs.max_iters, "iteration limit")->check(CLI::NonNegativeNumber);
  auto* grad_opt = solve->add_option("--grad-tol", grad_tol, "gradient norm tolerance")->check(CLI::PositiveNumber);
  solve->add_option("--trace", sargs.trace, "trace CSV path (default <problem>/trace_<algorithm>.csv)");
  solve->add_option("--plot-script", sargs.plot_script, "write a gnuplot script for the trace");
  solve->add_option("--out-x", sargs.out_x, "final iterate path (default <problem>/X_<algorithm>.qmat)");
  solve->add_option("--metric", sargs.metric, "metric M_X; only g (M_X = G) is available")
      ->check(CLI::IsMember({"g"}));

  auto* check = app.add_subcommand("check", "residuals of a candidate X");
  fs::path check_problem;
  fs::path check_x;
  check->add_option("--problem", check_problem, "bundle directory")->required();
  check->add_option("--x", check_x, "QMAT1 file with X")->required();

  auto* oracle = app.add_subcommand("oracle", "smallest generalized eigenvalues by dense brute force");
  fs::path oracle_problem;
  Index k = 0;
  oracle->add_option("--problem", oracle_problem, "bundle directory")->required();
  auto* k_opt = oracle->add_option("--k", k, "how many eigenvalues (default p)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    const Tolerances tols = env_tolerances();
    if (*gen) return cmd_generate(n, p, gen_seed, gen_out);
    if (*solve) {
      if (*grad_opt) sargs.grad_tol = grad_tol;
      return cmd_solve(sargs, tols);
    }
    if (*check) return cmd_check(check_problem, check_x, tols);
    if (*oracle) return cmd_oracle(oracle_problem, *k_opt ? std::optional<Index>(k) : std::nullopt);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kUsage;
  } catch (const ShapeError& e) {
    std::fprintf(stderr, "shape error: %s\n", e.what());
    return kUsage;
  } catch (const ContractError& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kUsage;
  } catch (const OracleError& e) {
    std::fprintf(stderr, "oracle failure: %s\n", e.what());
    return kInternal;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kInternal;
  }
  return kInternal;
}
