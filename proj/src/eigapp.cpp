#include "qstiefel/eigapp.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qstiefel/errors.hpp"
#include "qstiefel/linalg.hpp"
#include "qstiefel/qmat_io.hpp"

namespace qstiefel {

namespace {

void require_point(const EigProblem& prob, const QuatMatrix& x, const char* op) {
  if (x.rows() != prob.n || x.cols() != prob.p) {
    std::ostringstream os;
    os << op << ": expected a " << prob.n << "x" << prob.p << " matrix, got " << x.rows() << "x"
       << x.cols();
    throw ShapeError(os.str());
  }
}

}  // namespace

void EigProblem::validate() const {
  if (p < 1 || p > n) throw ShapeError("EigProblem: p must satisfy 1 <= p <= n");
  if (A.rows() != n || A.cols() != n || G.rows() != n || G.cols() != n) {
    throw ShapeError("EigProblem: A and G must be n x n");
  }
  if (static_cast<Index>(N.size()) != p) throw ShapeError("EigProblem: N must have p entries");
  if (hermitian_residual(A) > 1e-12 * std::max(1.0, frobenius_norm(A))) {
    throw ContractError("EigProblem: A is not Hermitian");
  }
  for (std::size_t r = 0; r < N.size(); ++r) {
    if (!(N[r] > 0.0) || (r > 0 && !(N[r] < N[r - 1]))) {
      throw ContractError("EigProblem: N must be strictly decreasing and positive");
    }
  }
  const PdReport pd = is_positive_definite(G);
  if (!pd.positive_definite) {
    std::ostringstream os;
    os << "EigProblem: G is not Hermitian positive definite (min eigenvalue " << pd.min_eigenvalue
       << ")";
    throw ContractError(os.str());
  }
}

EigProblem generate_problem(Index n, Index p, std::uint64_t seed) {
  if (p < 1 || n < 1 || p > n) throw ShapeError("generate_problem: p must satisfy 1 <= p <= n");
  Rng rng(seed);
  const QuatMatrix u = gaussian_matrix(n, n, rng);
  const QuatMatrix v = gaussian_matrix(n, n, rng);

  EigProblem prob;
  prob.n = n;
  prob.p = p;
  prob.A = 0.5 * (u + hermitian_conjugate(u));
  prob.G = her_part(hermitian_conjugate(v) * v) + QuatMatrix::identity(n);
  for (Index r = 0; r < p; ++r) prob.N.push_back(static_cast<double>(p - r));
  prob.seed = seed;
  return prob;
}

CostGrad cost_and_egrad(const EigProblem& prob, const QuatMatrix& x) {
  require_point(prob, x, "cost_and_egrad");
  const QuatMatrix axn = scale_cols(prob.A * x, prob.N);
  return {re_trace_inner(x, axn), 2.0 * axn};
}

double EigObjective::cost(const QuatMatrix& x) const {
  require_point(*prob_, x, "EigObjective::cost");
  return re_trace_inner(x, scale_cols(prob_->A * x, prob_->N));
}

QuatMatrix EigObjective::egrad(const QuatMatrix& x) const { return cost_and_egrad(*prob_, x).egrad; }

ManifoldContext make_context(const EigProblem& prob, ManifoldOptions opts) {
  return ManifoldContext(prob.G, prob.p, opts);
}

ResidualTriple residuals(const EigProblem& prob, const QuatMatrix& x) {
  require_point(prob, x, "residuals");
  const QuatMatrix ax = prob.A * x;
  const QuatMatrix gx = prob.G * x;
  const QuatMatrix xh = hermitian_conjugate(x);
  const QuatMatrix lambda = xh * ax;

  QuatMatrix off = lambda;
  for (Index r = 0; r < prob.p; ++r) off.set(r, r, Quaternion{});

  ResidualTriple t;
  t.feasibility = frobenius_norm(xh * gx - QuatMatrix::identity(prob.p));
  t.offdiag = frobenius_norm(off);
  t.eigres = frobenius_norm(ax - gx * lambda);
  return t;
}

std::vector<double> oracle_eigs(const EigProblem& prob) {
  const SqrtPd f = sqrt_pd(prob.G);
  const QuatMatrix l = her_part(f.inv_sqrt * prob.A * f.inv_sqrt);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(complex_adjoint(l), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw OracleError("oracle_eigs: dense eigensolver failed");
  const Eigen::VectorXd& ev = es.eigenvalues();

  const double pair_tol = 1e-8 * frobenius_norm(l);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(prob.n));
  for (Index i = 0; i + 1 < ev.size(); i += 2) {
    if (std::abs(ev(i + 1) - ev(i)) > pair_tol) {
      std::ostringstream os;
      os << "oracle_eigs: eigenvalues " << ev(i) << " and " << ev(i + 1)
         << " do not form a Kramers pair (tolerance " << pair_tol << ")";
      throw OracleError(os.str());
    }
    out.push_back(0.5 * (ev(i) + ev(i + 1)));
  }
  return out;
}

Eigenpairs extract_eigenpairs(const EigProblem& prob, const QuatMatrix& x) {
  require_point(prob, x, "extract_eigenpairs");
  const QuatMatrix ax = prob.A * x;
  const QuatMatrix gx = prob.G * x;
  const QuatMatrix lambda = hermitian_conjugate(x) * ax;

  Eigenpairs out;
  for (Index r = 0; r < prob.p; ++r) {
    const Quaternion d = lambda(r, r);
    out.lambdas.push_back(d.w);
    out.imag_parts.push_back(std::sqrt(d.x * d.x + d.y * d.y + d.z * d.z));
    out.residuals.push_back(frobenius_norm(ax.col(r) - d.w * gx.col(r)));
  }
  return out;
}

void save_problem(const std::filesystem::path& dir, const EigProblem& prob) {
  std::filesystem::create_directories(dir);
  save_qmat(dir / "A.qmat", prob.A);
  save_qmat(dir / "G.qmat", prob.G);
  nlohmann::json meta;
  meta["n"] = prob.n;
  meta["p"] = prob.p;
  meta["seed"] = prob.seed;
  meta["N"] = prob.N;
  std::ofstream os(dir / "meta.json");
  if (!os) throw Error("cannot write " + (dir / "meta.json").string());
  os << meta.dump(2) << '\n';
}

EigProblem load_problem(const std::filesystem::path& dir) {
  std::ifstream is(dir / "meta.json");
  if (!is) throw ParseError("cannot open " + (dir / "meta.json").string());
  EigProblem prob;
  try {
    const nlohmann::json meta = nlohmann::json::parse(is);
    prob.n = meta.at("n").get<Index>();
    prob.p = meta.at("p").get<Index>();
    prob.seed = meta.at("seed").get<std::uint64_t>();
    prob.N = meta.at("N").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("meta.json: ") + e.what());
  }
  prob.A = load_qmat(dir / "A.qmat");
  prob.G = load_qmat(dir / "G.qmat");
  prob.validate();
  return prob;
}

}  // namespace qstiefel
