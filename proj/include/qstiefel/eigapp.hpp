#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "qstiefel/manifold.hpp"
#include "qstiefel/quat_matrix.hpp"
#include "qstiefel/solvers.hpp"

namespace qstiefel {

/// Right generalized eigenproblem A x = G x lambda, posed as
///   min re(tr(X^H A X N))  over  St_G(p, H^n),  N = diag(mu_1 > ... > mu_p > 0).
struct EigProblem {
  Index n = 0;
  Index p = 0;
  QuatMatrix A;
  QuatMatrix G;
  std::vector<double> N;
  std::uint64_t seed = 0;

  /// Throws ShapeError / ContractError when the problem invariants fail.
  void validate() const;
};

/// A = (U + U^H)/2, G = V^H V + I_n with U, V standard normal in all four
/// components, N = diag(p, p-1, ..., 1). Deterministic in `seed`.
EigProblem generate_problem(Index n, Index p, std::uint64_t seed);

struct CostGrad {
  double cost = 0.0;
  QuatMatrix egrad;
};

/// f(X) = re(tr(X^H A X N)) and its Euclidean gradient 2 A X N.
CostGrad cost_and_egrad(const EigProblem& prob, const QuatMatrix& x);

class EigObjective final : public Objective {
 public:
  explicit EigObjective(const EigProblem& prob) : prob_(&prob) {}
  double cost(const QuatMatrix& x) const override;
  QuatMatrix egrad(const QuatMatrix& x) const override;

 private:
  const EigProblem* prob_;
};

/// Manifold St_G(p, H^n) for the problem's G with M_X == G.
ManifoldContext make_context(const EigProblem& prob, ManifoldOptions opts = {});

struct ResidualTriple {
  double feasibility = 0.0;  ///< ||X^H G X - I_p||_F
  double offdiag = 0.0;      ///< ||Lambda - diag(Lambda)||_F, Lambda = X^H A X
  double eigres = 0.0;       ///< ||A X - G X Lambda||_F
};

ResidualTriple residuals(const EigProblem& prob, const QuatMatrix& x);

/// All n generalized eigenvalues, ascending, by brute force: the Hermitian
/// reduction L = G^{-1/2} A G^{-1/2} is embedded as a 2n x 2n complex
/// Hermitian matrix and diagonalised densely; the Kramers pairs are collapsed.
/// Throws OracleError when a pair differs by more than 1e-8 * ||L||_F.
std::vector<double> oracle_eigs(const EigProblem& prob);

struct Eigenpairs {
  std::vector<double> lambdas;    ///< re of diag(X^H A X), column order
  std::vector<double> imag_parts; ///< |imaginary part| of the same diagonal entries
  std::vector<double> residuals;  ///< ||A x_r - G x_r lambda_r||_2
};

Eigenpairs extract_eigenpairs(const EigProblem& prob, const QuatMatrix& x);

/// Bundle layout: <dir>/A.qmat, <dir>/G.qmat, <dir>/meta.json {n, p, seed, N}.
void save_problem(const std::filesystem::path& dir, const EigProblem& prob);
EigProblem load_problem(const std::filesystem::path& dir);

}  // namespace qstiefel
