#include "qstiefel/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "qstiefel/errors.hpp"

namespace qstiefel {

namespace {

// Row-major n x n quaternion workspace for the Jacobi sweeps.
class QuatSquare {
 public:
  explicit QuatSquare(Index n) : n_(n), data_(static_cast<std::size_t>(n * n)) {}

  Quaternion& operator()(Index r, Index c) { return data_[static_cast<std::size_t>(r * n_ + c)]; }
  const Quaternion& operator()(Index r, Index c) const {
    return data_[static_cast<std::size_t>(r * n_ + c)];
  }
  Index size() const { return n_; }

  static QuatSquare from(const QuatMatrix& a) {
    QuatSquare w(a.rows());
    for (Index r = 0; r < a.rows(); ++r)
      for (Index c = 0; c < a.cols(); ++c) w(r, c) = a(r, c);
    return w;
  }

 private:
  Index n_;
  std::vector<Quaternion> data_;
};

double off_diagonal_mass(const QuatSquare& a) {
  double s = 0.0;
  for (Index r = 0; r < a.size(); ++r)
    for (Index c = 0; c < a.size(); ++c)
      if (r != c) s += qnorm2(a(r, c));
  return std::sqrt(s);
}

double hermitian_scale(const QuatMatrix& a) { return std::max(1.0, frobenius_norm(a)); }

void require_hermitian(const QuatMatrix& a, double tol, const char* op) {
  if (a.rows() != a.cols()) {
    throw ShapeError(std::string(op) + ": expected a square matrix, got " +
                     std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
  const double res = hermitian_residual(a);
  if (res > tol * hermitian_scale(a)) {
    std::ostringstream os;
    os << op << ": input is not Hermitian (||skew(A)||_F = " << res << ")";
    throw ContractError(os.str());
  }
}

// Annihilates a(p, q) with U <- U V R, where V = diag(1, conj(u)) turns the
// pivot real and R is a real plane rotation.
void jacobi_rotate(QuatSquare& a, QuatSquare& u, Index p, Index q) {
  const Index n = a.size();
  const Quaternion b = a(p, q);
  const double babs = qabs(b);
  const Quaternion phase = b / babs;
  const Quaternion phase_conj = qconj(phase);

  for (Index k = 0; k < n; ++k) a(k, q) = a(k, q) * phase_conj;
  for (Index k = 0; k < n; ++k) a(q, k) = phase * a(q, k);
  for (Index k = 0; k < n; ++k) u(k, q) = u(k, q) * phase_conj;

  const double app = a(p, p).w;
  const double aqq = a(q, q).w;
  const double theta = (aqq - app) / (2.0 * babs);
  double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  if (theta < 0.0) t = -t;
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  for (Index k = 0; k < n; ++k) {
    const Quaternion akp = a(k, p);
    const Quaternion akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (Index k = 0; k < n; ++k) {
    const Quaternion apk = a(p, k);
    const Quaternion aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  for (Index k = 0; k < n; ++k) {
    const Quaternion ukp = u(k, p);
    const Quaternion ukq = u(k, q);
    u(k, p) = c * ukp - s * ukq;
    u(k, q) = s * ukp + c * ukq;
  }
  a(p, q) = Quaternion{};
  a(q, p) = Quaternion{};
  a(p, p) = Quaternion{app - t * babs};
  a(q, q) = Quaternion{aqq + t * babs};
}

std::vector<Quaternion> column_of(const QuatMatrix& a, Index c) {
  std::vector<Quaternion> v(static_cast<std::size_t>(a.rows()));
  for (Index r = 0; r < a.rows(); ++r) v[static_cast<std::size_t>(r)] = a(r, c);
  return v;
}

}  // namespace

ComplexMatrix complex_adjoint(const QuatMatrix& a) {
  const Index m = a.rows();
  const Index n = a.cols();
  ComplexMatrix chi(2 * m, 2 * n);
  const Eigen::MatrixXcd ac = a.comp(0).cast<std::complex<double>>() +
                              std::complex<double>(0.0, 1.0) * a.comp(1).cast<std::complex<double>>();
  const Eigen::MatrixXcd bc = a.comp(2).cast<std::complex<double>>() +
                              std::complex<double>(0.0, 1.0) * a.comp(3).cast<std::complex<double>>();
  chi.topLeftCorner(m, n) = ac;
  chi.topRightCorner(m, n) = bc;
  chi.bottomLeftCorner(m, n) = -bc.conjugate();
  chi.bottomRightCorner(m, n) = ac.conjugate();
  return chi;
}

EigDecomposition eigh(const QuatMatrix& a, const JacobiOptions& opts) {
  require_hermitian(a, opts.her_tol, "eigh");
  const Index n = a.rows();
  QuatSquare w = QuatSquare::from(her_part(a));
  QuatSquare u(n);
  for (Index i = 0; i < n; ++i) u(i, i) = Quaternion{1.0};

  const double norm = frobenius_norm(a);
  bool converged = norm == 0.0 || n <= 1;
  double off = 0.0;
  for (int sweep = 0; !converged && sweep < opts.max_sweeps; ++sweep) {
    off = off_diagonal_mass(w);
    if (off <= opts.off_tol * norm) {
      converged = true;
      break;
    }
    const double thresh = sweep < 3 ? 0.2 * off / static_cast<double>(n * n) : 0.0;
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double babs = qabs(w(p, q));
        const double g = 100.0 * babs;
        const double dp = std::abs(w(p, p).w);
        const double dq = std::abs(w(q, q).w);
        if (sweep > 3 && dp + g == dp && dq + g == dq) {
          w(p, q) = Quaternion{};
          w(q, p) = Quaternion{};
          continue;
        }
        if (babs <= thresh || babs == 0.0) continue;
        jacobi_rotate(w, u, p, q);
      }
    }
  }
  if (!converged) {
    off = off_diagonal_mass(w);
    if (off > opts.off_tol * norm) {
      std::ostringstream os;
      os << "eigh: no convergence after " << opts.max_sweeps
         << " sweeps, off-diagonal mass " << off << " (||A||_F = " << norm << ")";
      throw ConvergenceError(os.str());
    }
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index x, Index y) { return w(x, x).w < w(y, y).w; });

  EigDecomposition out{QuatMatrix(n, n), std::vector<double>(static_cast<std::size_t>(n))};
  for (Index c = 0; c < n; ++c) {
    const Index src = order[static_cast<std::size_t>(c)];
    out.values[static_cast<std::size_t>(c)] = w(src, src).w;
    for (Index r = 0; r < n; ++r) out.vectors.set(r, c, u(r, src));
  }
  return out;
}

double pd_threshold(double max_abs_eigenvalue) { return 1e-10 * max_abs_eigenvalue; }

SqrtPd sqrt_pd(const QuatMatrix& g) {
  const EigDecomposition eig = eigh(g);
  if (!eig.values.empty()) {
    const double max_abs =
        std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
    if (!(eig.values.front() > pd_threshold(max_abs))) {
      std::ostringstream os;
      os << "sqrt_pd: matrix is not positive definite (min eigenvalue " << eig.values.front()
         << ")";
      throw ContractError(os.str());
    }
  }
  QuatMatrix s = her_part(eig.spectral_map([](double l) { return std::sqrt(l); }));
  QuatMatrix inv = her_part(eig.spectral_map([](double l) { return 1.0 / std::sqrt(l); }));
  return {std::move(s), std::move(inv)};
}

QrResult qr(const QuatMatrix& a, double rank_tol) {
  const Index n = a.rows();
  const Index p = a.cols();
  if (p > n) {
    throw RankError("qf: a " + std::to_string(n) + "x" + std::to_string(p) +
                    " matrix cannot have full right column rank");
  }
  const double norm = frobenius_norm(a);
  std::vector<std::vector<Quaternion>> q;
  q.reserve(static_cast<std::size_t>(p));
  QuatMatrix r(p, p);

  for (Index k = 0; k < p; ++k) {
    std::vector<Quaternion> v = column_of(a, k);
    for (int pass = 0; pass < 2; ++pass) {
      for (Index j = 0; j < k; ++j) {
        const auto& qj = q[static_cast<std::size_t>(j)];
        Quaternion coef;
        for (Index i = 0; i < n; ++i) {
          coef += qconj(qj[static_cast<std::size_t>(i)]) * v[static_cast<std::size_t>(i)];
        }
        for (Index i = 0; i < n; ++i) {
          v[static_cast<std::size_t>(i)] -= qj[static_cast<std::size_t>(i)] * coef;
        }
        r.set(j, k, r(j, k) + coef);
      }
    }
    double nrm2 = 0.0;
    for (const auto& x : v) nrm2 += qnorm2(x);
    const double nrm = std::sqrt(nrm2);
    if (!(nrm > rank_tol * norm) || nrm == 0.0) {
      std::ostringstream os;
      os << "qf: matrix does not have full right column rank (pivot " << k << " norm " << nrm
         << ", ||A||_F = " << norm << ")";
      throw RankError(os.str());
    }
    for (auto& x : v) x = x / nrm;
    r.set(k, k, Quaternion{nrm});
    q.push_back(std::move(v));
  }

  QuatMatrix qm(n, p);
  for (Index c = 0; c < p; ++c)
    for (Index i = 0; i < n; ++i) qm.set(i, c, q[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)]);
  return {std::move(qm), std::move(r)};
}

QuatMatrix qf(const QuatMatrix& a, double rank_tol) { return qr(a, rank_tol).q; }

QuatMatrix solve_sylvester(const EigDecomposition& k_eig, const QuatMatrix& l) {
  const Index p = k_eig.vectors.rows();
  require_hermitian(l, 1e-10, "solve_sylvester");
  if (l.rows() != p) throw ShapeError("solve_sylvester: K and L sizes differ");
  if (p == 0) return {};
  const auto [lo, hi] = std::minmax_element(k_eig.values.begin(), k_eig.values.end());
  const double max_abs = std::max(std::abs(*lo), std::abs(*hi));
  if (!(*lo > pd_threshold(max_abs))) {
    std::ostringstream os;
    os << "solve_sylvester: K is not positive definite (min eigenvalue " << *lo << ")";
    throw ContractError(os.str());
  }

  const QuatMatrix& u = k_eig.vectors;
  QuatMatrix t = her_part(hermitian_conjugate(u) * l * u);
  for (int c = 0; c < 4; ++c) {
    for (Index r = 0; r < p; ++r) {
      for (Index s = 0; s < p; ++s) {
        t.comp(c)(r, s) /= k_eig.values[static_cast<std::size_t>(r)] +
                           k_eig.values[static_cast<std::size_t>(s)];
      }
    }
  }
  return her_part(u * t * hermitian_conjugate(u));
}

QuatMatrix solve_sylvester(const QuatMatrix& k, const QuatMatrix& l) {
  if (k.rows() != l.rows() || k.cols() != l.cols()) {
    throw ShapeError("solve_sylvester: K and L must be square of equal size");
  }
  return solve_sylvester(eigh(k), l);
}

PdReport is_positive_definite(const QuatMatrix& g, double her_tol) {
  if (g.rows() != g.cols()) throw ShapeError("is_positive_definite: expected a square matrix");
  PdReport rep;
  rep.her_residual = hermitian_residual(g);
  if (g.rows() == 0) {
    rep.positive_definite = true;
    return rep;
  }
  const EigDecomposition eig = eigh(her_part(g));
  rep.min_eigenvalue = eig.values.front();
  rep.max_abs_eigenvalue = std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
  rep.positive_definite = rep.her_residual <= her_tol * hermitian_scale(g) &&
                          rep.min_eigenvalue > pd_threshold(rep.max_abs_eigenvalue);
  return rep;
}

}  // namespace qstiefel
