// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.
//
//   acceptance            run every criterion
//   acceptance 3 6        run a subset

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "manifold_support.hpp"
#include "qstiefel/eigapp.hpp"
#include "qstiefel/errors.hpp"
#include "qstiefel/qmat_io.hpp"
#include "qstiefel/solvers.hpp"

#ifndef QSTIEFEL_CLI_PATH
#define QSTIEFEL_CLI_PATH "qstiefel"
#endif

using namespace qstiefel;
using namespace qstiefel::testing;
namespace fs = std::filesystem;

namespace {

// Collects failed checks and the worst observed ratio of error to tolerance.
class Ledger {
 public:
  void check(bool ok, const std::string& what) {
    ++checks_;
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  void bound(double err, double tol, const std::string& what) {
    worst_ = std::max(worst_, err / tol);
    std::ostringstream os;
    os << what << ": " << err << " > " << tol;
    check(err <= tol, os.str());
  }
  void note(const std::string& s) { notes_.push_back(s); }

  bool passed() const { return failed_ == 0; }
  std::string summary() const {
    std::ostringstream os;
    os << checks_ << " checks";
    if (worst_ > 0.0) os << ", worst error/tolerance " << worst_;
    for (const auto& n : notes_) os << "; " << n;
    for (const auto& f : failures_) os << "\n      failed: " << f;
    if (failed_ > static_cast<long>(failures_.size())) os << "\n      (" << failed_ << " failures in total)";
    return os.str();
  }

 private:
  long checks_ = 0;
  long failed_ = 0;
  double worst_ = 0.0;
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

struct Criterion {
  int id;
  const char* title;
  double time_limit_s;
  std::function<void(Ledger&)> run;
};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// 1. Quaternion and matrix algebra identities.
void algebra_suite(Ledger& led) {
  Rng rng(1001);
  for (int t = 0; t < 1000; ++t) {
    const Quaternion p = random_quaternion(rng);
    const Quaternion q = random_quaternion(rng);
    const Quaternion r = random_quaternion(rng);
    const double s = qabs(p) * qabs(q) * qabs(r);
    led.bound(qabs((p * q) * r - p * (q * r)), 1e-12 * s, "associativity");
    led.bound(qabs(qconj(p * q) - qconj(q) * qconj(p)), 1e-12 * qabs(p) * qabs(q), "conjugate of product");
    led.bound(rel(qabs(p * q), qabs(p) * qabs(q)), 1e-12, "|pq| = |p||q|");
  }
  std::uniform_int_distribution<int> size(1, 12);
  for (int t = 0; t < 100; ++t) {
    const Index m = size(rng);
    const Index k = size(rng);
    const QuatMatrix a = random_matrix(m, k, rng);
    const QuatMatrix b = random_matrix(k, m, rng);
    const double scale = frobenius_norm(a) * frobenius_norm(b);
    led.bound(std::abs(trace(a * b).w - trace(b * a).w), 1e-12 * scale, "re tr(AB) = re tr(BA)");

    const QuatMatrix h = random_hermitian(m, rng);
    const QuatMatrix w = random_skew(m, rng);
    led.bound(std::abs(trace(h * w).w), 1e-12 * frobenius_norm(h) * frobenius_norm(w), "re tr(ST) = 0");
  }
}

// 2. eigh, sqrt_pd and qf.
void factorization_suite(Ledger& led) {
  Rng rng(1002);
  for (Index n : {2, 5, 20, 50}) {
    const QuatMatrix a = random_hermitian(n, rng);
    const double na = frobenius_norm(a);
    const EigDecomposition e = eigh(a);
    led.bound(frobenius_norm(e.spectral_map([](double l) { return l; }) - a), 1e-10 * na,
              "eigh reconstruction n=" + std::to_string(n));
    const Eigen::VectorXd ref = adjoint_eigenvalues(a);
    double err = 0.0;
    for (Index i = 0; i < n; ++i) err = std::max(err, std::abs(e.values[static_cast<std::size_t>(i)] - ref(2 * i)));
    led.bound(err, 1e-9 * na, "eigh vs adjoint oracle n=" + std::to_string(n));

    const QuatMatrix g = random_hpd(n, rng);
    const SqrtPd f = sqrt_pd(g);
    led.bound(frobenius_norm(f.sqrt * f.sqrt - g), 1e-10 * frobenius_norm(g), "sqrtG^2 = G n=" + std::to_string(n));
  }
  std::uniform_int_distribution<int> size(1, 20);
  for (int t = 0; t < 50; ++t) {
    const Index n = size(rng);
    const Index p = 1 + static_cast<Index>(rng() % static_cast<std::uint64_t>(n));
    const QuatMatrix a = random_matrix(n, p, rng);
    const QrResult f = qr(a);
    led.bound(frobenius_norm(hermitian_conjugate(f.q) * f.q - QuatMatrix::identity(p)), 1e-12, "Q^H Q = I");
    bool diag_ok = true;
    for (Index i = 0; i < p; ++i) {
      const Quaternion d = f.r(i, i);
      diag_ok = diag_ok && d.w > 0.0 && d.x == 0.0 && d.y == 0.0 && d.z == 0.0;
      for (Index j = 0; j < i; ++j) diag_ok = diag_ok && qabs(f.r(i, j)) == 0.0;
    }
    led.check(diag_ok, "R upper triangular with positive real diagonal");
    led.bound(frobenius_norm(f.q * f.r - a), 1e-12 * frobenius_norm(a), "QR = A");
    led.bound(frobenius_norm(qf(f.q) - f.q), 1e-12, "qf idempotent");
  }
}

// 3. Sylvester solver.
void sylvester_suite(Ledger& led) {
  const QuatMatrix k = QuatMatrix::diagonal(std::vector<double>{1.0, 2.0});
  QuatMatrix ones(2, 2);
  ones.comp(0).setOnes();
  const QuatMatrix s = solve_sylvester(k, ones);
  const double want[2][2] = {{1.0 / 2, 1.0 / 3}, {1.0 / 3, 1.0 / 4}};
  double err = 0.0;
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j) err = std::max(err, qabs(s(i, j) - Quaternion{want[i][j]}));
  led.bound(err, 1e-14, "K = diag(1,2), L = ones");

  Rng rng(1003);
  for (int t = 0; t < 100; ++t) {
    const Index p = 1 + t % 10;
    const QuatMatrix kk = random_hpd(p, rng);
    const QuatMatrix l = random_hermitian(p, rng);
    const QuatMatrix x = solve_sylvester(kk, l);
    led.bound(frobenius_norm(kk * x + x * kk - l), 1e-10 * frobenius_norm(l), "KS + SK = L");
    led.bound(hermitian_residual(x), 1e-14 * std::max(1.0, frobenius_norm(x)), "S Hermitian");
  }
}

double loglog_slope(const std::vector<double>& t, const std::vector<double>& d) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    mx += std::log10(t[i]);
    my += std::log10(d[i]);
  }
  mx /= static_cast<double>(t.size());
  my /= static_cast<double>(t.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double dx = std::log10(t[i]) - mx;
    sxy += dx * (std::log10(d[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

// 4. Projection, retraction, transport and tangent dimension.
void geometry_suite(Ledger& led) {
  Rng rng(1004);
  std::uniform_int_distribution<int> pdist(1, 8);
  const std::pair<MetricKind, const char*> paths[] = {{MetricKind::ConstantG, "closed form"},
                                                      {MetricKind::PointDependent, "general"}};
  double slope_lo = 1e300, slope_hi = -1e300;
  for (const auto& [kind, label] : paths) {
    const std::string tag = std::string(" [") + label + "]";
    for (int t = 0; t < 50; ++t) {
      const Index p = pdist(rng);
      const Index n = std::uniform_int_distribution<Index>(p, 30)(rng);
      const ManifoldContext ctx = make_context(kind, n, p, rng);
      const ProjectionPath path = ProjectionPath::Auto;
      const QuatMatrix x = random_point(ctx, rng);
      const QuatMatrix y = random_matrix(n, p, rng);
      const QuatMatrix z = random_matrix(n, p, rng);
      const double sy = frobenius_norm(y);

      const TangentVector py = project_tangent(ctx, x, y, path);
      const TangentVector pz = project_tangent(ctx, x, z, path);
      led.bound(frobenius_norm(project_tangent(ctx, x, py.value, path).value - py.value), 1e-10 * sy,
                "idempotence" + tag);
      led.bound(std::abs(inner(ctx, x, py.value, z) - inner(ctx, x, y, pz.value)),
                1e-10 * std::sqrt(inner(ctx, x, y, y) * inner(ctx, x, z, z)),
                "self-adjointness" + tag);
      const QuatMatrix normal = ctx.metric().apply_inverse(x, ctx.G() * x * random_hermitian(p, rng));
      led.bound(frobenius_norm(project_tangent(ctx, x, normal, path).value), 1e-10 * frobenius_norm(normal),
                "normal annihilated" + tag);

      if (kind == MetricKind::ConstantG) {
        const auto general = project_tangent(ctx, x, y, ProjectionPath::General);
        led.bound(frobenius_norm(py.value - general.value), 1e-11 * sy, "fast vs general path");
      }

      const TangentVector zero = make_tangent(ctx, x, QuatMatrix::zeros(n, p));
      led.check(retract(ctx, x, zero) == x, "R_X(0) = X exactly" + tag);

      TangentVector eta = random_tangent(ctx, x, rng);
      TangentVector big = eta;
      big.value *= 1.0 + static_cast<double>(t % 5);
      led.bound(feasibility_residual(ctx, retract(ctx, x, big)), 1e-10, "retraction closure" + tag);

      std::vector<double> ts{1e-1, 1e-2, 1e-3}, dev;
      for (double s : ts) {
        TangentVector step = eta;
        step.value *= s;
        dev.push_back(frobenius_norm(retract(ctx, x, step) - (x + step.value)));
      }
      const double slope = loglog_slope(ts, dev);
      slope_lo = std::min(slope_lo, slope);
      slope_hi = std::max(slope_hi, slope);
      led.bound(std::abs(slope - 2.0), 0.2, "second-order slope" + tag);

      TangentVector dir = random_tangent(ctx, x, rng);
      dir.value *= 0.5;
      const Transported moved = transport(ctx, x, dir, eta);
      led.bound(tangent_residual(ctx, moved.x_next, moved.vector.value), 1e-10, "transport tangent" + tag);
    }
  }
  {
    std::ostringstream os;
    os << "slopes in [" << slope_lo << ", " << slope_hi << "]";
    led.note(os.str());
  }

  for (Index n = 1; n <= 6; ++n) {
    for (Index p = 1; p <= std::min<Index>(3, n); ++p) {
      const ManifoldContext ctx(random_hpd(n, rng), p);
      const QuatMatrix x = random_point(ctx, rng);
      const Index amb = 4 * n * p;
      Eigen::MatrixXd span(amb, amb);
      for (Index k = 0; k < amb; ++k) span.col(k) = flatten(project_tangent(ctx, x, random_matrix(n, p, rng)).value);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(span);
      const auto& sv = svd.singularValues();
      const Index rank = (sv.array() > 1e-8 * sv(0)).count();
      led.check(rank == p * (4 * n - 2 * p + 1),
                "tangent rank n=" + std::to_string(n) + " p=" + std::to_string(p) + " got " + std::to_string(rank));
    }
  }
}

// 5. Riemannian gradient against finite differences along the retraction.
void gradient_suite(Ledger& led) {
  const EigProblem prob = generate_problem(30, 4, 1005);
  const ManifoldContext ctx = make_context(prob);
  const EigObjective obj(prob);
  Rng rng(1005);
  const double h = 1e-4;
  for (int t = 0; t < 20; ++t) {
    const QuatMatrix x = random_point(ctx, rng);
    const TangentVector xi = random_tangent(ctx, x, rng);
    const TangentVector g = egrad_to_rgrad(ctx, x, obj.egrad(x));
    const double exact = inner(ctx, x, g, xi);
    const double fp = obj.cost(retract(ctx, x, {xi.base, h * xi.value}));
    const double fm = obj.cost(retract(ctx, x, {xi.base, -h * xi.value}));
    led.bound(rel((fp - fm) / (2 * h), exact), 1e-4, "directional derivative");
  }
  led.note("central differences with step 1e-4");
}

// 6. Desk-scale eigenproblem run.
void desk_scale_suite(Ledger& led) {
  const EigProblem prob = generate_problem(100, 5, 7);
  const ManifoldContext ctx = make_context(prob);
  const EigObjective obj(prob);
  Rng rng(42);
  const QuatMatrix x0 = random_point(ctx, rng);
  const double na = frobenius_norm(prob.A);

  SolverConfig cg_cfg;
  cg_cfg.max_iters = 1000;
  cg_cfg.grad_tol = 1e-6;
  const SolveReport cg = solve_cg(ctx, obj, x0, cg_cfg);
  led.check(cg.converged, "CG reaches 1e-6 within 1000 iterations (" + cg.message + ")");

  SolverConfig sd_cfg;
  sd_cfg.max_iters = 2000;
  sd_cfg.grad_tol = 1e-3;
  const SolveReport sd = solve_sd(ctx, obj, x0, sd_cfg);
  led.check(sd.converged, "SD reaches 1e-3 within 2000 iterations (" + sd.message + ")");
  bool monotone = true;
  for (std::size_t k = 1; k < sd.trace.size(); ++k) monotone = monotone && sd.trace[k].cost <= sd.trace[k - 1].cost;
  led.check(monotone, "SD cost non-increasing");

  const ResidualTriple r = residuals(prob, cg.x);
  led.bound(r.feasibility, 1e-10, "feasibility");
  led.bound(r.offdiag, 1e-5 * na, "off-diagonal");
  led.bound(r.eigres, 1e-4 * na, "eigres");

  const Eigenpairs ep = extract_eigenpairs(prob, cg.x);
  std::vector<double> found = ep.lambdas;
  std::sort(found.begin(), found.end());
  const std::vector<double> oc = oracle_eigs(prob);
  for (std::size_t i = 0; i < found.size(); ++i) {
    led.bound(std::abs(found[i] - oc[i]) / na, 1e-6, "eigenvalue " + std::to_string(i) + " vs oracle");
  }

  std::ostringstream os;
  os << "CG " << cg.iterations() << " iterations, SD " << sd.iterations()
     << " iterations; residuals " << r.feasibility << " / " << r.offdiag << " / " << r.eigres;
  led.note(os.str());
}

struct Command {
  int status;
  std::string output;
};

Command run(const std::string& cmd) {
  Command out{-1, {}};
  FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
  if (pipe == nullptr) return out;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe) != nullptr) out.output += buf;
  const int raw = pclose(pipe);
  out.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return out;
}

std::string first_data_row(const fs::path& csv) {
  std::ifstream is(csv);
  std::string header, row;
  std::getline(is, header);
  std::getline(is, row);
  return row;
}

// 7. CLI round trip.
void cli_suite(Ledger& led) {
  const std::string cli = QSTIEFEL_CLI_PATH;
  const fs::path dir = fs::temp_directory_path() / "qstiefel_acceptance_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path prob = dir / "prob";
  auto q = [](const fs::path& p) { return "'" + p.string() + "'"; };

  const Command gen = run(cli + " generate --n 100 --p 5 --seed 7 --out " + q(prob));
  led.check(gen.status == 0, "generate exit " + std::to_string(gen.status) + ": " + gen.output);

  const Command cg = run(cli + " solve --problem " + q(prob) + " --algorithm cg --seed 42 --max-iters 1000 --trace " +
                         q(dir / "cg.csv") + " --out-x " + q(dir / "X_cg.qmat") + " --plot-script " +
                         q(dir / "cg.gp"));
  led.check(cg.status == 0, "solve cg exit " + std::to_string(cg.status) + ": " + cg.output);

  // SD only needs to share the initial row; its exit status reflects convergence.
  const Command sd = run(cli + " solve --problem " + q(prob) + " --algorithm sd --seed 42 --max-iters 25 --trace " +
                         q(dir / "sd.csv") + " --out-x " + q(dir / "X_sd.qmat"));
  led.check(sd.status == 0 || sd.status == 1, "solve sd exit " + std::to_string(sd.status) + ": " + sd.output);
  const std::string row_cg = first_data_row(dir / "cg.csv");
  const std::string row_sd = first_data_row(dir / "sd.csv");
  led.check(!row_cg.empty() && row_cg == row_sd, "first trace rows differ: '" + row_cg + "' vs '" + row_sd + "'");
  led.check(fs::exists(dir / "cg.gp"), "plot script written");

  const Command chk = run(cli + " check --problem " + q(prob) + " --x " + q(dir / "X_cg.qmat"));
  led.check(chk.status == 0, "check exit " + std::to_string(chk.status) + ": " + chk.output);

  const Command orc = run(cli + " oracle --problem " + q(prob) + " --k 5");
  led.check(orc.status == 0, "oracle exit " + std::to_string(orc.status) + ": " + orc.output);

  // Cross-check the printed eigenvalues against the solver's iterate.
  try {
    const EigProblem loaded = load_problem(prob);
    std::vector<double> found = extract_eigenpairs(loaded, load_qmat(dir / "X_cg.qmat")).lambdas;
    std::sort(found.begin(), found.end());
    std::istringstream is(orc.output);
    const double na = frobenius_norm(loaded.A);
    for (double v : found) {
      double printed = 0.0;
      led.check(static_cast<bool>(is >> printed), "oracle output too short");
      led.bound(std::abs(printed - v) / na, 1e-6, "oracle output vs solve");
    }
  } catch (const std::exception& e) {
    led.check(false, std::string("cross-check: ") + e.what());
  }
  fs::remove_all(dir);
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "algebra identities", 5.0, algebra_suite},
      {2, "factorizations (eigh, sqrt_pd, qf)", 30.0, factorization_suite},
      {3, "Sylvester solver", 0.0, sylvester_suite},
      {4, "geometry (projection, retraction, transport, dimension)", 0.0, geometry_suite},
      {5, "Riemannian gradient vs finite differences", 0.0, gradient_suite},
      {6, "desk-scale eigenproblem n=100 p=5", 120.0, desk_scale_suite},
      {7, "CLI round trip", 180.0, cli_suite},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const Criterion& c : criteria) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    Ledger led;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(led);
    } catch (const std::exception& e) {
      led.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.time_limit_s > 0.0) {
      led.check(secs < c.time_limit_s, "runtime " + std::to_string(secs) + " s over limit");
    }
    const bool ok = led.passed();
    failed += ok ? 0 : 1;
    std::printf("%s criterion %d: %s (%.2f s", ok ? "PASS" : "FAIL", c.id, c.title, secs);
    if (c.time_limit_s > 0.0) std::printf(", limit %.0f s", c.time_limit_s);
    std::printf(") %s\n", led.summary().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
