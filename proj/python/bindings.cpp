// Python bindings. Quaternion matrices cross the boundary as float64 arrays of
// shape (4, rows, cols): component planes w, x, y, z.

#include <pybind11/pybind11.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>

#include "qstiefel/eigapp.hpp"
#include "qstiefel/errors.hpp"
#include "qstiefel/linalg.hpp"
#include "qstiefel/manifold.hpp"
#include "qstiefel/qmat_io.hpp"
#include "qstiefel/solvers.hpp"

namespace py = pybind11;
using namespace qstiefel;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

QuatMatrix to_quat(const Array& a) {
  if (a.ndim() != 3 || a.shape(0) != 4) {
    throw ShapeError("expected an array of shape (4, rows, cols)");
  }
  const Index rows = a.shape(1);
  const Index cols = a.shape(2);
  QuatMatrix out(rows, cols);
  auto v = a.unchecked<3>();
  for (int l = 0; l < 4; ++l)
    for (Index r = 0; r < rows; ++r)
      for (Index c = 0; c < cols; ++c) out.comp(l)(r, c) = v(l, r, c);
  return out;
}

Array to_array(const QuatMatrix& m) {
  Array out({Index{4}, m.rows(), m.cols()});
  auto v = out.mutable_unchecked<3>();
  for (int l = 0; l < 4; ++l)
    for (Index r = 0; r < m.rows(); ++r)
      for (Index c = 0; c < m.cols(); ++c) v(l, r, c) = m.comp(l)(r, c);
  return out;
}

py::array_t<double> trace_array(const std::vector<TraceRow>& trace) {
  py::array_t<double> out({static_cast<py::ssize_t>(trace.size()), py::ssize_t{5}});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const auto i = static_cast<py::ssize_t>(k);
    v(i, 0) = trace[k].iter;
    v(i, 1) = trace[k].elapsed_s;
    v(i, 2) = trace[k].cost;
    v(i, 3) = trace[k].grad_norm;
    v(i, 4) = trace[k].step_size;
  }
  return out;
}

ProjectionPath parse_path(const std::string& s) {
  if (s == "auto") return ProjectionPath::Auto;
  if (s == "general") return ProjectionPath::General;
  throw ContractError("path must be 'auto' or 'general'");
}

}  // namespace

PYBIND11_MODULE(_qstiefel, m) {
  m.doc() = "Riemannian optimization on the generalized quaternionic Stiefel manifold";

  // Later registrations are tried first, so subclasses shadow the base.
  const auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ShapeError>(m, "ShapeError", base);
  py::register_exception<ContractError>(m, "ContractError", base);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base);
  py::register_exception<RankError>(m, "RankError", base);
  py::register_exception<OracleError>(m, "OracleError", base);
  py::register_exception<ParseError>(m, "ParseError", base);

  // quaternion matrix algebra
  m.def("matmul", [](const Array& a, const Array& b) { return to_array(to_quat(a) * to_quat(b)); });
  m.def("adjoint", [](const Array& a) { return to_array(hermitian_conjugate(to_quat(a))); });
  m.def("her", [](const Array& a) { return to_array(her_part(to_quat(a))); });
  m.def("skew", [](const Array& a) { return to_array(skew_part(to_quat(a))); });
  m.def("re_trace_inner", [](const Array& a, const Array& b) { return re_trace_inner(to_quat(a), to_quat(b)); },
        "re(tr(A^H B))");
  m.def("complex_adjoint", [](const Array& a) { return complex_adjoint(to_quat(a)); },
        "2n x 2m complex matrix [[A0 + A1 i, A2 + A3 i], [-conj(A2 + A3 i), conj(A0 + A1 i)]]");
  m.def("load_qmat", [](const std::filesystem::path& p) { return to_array(load_qmat(p)); });
  m.def("save_qmat", [](const std::filesystem::path& p, const Array& a) { save_qmat(p, to_quat(a)); });

  // factorizations
  m.def("eigh", [](const Array& a) {
    const EigDecomposition e = eigh(to_quat(a));
    return py::make_tuple(e.values, to_array(e.vectors));
  }, "Hermitian eigendecomposition; returns (ascending eigenvalues, eigenvectors)");
  m.def("sqrt_pd", [](const Array& g) {
    const SqrtPd f = sqrt_pd(to_quat(g));
    return py::make_tuple(to_array(f.sqrt), to_array(f.inv_sqrt));
  }, "returns (G^{1/2}, G^{-1/2})");
  m.def("qf", [](const Array& a) { return to_array(qf(to_quat(a))); });
  m.def("qr", [](const Array& a) {
    const QrResult f = qr(to_quat(a));
    return py::make_tuple(to_array(f.q), to_array(f.r));
  });
  m.def("solve_sylvester", [](const Array& k, const Array& l) {
    return to_array(solve_sylvester(to_quat(k), to_quat(l)));
  }, "S with K S + S K = L for Hermitian positive definite K and Hermitian L");

  // manifold
  py::class_<ManifoldContext>(m, "Manifold")
      .def(py::init([](const Array& g, Index p, double feas_tol, double tangent_tol) {
             ManifoldOptions opts;
             opts.feas_tol = feas_tol;
             opts.tangent_tol = tangent_tol;
             return ManifoldContext(to_quat(g), p, opts);
           }),
           py::arg("G"), py::arg("p"), py::arg("feas_tol") = 1e-8, py::arg("tangent_tol") = 1e-8)
      .def_property_readonly("n", &ManifoldContext::n)
      .def_property_readonly("p", &ManifoldContext::p)
      .def_property_readonly("dimension", &ManifoldContext::dimension)
      .def_property_readonly("G", [](const ManifoldContext& c) { return to_array(c.G()); })
      .def("feasibility", [](const ManifoldContext& c, const Array& x) {
        return feasibility_residual(c, to_quat(x));
      })
      .def("tangent_residual", [](const ManifoldContext& c, const Array& x, const Array& xi) {
        return tangent_residual(c, to_quat(x), to_quat(xi));
      })
      .def("project", [](const ManifoldContext& c, const Array& x, const Array& y, const std::string& path) {
        return to_array(project_tangent(c, to_quat(x), to_quat(y), parse_path(path)).value);
      }, py::arg("x"), py::arg("y"), py::arg("path") = "auto")
      .def("inner", [](const ManifoldContext& c, const Array& x, const Array& a, const Array& b) {
        return inner(c, to_quat(x), to_quat(a), to_quat(b));
      })
      .def("egrad_to_rgrad", [](const ManifoldContext& c, const Array& x, const Array& g) {
        return to_array(egrad_to_rgrad(c, to_quat(x), to_quat(g)).value);
      })
      .def("retract", [](const ManifoldContext& c, const Array& x, const Array& eta) {
        const QuatMatrix xq = to_quat(x);
        return to_array(retract(c, xq, make_tangent(c, xq, to_quat(eta))));
      })
      .def("transport", [](const ManifoldContext& c, const Array& x, const Array& eta, const Array& xi) {
        const QuatMatrix xq = to_quat(x);
        const Transported t = transport(c, xq, make_tangent(c, xq, to_quat(eta)), make_tangent(c, xq, to_quat(xi)));
        return py::make_tuple(to_array(t.x_next), to_array(t.vector.value));
      }, "returns (R_X(eta), transported xi)")
      .def("random_point", [](const ManifoldContext& c, std::uint64_t seed) {
        Rng rng(seed);
        return to_array(random_point(c, rng));
      }, py::arg("seed"))
      .def("random_tangent", [](const ManifoldContext& c, const Array& x, std::uint64_t seed) {
        Rng rng(seed);
        return to_array(random_tangent(c, to_quat(x), rng).value);
      }, py::arg("x"), py::arg("seed"))
      .def("complete_basis", [](const ManifoldContext& c, const Array& x) {
        return to_array(complete_basis(c, to_quat(x)));
      });

  // eigenproblem application
  py::class_<EigProblem>(m, "EigProblem")
      .def_readonly("n", &EigProblem::n)
      .def_readonly("p", &EigProblem::p)
      .def_readonly("N", &EigProblem::N)
      .def_readonly("seed", &EigProblem::seed)
      .def_property_readonly("A", [](const EigProblem& e) { return to_array(e.A); })
      .def_property_readonly("G", [](const EigProblem& e) { return to_array(e.G); })
      .def("manifold", [](const EigProblem& e) { return make_context(e); })
      .def("cost_and_egrad", [](const EigProblem& e, const Array& x) {
        const CostGrad cg = cost_and_egrad(e, to_quat(x));
        return py::make_tuple(cg.cost, to_array(cg.egrad));
      })
      .def("residuals", [](const EigProblem& e, const Array& x) {
        const ResidualTriple r = residuals(e, to_quat(x));
        return py::dict(py::arg("feasibility") = r.feasibility, py::arg("offdiag") = r.offdiag,
                        py::arg("eigres") = r.eigres);
      })
      .def("eigenpairs", [](const EigProblem& e, const Array& x) {
        const Eigenpairs ep = extract_eigenpairs(e, to_quat(x));
        return py::dict(py::arg("lambdas") = ep.lambdas, py::arg("imag_parts") = ep.imag_parts,
                        py::arg("residuals") = ep.residuals);
      })
      .def("oracle_eigs", [](const EigProblem& e) { return oracle_eigs(e); })
      .def("save", [](const EigProblem& e, const std::filesystem::path& dir) { save_problem(dir, e); });

  m.def("generate_problem", &generate_problem, py::arg("n"), py::arg("p"), py::arg("seed"));
  m.def("load_problem", &load_problem, py::arg("dir"));

  m.def("solve", [](const EigProblem& prob, const std::string& algorithm, std::uint64_t seed, int max_iters,
                    double grad_tol) {
    if (algorithm != "sd" && algorithm != "cg") throw ContractError("algorithm must be 'sd' or 'cg'");
    const ManifoldContext ctx = make_context(prob);
    const EigObjective obj(prob);
    Rng rng(seed);
    const QuatMatrix x0 = random_point(ctx, rng);
    SolverConfig cfg;
    cfg.max_iters = max_iters;
    cfg.grad_tol = grad_tol;
    SolveReport rep;
    {
      py::gil_scoped_release release;
      rep = algorithm == "sd" ? solve_sd(ctx, obj, x0, cfg) : solve_cg(ctx, obj, x0, cfg);
    }
    return py::dict(py::arg("x") = to_array(rep.x), py::arg("converged") = rep.converged,
                    py::arg("message") = rep.message, py::arg("iterations") = rep.iterations(),
                    py::arg("trace") = trace_array(rep.trace));
  }, py::arg("problem"), py::arg("algorithm") = "cg", py::arg("seed") = 0, py::arg("max_iters") = 250,
     py::arg("grad_tol") = 1e-6,
     "Run SD or CG from the random initial point drawn with `seed`. The trace has columns "
     "iter, elapsed_s, cost, grad_norm, step_size.");
}
