#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "phikit/diagnostics.hpp"
#include "phikit/errors.hpp"
#include "phikit/hj_phi.hpp"
#include "phikit/verification.hpp"

namespace py = pybind11;
using namespace phikit;

namespace {

Mat stack(const std::vector<Vec>& rows, int dim) {
  Mat m(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return m;
}

py::dict record_dict(const TrajectoryRecord& rec, int dim) {
  std::vector<double> H, iters, residual;
  std::vector<std::vector<double>> C;
  for (const auto& d : rec.per_step) {
    H.push_back(d.hamiltonian);
    C.push_back(d.casimirs);
    iters.push_back(d.solver_iters);
    residual.push_back(d.residual);
  }
  py::dict out;
  out["times"] = rec.times;
  out["states"] = stack(rec.states, dim);
  out["hamiltonian"] = H;
  out["casimirs"] = C;
  out["solver_iters"] = iters;
  out["residual"] = residual;
  out["termination"] = to_string(rec.termination);
  out["termination_time"] = rec.termination_time;
  out["message"] = rec.message;
  return out;
}

const BiRealisation& require_bireal(const SystemSpec& s) {
  if (!s.bireal) throw ConfigError(s.name + " has no bi-realisation");
  return *s.bireal;
}

SolverOptions solver_opts(double tol, int max_iter, bool newton) { return {tol, max_iter, newton}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Poisson Hamiltonian integrators";

  static py::exception<StepTooLargeError> step_too_large(m, "StepTooLargeError", PyExc_RuntimeError);
  static py::exception<BlowUpError> blow_up(m, "BlowUpError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const StepTooLargeError& e) {
      step_too_large(e.what());
    } catch (const BlowUpError& e) {
      blow_up(e.what());
    }
  });

  py::class_<SystemSpec>(m, "System")
      .def_readonly("name", &SystemSpec::name)
      .def_readonly("default_x0", &SystemSpec::default_x0)
      .def_readonly("notes", &SystemSpec::notes)
      .def_property_readonly("dim", [](const SystemSpec& s) { return s.system.dim(); })
      .def_property_readonly("has_birealisation", [](const SystemSpec& s) { return s.bireal.has_value(); })
      .def_property_readonly("orientation",
                             [](const SystemSpec& s) -> py::object {
                               if (!s.bireal) return py::none();
                               return py::str(to_string(s.bireal->orientation));
                             })
      .def("hamiltonian", [](const SystemSpec& s, const Vec& x) { return s.system.hamiltonian(x); })
      .def("hamiltonian_gradient", [](const SystemSpec& s, const Vec& x) { return s.system.hamiltonian.grad(x); })
      .def("tensor", [](const SystemSpec& s, const Vec& x) { return s.system.tensor(x); })
      .def("vector_field", [](const SystemSpec& s, const Vec& x) { return hamiltonian_vector_field(s.system, x); })
      .def("casimirs",
           [](const SystemSpec& s, const Vec& x) {
             std::vector<double> out;
             for (const auto& c : s.system.casimirs) out.push_back(c(x));
             return out;
           })
      .def("jacobi_residual", [](const SystemSpec& s, const Vec& x) { return jacobi_residual(s.system, x); })
      .def("__repr__", [](const SystemSpec& s) { return "<phikit.System " + s.name + ">"; });

  m.def("catalog_names", &catalog_names);
  m.def("system", &system_by_name, py::arg("name"));
  m.def("lotka_volterra3", &lotka_volterra3);
  m.def("harmonic_oscillator", &harmonic_oscillator);
  m.def("quad_example", &quad_example);
  m.def(
      "rigid_body",
      [](std::optional<Vec> J_diag, std::optional<Vec> x0) {
        if (!J_diag && !x0) return rigid_body();
        const Mat J = J_diag ? Mat(J_diag->asDiagonal()) : default_inertia();
        return rigid_body(J, x0 ? *x0 : Vec(Vec::Ones(3)));
      },
      py::arg("J_diag") = py::none(), py::arg("x0") = py::none());

  m.def(
      "simulate",
      [](const SystemSpec& s, const std::string& method, double dt, long steps, std::optional<Vec> x0,
         double fp_tol, int fp_max_iter, bool newton_fallback) {
        const TrajectoryRecord rec = [&] {
          py::gil_scoped_release release;
          return run_method(s, parse_method(method), x0 ? *x0 : s.default_x0, dt, steps,
                            solver_opts(fp_tol, fp_max_iter, newton_fallback));
        }();
        return record_dict(rec, s.system.dim());
      },
      py::arg("system"), py::arg("method"), py::arg("dt"), py::arg("steps"), py::arg("x0") = py::none(),
      py::arg("fp_tol") = 1e-14, py::arg("fp_max_iter") = 100, py::arg("newton_fallback") = true);

  m.def(
      "step",
      [](const SystemSpec& s, const std::string& method, const Vec& x, double h) {
        return make_step(s, parse_method(method), h)(x).x;
      },
      py::arg("system"), py::arg("method"), py::arg("x"), py::arg("h"));

  m.def(
      "reference_solution",
      [](const SystemSpec& s, double T, std::optional<Vec> x0, int n_checkpoints, double tol) {
        ReferenceOptions o;
        o.tol = tol;
        const ReferenceSolution r = [&] {
          py::gil_scoped_release release;
          return reference_solution(s.system, x0 ? *x0 : s.default_x0, T, n_checkpoints, o);
        }();
        py::dict out;
        out["times"] = r.times;
        out["states"] = stack(r.states, s.system.dim());
        out["converged"] = r.converged;
        out["steps"] = r.steps;
        out["agreement"] = r.agreement;
        out["blew_up"] = r.blew_up;
        out["last_finite_time"] = r.last_finite_time;
        return out;
      },
      py::arg("system"), py::arg("T"), py::arg("x0") = py::none(), py::arg("n_checkpoints") = 1,
      py::arg("tol") = 1e-12);

  m.def(
      "convergence",
      [](const SystemSpec& s, const std::string& method, double T, std::vector<double> h_list,
         std::optional<Vec> x0, int threads) {
        const ConvergenceReport r = [&] {
          py::gil_scoped_release release;
          return convergence_report(s, parse_method(method), x0 ? *x0 : s.default_x0, T, h_list,
                                    threads > 0 ? threads : threads_from_env());
        }();
        py::dict out;
        out["h_values"] = r.h_values;
        out["errors"] = r.errors;
        out["status"] = r.status;
        out["slope"] = r.fitted_slope;
        out["ci"] = r.slope_ci;
        return out;
      },
      py::arg("system"), py::arg("method"), py::arg("T"), py::arg("h_list"), py::arg("x0") = py::none(),
      py::arg("threads") = 0);

  m.def(
      "verify",
      [](const SystemSpec& s, std::uint64_t seed) {
        VerifyOptions o;
        o.seed = seed;
        const VerifyReport r = verify_system(s, o);
        py::list checks;
        for (const auto& c : r.checks) {
          py::dict d;
          d["name"] = c.name;
          d["value"] = c.value;
          d["threshold"] = c.threshold;
          d["pass"] = c.pass;
          d["detail"] = c.detail;
          checks.append(d);
        }
        py::dict out;
        out["system"] = r.system;
        out["checks"] = checks;
        out["all_pass"] = r.all_pass();
        return out;
      },
      py::arg("system"), py::arg("seed") = 0);

  m.def(
      "series_value",
      [](const SystemSpec& s, int i, const Vec& x) {
        return compute_series(s.system, require_bireal(s), i).value(i, x);
      },
      py::arg("system"), py::arg("i"), py::arg("x"));
  m.def(
      "series_gradient",
      [](const SystemSpec& s, int i, const Vec& x) {
        return compute_series(s.system, require_bireal(s), i).gradient(i, x);
      },
      py::arg("system"), py::arg("i"), py::arg("x"));
  m.def(
      "closed_form_S2", [](const SystemSpec& s, const Vec& x) { return closed_form_S2(s.system, require_bireal(s), x); },
      py::arg("system"), py::arg("x"));
  m.def(
      "closed_form_S3", [](const SystemSpec& s, const Vec& x) { return closed_form_S3(s.system, require_bireal(s), x); },
      py::arg("system"), py::arg("x"));

  m.def(
      "phi_poisson_residual",
      [](const SystemSpec& s, int order, double dt, const Vec& x) {
        const PhiStepper st(s.system, require_bireal(s), StepperConfig{dt, order});
        return poisson_map_residual(s.system, as_discrete_map(st), x);
      },
      py::arg("system"), py::arg("order"), py::arg("dt"), py::arg("x"));

  m.def("leaf_breaking_map", &leaf_breaking_map, py::arg("x"), py::arg("dt"), py::arg("k"));
  m.def(
      "leaf_breaking_residual",
      [](const Vec& x, double dt, int k) {
        const DiscreteMap map{3, [dt, k](const Vec& y) { return leaf_breaking_map(y, dt, k); }};
        return poisson_map_residual(quad_example().system, map, x, 1e-6);
      },
      py::arg("x"), py::arg("dt"), py::arg("k"));
}
