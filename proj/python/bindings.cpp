#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "thinobs/closed_forms.hpp"
#include "thinobs/frontier.hpp"
#include "thinobs/grushin.hpp"
#include "thinobs/hodograph.hpp"
#include "thinobs/solver.hpp"
#include "thinobs/spectral.hpp"

namespace py = pybind11;
using namespace thinobs;

namespace {

template <class T>
py::array_t<T> to_array(const std::vector<T>& v) {
  return py::array_t<T>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::array_t<bool> mask_array(const std::vector<char>& v) {
  py::array_t<bool> out(static_cast<py::ssize_t>(v.size()));
  auto m = out.mutable_unchecked<1>();
  for (std::size_t k = 0; k < v.size(); ++k) m(k) = v[k] != 0;
  return out;
}

}  // namespace

PYBIND11_MODULE(thinobs, m) {
  m.doc() = "Thin obstacle problem: closed forms, solver, hodograph and Grushin diagnostics";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result([&]() { return py::object(py::exception<Error>(m, "Error")); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const py::object& cls = error_type.get_stored();
      py::object inst = cls(e.what());
      inst.attr("code") = to_string(e.code());
      PyErr_SetObject(cls.ptr(), inst.ptr());
    }
  });

  py::class_<HalfPoint>(m, "HalfPoint")
      .def(py::init<double, double>(), py::arg("x_n"), py::arg("x_np1"))
      .def(py::init<std::vector<double>, double, double>(), py::arg("x_tan"), py::arg("x_n"), py::arg("x_np1"))
      .def_readonly("x_tan", &HalfPoint::x_tan)
      .def_readonly("x_n", &HalfPoint::x_n)
      .def_readonly("x_np1", &HalfPoint::x_np1)
      .def("__repr__", [](const HalfPoint& p) {
        return "HalfPoint(x_n=" + std::to_string(p.x_n) + ", x_np1=" + std::to_string(p.x_np1) + ")";
      });

  py::class_<QuarterPoint>(m, "QuarterPoint")
      .def(py::init<double, double>(), py::arg("y_n"), py::arg("y_np1"))
      .def(py::init<std::vector<double>, double, double>(), py::arg("y_tan"), py::arg("y_n"), py::arg("y_np1"))
      .def_readonly("y_tan", &QuarterPoint::y_tan)
      .def_readonly("y_n", &QuarterPoint::y_n)
      .def_readonly("y_np1", &QuarterPoint::y_np1);

  // closed forms
  m.def("eval_w0s", [](double s, double xn, double xp) { return eval_w0s(s, HalfPoint(xn, xp)); });
  m.def("eval_w1s", [](double s, double xn, double xp) { return eval_w1s(s, HalfPoint(xn, xp)); });
  m.def("eval_v_model", [](double s, double yn, double yp) { return eval_v_model(s, yn, yp); });
  m.def("grad_w1s", [](double s, double xn, double xp) {
    const auto g = grad_w1s(s, HalfPoint(xn, xp));
    return py::make_tuple(g.d_n, g.weighted_dnp1);
  });
  m.def("apply_Ls_w1s", [](double s, double xn, double xp) {
    return apply_Ls(w1s_t(s, Jet3::variable(xn, kNor), Jet3::variable(xp, kVert)), xp, s);
  });

  // spectral
  m.def("eigenvalue", [](int k, double s) { return eigenvalue(k, s); });
  m.def("hypergeom_coeffs", [](int k, double s) { return hypergeom_coeffs(k, s); });
  m.def("eval_mode_2d", [](int k, double s, double xn, double xp) { return eval_mode_2d(make_mode(k, s), xn, xp); });
  m.def("sl_eigen_oracle", [](double s, int grid, int count) { return sl_eigen_oracle(s, grid, count); },
        py::arg("s"), py::arg("grid_size"), py::arg("count"));

  // solver
  py::class_<WeightedGrid>(m, "WeightedGrid")
      .def_readonly("n", &WeightedGrid::n)
      .def_readonly("h", &WeightedGrid::h)
      .def_readonly("s", &WeightedGrid::s)
      .def_property_readonly("shape", [](const WeightedGrid& g) {
        return py::make_tuple(g.count_vert(), g.count_nor(), g.count_tan());
      })
      .def("point", [](const WeightedGrid& g, std::size_t k) { return g.point(k); });
  m.def("make_grid", [](int n, double h, double s) { return make_grid(n, h, s); }, py::arg("n"), py::arg("h"),
        py::arg("s"));

  py::class_<DiscreteSolution>(m, "DiscreteSolution")
      .def_readonly("grid", &DiscreteSolution::grid)
      .def_property_readonly("values", [](const DiscreteSolution& d) { return to_array(d.values); })
      .def_property_readonly("flux", [](const DiscreteSolution& d) { return to_array(d.flux); })
      .def_property_readonly("contact_mask", [](const DiscreteSolution& d) { return mask_array(d.contact_mask); })
      .def_readonly("energy", &DiscreteSolution::energy)
      .def_readonly("comp_residual", &DiscreteSolution::comp_residual)
      .def_readonly("iterations", &DiscreteSolution::iterations)
      .def_readonly("omega", &DiscreteSolution::omega);

  m.def(
      "solve_vi",
      [](const WeightedGrid& grid, const PointFn& dirichlet, std::optional<PointFn> obstacle, std::optional<PointFn> f,
         double tol, int max_iter, std::optional<double> omega) {
        ProblemSpec spec;
        spec.grid = grid;
        spec.dirichlet = dirichlet;
        if (obstacle) spec.obstacle = *obstacle;
        if (f) spec.f = *f;
        SolveOptions o;
        if (omega)
          o.omega = *omega;
        else
          o.auto_omega = true;
        return solve_vi(spec, tol, max_iter, o);
      },
      py::arg("grid"), py::arg("dirichlet"), py::arg("obstacle") = py::none(), py::arg("f") = py::none(),
      py::arg("tol") = 1e-9, py::arg("max_iter") = 400000, py::arg("omega") = py::none());
  m.def("solve_model", [](double s, double h, double tol) {
    ProblemSpec spec;
    spec.grid = make_grid(1, h, s);
    spec.obstacle = [](const HalfPoint&) { return 0.0; };
    spec.dirichlet = [s](const HalfPoint& x) { return eval_w1s(s, x); };
    SolveOptions o;
    o.auto_omega = true;
    return solve_vi(spec, tol, 400000, o);
  }, py::arg("s"), py::arg("h"), py::arg("tol") = 1e-9);
  m.def("sample_solution", [](const WeightedGrid& g, const PointFn& f) { return sample_solution(g, f); });
  m.def("complementarity_report", [](const DiscreteSolution& d) {
    const auto r = complementarity_report(d);
    return py::make_tuple(r.max_violation, r.max_positive_flux, r.max_product);
  });

  // frontier
  m.def("extract_free_boundary", &extract_free_boundary);
  py::class_<FreeBoundaryFit>(m, "FreeBoundaryFit")
      .def_readonly("x0", &FreeBoundaryFit::x0)
      .def_readonly("nu", &FreeBoundaryFit::nu)
      .def_readonly("c", &FreeBoundaryFit::c)
      .def_readonly("window_radii", &FreeBoundaryFit::window_radii)
      .def_readonly("residuals", &FreeBoundaryFit::residuals)
      .def_readonly("remainder_exponent", &FreeBoundaryFit::remainder_exponent);
  m.def("fit_expansion", [](const DiscreteSolution& d, const HalfPoint& x0) { return fit_expansion(d, x0); });
  m.def("flat_barrier_constant", [](double s, double tau, bool upper, int samples, std::uint64_t seed) {
    const auto b = build_barrier(ThinGraph{}, 1, s, tau, upper ? BarrierSign::Upper : BarrierSign::Lower);
    return subsolution_check(b, barrier_samples(b, samples, seed, 0.5, 0.05, 0.5));
  }, py::arg("s"), py::arg("tau"), py::arg("upper") = false, py::arg("samples") = 1000, py::arg("seed") = 1);

  // hodograph
  py::class_<LegendreField>(m, "LegendreField")
      .def_readonly("s", &LegendreField::s)
      .def_readonly("extent", &LegendreField::extent)
      .def_readonly("count", &LegendreField::count)
      .def_property_readonly("spacing", &LegendreField::spacing)
      .def_property_readonly("v", [](const LegendreField& f) { return to_array(f.v); })
      .def_property_readonly("x_n", [](const LegendreField& f) { return to_array(f.x_n); })
      .def_property_readonly("x_np1", [](const LegendreField& f) { return to_array(f.x_np1); });
  m.def("legendre_function", [](const DiscreteSolution& d) { return legendre_function(d); });
  m.def("model_legendre_field", [](double s) { return model_legendre_field(s); });
  m.def("eval_F_model", [](double s, double yn, double yp, std::optional<double> a_n, std::optional<double> a_np1) {
    const JetFn v = a_n && a_np1 ? v_model_jet(s, *a_n, *a_np1) : v_model_jet(s);
    const auto r = eval_F(v, 0.0, yn, yp, s, 1);
    return py::make_tuple(r.F, r.J);
  }, py::arg("s"), py::arg("y_n"), py::arg("y_np1"), py::arg("a_n") = py::none(), py::arg("a_np1") = py::none());
  m.def("diffeo_flow", [](std::vector<double> a, const QuarterPoint& y, int steps) { return diffeo_flow(a, y, steps); },
        py::arg("a"), py::arg("y"), py::arg("steps") = 64);

  // grushin
  m.def("quasi_metric", &quasi_metric);
  m.def("dilate", &dilate);
  m.def("quasi_triangle_constant", &quasi_triangle_constant, py::arg("n"), py::arg("triples"), py::arg("seed") = 1);
  m.def("delta_Gs_v_model", [](double s, double yn, double yp) {
    return delta_Gs(v_model_jet(s), 0.0, yn, yp, s);
  });
}
