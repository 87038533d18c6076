#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <span>
#include <sstream>

#include "twophase/amg.hpp"
#include "twophase/errors.hpp"
#include "twophase/gmres.hpp"
#include "twophase/scenario.hpp"
#include "twophase/study.hpp"

namespace py = pybind11;
using namespace twophase;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

template <typename T>
py::array_t<T> copy_array(std::span<const T> v) {
  py::array_t<T> out(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<double> to_array(const std::vector<double>& v) { return copy_array<double>(v); }

std::vector<double> to_vector(const Array& a) { return {a.data(), a.data() + a.size()}; }

PreconditionerKind kind_from(const std::string& name) {
  const auto k = parse_preconditioner_kind(name);
  if (!k) throw ValidationError("unknown preconditioner '" + name + "'");
  return *k;
}

py::dict metrics_dict(const SolveMetrics& m) {
  py::dict d;
  d["NI"] = m.total_newton;
  d["LI"] = m.total_linear;
  d["li_per_ni"] = m.li_per_ni();
  d["ni_per_step"] = m.ni_per_step();
  d["converged"] = m.converged;
  d["failure_reason"] = m.failure_reason;
  d["step_cut_count"] = m.step_cut_count;
  d["floor_limited_solves"] = m.floor_limited_solves;
  d["wall_seconds"] = m.wall_seconds;
  d["amg_operator_complexity"] = m.amg_operator_complexity;
  py::list steps;
  for (const auto& s : m.steps) {
    py::dict st;
    st["time"] = s.time;
    st["dt"] = s.dt;
    st["newton_iterations"] = s.newton_iterations;
    st["linear_iterations"] = s.linear_iterations;
    st["linear_per_newton"] = s.linear_per_newton;
    st["residual_norms"] = s.residual_norms;
    st["cut"] = s.cut;
    steps.append(st);
  }
  d["steps"] = steps;
  return d;
}

py::tuple csr_tuple(const SparseMatrix& a) {
  return py::make_tuple(copy_array(a.row_ptr()), copy_array(a.col_idx()), copy_array(a.values()),
                        py::make_tuple(a.rows(), a.cols()));
}

SparseMatrix from_csr(int n, py::array_t<int, py::array::c_style | py::array::forcecast> indptr,
                      py::array_t<int, py::array::c_style | py::array::forcecast> indices, const Array& data) {
  return SparseMatrix(n, n, {indptr.data(), indptr.data() + indptr.size()},
                      {indices.data(), indices.data() + indices.size()}, to_vector(data));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Two-phase porous media flow solver core";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  py::class_<Scenario>(m, "Scenario")
      .def_readwrite("name", &Scenario::name)
      .def_readwrite("dt", &Scenario::dt)
      .def_readwrite("t_final", &Scenario::t_final)
      .def_readwrite("initial_p_w", &Scenario::initial_p_w)
      .def_readwrite("initial_s_n", &Scenario::initial_s_n)
      .def_property_readonly("shape", [](const Scenario& s) { return py::make_tuple(s.grid.nx, s.grid.ny, s.grid.nz); })
      .def_property_readonly("num_cells", [](const Scenario& s) { return s.grid.nx * s.grid.ny * s.grid.nz; })
      .def_property(
          "method", [](const Scenario& s) { return std::string(to_string(s.preconditioner.kind)); },
          [](Scenario& s, const std::string& name) { s.preconditioner.kind = kind_from(name); })
      .def("validate", &Scenario::validate)
      .def("to_config",
           [](const Scenario& s) {
             std::ostringstream out;
             write_scenario(out, s);
             return out.str();
           })
      .def("__eq__", [](const Scenario& a, const Scenario& b) { return a == b; })
      .def("__repr__", [](const Scenario& s) { return "<Scenario '" + s.name + "'>"; });

  m.def("load_scenario", &load_scenario, py::arg("path"), "Read a scenario configuration file.");
  m.def(
      "parse_scenario",
      [](const std::string& text) {
        std::istringstream in(text);
        return parse_scenario(in);
      },
      py::arg("text"), "Parse scenario configuration text.");

  m.def(
      "run",
      [](const Scenario& s, const std::optional<std::string>& method) {
        State final_state;
        SolveMetrics metrics;
        {
          py::gil_scoped_release release;
          metrics = run_with_method(s, method ? kind_from(*method) : s.preconditioner.kind, &final_state);
        }
        py::dict d = metrics_dict(metrics);
        d["p_w"] = to_array(final_state.p_w);
        d["s_n"] = to_array(final_state.s_n);
        return d;
      },
      py::arg("scenario"), py::arg("method") = py::none(),
      "Simulate a scenario; returns metrics and the final p_w and s_n arrays.");

  m.def(
      "residual",
      [](const Scenario& s, const Array& p_w, const Array& s_n, const Array& p_old, const Array& s_old) {
        const TwoPhaseProblem pb = build_problem(s);
        const State now{to_vector(p_w), to_vector(s_n)}, old{to_vector(p_old), to_vector(s_old)};
        return to_array(assemble_residual(pb, now, old, s.dt, Ordering::VariableBlocked));
      },
      py::arg("scenario"), py::arg("p_w"), py::arg("s_n"), py::arg("p_w_old"), py::arg("s_n_old"),
      "Backward-Euler residual over one scenario time step, variable-blocked.");

  m.def(
      "jacobian",
      [](const Scenario& s, const Array& p_w, const Array& s_n, const Array& p_old, const Array& s_old) {
        const TwoPhaseProblem pb = build_problem(s);
        const State now{to_vector(p_w), to_vector(s_n)}, old{to_vector(p_old), to_vector(s_old)};
        return csr_tuple(assemble_jacobian(pb, now, old, s.dt, Ordering::VariableBlocked).coupled());
      },
      py::arg("scenario"), py::arg("p_w"), py::arg("s_n"), py::arg("p_w_old"), py::arg("s_n_old"),
      "Exact Jacobian as (indptr, indices, data, shape), variable-blocked.");

  m.def(
      "capture_jacobian",
      [](const Scenario& s, int newton_index) { return csr_tuple(capture_jacobian(s, newton_index).coupled()); },
      py::arg("scenario"), py::arg("newton_index"), "Jacobian of the first step at a Newton iteration.");

  m.def(
      "spectrum",
      [](const Scenario& s, int newton_index, const std::string& method) {
        const BlockJacobian jac = capture_jacobian(s, newton_index);
        return preconditioned_spectrum(jac, s, kind_from(method));
      },
      py::arg("scenario"), py::arg("newton_index"), py::arg("method"),
      "Eigenvalues of J M^-1 with exact inner solves, sorted by modulus.");

  m.def(
      "amg_solve",
      [](py::array_t<int, py::array::c_style | py::array::forcecast> indptr,
         py::array_t<int, py::array::c_style | py::array::forcecast> indices, const Array& data, const Array& b,
         double rel_tol, int num_functions) {
        const int n = static_cast<int>(b.size());
        const SparseMatrix a = from_csr(n, indptr, indices, data);
        AmgOptions opt;
        opt.num_functions = num_functions;
        const AmgHierarchy amg(a, opt);
        GmresOptions go;
        go.rel_tol = rel_tol;
        const GmresResult r = gmres(MatrixOperator(a), to_vector(b), &amg, go);
        py::dict d;
        d["x"] = to_array(r.x);
        d["iterations"] = r.stats.iterations;
        d["converged"] = r.stats.converged;
        d["relative_residual"] = r.stats.final_relative_residual;
        d["levels"] = amg.num_levels();
        d["operator_complexity"] = amg.operator_complexity();
        return d;
      },
      py::arg("indptr"), py::arg("indices"), py::arg("data"), py::arg("b"), py::arg("rel_tol") = 1e-10,
      py::arg("num_functions") = 1, "GMRES preconditioned by one AMG V-cycle on a square CSR matrix.");

  m.def("harmonic_face_permeability", &harmonic_face_permeability, py::arg("k_i"), py::arg("k_j"),
        py::arg("dx_i"), py::arg("dx_j"));

  m.attr("METHODS") = py::make_tuple("amg", "cpr-amg1", "cpr-amg2", "bf", "exact");
}
