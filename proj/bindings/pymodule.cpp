#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "topgrad/experiments.hpp"

namespace py = pybind11;
using namespace topgrad;

PYBIND11_MODULE(_topgrad, m) {
    m.doc() = "Topological gradient descent for control-support optimization";

    py::class_<Rectangle>(m, "Rectangle")
        .def(py::init([](double lx, double ly) { return Rectangle{lx, ly}; }), py::arg("lx"),
             py::arg("ly"))
        .def_readonly("lx", &Rectangle::lx)
        .def_readonly("ly", &Rectangle::ly);

    py::class_<Mesh, std::shared_ptr<Mesh>>(m, "Mesh")
        .def_property_readonly("num_nodes", &Mesh::num_nodes)
        .def_property_readonly("num_cells", &Mesh::num_cells)
        .def_property_readonly("cell_area", &Mesh::cell_area)
        .def_property_readonly("h", &Mesh::h);

    m.def("build_mesh",
          [](double lx, double ly, int nx, int ny) {
              return std::const_pointer_cast<Mesh>(build_mesh({lx, ly}, nx, ny));
          },
          py::arg("lx"), py::arg("ly"), py::arg("nx"), py::arg("ny"));

    py::class_<CellSet>(m, "CellSet")
        .def(py::init([](std::shared_ptr<Mesh> mesh) { return CellSet(mesh); }))
        .def("insert", &CellSet::insert)
        .def("erase", &CellSet::erase)
        .def("flip", &CellSet::flip)
        .def("contains", &CellSet::contains)
        .def_property_readonly("count", &CellSet::count)
        .def_property_readonly("measure", &CellSet::measure)
        .def("cells", &CellSet::cells)
        .def_static("full",
                    [](std::shared_ptr<Mesh> mesh) { return CellSet::full(mesh); })
        .def_static("empty",
                    [](std::shared_ptr<Mesh> mesh) { return CellSet::empty(mesh); });

    m.def("symmetric_difference", &symmetric_difference);
    m.def("set_distance_l1", &set_distance_l1);

    py::class_<FieldP0>(m, "FieldP0").def_readwrite("values", &FieldP0::values);
    py::class_<FieldP1>(m, "FieldP1").def_readwrite("values", &FieldP1::values);

    py::class_<ProblemSpec>(m, "ProblemSpec")
        .def_readonly("beta", &ProblemSpec::beta)
        .def_readonly("preset_name", &ProblemSpec::preset_name);

    m.def("preset", &preset, py::arg("name"));
    m.def("hbar", &hbar);
    m.def("pointwise_minimizer", &pointwise_minimizer);

    py::class_<DiscreteOperators, std::shared_ptr<DiscreteOperators>>(m, "DiscreteOperators")
        .def("solve_state", &DiscreteOperators::solve_state)
        .def("tracking_value", &DiscreteOperators::tracking_value);

    m.def("assemble",
          [](const ProblemSpec& spec, std::shared_ptr<Mesh> mesh) {
              return std::const_pointer_cast<DiscreteOperators>(assemble(mesh, spec.pde));
          });

    py::class_<SubproblemSolution>(m, "SubproblemSolution")
        .def_readonly("u", &SubproblemSolution::u)
        .def_readonly("y", &SubproblemSolution::y)
        .def_readonly("p", &SubproblemSolution::p)
        .def_readonly("value", &SubproblemSolution::value)
        .def_readonly("kkt_residual", &SubproblemSolution::kkt_residual)
        .def_readonly("iterations", &SubproblemSolution::iterations);

    m.def("solve_subproblem",
          [](const ProblemSpec& spec, const DiscreteOperators& ops, const CellSet& A) {
              return solve_inner(spec, ops, A);
          });
    m.def("evaluate_J", &evaluate_J);

    py::class_<TopoField>(m, "TopoField")
        .def_readonly("dj", &TopoField::dj)
        .def_readonly("rho", &TopoField::rho)
        .def_readonly("support_cells", &TopoField::support_cells)
        .def_readonly("rho_l1", &TopoField::rho_l1)
        .def_readonly("delta_A", &TopoField::delta_A);

    m.def("topological_derivative",
          [](const ProblemSpec& spec, const CellSet& A, const SubproblemSolution& sol) {
              return topological_derivative(spec, A, sol);
          });

    py::class_<SelectionResult>(m, "SelectionResult")
        .def_readonly("d_set", &SelectionResult::d_set)
        .def_readonly("mass", &SelectionResult::mass)
        .def_readonly("budget_used", &SelectionResult::budget_used)
        .def_readonly("effective_t", &SelectionResult::effective_t);

    m.def("select_d", [](const TopoField& tf, std::shared_ptr<Mesh> mesh, double t) {
        return select_d(tf, mesh, t);
    });

    py::class_<IterationRecord>(m, "IterationRecord")
        .def_readonly("k", &IterationRecord::k)
        .def_readonly("J", &IterationRecord::J)
        .def_readonly("set_measure", &IterationRecord::set_measure)
        .def_readonly("rho_l1", &IterationRecord::rho_l1)
        .def_readonly("rho_support", &IterationRecord::rho_support)
        .def_readonly("t_accepted", &IterationRecord::t_accepted);

    py::class_<DescentResult>(m, "DescentResult")
        .def_readonly("final_set", &DescentResult::final_set)
        .def_readonly("final_solution", &DescentResult::final_solution)
        .def_readonly("history", &DescentResult::history)
        .def_property_readonly("stop_reason", [](const DescentResult& r) {
            return std::string(to_string(r.stop_reason));
        });

    m.def("run_descent",
          [](const ProblemSpec& spec, const DiscreteOperators& ops, const std::string& a0,
             int max_iters, double delta_tol) {
              DescentConfig cfg;
              cfg.max_iters = max_iters;
              cfg.delta_tol = delta_tol;
              cfg.initial_set = a0 == "empty" ? InitialSet::empty() : InitialSet::full();
              return run_descent(spec, ops, cfg);
          },
          py::arg("spec"), py::arg("ops"), py::arg("a0") = "full", py::arg("max_iters") = 100,
          py::arg("delta_tol") = 0.0);

    m.def("run_preset",
          [](const std::string& name, int n, const std::string& a0, int max_iters) {
              RunConfig cfg;
              cfg.spec = preset(name);
              cfg.n = n;
              cfg.a0 = a0;
              cfg.descent.max_iters = max_iters;
              cfg.dump = DumpLevel::none;
              std::ostringstream log;
              RunOutcome outcome = execute_run(cfg, log);
              return py::make_tuple(outcome.result.final_solution.value,
                                    outcome.result.final_set.measure(),
                                    outcome.result.history.back().rho_l1,
                                    std::string(to_string(outcome.result.stop_reason)));
          },
          py::arg("name"), py::arg("n"), py::arg("a0") = "full", py::arg("max_iters") = 100);
}
