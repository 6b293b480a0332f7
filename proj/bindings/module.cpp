#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "chainset/chainlab.hpp"
#include "chainset/json_io.hpp"
#include "chainset/poincare.hpp"
#include "chainset/reachsets.hpp"

namespace py = pybind11;
using namespace chainset;

namespace {

LinearSystem make_system(const Matrix& A, const Matrix& B, py::object U) {
    if (py::isinstance<ControlRange>(U)) return LinearSystem::make(A, B, U.cast<ControlRange>());
    // (lo, hi) tuple shorthand for a box range
    const auto pair = U.cast<std::pair<Vector, Vector>>();
    return LinearSystem::make(A, B, ControlRange::box(pair.first, pair.second));
}

}  // namespace

PYBIND11_MODULE(_chainset, m) {
    m.doc() = "control sets, chain control sets, and Poincare-sphere projections "
              "for linear control systems";
    m.attr("__version__") = "0.1.0";

    py::register_exception<Error>(m, "ChainsetError");

    py::class_<ControlRange>(m, "ControlRange")
        .def_static("box", &ControlRange::box, py::arg("lo"), py::arg("hi"))
        .def_static("polytope", &ControlRange::polytope, py::arg("vertices"))
        .def("support", &ControlRange::support)
        .def("contains", &ControlRange::contains, py::arg("u"), py::arg("slack") = 1e-9)
        .def_property_readonly("dim", &ControlRange::dim)
        .def_property_readonly("vertices", &ControlRange::vertices);

    py::class_<LinearSystem>(m, "LinearSystem")
        .def(py::init(&make_system), py::arg("A"), py::arg("B"), py::arg("U"))
        .def_readonly("A", &LinearSystem::A)
        .def_readonly("B", &LinearSystem::B)
        .def_readonly("U", &LinearSystem::U)
        .def("time_reversed", &LinearSystem::time_reversed);

    py::class_<SpectralSplit>(m, "SpectralSplit")
        .def_readonly("basis_plus", &SpectralSplit::basis_plus)
        .def_readonly("basis_zero", &SpectralSplit::basis_zero)
        .def_readonly("basis_minus", &SpectralSplit::basis_minus)
        .def_readonly("proj_plus", &SpectralSplit::proj_plus)
        .def_readonly("proj_zero", &SpectralSplit::proj_zero)
        .def_readonly("proj_minus", &SpectralSplit::proj_minus)
        .def_readonly("proj_h", &SpectralSplit::proj_h)
        .def_readonly("eigenvalues", &SpectralSplit::eigenvalues)
        .def_property_readonly("dim_plus", &SpectralSplit::dim_plus)
        .def_property_readonly("dim_zero", &SpectralSplit::dim_zero)
        .def_property_readonly("dim_minus", &SpectralSplit::dim_minus);

    m.def("lyapunov_split", &lyapunov_split, py::arg("A"), py::arg("tol_re") = -1.0);
    m.def("matrix_exp", &matrix_exp, py::arg("A"), py::arg("t") = 1.0);
    m.def("controllability_subspace", &controllability_subspace, py::arg("A"), py::arg("B"));
    m.def("is_hyperbolic", &is_hyperbolic);

    py::class_<ConvexBody>(m, "ConvexBody")
        .def_property_readonly("ambient_dim", &ConvexBody::ambient_dim)
        .def_property_readonly("directions", &ConvexBody::directions)
        .def_property_readonly("support_values", &ConvexBody::support_values)
        .def_property_readonly("vertices",
                               [](const ConvexBody& b) -> py::object {
                                   if (!b.has_vertices()) return py::none();
                                   return py::cast(b.vertices());
                               })
        .def("support", &ConvexBody::support)
        .def("contains", &ConvexBody::contains, py::arg("x"), py::arg("slack") = 1e-8);

    m.def("minkowski_sum", &minkowski_sum);
    m.def("project_body", &project_body);
    m.def("hausdorff_distance", &hausdorff_distance);
    m.def("support_distance", &support_distance);

    py::class_<AffineSetSum>(m, "AffineSetSum")
        .def_readonly("compact", &AffineSetSum::compact)
        .def_readonly("subspace_basis", &AffineSetSum::subspace_basis)
        .def_readonly("w_basis", &AffineSetSum::w_basis)
        .def("contains",
             [](const AffineSetSum& s, const Vector& x, double slack) {
                 return membership(s, x, slack);
             },
             py::arg("x"), py::arg("slack") = 1e-8);

    py::class_<ReachOptions>(m, "ReachOptions")
        .def(py::init<>())
        .def_readwrite("horizon_T", &ReachOptions::horizon_T)
        .def_readwrite("quad_tol", &ReachOptions::quad_tol);

    py::class_<ControlSetResult>(m, "ControlSetResult")
        .def_readonly("D0_closure", &ControlSetResult::D0_closure)
        .def_readonly("D_minus", &ControlSetResult::D_minus)
        .def_readonly("D_plus", &ControlSetResult::D_plus)
        .def_readonly("center_cap_C_basis", &ControlSetResult::center_cap_C_basis)
        .def_readonly("split", &ControlSetResult::split)
        .def_readonly("degenerate_hyperbolic_factor",
                      &ControlSetResult::degenerate_hyperbolic_factor);

    m.def("reach_support",
          py::overload_cast<const LinearSystem&, double, const Vector&, double>(&reach_support),
          py::arg("sys"), py::arg("T"), py::arg("d"), py::arg("quad_tol") = 1e-8);
    m.def("control_set", &control_set, py::arg("sys"), py::arg("options") = ReachOptions{});
    m.def("chain_control_set",
          py::overload_cast<const LinearSystem&, const ReachOptions&>(&chain_control_set),
          py::arg("sys"), py::arg("options") = ReachOptions{});

    py::class_<PCWControl>(m, "PCWControl")
        .def(py::init([](std::vector<double> breakpoints, std::vector<Vector> values) {
                 return PCWControl{std::move(breakpoints), std::move(values)};
             }),
             py::arg("breakpoints"), py::arg("values"))
        .def_static("constant", &PCWControl::constant)
        .def("value_at", &PCWControl::value_at)
        .def_readonly("breakpoints", &PCWControl::breakpoints)
        .def_readonly("values", &PCWControl::values);

    py::class_<ProjPoint>(m, "ProjPoint")
        .def_static("from_vector", &ProjPoint::from)
        .def_readonly("rep", &ProjPoint::rep);

    m.def("proj_distance", &proj_distance);
    m.def("lift_h1", &lift_h1);
    m.def("equator_distance", &equator_distance);

    py::class_<BoundedSolution>(m, "BoundedSolution")
        .def_readonly("ambient", &BoundedSolution::ambient)
        .def_readonly("tail_bound", &BoundedSolution::tail_bound)
        .def_readonly("window_T", &BoundedSolution::window_T)
        .def_property_readonly("hyperbolic_coords", &BoundedSolution::hyperbolic_coords);

    m.def("bounded_solution_e0", &bounded_solution_e0, py::arg("sys"), py::arg("split"),
          py::arg("u"), py::arg("window_T") = -1.0);

    py::class_<CentralFiber>(m, "CentralFiber")
        .def_readonly("e0", &CentralFiber::e0)
        .def_readonly("center_basis", &CentralFiber::center_basis)
        .def_readonly("fiber_basis", &CentralFiber::fiber_basis)
        .def_readonly("dimension", &CentralFiber::dimension);

    m.def("central_fiber", &central_fiber);

    py::class_<ProjectiveCloud>(m, "ProjectiveCloud")
        .def_readonly("points", &ProjectiveCloud::points)
        .def_readonly("preimages", &ProjectiveCloud::preimages)
        .def_readonly("E", &ProjectiveCloud::E)
        .def_readonly("fiber_dimension", &ProjectiveCloud::fiber_dimension);

    m.def("projective_chain_control_set", &projective_chain_control_set, py::arg("sys"),
          py::arg("samples"), py::arg("r_plot") = 2.0, py::arg("options") = ReachOptions{});

    py::class_<GridSpec>(m, "GridSpec")
        .def_static("make", &GridSpec::make, py::arg("lo"), py::arg("hi"), py::arg("spacing"))
        .def_readonly("node_count", &GridSpec::node_count)
        .def("node", &GridSpec::node)
        .def("nearest_node", &GridSpec::nearest_node);

    py::class_<ChainGraph>(m, "ChainGraph")
        .def_readonly("epsilon", &ChainGraph::epsilon)
        .def_readonly("jump_T", &ChainGraph::jump_T)
        .def_readonly("grid", &ChainGraph::grid)
        .def_property_readonly("edge_count", &ChainGraph::edge_count)
        .def_readonly("escape_count", &ChainGraph::escape_count);

    py::class_<ChainWitness>(m, "ChainWitness")
        .def_readonly("points", &ChainWitness::points)
        .def_readonly("times", &ChainWitness::times);

    m.def("default_control_family", &default_control_family, py::arg("U"),
          py::arg("two_piece") = false, py::arg("jump_T") = 1.0);
    m.def("build_chain_graph", &build_chain_graph, py::arg("sys"), py::arg("grid"),
          py::arg("controls"), py::arg("epsilon"), py::arg("jump_T"));
    m.def("chain_reachable_from", &chain_reachable_from);
    m.def("chain_component_of", &chain_component_of);
    m.def("reverse_graph", &reverse_graph);
    m.def("extract_witness", &extract_witness);
    m.def("validate_witness", &validate_witness);
    m.def("autonomous_chain_recurrent_set", &autonomous_chain_recurrent_set, py::arg("A"),
          py::arg("grid"), py::arg("epsilon"), py::arg("T"));
}
