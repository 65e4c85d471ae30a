// Python bindings for the core operations: geometry primitives, controller
// laws, error-space fields, linearizations and the scenario runner.

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <sstream>

#include "triflex/analysis.hpp"
#include "triflex/scenario_io.hpp"
#include "triflex/sim.hpp"

namespace py = pybind11;
using namespace triflex;

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 to_rows(const Matrix3& m) {
    Mat3 out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out[static_cast<size_t>(i)][static_cast<size_t>(j)] = m(i, j);
    return out;
}

Matrix3 from_rows(const Mat3& rows) {
    Matrix3 m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
    return m;
}

std::string vec_repr(const Vec2& v) {
    std::ostringstream os;
    os << "Vec2(" << v.x << ", " << v.y << ")";
    return os.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Two-link flexible formation control: simulation and stability analysis";

    py::register_exception<DegenerateVector>(m, "DegenerateVector", PyExc_ValueError);
    py::register_exception<InvalidErrorVec>(m, "InvalidErrorVec", PyExc_ValueError);
    py::register_exception<SingularAngle>(m, "SingularAngle", PyExc_ValueError);
    py::register_exception<PreconditionViolated>(m, "PreconditionViolated", PyExc_ValueError);
    py::register_exception<SamplingFailed>(m, "SamplingFailed", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<Vec2>(m, "Vec2")
        .def(py::init<>())
        .def(py::init<double, double>(), py::arg("x"), py::arg("y"))
        .def_readwrite("x", &Vec2::x)
        .def_readwrite("y", &Vec2::y)
        .def("norm", &Vec2::norm)
        .def("dot", &Vec2::dot)
        .def("__repr__", &vec_repr);

    py::enum_<Variant>(m, "Variant")
        .value("UNBIASED", Variant::Unbiased)
        .value("BIASED_COLLINEAR", Variant::BiasedCollinear)
        .value("ROTATED_SPLIT", Variant::RotatedSplit)
        .value("ROTATED_ONE_SIDED", Variant::RotatedOneSided);

    py::class_<FormationSpec>(m, "FormationSpec")
        .def(py::init([](double d1, double d2, double theta, double c, Variant variant) {
                 FormationSpec s{d1, d2, theta, c, variant};
                 s.validate();
                 return s;
             }),
             py::arg("d1") = 30.0, py::arg("d2") = 10.0, py::arg("theta") = 0.0,
             py::arg("c") = 1.0, py::arg("variant") = Variant::BiasedCollinear)
        .def_readwrite("d1", &FormationSpec::d1)
        .def_readwrite("d2", &FormationSpec::d2)
        .def_readwrite("theta", &FormationSpec::theta)
        .def_readwrite("c", &FormationSpec::c)
        .def_readwrite("variant", &FormationSpec::variant)
        .def("validate", &FormationSpec::validate);

    py::class_<FormationState>(m, "FormationState")
        .def(py::init<>())
        .def(py::init<Vec2, Vec2, Vec2>(), py::arg("p1"), py::arg("p2"), py::arg("p3"))
        .def_readwrite("p1", &FormationState::p1)
        .def_readwrite("p2", &FormationState::p2)
        .def_readwrite("p3", &FormationState::p3);

    py::class_<RelVectors>(m, "RelVectors")
        .def_readonly("z1", &RelVectors::z1)
        .def_readonly("z2", &RelVectors::z2)
        .def_readonly("z3", &RelVectors::z3);

    py::class_<ErrorVec>(m, "ErrorVec")
        .def(py::init<>())
        .def(py::init<double, double, double>(), py::arg("e1"), py::arg("e2"), py::arg("e3"))
        .def_readwrite("e1", &ErrorVec::e1)
        .def_readwrite("e2", &ErrorVec::e2)
        .def_readwrite("e3", &ErrorVec::e3);

    py::class_<AgentControls>(m, "AgentControls")
        .def_readonly("u1", &AgentControls::u1)
        .def_readonly("u2", &AgentControls::u2)
        .def_readonly("u3", &AgentControls::u3);

    // Geometry
    m.def("unit", &unit, py::arg("v"));
    m.def("cross2", &cross2, py::arg("u"), py::arg("v"));
    m.def("signed_angle", &signed_angle, py::arg("u"), py::arg("v"));

    // Controller laws and error fields
    m.def("relative_vectors", &relative_vectors);
    m.def("d3_of", &d3_of);
    m.def("distance_errors", &distance_errors);
    m.def("shape_potential", &shape_potential);
    m.def("control_unbiased", &control_unbiased);
    m.def("control_biased", &control_biased, py::arg("state"), py::arg("mu1"),
          py::arg("mu2"), py::arg("spec"));
    m.def("control_rotated", &control_rotated);
    m.def("control_for", &control_for);
    m.def("gamma_of_e", &gamma_of_e);
    m.def("error_field_collinear", &error_field_collinear);
    m.def("error_field_rotated", &error_field_rotated);

    // Linearizations and classification
    m.def("jacobian_collinear",
          [](double d1, double d2, double c) { return to_rows(jacobian_collinear(d1, d2, c)); });
    m.def("collinear_eigenvalues", &collinear_eigenvalues);
    m.def("partials_a", [](double d1, double d2, double theta, double alpha) {
        const LinkAnglePartials p = partials_a(d1, d2, theta, alpha);
        return py::make_tuple(p.a1, p.a2, p.a3);
    });
    m.def("jacobian_rotated", [](double d1, double d2, double theta, double c) {
        return to_rows(jacobian_rotated(d1, d2, theta, c));
    });
    m.def("eig3", [](const Mat3& rows) { return eig3(from_rows(rows)); });
    m.def(
        "is_hurwitz",
        [](const Mat3& rows, double margin) {
            const StabilityReport rep = is_hurwitz(from_rows(rows), margin);
            py::dict out;
            out["hurwitz"] = rep.hurwitz;
            out["margin"] = rep.margin;
            out["eigenvalues"] = rep.eigenvalues;
            out["jacobian"] = to_rows(rep.jacobian);
            return out;
        },
        py::arg("matrix"), py::arg("margin") = 0.0);
    m.def("lemma1_check", [](double p1, double p2, double a, double b, double c) {
        const PerturbationCheck pc = lemma1_check(p1, p2, a, b, c);
        return py::make_tuple(pc.approx_lambda3, pc.exact_lambda3, pc.sign_agrees);
    });

    py::enum_<EquilibriumClass>(m, "EquilibriumClass")
        .value("STATIONARY_COLLINEAR", EquilibriumClass::StationaryCollinear)
        .value("TRAVELLING_COLLINEAR", EquilibriumClass::TravellingCollinear)
        .value("TRIANGLE", EquilibriumClass::Triangle)
        .value("NOT_EQUILIBRIUM", EquilibriumClass::NotEquilibrium);

    py::class_<EquilibriumReport>(m, "EquilibriumReport")
        .def_readonly("cls", &EquilibriumReport::cls)
        .def_readonly("cond1_res", &EquilibriumReport::cond1_res)
        .def_readonly("zeq_res", &EquilibriumReport::zeq_res)
        .def_readonly("field_norm", &EquilibriumReport::field_norm)
        .def("name", [](const EquilibriumReport& r) {
            return std::string(equilibrium_class_name(r.cls));
        });

    m.def("classify_equilibrium", &classify_equilibrium, py::arg("state"), py::arg("spec"),
          py::arg("tol") = 1e-6);

    // Simulation
    py::class_<DerivedSample>(m, "DerivedSample")
        .def_readonly("e1", &DerivedSample::e1)
        .def_readonly("e2", &DerivedSample::e2)
        .def_readonly("e3", &DerivedSample::e3)
        .def_readonly("gamma", &DerivedSample::gamma)
        .def_readonly("cross", &DerivedSample::cross)
        .def_readonly("speed1", &DerivedSample::speed1)
        .def_readonly("speed2", &DerivedSample::speed2)
        .def_readonly("speed3", &DerivedSample::speed3);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("times", &Trajectory::times)
        .def_readonly("samples", &Trajectory::samples)
        .def_readonly("derived", &Trajectory::derived)
        .def_readonly("aborted", &Trajectory::aborted)
        .def_readonly("abort_time", &Trajectory::abort_time)
        .def_readonly("abort_reason", &Trajectory::abort_reason);

    py::class_<ConvergenceReport>(m, "ConvergenceReport")
        .def_readonly("final_errors", &ConvergenceReport::final_errors)
        .def_readonly("final_gamma", &ConvergenceReport::final_gamma)
        .def_readonly("steady_velocity", &ConvergenceReport::steady_velocity)
        .def_readonly("steady_speed", &ConvergenceReport::steady_speed)
        .def_readonly("agent_velocities", &ConvergenceReport::agent_velocities)
        .def_readonly("collinearity_residual", &ConvergenceReport::collinearity_residual)
        .def_readonly("min_link_distance", &ConvergenceReport::min_link_distance)
        .def_readonly("classified", &ConvergenceReport::classified);

    py::class_<Scenario>(m, "Scenario")
        .def(py::init<>())
        .def_readwrite("spec", &Scenario::spec)
        .def_readwrite("initial", &Scenario::initial)
        .def_readwrite("initial_errors", &Scenario::initial_errors)
        .def_readwrite("dt", &Scenario::dt)
        .def_readwrite("horizon", &Scenario::horizon)
        .def_readwrite("record_every", &Scenario::record_every)
        .def_readwrite("seed", &Scenario::seed)
        .def_readwrite("spread", &Scenario::spread)
        .def_readwrite("classify_tol", &Scenario::classify_tol);

    py::class_<SimResult>(m, "SimResult")
        .def_readonly("trajectory", &SimResult::trajectory)
        .def_readonly("report", &SimResult::report);

    m.def("simulate", &simulate, py::arg("scenario"),
          py::call_guard<py::gil_scoped_release>());
    m.def("simulate_errors", &simulate_errors, py::arg("scenario"),
          py::call_guard<py::gil_scoped_release>());
    m.def("random_initial", &random_initial, py::arg("seed"), py::arg("spec"),
          py::arg("spread"));
    m.def("collinear_initial", &collinear_initial, py::arg("seed"), py::arg("spec"),
          py::arg("spread"));
    m.def("figure_scenario", &figure_scenario, py::arg("name"), py::arg("seed") = 1);
    m.def("load_scenario", &load_scenario, py::arg("path"));
}
