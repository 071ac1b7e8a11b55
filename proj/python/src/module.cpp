#include "cvfe/io.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace cvfe;

namespace {

Eigen::MatrixXd vertex_array(const Mesh& mesh)
{
    Eigen::MatrixXd out(mesh.num_vertices(), 2);
    for (Index v = 0; v < mesh.num_vertices(); ++v)
        out.row(v) = mesh.vertices[v].transpose();
    return out;
}

Eigen::Matrix<Index, Eigen::Dynamic, 3> triangle_array(const Mesh& mesh)
{
    Eigen::Matrix<Index, Eigen::Dynamic, 3> out(mesh.num_elements(), 3);
    for (Index e = 0; e < mesh.num_elements(); ++e)
        for (int k = 0; k < 3; ++k)
            out(e, k) = mesh.triangles[e][k];
    return out;
}

py::dict level_dict(const ConvergenceLevel& l, const ConvergenceRates& r)
{
    py::dict d;
    d["h_p"] = l.h_p;
    d["h_v"] = l.h_v;
    d["l2_p"] = l.errors.l2_p;
    d["l2_v"] = l.errors.l2_v;
    d["h1_v"] = l.errors.h1_v;
    d["rate_l2_p"] = r.l2_p;
    d["rate_l2_v"] = r.l2_v;
    d["rate_h1_v"] = r.h1_v;
    d["iterations"] = l.iterations;
    d["converged"] = l.converged;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "CVFE and MINI finite element solvers for 2D Stokes flow";

    py::register_exception<InvalidMesh>(m, "InvalidMesh", PyExc_ValueError);
    py::register_exception<ConfigurationError>(m, "ConfigurationError", PyExc_ValueError);
    py::register_exception<DistortionFailure>(m, "DistortionFailure", PyExc_RuntimeError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

    py::enum_<SchemeKind>(m, "Scheme")
        .value("NonOverlapping", SchemeKind::NonOverlapping)
        .value("Overlapping", SchemeKind::Overlapping)
        .value("Hybrid", SchemeKind::Hybrid)
        .value("Fem", SchemeKind::Fem);
    m.def("scheme_from_string", &scheme_from_string);

    py::class_<Mesh>(m, "Mesh")
        .def_property_readonly("vertices", &vertex_array)
        .def_property_readonly("triangles", &triangle_array)
        .def_property_readonly("num_vertices", &Mesh::num_vertices)
        .def_property_readonly("num_elements", &Mesh::num_elements)
        .def("domain_area", &Mesh::domain_area)
        .def("__repr__", [](const Mesh& mesh) {
            return "<Mesh " + std::to_string(mesh.num_vertices()) + " vertices, " +
                   std::to_string(mesh.num_elements()) + " triangles>";
        });

    m.def("generate_structured", [](int nx, int ny) { return generate_structured(nx, ny); }, py::arg("nx"),
          py::arg("ny"));
    m.def("distort", &distort, py::arg("mesh"), py::arg("fraction"), py::arg("seed"));
    m.def("read_msh", [](const std::filesystem::path& path) {
        auto mesh = read_msh(path);
        mark_rectangle_sides(mesh);
        return mesh;
    });
    m.def("mesh_stats", [](const Mesh& mesh, SchemeKind scheme) {
        const auto s = stats(mesh, scheme);
        py::dict d;
        d["num_vertices"] = s.num_vertices;
        d["num_elements"] = s.num_elements;
        d["h_p"] = s.h_p;
        d["h_v"] = s.h_v;
        d["domain_area"] = s.domain_area;
        return d;
    });

    m.def("basis", [](double x, double y) {
        const auto r = eval_reference(Point(x, y));
        Eigen::Matrix<double, 4, 2> grads;
        for (int a = 0; a < 4; ++a)
            grads.row(a) = r.gradients[a].transpose();
        return py::make_tuple(Eigen::Vector4d(r.values[0], r.values[1], r.values[2], r.values[3]), grads);
    }, "MINI basis values and gradients on the reference triangle");

    py::class_<GridDiscretization>(m, "Discretization")
        .def_property_readonly("scheme", [](const GridDiscretization& d) { return d.scheme; })
        .def_property_readonly("mesh", [](const GridDiscretization& d) { return d.mesh; })
        .def_property_readonly("num_dofs", [](const GridDiscretization& d) { return d.dofs.num_dofs(); })
        .def_property_readonly("num_velocity_dofs",
                               [](const GridDiscretization& d) { return d.dofs.num_velocity_dofs(); })
        .def_property_readonly("num_pressure_dofs",
                               [](const GridDiscretization& d) { return d.dofs.num_pressure_dofs(); });

    py::class_<ManufacturedCase>(m, "ManufacturedCase")
        .def_readonly("name", &ManufacturedCase::name)
        .def_readonly("viscosity", &ManufacturedCase::viscosity)
        .def("velocity", [](const ManufacturedCase& c, double x, double y) { return c.velocity(Point(x, y)); })
        .def("pressure", [](const ManufacturedCase& c, double x, double y) { return c.pressure(Point(x, y)); })
        .def("body_force",
             [](const ManufacturedCase& c, double x, double y) { return c.body_force(Point(x, y)); });
    m.def("donea_huerta", &donea_huerta, py::arg("viscosity") = 1.0);
    m.def("bercovier_engelman", &bercovier_engelman);
    m.def("shear_flow", &shear_flow, py::arg("viscosity") = 1.0);
    m.def("case_from_name", &case_from_name);

    py::class_<CaseSolution>(m, "CaseSolution")
        .def_property_readonly("discretization", [](const CaseSolution& s) { return s.disc; })
        .def_property_readonly("solution", [](const CaseSolution& s) { return s.report.solution; })
        .def_property_readonly("iterations", [](const CaseSolution& s) { return s.report.iterations; })
        .def_property_readonly("converged", [](const CaseSolution& s) { return s.report.converged; })
        .def_property_readonly("residual_history", [](const CaseSolution& s) { return s.report.residual_history; })
        .def_property_readonly("true_residual", [](const CaseSolution& s) { return s.report.true_residual; });

    m.def(
        "solve_case",
        [](const Mesh& mesh, const ManufacturedCase& mcase, SchemeKind scheme, std::uint64_t seed) {
            SolverOptions options;
            options.seed = seed;
            py::gil_scoped_release release;
            return solve_case(mesh, mcase, scheme, options);
        },
        py::arg("mesh"), py::arg("case"), py::arg("scheme"), py::arg("seed") = 1);

    m.def("error_norms", [](const CaseSolution& s, const ManufacturedCase& mcase) {
        const auto e = error_norms(s.disc, s.report.solution, mcase);
        py::dict d;
        d["l2_p"] = e.l2_p;
        d["l2_v"] = e.l2_v;
        d["h1_v"] = e.h1_v;
        return d;
    });

    m.def("conservation_audit", [](const CaseSolution& s, const ManufacturedCase& mcase) {
        const auto a = conservation_audit(s.disc, s.report.solution, mcase.problem());
        Eigen::MatrixXd momentum(static_cast<Index>(a.momentum_residuals.size()), 2);
        for (std::size_t i = 0; i < a.momentum_residuals.size(); ++i)
            momentum.row(static_cast<Index>(i)) = a.momentum_residuals[i].transpose();
        py::dict d;
        d["mass_residuals"] = a.mass_residuals;
        d["max_face_flux"] = a.max_face_flux;
        d["momentum_residuals"] = momentum;
        d["max_face_force"] = a.max_face_force;
        return d;
    });

    m.def(
        "run_convergence",
        [](const ManufacturedCase& mcase, SchemeKind scheme, int levels, int base_cells, double distortion,
           std::uint64_t seed) {
            StudyOptions options;
            options.levels = levels;
            options.base_cells = base_cells;
            options.distortion = distortion;
            options.seed = seed;
            ConvergenceReport report;
            {
                py::gil_scoped_release release;
                report = run_convergence(mcase, scheme, options);
            }
            py::list out;
            for (std::size_t k = 0; k < report.levels.size(); ++k)
                out.append(level_dict(report.levels[k], report.rates[k]));
            return out;
        },
        py::arg("case"), py::arg("scheme"), py::arg("levels") = 3, py::arg("base_cells") = 10,
        py::arg("distortion") = 0.2, py::arg("seed") = 42);

    m.def("write_vtu", [](const CaseSolution& s, const std::filesystem::path& path) {
        write_vtu(s.disc, s.report.solution, path);
    });
}
