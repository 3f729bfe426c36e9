#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "scherk/domains.hpp"
#include "scherk/error.hpp"
#include "scherk/fatou.hpp"
#include "scherk/io.hpp"
#include "scherk/solver.hpp"
#include "scherk/svg.hpp"

namespace py = pybind11;
using namespace scherk;

namespace {

DiscSpec disc_of(const std::string& model) { return DiscSpec::make(MetricModel(model_kind_from_string(model.c_str()))); }

std::string labels_of(const ScherkPolygon& p) {
    std::string s;
    for (SideLabel l : p.labels) s += to_char(l);
    return s;
}

py::dict report_dict(const FatouReport& r) {
    py::dict d;
    d["n_rays"] = r.n_rays;
    d["mu_finite"] = r.mu_finite;
    d["mu_plus"] = r.mu_plus;
    d["mu_minus"] = r.mu_minus;
    d["mu_und"] = r.mu_und;
    py::list rays;
    for (const auto& ray : r.rays) {
        py::dict o;
        o["theta"] = ray.theta;
        o["class"] = to_string(ray.cls);
        o["value"] = ray.limit;
        rays.append(o);
    }
    d["rays"] = rays;
    return d;
}

}  // namespace

PYBIND11_MODULE(_scherk, m) {
    m.doc() = "Scherk-type minimal graphs on geodesic discs";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

    m.def("boundary_length", [](const std::string& model) { return disc_of(model).boundary_length; },
          py::arg("model") = "hyperbolic");
    m.def("chord_length", [](double s0, double s1, const std::string& model) {
        return chord_length(disc_of(model), s0, s1);
    }, py::arg("s0"), py::arg("s1"), py::arg("model") = "hyperbolic");

    py::class_<ScherkPolygon>(m, "ScherkPolygon")
        .def_property_readonly("vertices_s", [](const ScherkPolygon& p) { return p.vertex_s; })
        .def_property_readonly("labels", &labels_of)
        .def_property_readonly("model", [](const ScherkPolygon& p) { return std::string(to_string(p.disc.model.kind())); })
        .def("side_length", &ScherkPolygon::side_length)
        .def("__len__", &ScherkPolygon::size);

    py::class_<AdmissibilityReport>(m, "AdmissibilityReport")
        .def_readonly("passes", &AdmissibilityReport::passes)
        .def_readonly("condition1_residual", &AdmissibilityReport::condition1_residual)
        .def_readonly("slack_a", &AdmissibilityReport::slack_a)
        .def_readonly("slack_b", &AdmissibilityReport::slack_b)
        .def_readonly("worst_polygon", &AdmissibilityReport::worst_polygon)
        .def_readonly("polygons_checked", &AdmissibilityReport::polygons_checked);

    m.def("inscribed_quadrilateral", [](double x0, const std::string& model) {
        return inscribed_quadrilateral(disc_of(model), x0);
    }, py::arg("x0") = 0.0, py::arg("model") = "hyperbolic");
    m.def("check_admissible", &check_admissible, py::arg("polygon"), py::arg("tol") = 1e-10);
    m.def("attach_and_perturb", [](const ScherkPolygon& p, std::size_t a_side, std::size_t b_side, double tau_max) {
        TauSchedule grid;
        grid.tau_max = tau_max;
        const Attachment att = attach_and_perturb(p, a_side, b_side, grid);
        return py::make_tuple(att.polygon, att.tau);
    }, py::arg("polygon"), py::arg("a_side"), py::arg("b_side"), py::arg("tau_max") = 0.1);
    m.def("iterate_example", [](int steps, const std::string& model) {
        std::vector<ScherkPolygon> out;
        for (const auto& st : iterate_example(disc_of(model), steps, ExampleSchedule{}).steps) out.push_back(st.domain);
        return out;
    }, py::arg("steps") = 3, py::arg("model") = "hyperbolic");
    m.def("polygon_to_json", [](const ScherkPolygon& p) { return canonical_json(to_json(p)); });
    m.def("polygon_from_json", [](const std::string& text) { return polygon_from_json(Json::parse(text)); });
    m.def("render_svg", [](const ScherkPolygon& p) { return render_svg(p); });

    py::class_<Field>(m, "Field")
        .def_property_readonly("values", &Field::values)
        .def_property_readonly("nodes", [](const Field& f) {
            std::vector<std::pair<double, double>> out;
            for (const Vec2& p : f.mesh().nodes) out.emplace_back(p.x, p.y);
            return out;
        })
        .def_property_readonly("converged", [](const Field& f) { return f.info.converged; })
        .def_property_readonly("newton_iters", [](const Field& f) { return f.info.newton_iters; })
        .def_property_readonly("cap", &Field::cap)
        .def("value_at", [](const Field& f, double x, double y) { return f.value_at({x, y}); });

    m.def("solve_disc", [](const std::string& variant, const std::function<double(double, double)>& bc, double h,
                           const std::string& model) {
        MeshOptions mo;
        mo.h = h;
        const DiscSpec disc = disc_of(model);
        return solve(triangulate(disc, mo), OperatorSpec::make(variant_from_string(variant), disc.model),
                     BoundaryData::from_function([bc](Vec2 p) { return bc(p.x, p.y); }));
    }, py::arg("variant"), py::arg("bc"), py::arg("h") = 0.05, py::arg("model") = "euclidean");
    m.def("solve_scherk", [](const ScherkPolygon& p, const std::vector<double>& caps, double h, const std::string& variant) {
        MeshOptions mo;
        mo.h = h;
        return solve_scherk(p, OperatorSpec::make(variant_from_string(variant), p.disc.model), caps, mo);
    }, py::arg("polygon"), py::arg("caps") = std::vector<double>{5, 10, 20}, py::arg("h") = 0.05,
          py::arg("variant") = "minimal_hyperbolic");
    m.def("fatou_report", [](const Field& f, int n_rays) { return report_dict(fatou_report(f, n_rays)); },
          py::arg("field"), py::arg("n_rays") = 64);
}
