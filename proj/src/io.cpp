#include "scherk/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "scherk/error.hpp"

namespace scherk {

std::string format_number(double v) {
    if (!std::isfinite(v)) return "null";
    if (v == 0.0) return "0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void emit(const Json& j, std::string& out) {
    switch (j.type()) {
        case Json::value_t::object: {
            out += '{';
            bool first = true;
            for (const auto& [k, v] : j.items()) {
                if (!first) out += ',';
                first = false;
                out += Json(k).dump();
                out += ':';
                emit(v, out);
            }
            out += '}';
            break;
        }
        case Json::value_t::array: {
            out += '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ',';
                emit(j[i], out);
            }
            out += ']';
            break;
        }
        case Json::value_t::number_float: out += format_number(j.get<double>()); break;
        default: out += j.dump(); break;
    }
}

Json labels_json(const std::vector<SideLabel>& labels) {
    Json a = Json::array();
    for (SideLabel l : labels) a.push_back(std::string(1, to_char(l)));
    return a;
}

Json ints(const std::vector<int>& v) {
    Json a = Json::array();
    for (int i : v) a.push_back(i);
    return a;
}

}  // namespace

std::string canonical_json(const Json& value) {
    std::string out;
    emit(value, out);
    out += '\n';
    return out;
}

Json to_json(const ScherkPolygon& polygon) {
    Json j;
    j["model"] = to_string(polygon.disc.model.kind());
    Json s = Json::array();
    for (double v : polygon.vertex_s) s.push_back(v);
    j["vertices_s"] = s;
    j["labels"] = labels_json(polygon.labels);
    return j;
}

ScherkPolygon polygon_from_json(const Json& j) {
    try {
        const std::string model = j.at("model").get<std::string>();
        const DiscSpec disc = DiscSpec::make(MetricModel(model_kind_from_string(model.c_str())));
        std::vector<double> s = j.at("vertices_s").get<std::vector<double>>();
        std::vector<SideLabel> labels;
        for (const auto& l : j.at("labels")) {
            const std::string t = l.get<std::string>();
            if (t == "A") labels.push_back(SideLabel::A);
            else if (t == "B") labels.push_back(SideLabel::B);
            else throw DomainError("labels must be \"A\" or \"B\"");
        }
        return make_scherk_polygon(disc, std::move(s), std::move(labels));
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("malformed domain JSON: ") + e.what());
    }
}

ScherkPolygon read_domain(const std::string& path) {
    const std::string text = read_file(path);
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("malformed domain JSON: ") + e.what());
    }
    return polygon_from_json(j);
}

Json to_json(const AdmissibilityReport& r) {
    Json j;
    j["passes"] = r.passes;
    j["condition1_residual"] = r.condition1_residual;
    j["slack_a"] = r.slack_a;
    j["slack_b"] = r.slack_b;
    j["worst_polygon"] = ints(r.worst_polygon);
    j["worst_polygon_a"] = ints(r.worst_polygon_a);
    j["worst_polygon_b"] = ints(r.worst_polygon_b);
    j["polygons_checked"] = r.polygons_checked;
    return j;
}

Json manifest_json(const ExampleStep& step) {
    Json j;
    j["step"] = step.step;
    const Json d = to_json(step.domain);
    j["model"] = d["model"];
    j["vertices_s"] = d["vertices_s"];
    j["labels"] = d["labels"];
    j["tau"] = step.tau;
    j["epsilon"] = step.epsilon;
    j["r_n"] = step.r_core;
    j["gap"] = step.gap;
    j["slacks"] = {{"a", step.report.slack_a}, {"b", step.report.slack_b}};
    j["condition1_residual"] = step.report.condition1_residual;
    j["passes"] = step.report.passes;
    if (step.gate_checked) {
        j["gate"] = {{"ok", step.gate_ok},
                     {"min_a", step.gate.min_a},
                     {"max_b", step.gate.max_b},
                     {"prev_min_a", step.gate.prev_min_a},
                     {"prev_max_b", step.gate.prev_max_b},
                     {"drift", step.gate.drift}};
    }
    return j;
}

Json to_json(const SolveInfo& info) {
    Json j;
    j["converged"] = info.converged;
    j["newton_iters"] = info.newton_iters;
    j["residual_norm"] = info.residual_norm;
    j["reference_norm"] = info.reference_norm;
    j["residuals"] = info.residuals;
    j["damping"] = info.damping;
    return j;
}

Json to_json(const HypothesisReport& r) {
    Json j;
    j["G_bounds"] = {{"rho_lo", r.rho_lo}, {"rho_hi", r.rho_hi}, {"alpha_lo", r.alpha_lo}, {"beta_hi", r.beta_hi}};
    j["flux_bound"] = {{"M", r.flux_bound}, {"declared", r.declared_bound}};
    j["coercivity"] = {{"delta", r.delta},       {"min_residual", r.coercivity_min}, {"h_integral", r.h_integral},
                       {"h_sup", r.h_sup},       {"f_integral", r.f_integral},       {"area", r.area},
                       {"w_margin", r.w_margin}, {"identity_error", r.identity_error}};
    j["verdicts"] = {{"a", r.verdict_a}, {"b", r.verdict_b}, {"c", r.verdict_c}};
    j["quadrature_points"] = r.quadrature_points;
    return j;
}

Json to_json(const FatouReport& r) {
    Json j;
    j["n_rays"] = r.n_rays;
    j["mu_finite"] = r.mu_finite;
    j["mu_plus"] = r.mu_plus;
    j["mu_minus"] = r.mu_minus;
    j["mu_und"] = r.mu_und;
    Json rays = Json::array();
    for (const auto& ray : r.rays) {
        Json o;
        o["theta"] = ray.theta;
        o["class"] = to_string(ray.cls);
        if (ray.cls == RayClass::finite) o["value"] = ray.limit;
        if (ray.truncated) o["truncated"] = true;
        rays.push_back(o);
    }
    j["rays"] = rays;
    return j;
}

std::string field_csv(const Field& field) {
    std::string out = "x,y,u,ux,uy\n";
    const auto grads = field.nodal_gradients();
    const auto& nodes = field.mesh().nodes;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        out += format_number(nodes[i].x) + ',' + format_number(nodes[i].y) + ',' + format_number(field.values()[i]) +
               ',' + format_number(grads[i].x) + ',' + format_number(grads[i].y) + '\n';
    }
    return out;
}

std::vector<CsvSample> parse_field_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("x,y,u", 0) != 0) throw DomainError("field CSV needs a x,y,u header");
    std::vector<CsvSample> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double v[5] = {0, 0, 0, 0, 0};
        std::istringstream row(line);
        std::string cell;
        int k = 0;
        while (std::getline(row, cell, ',') && k < 5) {
            char* end = nullptr;
            v[k] = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str()) throw DomainError("malformed field CSV row: " + line);
            ++k;
        }
        if (k < 3) throw DomainError("malformed field CSV row: " + line);
        out.push_back({{v[0], v[1]}, v[2], {v[3], v[4]}});
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << content;
}

}  // namespace scherk
