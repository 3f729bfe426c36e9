#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "scherk/domains.hpp"
#include "scherk/error.hpp"
#include "scherk/example.hpp"
#include "scherk/fatou.hpp"
#include "scherk/io.hpp"
#include "scherk/solver.hpp"
#include "scherk/svg.hpp"

namespace fs = std::filesystem;
using namespace scherk;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kNoConvergence = 3;

std::vector<double> parse_caps(const std::string& text) {
    std::vector<double> caps;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            caps.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw DomainError("invalid cap list '" + text + "'");
        }
    }
    if (caps.empty()) throw DomainError("empty cap list");
    return caps;
}

fs::path ensure_dir(const std::string& dir) {
    fs::path p(dir);
    fs::create_directories(p);
    return p;
}

std::function<double(Vec2)> boundary_function(const std::string& name) {
    if (name == "zero") return [](Vec2) { return 0.0; };
    if (name == "cos") return [](Vec2 p) { return p.x / norm(p); };
    if (name == "xy") return [](Vec2 p) { return p.x * p.y; };
    throw DomainError("unknown boundary data '" + name + "' (zero, cos, xy)");
}

struct Common {
    std::string model = "hyperbolic";
    std::string out = ".";
    double h = 0.05;
    double tol = 1e-10;
};

void write_json(const fs::path& path, const Json& j) { write_file(path.string(), canonical_json(j)); }

ScherkPolygon build_stage(const DiscSpec& disc, double x0, const std::string& stage, double tau_max) {
    const ScherkPolygon d1 = inscribed_quadrilateral(disc, x0);
    if (stage == "quad") return d1;
    // D2 attaches to A1 = (p2, p3) and B1 = (p1, p2).
    if (stage == "d2-unperturbed") return perturb_attachment(d1, 1, 0, 0.0).polygon;
    if (stage == "d2") {
        TauSchedule grid;
        grid.tau_max = tau_max;
        return attach_and_perturb(d1, 1, 0, grid).polygon;
    }
    throw DomainError("unknown stage '" + stage + "' (quad, d2-unperturbed, d2)");
}

std::string stage_file(const std::string& stage) {
    if (stage == "d2-unperturbed") return "d2_unperturbed";
    return stage;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scherk-type minimal graphs on geodesic discs"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);

    Common c;
    double x0 = 0.0;
    double tau_max = 0.1;
    std::string stage = "quad";
    auto* build = app.add_subcommand("build-domain", "Construct a Scherk domain");
    build->add_option("--model", c.model, "hyperbolic or euclidean")->check(CLI::IsMember({"hyperbolic", "euclidean"}));
    build->add_option("--x0", x0, "Arc-length basepoint of the quadrilateral");
    build->add_option("--stage", stage, "quad, d2-unperturbed or d2");
    build->add_option("--tau-max", tau_max, "Largest perturbation tried");
    build->add_option("--out", c.out, "Output directory");

    std::string in;
    auto* check = app.add_subcommand("check", "Admissibility report for a domain JSON");
    check->add_option("--in", in, "Domain JSON")->required();
    check->add_option("--tol", c.tol, "Tolerance");
    std::string check_out;
    check->add_option("--out", check_out, "Output directory (report also goes to stdout)");

    std::string variant = "minimal_hyperbolic";
    std::string caps_text = "5,10,20,40";
    std::string bc_name = "cos";
    std::string domain_kind;
    auto* solve_cmd = app.add_subcommand("solve", "Solve on a Scherk domain (caps) or on the disc (--bc)");
    solve_cmd->add_option("--in", in, "Domain JSON; omit to solve on the disc");
    solve_cmd->add_option("--model", c.model, "Disc model when --in is omitted");
    solve_cmd->add_option("--variant", variant, "minimal_euclidean, minimal_hyperbolic, heisenberg, harmonic");
    solve_cmd->add_option("--caps", caps_text, "Comma-separated increasing caps");
    solve_cmd->add_option("--bc", bc_name, "Disc boundary data: zero, cos, xy");
    solve_cmd->add_option("--h", c.h, "Mesh size")->check(CLI::PositiveNumber);
    solve_cmd->add_option("--tol", c.tol, "Relative residual tolerance")->check(CLI::PositiveNumber);
    solve_cmd->add_option("--out", c.out, "Output directory");

    int rays = 256;
    double delta = 0.3;
    auto* fatou_cmd = app.add_subcommand("fatou", "Hypothesis and radial-limit reports");
    fatou_cmd->add_option("--in", in, "Domain JSON; omit to use the disc");
    fatou_cmd->add_option("--model", c.model, "Disc model when --in is omitted");
    fatou_cmd->add_option("--variant", variant, "Operator variant");
    fatou_cmd->add_option("--caps", caps_text, "Caps for Scherk domains");
    fatou_cmd->add_option("--bc", bc_name, "Disc boundary data: zero, cos, xy");
    fatou_cmd->add_option("--h", c.h, "Mesh size")->check(CLI::PositiveNumber);
    fatou_cmd->add_option("--tol", c.tol, "Relative residual tolerance")->check(CLI::PositiveNumber);
    fatou_cmd->add_option("--rays", rays, "Number of rays")->check(CLI::Range(16, 1 << 20));
    fatou_cmd->add_option("--delta", delta, "Coercivity constant")->check(CLI::PositiveNumber);
    fatou_cmd->add_option("--out", c.out, "Output directory");

    int steps = 3;
    std::string example_caps = "5,10,20";
    double r_core = 0.9;
    unsigned long seed = 0;
    auto* example = app.add_subcommand("example", "Iterate the domain sequence with solves and reports");
    example->add_option("--model", c.model, "hyperbolic or euclidean")->check(CLI::IsMember({"hyperbolic", "euclidean"}));
    example->add_option("--steps", steps, "Number of domains")->check(CLI::Range(1, 8));
    example->add_option("--caps", example_caps, "Comma-separated increasing caps");
    example->add_option("--h", c.h, "Mesh size")->check(CLI::PositiveNumber);
    example->add_option("--tol", c.tol, "Relative residual tolerance")->check(CLI::PositiveNumber);
    example->add_option("--rays", rays, "Number of rays")->check(CLI::Range(16, 1 << 20));
    example->add_option("--tau-max", tau_max, "Largest perturbation tried at step 2");
    example->add_option("--r-core", r_core, "Initial core radius")->check(CLI::Range(0.5, 0.999));
    example->add_option("--seed", seed, "Seed for sampled diagnostics (none are sampled by default)");
    example->add_option("--out", c.out, "Output directory");

    std::string field_csv_path;
    std::string svg_out = "domain.svg";
    auto* render = app.add_subcommand("render", "Render a domain (and optional field CSV) as SVG");
    render->add_option("--in", in, "Domain JSON")->required();
    render->add_option("--field", field_csv_path, "Field CSV for a heatmap");
    render->add_option("--out", svg_out, "Output SVG path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kValidation;
    }

    try {
        const MetricModel model(model_kind_from_string(c.model.c_str()));
        const DiscSpec disc = DiscSpec::make(model);

        if (*build) {
            const ScherkPolygon d = build_stage(disc, x0, stage, tau_max);
            const fs::path dir = ensure_dir(c.out);
            write_json(dir / (stage_file(stage) + ".json"), to_json(d));
            write_file((dir / (stage_file(stage) + ".svg")).string(), render_svg(d));
            std::cout << canonical_json(to_json(d));
            return kOk;
        }
        if (*check) {
            const ScherkPolygon d = read_domain(in);
            const AdmissibilityReport r = check_admissible(d, c.tol);
            const std::string text = canonical_json(to_json(r));
            if (!check_out.empty()) write_file((ensure_dir(check_out) / "check.json").string(), text);
            std::cout << text;
            return kOk;
        }
        if (*render) {
            const ScherkPolygon d = read_domain(in);
            std::vector<CsvSample> heat;
            if (!field_csv_path.empty()) heat = parse_field_csv(read_file(field_csv_path));
            write_file(svg_out, render_svg(d, field_csv_path.empty() ? nullptr : &heat));
            return kOk;
        }
        if (*solve_cmd || *fatou_cmd) {
            const Variant v = variant_from_string(variant);
            SolveParams params;
            params.tol = c.tol;
            MeshOptions mo;
            mo.h = c.h;
            const fs::path dir = ensure_dir(c.out);
            std::vector<Field> fields;
            std::optional<ScherkPolygon> domain;
            if (!in.empty()) {
                domain = read_domain(in);
                const OperatorSpec op = OperatorSpec::make(v, domain->disc.model);
                try {
                    fields = solve_scherk(*domain, op, parse_caps(caps_text), mo, params);
                } catch (const SolverError& e) {
                    std::cerr << "error: " << e.what() << "\n";
                    return kNoConvergence;
                }
            } else {
                const OperatorSpec op = OperatorSpec::make(v, model);
                fields.push_back(solve(triangulate(disc, mo), op, BoundaryData::from_function(boundary_function(bc_name)), params));
            }
            const Field& last = fields.back();
            if (*solve_cmd) {
                write_file((dir / "field.csv").string(), field_csv(last));
                Json log = to_json(last.info);
                if (fields.size() > 1) {
                    Json per = Json::array();
                    for (const Field& f : fields) {
                        Json e = to_json(f.info);
                        e["cap"] = f.cap();
                        per.push_back(e);
                    }
                    log["caps"] = per;
                }
                write_json(dir / "solve_log.json", log);
                if (domain) {
                    const auto samples = parse_field_csv(field_csv(last));
                    write_file((dir / "field.svg").string(), render_svg(*domain, &samples));
                }
            } else {
                if (!domain) write_json(dir / "hypothesis.json", to_json(check_hypotheses(last, delta)));
                write_json(dir / "fatou.json", to_json(fatou_report(last, rays)));
            }
            if (!last.info.converged) {
                std::cerr << "error: Newton did not converge (residual " << last.info.residual_norm << ")\n";
                return kNoConvergence;
            }
            return kOk;
        }
        if (*example) {
            ExampleOptions opt;
            opt.steps = steps;
            opt.caps = parse_caps(example_caps);
            opt.mesh.h = c.h;
            opt.rays = rays;
            opt.solve.tol = c.tol;
            opt.schedule.tau.tau_max = tau_max;
            opt.schedule.r_default = r_core;
            opt.op = OperatorSpec::make(model.is_hyperbolic() ? Variant::minimal_hyperbolic : Variant::minimal_euclidean,
                                        model);
            ExampleRun run;
            try {
                run = run_example(disc, opt);
            } catch (const SolverError& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kNoConvergence;
            }
            const fs::path dir = ensure_dir(c.out);
            Json summary;
            summary["steps"] = steps;
            summary["caps"] = opt.caps;
            summary["h"] = c.h;
            summary["rays"] = rays;
            summary["seed"] = seed;
            Json per = Json::array();
            for (std::size_t i = 0; i < run.results.size(); ++i) {
                const ExampleStep& st = run.sequence.steps[i];
                const StepResult& r = run.results[i];
                const fs::path sd = ensure_dir((dir / ("step_" + std::to_string(st.step))).string());
                write_json(sd / "manifest.json", manifest_json(st));
                write_json(sd / "domain.json", to_json(st.domain));
                write_file((sd / "domain.svg").string(), render_svg(st.domain));
                const std::string csv = field_csv(r.fields.back());
                write_file((sd / "field.csv").string(), csv);
                const auto samples = parse_field_csv(csv);
                write_file((sd / "field.svg").string(), render_svg(st.domain, &samples));
                Json logs = Json::array();
                for (const Field& f : r.fields) {
                    Json e = to_json(f.info);
                    e["cap"] = f.cap();
                    logs.push_back(e);
                }
                write_json(sd / "solve_log.json", logs);
                write_json(sd / "fatou.json", to_json(r.report));
                Json s;
                s["step"] = st.step;
                s["vertices"] = st.domain.size();
                s["tau"] = st.tau;
                s["mu_finite"] = r.report.mu_finite;
                s["mu_plus"] = r.report.mu_plus;
                s["mu_minus"] = r.report.mu_minus;
                s["mu_und"] = r.report.mu_und;
                s["u_p0"] = r.p0;
                s["tv"] = r.tv;
                s["gate_ok"] = st.gate_ok;
                per.push_back(s);
            }
            summary["per_step"] = per;
            write_json(dir / "summary.json", summary);
            std::cout << canonical_json(summary);
            return kOk;
        }
    } catch (const SolverError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNoConvergence;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const NoAdmissibleTau& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const MeshError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kOk;
}
