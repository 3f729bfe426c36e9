#include "scherk/example.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "scherk/error.hpp"

namespace scherk {

namespace {

constexpr int kSideSamples = 32;

}  // namespace

GateResult evaluate_gate(const Field& field, const CompactCore& core, const Field* prev_field,
                         const CompactCore* prev_core) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    GateResult g;
    auto extremes = [&](const CompactCore& c, double& min_a, double& max_b) {
        min_a = inf;
        max_b = -inf;
        for (std::size_t i = 0; i < c.labels.size(); ++i) {
            for (const Vec2& p : c.side_samples(i, kSideSamples)) {
                const auto v = field.value_at(p);
                if (!v) continue;
                if (c.labels[i] == SideLabel::A) min_a = std::min(min_a, *v);
                else max_b = std::max(max_b, *v);
            }
        }
    };
    extremes(core, g.min_a, g.max_b);
    if (prev_core) {
        extremes(*prev_core, g.prev_min_a, g.prev_max_b);
        if (prev_field) {
            for (std::size_t i = 0; i < prev_core->labels.size(); ++i) {
                for (const Vec2& p : prev_core->side_samples(i, kSideSamples)) {
                    const auto a = field.value_at(p);
                    const auto b = prev_field->value_at(p);
                    if (a && b) g.drift = std::max(g.drift, std::abs(*a - *b));
                }
            }
        }
    }
    g.u_center = field.value_at({0.0, 0.0}).value_or(0.0);
    return g;
}

ExampleRun run_example(const DiscSpec& disc, const ExampleOptions& options) {
    if (options.caps.empty()) throw DomainError("at least one cap is required");
    std::map<int, StepResult> solved;
    auto solve_step = [&](int n, const ScherkPolygon& domain) -> StepResult& {
        auto it = solved.find(n);
        if (it != solved.end()) return it->second;
        StepResult r;
        r.mesh = std::make_shared<const Mesh>(triangulate(domain, options.mesh));
        try {
            r.fields = solve_scherk(r.mesh, domain, options.op, options.caps, options.solve);
        } catch (const SolverError& e) {
            throw SolverError("step " + std::to_string(n) + ": " + e.what(), n);
        }
        for (const Field& f : r.fields) r.p0.push_back(f.value_at({0.0, 0.0}).value_or(0.0));
        return solved.emplace(n, std::move(r)).first->second;
    };
    GateEvaluator gate;
    if (options.gates) {
        gate = [&](int n, const ScherkPolygon& domain, const CompactCore& core, const CompactCore* prev_core) {
            const StepResult& cur = solve_step(n, domain);
            const Field* prev = nullptr;
            if (auto it = solved.find(n - 1); it != solved.end()) prev = &it->second.fields.back();
            return evaluate_gate(cur.fields.back(), core, prev, prev_core);
        };
    }
    ExampleRun run;
    run.sequence = iterate_example(disc, options.steps, options.schedule, gate);
    for (const ExampleStep& step : run.sequence.steps) {
        StepResult& r = solve_step(step.step, step.domain);
        r.report = fatou_report(r.fields.back(), options.rays, options.ray);
        r.tv = tv_integral(compress(r.fields.back()), options.tv_radii);
        run.results.push_back(r);
    }
    return run;
}

}  // namespace scherk
