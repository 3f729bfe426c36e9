#pragma once

#include <memory>
#include <vector>

#include "scherk/domains.hpp"
#include "scherk/fatou.hpp"
#include "scherk/mesh.hpp"
#include "scherk/solver.hpp"

namespace scherk {

struct ExampleOptions {
    int steps = 3;
    std::vector<double> caps{5.0, 10.0, 20.0};
    MeshOptions mesh{};
    int rays = 256;
    RayParams ray{};
    ExampleSchedule schedule{};
    SolveParams solve{};
    OperatorSpec op = OperatorSpec::make(Variant::minimal_hyperbolic, MetricModel::hyperbolic());
    bool gates = true;
    std::vector<double> tv_radii{0.5, 0.9, 0.95, 0.99};
};

struct StepResult {
    std::shared_ptr<const Mesh> mesh;
    std::vector<Field> fields;  // one per cap
    std::vector<double> p0;     // u(p0) per cap
    FatouReport report;         // for the largest cap
    std::vector<double> tv;     // TV integrals of eta(u) for the largest cap
};

struct ExampleRun {
    ExampleSequence sequence;
    std::vector<StepResult> results;
};

// Iterates the domain sequence and solves, gates and classifies every step.
ExampleRun run_example(const DiscSpec& disc, const ExampleOptions& options);

// Values of u on the kept parts of the core sides, split by label.
GateResult evaluate_gate(const Field& field, const CompactCore& core, const Field* prev_field,
                         const CompactCore* prev_core);

}  // namespace scherk
