#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scherk/domains.hpp"
#include "scherk/mesh.hpp"

namespace scherk {

enum class Variant { minimal_euclidean, minimal_hyperbolic, heisenberg, harmonic };

const char* to_string(Variant variant);
Variant variant_from_string(const std::string& name);

struct OperatorSpec {
    Variant variant = Variant::harmonic;
    std::function<double(Vec2)> source;  // f; empty means 0
    MetricModel metric = MetricModel::euclidean();

    static OperatorSpec make(Variant variant, MetricModel metric = MetricModel::euclidean());
    // True when the flux stays in the unit ball of the metric.
    bool bounded_flux() const { return variant != Variant::harmonic; }
    // lambda used by the weak form: the model metric for the hyperbolic minimal
    // operator and the harmonic operator, 1 otherwise.
    double lambda(Vec2 x) const;
};

// X_u at x for gradient grad (model coordinates, components of the vector field).
Vec2 flux(const OperatorSpec& op, Vec2 x, Vec2 grad);

// |X_u| measured in the metric.
double flux_norm(const OperatorSpec& op, Vec2 x, Vec2 grad);

// q = lambda^2 X_u, the vector paired with grad(phi) in the Euclidean weak
// form, and dq/dgrad (symmetric for every variant).
struct WeakFlux {
    Vec2 q;
    double dq[2][2];
};

WeakFlux weak_flux(const OperatorSpec& op, Vec2 x, Vec2 grad);

// Energy density whose gradient in grad is q; every variant is variational.
double weak_energy(const OperatorSpec& op, Vec2 x, Vec2 grad);

struct SideValue {
    enum class Kind { finite, plus_inf, minus_inf };
    Kind kind = Kind::finite;
    double value = 0.0;
};

// Dirichlet data per boundary marker. Infinite values are replaced by +-cap.
// Markers without an entry use `fallback` (evaluated at the node), or 0.
struct BoundaryData {
    std::map<int, SideValue> sides;
    std::function<double(Vec2)> fallback;
    double cap = 0.0;

    static BoundaryData constant(double value);
    static BoundaryData from_function(std::function<double(Vec2)> g);
    static BoundaryData scherk(const ScherkPolygon& polygon, double cap);

    double edge_value(int marker, Vec2 x) const;
    bool has_infinite() const;
};

struct SolveParams {
    double tol = 1e-10;  // relative to max(1, residual of the zero-interior state)
    int max_newton = 200;
    double damping_floor = 1.0 / 1048576.0;
};

struct SolveInfo {
    bool converged = false;
    int newton_iters = 0;
    double residual_norm = 0.0;
    double reference_norm = 1.0;
    std::vector<double> residuals;  // residual norm before each step and at the end
    std::vector<double> damping;    // accepted step length per Newton step
};

class Field {
public:
    Field(std::shared_ptr<const Mesh> mesh, OperatorSpec op, std::vector<double> values, double cap = 0.0);

    const Mesh& mesh() const { return *mesh_; }
    std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
    const OperatorSpec& op() const { return op_; }
    const std::vector<double>& values() const { return u_; }
    const std::vector<Vec2>& gradients() const { return grad_; }  // per triangle
    double cap() const { return cap_; }
    const PointLocator& locator() const { return *locator_; }

    // Barycentric interpolation; nullopt outside the mesh.
    std::optional<double> value_at(Vec2 p) const;
    // Area-weighted average of adjacent triangle gradients.
    std::vector<Vec2> nodal_gradients() const;

    SolveInfo info;

private:
    std::shared_ptr<const Mesh> mesh_;
    std::shared_ptr<const PointLocator> locator_;
    OperatorSpec op_;
    std::vector<double> u_;
    std::vector<Vec2> grad_;
    double cap_ = 0.0;
};

// Per-triangle P1 gradient of nodal values.
std::vector<Vec2> triangle_gradients(const Mesh& mesh, const std::vector<double>& u);

// Dirichlet value per boundary node: the mean of the values of its incident
// boundary edges (so an A/B corner gets 0). NaN for interior nodes.
std::vector<double> dirichlet_values(const Mesh& mesh, const BoundaryData& bc);

struct Assembly {
    Eigen::VectorXd residual;             // per node
    Eigen::SparseMatrix<double> jacobian;  // node x node
};

// Weak residual of div X = f: R_i = sum_T int lambda^2 X(grad u) . grad(phi_i) + int lambda^2 f phi_i.
Assembly assemble(const Mesh& mesh, const OperatorSpec& op, const std::vector<double>& u);

// Newton with backtracking on the residual norm. Never throws on
// non-convergence: the best iterate is returned with info.converged = false.
Field solve(std::shared_ptr<const Mesh> mesh, const OperatorSpec& op, const BoundaryData& bc,
            const SolveParams& params = {}, const std::vector<double>* initial = nullptr);

Field solve(const Mesh& mesh, const OperatorSpec& op, const BoundaryData& bc, const SolveParams& params = {},
            const std::vector<double>* initial = nullptr);

// Cap continuation on a Scherk domain: one field per cap, each warm-started
// from the previous one. Throws SolverError (step = cap index) when a cap
// does not converge.
std::vector<Field> solve_scherk(const ScherkPolygon& polygon, const OperatorSpec& op,
                                const std::vector<double>& caps, const MeshOptions& mesh_options,
                                const SolveParams& params = {});

std::vector<Field> solve_scherk(std::shared_ptr<const Mesh> mesh, const ScherkPolygon& polygon,
                                const OperatorSpec& op, const std::vector<double>& caps,
                                const SolveParams& params = {});

}  // namespace scherk
