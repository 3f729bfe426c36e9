#include "scherk/solver.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "scherk/error.hpp"
#include "scherk/parallel.hpp"

namespace scherk {

const char* to_string(Variant variant) {
    switch (variant) {
        case Variant::minimal_euclidean: return "minimal_euclidean";
        case Variant::minimal_hyperbolic: return "minimal_hyperbolic";
        case Variant::heisenberg: return "heisenberg";
        case Variant::harmonic: return "harmonic";
    }
    return "?";
}

Variant variant_from_string(const std::string& name) {
    for (Variant v : {Variant::minimal_euclidean, Variant::minimal_hyperbolic, Variant::heisenberg, Variant::harmonic}) {
        if (name == to_string(v)) return v;
    }
    if (name == "heisenberg_killing") return Variant::heisenberg;
    throw DomainError("unknown operator variant '" + name + "'");
}

OperatorSpec OperatorSpec::make(Variant variant, MetricModel metric) {
    OperatorSpec op;
    op.variant = variant;
    op.metric = metric;
    return op;
}

double OperatorSpec::lambda(Vec2 x) const {
    if (variant == Variant::minimal_euclidean || variant == Variant::heisenberg) return 1.0;
    return metric.conformal_factor(x);
}

namespace {

Vec2 heisenberg_shift(Vec2 x) { return {0.5 * x.y, -0.5 * x.x}; }

}  // namespace

WeakFlux weak_flux(const OperatorSpec& op, Vec2 x, Vec2 grad) {
    WeakFlux w{};
    if (op.variant == Variant::harmonic) {
        // div_g grad_g u = lambda^-2 div(grad u) in two dimensions.
        w.q = grad;
        w.dq[0][0] = w.dq[1][1] = 1.0;
        w.dq[0][1] = w.dq[1][0] = 0.0;
        return w;
    }
    Vec2 a = grad;
    double mu = 1.0;
    if (op.variant == Variant::heisenberg) a = grad + heisenberg_shift(x);
    if (op.variant == Variant::minimal_hyperbolic) {
        const double l = op.lambda(x);
        mu = 1.0 / (l * l);
    }
    // q = a / W with W^2 = 1 + mu |a|^2; lambda^2 X reduces to this form.
    const double W = std::hypot(1.0, std::sqrt(mu) * norm(a));
    const double W3 = W * W * W;
    w.q = (1.0 / W) * a;
    const double c[2] = {a.x, a.y};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) w.dq[i][j] = (i == j ? 1.0 / W : 0.0) - mu * c[i] * c[j] / W3;
    }
    return w;
}

double weak_energy(const OperatorSpec& op, Vec2 x, Vec2 grad) {
    switch (op.variant) {
        case Variant::harmonic: return 0.5 * norm2(grad);
        case Variant::minimal_euclidean: return std::sqrt(1.0 + norm2(grad));
        case Variant::heisenberg: return std::sqrt(1.0 + norm2(grad + heisenberg_shift(x)));
        case Variant::minimal_hyperbolic: {
            const double l = op.lambda(x);
            return l * l * std::sqrt(1.0 + norm2(grad) / (l * l));
        }
    }
    return 0.0;
}

Vec2 flux(const OperatorSpec& op, Vec2 x, Vec2 grad) {
    const double l = op.lambda(x);
    return (1.0 / (l * l)) * weak_flux(op, x, grad).q;
}

double flux_norm(const OperatorSpec& op, Vec2 x, Vec2 grad) {
    const double l = op.lambda(x);
    if (op.variant == Variant::harmonic) return norm(grad) / l;
    const Vec2 a = op.variant == Variant::heisenberg ? grad + heisenberg_shift(x) : grad;
    // t / sqrt(1 + t^2) with t the metric norm; hypot keeps the result <= 1 in floating point
    const double t = norm(a) / l;
    return t / std::hypot(1.0, t);
}

BoundaryData BoundaryData::constant(double value) {
    BoundaryData bc;
    bc.fallback = [value](Vec2) { return value; };
    return bc;
}

BoundaryData BoundaryData::from_function(std::function<double(Vec2)> g) {
    BoundaryData bc;
    bc.fallback = std::move(g);
    return bc;
}

BoundaryData BoundaryData::scherk(const ScherkPolygon& polygon, double cap) {
    if (!(cap > 0.0)) throw DomainError("cap must be positive");
    BoundaryData bc;
    bc.cap = cap;
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        bc.sides[static_cast<int>(i)] = {
            polygon.labels[i] == SideLabel::A ? SideValue::Kind::plus_inf : SideValue::Kind::minus_inf, 0.0};
    }
    return bc;
}

double BoundaryData::edge_value(int marker, Vec2 x) const {
    const auto it = sides.find(marker);
    if (it == sides.end()) return fallback ? fallback(x) : 0.0;
    switch (it->second.kind) {
        case SideValue::Kind::plus_inf: return cap;
        case SideValue::Kind::minus_inf: return -cap;
        case SideValue::Kind::finite: return it->second.value;
    }
    return 0.0;
}

bool BoundaryData::has_infinite() const {
    return std::any_of(sides.begin(), sides.end(),
                       [](const auto& kv) { return kv.second.kind != SideValue::Kind::finite; });
}

std::vector<Vec2> triangle_gradients(const Mesh& mesh, const std::vector<double>& u) {
    std::vector<Vec2> g(mesh.triangles.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tr = mesh.triangles[t];
        const Vec2 p0 = mesh.nodes[static_cast<std::size_t>(tr[0])];
        const Vec2 e1 = mesh.nodes[static_cast<std::size_t>(tr[1])] - p0;
        const Vec2 e2 = mesh.nodes[static_cast<std::size_t>(tr[2])] - p0;
        const double det = cross(e1, e2);
        const double d1 = u[static_cast<std::size_t>(tr[1])] - u[static_cast<std::size_t>(tr[0])];
        const double d2 = u[static_cast<std::size_t>(tr[2])] - u[static_cast<std::size_t>(tr[0])];
        g[t] = {(d1 * e2.y - d2 * e1.y) / det, (d2 * e1.x - d1 * e2.x) / det};
    }
    return g;
}

std::vector<double> dirichlet_values(const Mesh& mesh, const BoundaryData& bc) {
    std::vector<double> sum(mesh.nodes.size(), 0.0);
    std::vector<int> count(mesh.nodes.size(), 0);
    for (const auto& e : mesh.boundary) {
        for (int v : {e.a, e.b}) {
            sum[static_cast<std::size_t>(v)] += bc.edge_value(e.marker, mesh.nodes[static_cast<std::size_t>(v)]);
            ++count[static_cast<std::size_t>(v)];
        }
    }
    std::vector<double> g(mesh.nodes.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (count[i] > 0) g[i] = sum[i] / count[i];
    }
    return g;
}

Field::Field(std::shared_ptr<const Mesh> mesh, OperatorSpec op, std::vector<double> values, double cap)
    : mesh_(std::move(mesh)), op_(std::move(op)), u_(std::move(values)), cap_(cap) {
    if (u_.size() != mesh_->nodes.size()) throw Error("field size does not match the mesh");
    grad_ = triangle_gradients(*mesh_, u_);
    locator_ = std::make_shared<PointLocator>(*mesh_);
}

std::optional<double> Field::value_at(Vec2 p) const {
    const auto loc = locator_->locate(p);
    if (!loc) return std::nullopt;
    const auto& tr = mesh_->triangles[loc->triangle];
    double v = 0.0;
    for (int k = 0; k < 3; ++k) v += loc->bary[static_cast<std::size_t>(k)] * u_[static_cast<std::size_t>(tr[k])];
    return v;
}

std::vector<Vec2> Field::nodal_gradients() const {
    std::vector<Vec2> sum(u_.size());
    std::vector<double> weight(u_.size(), 0.0);
    for (std::size_t t = 0; t < mesh_->triangles.size(); ++t) {
        const double a = mesh_->area(t);
        for (int v : mesh_->triangles[t]) {
            sum[static_cast<std::size_t>(v)] = sum[static_cast<std::size_t>(v)] + a * grad_[t];
            weight[static_cast<std::size_t>(v)] += a;
        }
    }
    for (std::size_t i = 0; i < sum.size(); ++i) {
        if (weight[i] > 0) sum[i] = (1.0 / weight[i]) * sum[i];
    }
    return sum;
}

namespace {

struct Local {
    double r[3];
    double j[3][3];
};

bool x_dependent(const OperatorSpec& op) {
    return op.variant == Variant::heisenberg || op.variant == Variant::minimal_hyperbolic;
}

// Element residuals and Jacobians, computed in parallel into per-triangle slots.
std::vector<Local> element_terms(const Mesh& mesh, const OperatorSpec& op, const std::vector<double>& u,
                                 bool with_jacobian) {
    std::vector<Local> out(mesh.triangles.size());
    const bool multi = x_dependent(op) || static_cast<bool>(op.source);
    const bool hyperbolic_source = op.metric.is_hyperbolic() && op.variant != Variant::minimal_euclidean &&
                                   op.variant != Variant::heisenberg;
    parallel_for(mesh.triangles.size(), [&](std::size_t t) {
        const auto& tr = mesh.triangles[t];
        const Vec2 p[3] = {mesh.nodes[static_cast<std::size_t>(tr[0])], mesh.nodes[static_cast<std::size_t>(tr[1])],
                           mesh.nodes[static_cast<std::size_t>(tr[2])]};
        const double det = cross(p[1] - p[0], p[2] - p[0]);
        const double area = 0.5 * det;
        // grad phi_k = perp(opposite edge) / det
        Vec2 gphi[3];
        for (int k = 0; k < 3; ++k) {
            const Vec2 e = p[(k + 2) % 3] - p[(k + 1) % 3];
            gphi[k] = {-e.y / det, e.x / det};
        }
        Vec2 grad{};
        for (int k = 0; k < 3; ++k) grad = grad + u[static_cast<std::size_t>(tr[k])] * gphi[k];
        Local& L = out[t];
        for (int a = 0; a < 3; ++a) {
            L.r[a] = 0.0;
            for (int b = 0; b < 3; ++b) L.j[a][b] = 0.0;
        }
        const int nq = multi ? 3 : 1;
        for (int q = 0; q < nq; ++q) {
            double bary[3] = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
            if (nq == 3) {
                bary[0] = bary[1] = bary[2] = 1.0 / 6.0;
                bary[q] = 2.0 / 3.0;
            }
            const Vec2 x = bary[0] * p[0] + bary[1] * p[1] + bary[2] * p[2];
            const double w = area / nq;
            const WeakFlux f = weak_flux(op, x, grad);
            double src = 0.0;
            if (op.source) {
                const double l = hyperbolic_source ? op.metric.conformal_factor(x) : 1.0;
                src = op.source(x) * l * l;
            }
            for (int a = 0; a < 3; ++a) {
                L.r[a] += w * (dot(f.q, gphi[a]) + src * bary[a]);
                if (!with_jacobian) continue;
                const Vec2 dg{f.dq[0][0] * gphi[a].x + f.dq[1][0] * gphi[a].y,
                              f.dq[0][1] * gphi[a].x + f.dq[1][1] * gphi[a].y};
                for (int b = 0; b < 3; ++b) L.j[a][b] += w * dot(dg, gphi[b]);
            }
        }
    });
    return out;
}

double total_energy(const Mesh& mesh, const OperatorSpec& op, const std::vector<double>& u) {
    std::vector<double> e(mesh.triangles.size());
    const bool multi = x_dependent(op) || static_cast<bool>(op.source);
    const bool hyperbolic_source = op.metric.is_hyperbolic() && op.variant != Variant::minimal_euclidean &&
                                   op.variant != Variant::heisenberg;
    const auto grads = triangle_gradients(mesh, u);
    parallel_for(mesh.triangles.size(), [&](std::size_t t) {
        const auto& tr = mesh.triangles[t];
        const Vec2 p[3] = {mesh.nodes[static_cast<std::size_t>(tr[0])], mesh.nodes[static_cast<std::size_t>(tr[1])],
                           mesh.nodes[static_cast<std::size_t>(tr[2])]};
        const double area = 0.5 * cross(p[1] - p[0], p[2] - p[0]);
        const int nq = multi ? 3 : 1;
        double sum = 0.0;
        for (int q = 0; q < nq; ++q) {
            double bary[3] = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
            if (nq == 3) {
                bary[0] = bary[1] = bary[2] = 1.0 / 6.0;
                bary[q] = 2.0 / 3.0;
            }
            const Vec2 x = bary[0] * p[0] + bary[1] * p[1] + bary[2] * p[2];
            double v = weak_energy(op, x, grads[t]);
            if (op.source) {
                const double l = hyperbolic_source ? op.metric.conformal_factor(x) : 1.0;
                double uq = 0.0;
                for (int k = 0; k < 3; ++k) uq += bary[k] * u[static_cast<std::size_t>(tr[k])];
                v += op.source(x) * l * l * uq;
            }
            sum += area / nq * v;
        }
        e[t] = sum;
    });
    double total = 0.0;
    for (double v : e) total += v;
    return total;
}

// Scatters element terms in triangle order; index[v] < 0 drops node v.
void scatter(const Mesh& mesh, const std::vector<Local>& terms, const std::vector<int>& index, Eigen::VectorXd* r,
             std::vector<Eigen::Triplet<double>>* trip) {
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tr = mesh.triangles[t];
        for (int a = 0; a < 3; ++a) {
            const int ia = index[static_cast<std::size_t>(tr[a])];
            if (ia < 0) continue;
            if (r) (*r)[ia] += terms[t].r[a];
            if (!trip) continue;
            for (int b = 0; b < 3; ++b) {
                const int ib = index[static_cast<std::size_t>(tr[b])];
                if (ib >= 0) trip->emplace_back(ia, ib, terms[t].j[a][b]);
            }
        }
    }
}

}  // namespace

Assembly assemble(const Mesh& mesh, const OperatorSpec& op, const std::vector<double>& u) {
    const auto n = static_cast<Eigen::Index>(mesh.nodes.size());
    std::vector<int> index(mesh.nodes.size());
    for (std::size_t i = 0; i < index.size(); ++i) index[i] = static_cast<int>(i);
    const auto terms = element_terms(mesh, op, u, true);
    Assembly out;
    out.residual = Eigen::VectorXd::Zero(n);
    std::vector<Eigen::Triplet<double>> trip;
    scatter(mesh, terms, index, &out.residual, &trip);
    out.jacobian.resize(n, n);
    out.jacobian.setFromTriplets(trip.begin(), trip.end());
    return out;
}

namespace {

class Newton {
public:
    Newton(const Mesh& mesh, const OperatorSpec& op, const std::vector<double>& fixed) : mesh_(mesh), op_(op) {
        index_.assign(mesh.nodes.size(), -1);
        for (std::size_t i = 0; i < fixed.size(); ++i) {
            if (std::isnan(fixed[i])) {
                index_[i] = static_cast<int>(free_.size());
                free_.push_back(i);
            }
        }
    }

    std::size_t free_count() const { return free_.size(); }
    double energy(const std::vector<double>& u) const { return total_energy(mesh_, op_, u); }

    Eigen::VectorXd residual(const std::vector<double>& u) const {
        Eigen::VectorXd r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(free_.size()));
        scatter(mesh_, element_terms(mesh_, op_, u, false), index_, &r, nullptr);
        return r;
    }

    Eigen::VectorXd step(const std::vector<double>& u, const Eigen::VectorXd& r) const {
        const auto n = static_cast<Eigen::Index>(free_.size());
        std::vector<Eigen::Triplet<double>> trip;
        scatter(mesh_, element_terms(mesh_, op_, u, true), index_, nullptr, &trip);
        Eigen::SparseMatrix<double> J(n, n);
        J.setFromTriplets(trip.begin(), trip.end());
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(J);
        if (ldlt.info() == Eigen::Success) {
            Eigen::VectorXd d = ldlt.solve(-r);
            if (ldlt.info() == Eigen::Success && d.allFinite()) return d;
        }
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(J);
        if (lu.info() != Eigen::Success) throw MeshError("singular stiffness matrix");
        return lu.solve(-r);
    }

    void apply(std::vector<double>& u, const std::vector<double>& base, const Eigen::VectorXd& d,
               double alpha) const {
        for (std::size_t k = 0; k < free_.size(); ++k) {
            u[free_[k]] = base[free_[k]] + alpha * d[static_cast<Eigen::Index>(k)];
        }
    }

private:
    const Mesh& mesh_;
    const OperatorSpec& op_;
    std::vector<int> index_;
    std::vector<std::size_t> free_;
};

}  // namespace

Field solve(std::shared_ptr<const Mesh> mesh_ptr, const OperatorSpec& op, const BoundaryData& bc,
            const SolveParams& params, const std::vector<double>* initial) {
    const Mesh& mesh = *mesh_ptr;
    if (mesh.triangles.empty()) throw MeshError("empty mesh");
    for (const auto& e : mesh.boundary) {
        if (e.marker >= 0 && !bc.sides.empty() && !bc.fallback && !bc.sides.count(e.marker)) {
            throw DomainError("boundary data misses side " + std::to_string(e.marker));
        }
    }
    const std::vector<double> g = dirichlet_values(mesh, bc);
    Newton newton(mesh, op, g);

    std::vector<double> u(mesh.nodes.size(), 0.0);
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!std::isnan(g[i])) u[i] = g[i];
    }
    const double reference = std::max(1.0, newton.residual(u).norm());
    if (initial) {
        if (initial->size() != u.size()) throw Error("initial guess size does not match the mesh");
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (std::isnan(g[i])) u[i] = (*initial)[i];
        }
    } else if (op.variant != Variant::harmonic && newton.free_count() > 0) {
        // Start nonlinear solves from the Laplace extension of the data.
        const OperatorSpec lap = OperatorSpec::make(Variant::harmonic);
        Newton linear(mesh, lap, g);
        const Eigen::VectorXd d = linear.step(u, linear.residual(u));
        linear.apply(u, u, d, 1.0);
    }

    double lo = 0.0, hi = 0.0;
    for (double v : g) {
        if (std::isnan(v)) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double step_limit = std::max(1.0, hi - lo);

    SolveInfo info;
    info.reference_norm = reference;
    const double target = params.tol * reference;
    std::vector<double> trial(u.size());
    Eigen::VectorXd r = newton.residual(u);
    double rn = r.norm();
    info.residuals.push_back(rn);
    while (rn > target && info.newton_iters < params.max_newton) {
        Eigen::VectorXd d = newton.step(u, r);
        // Nearly flat directions of the minimal-surface Jacobian produce
        // huge updates; keep each update within the range of the data.
        const double dmax = d.lpNorm<Eigen::Infinity>();
        if (dmax > step_limit) d *= step_limit / dmax;
        trial = u;
        double alpha = 1.0;
        bool accepted = false;
        Eigen::VectorXd rt;
        while (alpha >= params.damping_floor) {
            newton.apply(trial, u, d, alpha);
            rt = newton.residual(trial);
            if (rt.allFinite() && rt.norm() < rn) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            // Steep data can leave the residual norm non-monotone along the
            // Newton direction; the convex energy still decreases along it.
            const double e0 = newton.energy(u);
            const double slope = r.dot(d);
            alpha = 1.0;
            while (slope < 0.0 && alpha >= params.damping_floor) {
                newton.apply(trial, u, d, alpha);
                const double e1 = newton.energy(trial);
                if (std::isfinite(e1) && e1 <= e0 + 1e-4 * alpha * slope) {
                    rt = newton.residual(trial);
                    accepted = rt.allFinite();
                    break;
                }
                alpha *= 0.5;
            }
        }
        if (!accepted) break;
        u.swap(trial);
        r = std::move(rt);
        rn = r.norm();
        ++info.newton_iters;
        info.damping.push_back(alpha);
        info.residuals.push_back(rn);
    }
    info.residual_norm = rn;
    info.converged = rn <= target;
    Field field(std::move(mesh_ptr), op, std::move(u), bc.has_infinite() ? bc.cap : 0.0);
    field.info = std::move(info);
    return field;
}

Field solve(const Mesh& mesh, const OperatorSpec& op, const BoundaryData& bc, const SolveParams& params,
            const std::vector<double>* initial) {
    return solve(std::make_shared<const Mesh>(mesh), op, bc, params, initial);
}

std::vector<Field> solve_scherk(std::shared_ptr<const Mesh> mesh, const ScherkPolygon& polygon,
                                const OperatorSpec& op, const std::vector<double>& caps,
                                const SolveParams& params) {
    if (caps.empty()) throw DomainError("at least one cap is required");
    for (std::size_t k = 0; k < caps.size(); ++k) {
        if (!(caps[k] > 0.0) || (k > 0 && !(caps[k] > caps[k - 1]))) {
            throw DomainError("caps must be positive and strictly increasing");
        }
    }
    std::vector<Field> fields;
    for (std::size_t k = 0; k < caps.size(); ++k) {
        const BoundaryData bc = BoundaryData::scherk(polygon, caps[k]);
        const std::vector<double>* warm = fields.empty() ? nullptr : &fields.back().values();
        Field f = solve(mesh, op, bc, params, warm);
        if (!f.info.converged) {
            char msg[128];
            std::snprintf(msg, sizeof msg, "no convergence at cap %g (residual %.3g, target %.3g)", caps[k],
                          f.info.residual_norm, params.tol * f.info.reference_norm);
            throw SolverError(msg, static_cast<int>(k));
        }
        fields.push_back(std::move(f));
    }
    return fields;
}

std::vector<Field> solve_scherk(const ScherkPolygon& polygon, const OperatorSpec& op,
                                const std::vector<double>& caps, const MeshOptions& mesh_options,
                                const SolveParams& params) {
    auto mesh = std::make_shared<const Mesh>(triangulate(polygon, mesh_options));
    return solve_scherk(std::move(mesh), polygon, op, caps, params);
}

}  // namespace scherk
