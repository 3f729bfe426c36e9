#include "scherk/fatou.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scherk/error.hpp"
#include "scherk/parallel.hpp"

namespace scherk {

double Compression::eta(double x) const {
    const double e = 0.5 * (1.0 + std::tanh(0.5 * x));
    return kind == Kind::positive ? e : e - 1.0;
}

double Compression::eta_prime(double x) const {
    const double c = std::cosh(0.5 * x);
    return 0.25 / (c * c);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Three-point rule at (2/3, 1/6, 1/6) and permutations.
template <class Fn>
void for_quadrature(const Mesh& mesh, std::size_t t, Fn&& fn) {
    const auto& tr = mesh.triangles[t];
    const Vec2 p[3] = {mesh.nodes[static_cast<std::size_t>(tr[0])], mesh.nodes[static_cast<std::size_t>(tr[1])],
                       mesh.nodes[static_cast<std::size_t>(tr[2])]};
    const double w = mesh.area(t) / 3.0;
    for (int q = 0; q < 3; ++q) {
        double b[3] = {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
        b[q] = 2.0 / 3.0;
        fn(b[0] * p[0] + b[1] * p[1] + b[2] * p[2], w, b);
    }
}

}  // namespace

double coercivity_h(const OperatorSpec& op, Vec2 x, Vec2 grad, double delta) {
    switch (op.variant) {
        case Variant::heisenberg: {
            const double cross_term = x.y * grad.x - x.x * grad.y;
            const double r2 = norm2(x);
            const double W2 = 1.0 + norm2(grad) + cross_term + 0.25 * r2;
            return -(1.0 + 0.5 * cross_term + 0.25 * r2) / std::sqrt(W2);
        }
        case Variant::minimal_euclidean:
        case Variant::minimal_hyperbolic: {
            const double l = op.lambda(x);
            return -1.0 / std::sqrt(1.0 + norm2(grad) / (l * l));
        }
        case Variant::harmonic: return -0.25 * delta * delta;
    }
    return 0.0;
}

HypothesisReport check_hypotheses(const Field& field, double delta, double rho_lo, double rho_hi) {
    const Mesh& mesh = field.mesh();
    if (mesh.kind != DomainKind::disc) throw UnsupportedDomain("hypothesis checks need a disc domain");
    if (!(delta > 0.0)) throw DomainError("delta must be positive");
    if (!(rho_lo > 0.0 && rho_lo < rho_hi && rho_hi <= 1.0)) throw DomainError("invalid annulus");
    const OperatorSpec& op = field.op();
    HypothesisReport rep;
    rep.rho_lo = rho_lo;
    rep.rho_hi = rho_hi;
    rep.delta = delta;

    rep.alpha_lo = kInf;
    rep.beta_hi = 0.0;
    constexpr int kSamples = 256;
    for (int i = 0; i <= kSamples; ++i) {
        const double rho = rho_lo + (rho_hi - rho_lo) * i / kSamples;
        const double G = polar_density(mesh.model, rho, 0.0);
        rep.alpha_lo = std::min(rep.alpha_lo, G);
        rep.beta_hi = std::max(rep.beta_hi, G);
    }
    rep.verdict_a = rep.alpha_lo > 0.0 && rep.alpha_lo <= rep.beta_hi && std::isfinite(rep.beta_hi);

    struct Acc {
        double M = 0, cmin = kInf, hint = 0, hsup = 0, fint = 0, area = 0, wmin = kInf, ident = 0;
    };
    const std::size_t nt = mesh.triangles.size();
    std::vector<Acc> acc(nt);
    const bool bounded = op.bounded_flux();
    parallel_for(nt, [&](std::size_t t) {
        Acc& a = acc[t];
        const Vec2 p = field.gradients()[t];
        for_quadrature(mesh, t, [&](Vec2 x, double w, const double*) {
            const double l = op.lambda(x);
            const double dA = w * l * l;
            const Vec2 X = flux(op, x, p);
            const double pairing = dot(p, X);  // g(grad_g u, X) in model components
            const double gnorm = norm(p) / l;
            const double h = coercivity_h(op, x, p, delta);
            a.M = std::max(a.M, flux_norm(op, x, p));
            a.cmin = std::min(a.cmin, pairing - delta * gnorm - h);
            a.hint += std::abs(h) * dA;
            a.hsup = std::max(a.hsup, std::abs(h));
            if (op.source) a.fint += std::abs(op.source(x)) * dA;
            a.area += dA;
            if (bounded) {
                Vec2 s = p;
                double mu = 1.0 / (l * l);
                if (op.variant == Variant::heisenberg) {
                    s = p + Vec2{0.5 * x.y, -0.5 * x.x};
                    mu = 1.0;
                }
                const double W = std::sqrt(1.0 + mu * norm2(s));
                a.wmin = std::min(a.wmin, W - delta * gnorm);
                a.ident = std::max(a.ident, std::abs(pairing - (W + h)));
            }
        });
    });
    rep.coercivity_min = kInf;
    rep.w_margin = bounded ? kInf : 0.0;
    for (const Acc& a : acc) {
        rep.flux_bound = std::max(rep.flux_bound, a.M);
        rep.coercivity_min = std::min(rep.coercivity_min, a.cmin);
        rep.h_integral += a.hint;
        rep.h_sup = std::max(rep.h_sup, a.hsup);
        rep.f_integral += a.fint;
        rep.area += a.area;
        if (bounded) rep.w_margin = std::min(rep.w_margin, a.wmin);
        rep.identity_error = std::max(rep.identity_error, a.ident);
    }
    rep.quadrature_points = 3 * nt;
    rep.declared_bound = bounded ? 1.0 : kInf;
    rep.verdict_b = std::isfinite(rep.flux_bound) && rep.flux_bound <= rep.declared_bound;
    rep.verdict_c = rep.coercivity_min >= -1e-9 && std::isfinite(rep.h_integral);
    return rep;
}

CompressedField::CompressedField(const Field& field, Compression c)
    : field_(std::make_shared<const Field>(field)), c_(c) {
    const auto& u = field.values();
    psi_.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) psi_[i] = c_.eta(u[i]);
    const Mesh& mesh = field.mesh();
    grad_norm_.resize(mesh.triangles.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tr = mesh.triangles[t];
        const double uc = (u[static_cast<std::size_t>(tr[0])] + u[static_cast<std::size_t>(tr[1])] +
                           u[static_cast<std::size_t>(tr[2])]) /
                          3.0;
        grad_norm_[t] = c_.eta_prime(uc) * norm(field.gradients()[t]);
    }
}

std::optional<double> CompressedField::value_at(Vec2 p) const {
    const auto u = field_->value_at(p);
    if (!u) return std::nullopt;
    return c_.eta(*u);
}

double CompressedField::gradient_norm(std::size_t t, Vec2 x) const {
    const Mesh& mesh = field_->mesh();
    const auto& tr = mesh.triangles[t];
    const Vec2 p0 = mesh.nodes[static_cast<std::size_t>(tr[0])];
    const double u = field_->values()[static_cast<std::size_t>(tr[0])] + dot(field_->gradients()[t], x - p0);
    return c_.eta_prime(u) * norm(field_->gradients()[t]);
}

CompressedField compress(const Field& field, Compression c) { return CompressedField(field, c); }

namespace {

struct SubTri {
    Vec2 a, b, c;
};

// |grad psi|_g dA_g = lambda |grad psi| dx over the part of the triangle
// inside the model disc of radius R.
double clipped_integral(const CompressedField& psi, std::size_t t, const SubTri& s, double R, int depth) {
    const double ra = norm(s.a), rb = norm(s.b), rc = norm(s.c);
    const double area = 0.5 * std::abs(cross(s.b - s.a, s.c - s.a));
    const Mesh& mesh = psi.mesh();
    auto integrate = [&](const SubTri& q) {
        const double w = 0.5 * std::abs(cross(q.b - q.a, q.c - q.a)) / 3.0;
        double sum = 0.0;
        for (int k = 0; k < 3; ++k) {
            double b[3] = {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
            b[k] = 2.0 / 3.0;
            const Vec2 x = b[0] * q.a + b[1] * q.b + b[2] * q.c;
            sum += w * mesh.model.conformal_factor(x) * psi.gradient_norm(t, x);
        }
        return sum;
    };
    if (std::max({ra, rb, rc}) <= R) return integrate(s);
    // Distance from the origin to the triangle, for the fully-outside test.
    auto seg_dist = [](Vec2 p, Vec2 q) {
        const Vec2 d = q - p;
        const double l2 = norm2(d);
        const double t = l2 > 0 ? std::clamp(-dot(p, d) / l2, 0.0, 1.0) : 0.0;
        return norm(p + t * d);
    };
    const bool contains_origin = cross(s.b - s.a, -1.0 * s.a) * cross(s.c - s.b, -1.0 * s.b) >= 0 &&
                                 cross(s.c - s.b, -1.0 * s.b) * cross(s.a - s.c, -1.0 * s.c) >= 0;
    const double dmin = contains_origin ? 0.0 : std::min({seg_dist(s.a, s.b), seg_dist(s.b, s.c), seg_dist(s.c, s.a)});
    if (dmin >= R) return 0.0;
    if (depth == 0 || area == 0.0) {
        const Vec2 g = (1.0 / 3.0) * (s.a + s.b + s.c);
        return norm(g) <= R ? integrate(s) : 0.0;
    }
    const Vec2 ab = 0.5 * (s.a + s.b), bc = 0.5 * (s.b + s.c), ca = 0.5 * (s.c + s.a);
    return clipped_integral(psi, t, {s.a, ab, ca}, R, depth - 1) +
           clipped_integral(psi, t, {ab, s.b, bc}, R, depth - 1) +
           clipped_integral(psi, t, {ca, bc, s.c}, R, depth - 1) + clipped_integral(psi, t, {ab, bc, ca}, R, depth - 1);
}

}  // namespace

std::vector<double> tv_integral(const CompressedField& psi, const std::vector<double>& radii) {
    const Mesh& mesh = psi.mesh();
    for (std::size_t j = 0; j < radii.size(); ++j) {
        if (!(radii[j] > 0.0) || radii[j] > 1.0 + 1e-12) throw DomainError("radius beyond mesh support");
        if (j > 0 && !(radii[j] > radii[j - 1])) throw DomainError("radii must be increasing");
    }
    std::vector<double> out(radii.size(), 0.0);
    const std::size_t nt = mesh.triangles.size();
    for (std::size_t j = 0; j < radii.size(); ++j) {
        const double R = mesh.model.model_radius(radii[j]);
        std::vector<double> part(nt);
        parallel_for(nt, [&](std::size_t t) {
            const auto& tr = mesh.triangles[t];
            const SubTri s{mesh.nodes[static_cast<std::size_t>(tr[0])], mesh.nodes[static_cast<std::size_t>(tr[1])],
                           mesh.nodes[static_cast<std::size_t>(tr[2])]};
            part[t] = clipped_integral(psi, t, s, R, 6);
        });
        double sum = 0.0;
        for (double v : part) sum += v;
        out[j] = sum;
    }
    return out;
}

const char* to_string(RayClass c) {
    switch (c) {
        case RayClass::finite: return "finite";
        case RayClass::plus_inf: return "plus_inf";
        case RayClass::minus_inf: return "minus_inf";
        case RayClass::undetermined: return "undetermined";
    }
    return "?";
}

RayClass classify(const std::vector<double>& v, double t_high, double eps_tail) {
    const std::size_t K = v.size();
    if (K < 2) return RayClass::undetermined;
    const double last = v[K - 1];
    auto increments_all = [&](int sign) {
        if (K < 4) return false;
        for (std::size_t k = K - 3; k < K; ++k) {
            if (!(sign * (v[k] - v[k - 1]) > 0.0)) return false;
        }
        return true;
    };
    if (last > t_high && increments_all(1)) return RayClass::plus_inf;
    if (last < -t_high && increments_all(-1)) return RayClass::minus_inf;
    if (std::abs(last) <= t_high && std::abs(last - v[K - 2]) <= eps_tail) return RayClass::finite;
    return RayClass::undetermined;
}

double ray_exit_distance(const Mesh& mesh, double theta) {
    const Vec2 d{std::cos(theta), std::sin(theta)};
    if (mesh.kind == DomainKind::disc) {
        double r = 0.0;
        for (const auto& e : mesh.boundary) r = std::max(r, norm(mesh.nodes[static_cast<std::size_t>(e.a)]));
        return mesh.model.geodesic_radius(r);
    }
    double best = kInf;
    for (const auto& e : mesh.boundary) {
        const Vec2 a = mesh.nodes[static_cast<std::size_t>(e.a)];
        const Vec2 b = mesh.nodes[static_cast<std::size_t>(e.b)];
        const Vec2 ab = b - a;
        const double den = cross(d, ab);
        if (den == 0.0) continue;
        const double t = cross(a, ab) / den;  // along the ray
        const double s = cross(a, d) / den;   // along the edge
        if (t > 0.0 && s >= 0.0 && s <= 1.0) best = std::min(best, t);
    }
    if (!std::isfinite(best)) throw DomainError("ray does not leave the domain");
    return mesh.model.geodesic_radius(best);
}

RayTrace trace_and_classify(const Mesh& mesh, const ScalarSampler& sample, double theta, const RayParams& params,
                            double t_high_default) {
    if (params.samples < 2) throw DomainError("at least two ray samples are required");
    RayTrace ray;
    ray.theta = theta;
    ray.exit_distance = ray_exit_distance(mesh, theta);
    for (int k = 1; k <= params.samples; ++k) {
        const double frac = 1.0 - std::exp2(-k);
        ray.radii.push_back(frac);
        const auto v = sample(radial_point(mesh.model, frac * ray.exit_distance, theta));
        if (!v) {
            ray.truncated = true;
            ray.cls = RayClass::undetermined;
            return ray;
        }
        ray.values.push_back(*v);
    }
    const double t_high = params.t_high.value_or(t_high_default);
    ray.cls = classify(ray.values, t_high, params.eps_tail);
    ray.limit = ray.values.back();
    return ray;
}

RayTrace trace_and_classify(const Field& field, double theta, const RayParams& params) {
    const double t_high = field.cap() > 0.0 ? 0.8 * field.cap() : kInf;
    return trace_and_classify(
        field.mesh(), [&field](Vec2 p) { return field.value_at(p); }, theta, params, t_high);
}

RayTrace trace_and_classify(const CompressedField& psi, double theta, const RayParams& params) {
    return trace_and_classify(
        psi.mesh(), [&psi](Vec2 p) { return psi.value_at(p); }, theta, params, kInf);
}

FatouReport fatou_report(const Field& field, int n_rays, const RayParams& params) {
    if (n_rays < 16) throw DomainError("at least 16 rays are required");
    FatouReport rep;
    rep.n_rays = n_rays;
    rep.rays.resize(static_cast<std::size_t>(n_rays));
    parallel_for(rep.rays.size(), [&](std::size_t j) {
        rep.rays[j] = trace_and_classify(field, kTwoPi * static_cast<double>(j) / n_rays, params);
    });
    int counts[4] = {0, 0, 0, 0};
    for (const auto& r : rep.rays) ++counts[static_cast<int>(r.cls)];
    rep.mu_finite = kTwoPi * counts[0] / n_rays;
    rep.mu_plus = kTwoPi * counts[1] / n_rays;
    rep.mu_minus = kTwoPi * counts[2] / n_rays;
    rep.mu_und = kTwoPi * counts[3] / n_rays;
    return rep;
}

}  // namespace scherk
