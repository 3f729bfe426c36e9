#include "scherk/geometry.hpp"

#include <algorithm>
#include <complex>
#include <cstring>
#include <string>

#include "scherk/error.hpp"

namespace scherk {

namespace {

using Complex = std::complex<double>;

Complex to_complex(Vec2 p) { return {p.x, p.y}; }
Vec2 to_vec(Complex z) { return {z.real(), z.imag()}; }

// Moebius map sending a to the origin; mobius(-a, .) is its inverse.
Complex mobius(Complex a, Complex z) { return (z - a) / (1.0 - std::conj(a) * z); }

void require_in_model(const MetricModel& model, Vec2 p) {
    const double r2 = norm2(p);
    if (!std::isfinite(r2)) throw DomainError("non-finite point");
    if (model.is_hyperbolic() ? r2 >= 1.0 : r2 > 1.0 + 1e-12) {
        throw DomainError("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                          ") lies outside the model disc");
    }
}

}  // namespace

const char* to_string(ModelKind kind) {
    return kind == ModelKind::hyperbolic ? "hyperbolic" : "euclidean";
}

ModelKind model_kind_from_string(const char* name) {
    if (std::strcmp(name, "hyperbolic") == 0) return ModelKind::hyperbolic;
    if (std::strcmp(name, "euclidean") == 0) return ModelKind::euclidean;
    throw DomainError(std::string("unknown model '") + name + "'");
}

double MetricModel::conformal_factor(Vec2 p) const {
    if (!is_hyperbolic()) return 1.0;
    const double r2 = norm2(p);
    if (r2 >= 1.0) throw DomainError("conformal factor requested outside the Poincare disc");
    return 2.0 / (1.0 - r2);
}

double MetricModel::polar_density(double rho, double /*theta*/) const {
    if (!(rho > 0.0) || rho > 1.0) {
        throw DomainError("polar density needs rho in (0, 1], got " + std::to_string(rho));
    }
    return is_hyperbolic() ? std::sinh(rho) : rho;
}

double MetricModel::model_radius(double geodesic_radius) const {
    return is_hyperbolic() ? std::tanh(0.5 * geodesic_radius) : geodesic_radius;
}

double MetricModel::geodesic_radius(double model_radius) const {
    return is_hyperbolic() ? 2.0 * std::atanh(model_radius) : model_radius;
}

double polar_density(const MetricModel& model, double rho, double theta) {
    return model.polar_density(rho, theta);
}

double distance(const MetricModel& model, Vec2 p, Vec2 q) {
    require_in_model(model, p);
    require_in_model(model, q);
    const double e = norm(p - q);
    if (!model.is_hyperbolic()) return e;
    const double s = e / std::sqrt((1.0 - norm2(p)) * (1.0 - norm2(q)));
    return 2.0 * std::asinh(s);
}

double polar_distance(const MetricModel& model, double r1, double theta1, double r2, double theta2) {
    const double half = std::sin(0.5 * (theta1 - theta2));
    if (!model.is_hyperbolic()) {
        const double dr = r1 - r2;
        return std::sqrt(dr * dr + 4.0 * r1 * r2 * half * half);
    }
    const double sh = std::sinh(0.5 * (r1 - r2));
    const double s2 = sh * sh + std::sinh(r1) * std::sinh(r2) * half * half;
    return 2.0 * std::asinh(std::sqrt(std::max(0.0, s2)));
}

DiscSpec DiscSpec::make(MetricModel model) {
    DiscSpec disc;
    disc.model = model;
    disc.geodesic_radius = 1.0;
    disc.center = {0.0, 0.0};
    disc.model_radius = model.model_radius(1.0);
    disc.boundary_length = model.is_hyperbolic() ? kTwoPi * std::sinh(1.0) : kTwoPi;
    return disc;
}

double reduce_arc(const DiscSpec& disc, double s) {
    const double L = disc.boundary_length;
    double r = std::fmod(s, L);
    if (r < 0.0) r += L;
    if (r >= L) r -= L;
    return r;
}

Vec2 boundary_point(const DiscSpec& disc, double s) {
    const double theta = disc.angle_of(reduce_arc(disc, s));
    return {disc.model_radius * std::cos(theta), disc.model_radius * std::sin(theta)};
}

Vec2 radial_point(const MetricModel& model, double rho, double theta) {
    const double m = model.model_radius(rho);
    return {m * std::cos(theta), m * std::sin(theta)};
}

GeodesicArc::GeodesicArc(const MetricModel& model, Vec2 a, Vec2 b)
    : GeodesicArc(model, a, b, distance(model, a, b)) {}

GeodesicArc::GeodesicArc(const MetricModel& model, Vec2 a, Vec2 b, double length)
    : model_(model), a_(a), b_(b), length_(length) {}

Vec2 GeodesicArc::sample(double t) const {
    if (t <= 0.0) return a_;
    if (t >= 1.0) return b_;
    if (!model_.is_hyperbolic() || length_ == 0.0) return a_ + t * (b_ - a_);
    const Complex a = to_complex(a_);
    const Complex w = mobius(a, to_complex(b_));
    const double scale = std::tanh(0.5 * t * length_) / std::abs(w);
    return to_vec(mobius(-a, w * scale));
}

std::vector<Vec2> GeodesicArc::polyline(int n) const {
    std::vector<Vec2> pts;
    pts.reserve(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) pts.push_back(sample(static_cast<double>(k) / n));
    return pts;
}

double chord_length(const DiscSpec& disc, double s0, double s1) {
    return polar_distance(disc.model, disc.geodesic_radius, disc.angle_of(s0),
                          disc.geodesic_radius, disc.angle_of(s1));
}

GeodesicArc chord(const DiscSpec& disc, double s0, double s1) {
    const double gap = reduce_arc(disc, s1 - s0);
    const double tol = 1e-14 * disc.boundary_length;
    if (gap < tol || disc.boundary_length - gap < tol) {
        throw DegenerateArc("chord endpoints coincide modulo the boundary length");
    }
    return GeodesicArc(disc.model, boundary_point(disc, s0), boundary_point(disc, s1),
                       chord_length(disc, s0, s1));
}

GeodesicPolygon geodesic_polygon(const MetricModel& model, const std::vector<Vec2>& vertices) {
    if (vertices.size() < 3) throw MalformedPolygon("a polygon needs at least 3 vertices");
    GeodesicPolygon poly{model, vertices, {}};
    const std::size_t n = vertices.size();
    poly.sides.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        poly.sides.emplace_back(model, vertices[i], vertices[(i + 1) % n]);
    }
    return poly;
}

std::vector<Vec2> polygon_polyline(const GeodesicPolygon& polygon, int samples_per_side) {
    std::vector<Vec2> ring;
    for (const auto& side : polygon.sides) {
        auto pts = side.polyline(samples_per_side);
        ring.insert(ring.end(), pts.begin(), pts.end() - 1);
    }
    return ring;
}

PolygonMetrics polygon_metrics(const GeodesicPolygon& polygon, int samples_per_side) {
    const std::size_t n = polygon.sides.size();
    if (n < 3) throw MalformedPolygon("a polygon needs at least 3 vertices");
    PolygonMetrics out;
    std::vector<std::vector<Vec2>> lines;
    lines.reserve(n);
    for (const auto& side : polygon.sides) {
        out.perimeter += side.length();
        lines.push_back(side.polyline(samples_per_side));
    }
    for (std::size_t i = 0; i < n && out.is_simple; ++i) {
        for (std::size_t j = i + 2; j < n && out.is_simple; ++j) {
            if (i == 0 && j == n - 1) continue;  // adjacent through vertex 0
            const auto& li = lines[i];
            const auto& lj = lines[j];
            for (std::size_t a = 0; a + 1 < li.size() && out.is_simple; ++a) {
                for (std::size_t b = 0; b + 1 < lj.size(); ++b) {
                    if (segments_intersect(li[a], li[a + 1], lj[b], lj[b + 1])) {
                        out.is_simple = false;
                        break;
                    }
                }
            }
        }
    }
    out.is_ccw = signed_area(polygon_polyline(polygon, samples_per_side)) > 0.0;
    return out;
}

Circle geodesic_circle(const MetricModel& model, Vec2 center, double radius) {
    if (!model.is_hyperbolic()) return {center, radius};
    const double m = norm(center);
    const Vec2 dir = m > 0.0 ? (1.0 / m) * center : Vec2{1.0, 0.0};
    const double dc = model.geodesic_radius(m);
    const double near = std::tanh(0.5 * (dc - radius));
    const double far = std::tanh(0.5 * (dc + radius));
    return {0.5 * (near + far) * dir, 0.5 * (far - near)};
}

std::optional<Circle> geodesic_carrier(const MetricModel& model, Vec2 a, Vec2 b) {
    if (!model.is_hyperbolic()) return std::nullopt;
    if (std::abs(cross(a, b)) <= 1e-14 * std::max(1e-300, norm(a) * norm(b))) return std::nullopt;
    // The carrier is orthogonal to the unit circle, so it also passes
    // through the inversion of a (or of b, whichever is farther from 0).
    const Vec2 base = norm2(a) >= norm2(b) ? a : b;
    const Vec2 c = (1.0 / norm2(base)) * base;
    const double d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    const double a2 = norm2(a), b2 = norm2(b), c2 = norm2(c);
    const Vec2 center{(a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d,
                      (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d};
    return Circle{center, norm(center - a)};
}

double orient(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
    const double d1 = orient(q1, q2, p1);
    const double d2 = orient(q1, q2, p2);
    const double d3 = orient(p1, p2, q1);
    const double d4 = orient(p1, p2, q2);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
        return true;
    }
    auto on_segment = [](Vec2 a, Vec2 b, Vec2 p) {
        return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
               p.y <= std::max(a.y, b.y);
    };
    if (d1 == 0 && on_segment(q1, q2, p1)) return true;
    if (d2 == 0 && on_segment(q1, q2, p2)) return true;
    if (d3 == 0 && on_segment(p1, p2, q1)) return true;
    if (d4 == 0 && on_segment(p1, p2, q2)) return true;
    return false;
}

bool point_in_polygon(const std::vector<Vec2>& ring, Vec2 p) {
    bool inside = false;
    const std::size_t n = ring.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 a = ring[i];
        const Vec2 b = ring[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x) inside = !inside;
        }
    }
    return inside;
}

double signed_area(const std::vector<Vec2>& ring) {
    double area = 0.0;
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) area += cross(ring[i], ring[(i + 1) % n]);
    return 0.5 * area;
}

}  // namespace scherk
