#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

namespace scherk {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double norm2(Vec2 a) { return a.x * a.x + a.y * a.y; }

constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class ModelKind { euclidean, hyperbolic };

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(const char* name);

// Conformal disc model: ds = lambda(x, y) |dx|. The hyperbolic kind is the
// Poincare disc (curvature -1); the euclidean kind is the flat plane.
class MetricModel {
public:
    explicit MetricModel(ModelKind kind = ModelKind::hyperbolic) : kind_(kind) {}

    static MetricModel euclidean() { return MetricModel(ModelKind::euclidean); }
    static MetricModel hyperbolic() { return MetricModel(ModelKind::hyperbolic); }

    ModelKind kind() const { return kind_; }
    bool is_hyperbolic() const { return kind_ == ModelKind::hyperbolic; }

    // lambda(p); throws DomainError outside the open unit disc (hyperbolic).
    double conformal_factor(Vec2 p) const;

    // sqrt(det g) in geodesic polar coordinates about the origin.
    double polar_density(double rho, double theta) const;

    // Model (Euclidean) radius of the geodesic circle of radius rho about the
    // origin, and its inverse.
    double model_radius(double geodesic_radius) const;
    double geodesic_radius(double model_radius) const;

    friend bool operator==(const MetricModel&, const MetricModel&) = default;

private:
    ModelKind kind_;
};

double distance(const MetricModel& model, Vec2 p, Vec2 q);

// Distance between points given in geodesic polar coordinates about the
// origin (law of cosines, written in the half-angle form that stays accurate
// for nearby points).
double polar_distance(const MetricModel& model, double r1, double theta1, double r2, double theta2);

double polar_density(const MetricModel& model, double rho, double theta);

// The geodesic disc of radius one about the origin.
struct DiscSpec {
    MetricModel model;
    double geodesic_radius = 1.0;
    Vec2 center{};
    double model_radius = 1.0;
    double boundary_length = kTwoPi;

    static DiscSpec make(MetricModel model);

    // Central angle of the boundary point at arc length s.
    double angle_of(double s) const { return kTwoPi * s / boundary_length; }
    // Arc length of the boundary point at central angle theta.
    double arc_of(double theta) const { return theta * boundary_length / kTwoPi; }
};

// Reduces s into [0, L).
double reduce_arc(const DiscSpec& disc, double s);

Vec2 boundary_point(const DiscSpec& disc, double s);

// Point at geodesic distance rho from the center in direction theta.
Vec2 radial_point(const MetricModel& model, double rho, double theta);

class GeodesicArc {
public:
    GeodesicArc(const MetricModel& model, Vec2 a, Vec2 b);
    GeodesicArc(const MetricModel& model, Vec2 a, Vec2 b, double length);

    Vec2 a() const { return a_; }
    Vec2 b() const { return b_; }
    double length() const { return length_; }
    const MetricModel& model() const { return model_; }

    // Constant-speed parametrization, t in [0, 1].
    Vec2 sample(double t) const;

    // n + 1 points sample(k / n), k = 0..n.
    std::vector<Vec2> polyline(int n) const;

private:
    MetricModel model_;
    Vec2 a_;
    Vec2 b_;
    double length_;
};

// Geodesic between two boundary points of the disc given by arc length.
GeodesicArc chord(const DiscSpec& disc, double s0, double s1);

// Length of chord(disc, s0, s1) without building the arc.
double chord_length(const DiscSpec& disc, double s0, double s1);

struct GeodesicPolygon {
    MetricModel model;
    std::vector<Vec2> vertices;
    std::vector<GeodesicArc> sides;  // side i joins vertex i to vertex i+1 (mod n)
};

GeodesicPolygon geodesic_polygon(const MetricModel& model, const std::vector<Vec2>& vertices);

struct PolygonMetrics {
    double perimeter = 0.0;
    bool is_simple = true;
    bool is_ccw = true;
};

PolygonMetrics polygon_metrics(const GeodesicPolygon& polygon, int samples_per_side = 64);

// Closed polyline approximating the polygon boundary (no repeated endpoint).
std::vector<Vec2> polygon_polyline(const GeodesicPolygon& polygon, int samples_per_side = 64);

// Euclidean circle of a geodesic circle in the model.
struct Circle {
    Vec2 center;
    double radius = 0.0;
};

Circle geodesic_circle(const MetricModel& model, Vec2 center, double radius);

// Euclidean circle carrying the geodesic through a and b, or nullopt when
// the geodesic is a straight segment.
std::optional<Circle> geodesic_carrier(const MetricModel& model, Vec2 a, Vec2 b);

// Segment predicates shared by the polygon and mesh code.
double orient(Vec2 a, Vec2 b, Vec2 c);
bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2);
bool point_in_polygon(const std::vector<Vec2>& ring, Vec2 p);
double signed_area(const std::vector<Vec2>& ring);

}  // namespace scherk
