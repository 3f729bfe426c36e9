#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "scherk/error.hpp"
#include "scherk/geometry.hpp"

using namespace scherk;

namespace {

// hyperbolic law of cosines for two points at radius 1
double quarter_chord_oracle(double dtheta) {
    const double c = std::cosh(1.0), s = std::sinh(1.0);
    return std::acosh(c * c - s * s * std::cos(dtheta));
}

// distance in the Poincare disc via the cross-ratio form
double poincare_oracle(Vec2 p, Vec2 q) {
    const double num = 2.0 * norm2(p - q);
    const double den = (1.0 - norm2(p)) * (1.0 - norm2(q));
    return std::acosh(1.0 + num / den);
}

Vec2 random_point(std::mt19937_64& rng, double rmax) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double r = rmax * std::sqrt(u(rng));
    const double t = kTwoPi * u(rng);
    return {r * std::cos(t), r * std::sin(t)};
}

}  // namespace

TEST_CASE("disc constants") {
    const auto hyp = DiscSpec::make(MetricModel::hyperbolic());
    CHECK(std::abs(hyp.boundary_length - kTwoPi * std::sinh(1.0)) <= 1e-12);
    CHECK(std::abs(hyp.model_radius - std::tanh(0.5)) <= 1e-15);
    const auto euc = DiscSpec::make(MetricModel::euclidean());
    CHECK(std::abs(euc.boundary_length - kTwoPi) <= 1e-12);
    CHECK(euc.model_radius == 1.0);
}

TEST_CASE("distance examples") {
    const auto m = MetricModel::hyperbolic();
    const double r = std::tanh(0.5);
    CHECK(std::abs(distance(m, {0, 0}, {r, 0}) - 1.0) <= 1e-12);
    CHECK(std::abs(distance(m, {r, 0}, {-r, 0}) - 2.0) <= 1e-12);
    CHECK(std::abs(distance(m, {r, 0}, {0, r}) - quarter_chord_oracle(std::numbers::pi / 2)) <= 1e-12);
    CHECK(std::abs(quarter_chord_oracle(std::numbers::pi / 2) - std::acosh(std::cosh(1.0) * std::cosh(1.0))) <= 1e-15);
    CHECK_THROWS_AS(distance(m, {0, 0}, {1.2, 0}), DomainError);
}

TEST_CASE("distance agrees with the cross-ratio form and is a metric") {
    const auto m = MetricModel::hyperbolic();
    std::mt19937_64 rng(7);
    for (int i = 0; i < 1000; ++i) {
        const Vec2 p = random_point(rng, 0.95), q = random_point(rng, 0.95), r = random_point(rng, 0.95);
        const double pq = distance(m, p, q);
        CHECK(pq >= 0.0);
        CHECK(std::abs(pq - distance(m, q, p)) <= 1e-12 * (1 + pq));
        CHECK(std::abs(pq - poincare_oracle(p, q)) <= 1e-9 * (1 + pq));
        CHECK(distance(m, p, r) <= pq + distance(m, q, r) + 1e-12);
    }
    CHECK(distance(m, {0.3, 0.1}, {0.3, 0.1}) == 0.0);
    const auto e = MetricModel::euclidean();
    CHECK(std::abs(distance(e, {0, 0}, {0.6, 0.8}) - 1.0) <= 1e-15);
}

TEST_CASE("gauss curvature of the hyperbolic model is -1") {
    const auto m = MetricModel::hyperbolic();
    // K = -Delta(log lambda) / lambda^2, five-point stencil
    const double h = 1e-3;
    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
        const Vec2 p = random_point(rng, 0.8);
        auto ll = [&](double dx, double dy) { return std::log(m.conformal_factor({p.x + dx, p.y + dy})); };
        const double lap = (ll(h, 0) + ll(-h, 0) + ll(0, h) + ll(0, -h) - 4 * ll(0, 0)) / (h * h);
        const double lam = m.conformal_factor(p);
        CHECK(std::abs(-lap / (lam * lam) + 1.0) <= 1e-4);
    }
}

TEST_CASE("polar density") {
    const auto hyp = MetricModel::hyperbolic();
    const auto euc = MetricModel::euclidean();
    CHECK(std::abs(polar_density(hyp, 1.0, 0.0) - 1.1752011936438014) <= 1e-14);
    CHECK(polar_density(euc, 0.5, 1.0) == 0.5);
    CHECK(polar_density(hyp, 0.5, 0.0) == polar_density(hyp, 0.5, std::numbers::pi / 3));
    CHECK_THROWS_AS(polar_density(hyp, 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(polar_density(hyp, -0.1, 0.0), DomainError);
    // sinh rho against the circumference of the model circle
    for (double rho : {0.25, 0.5, 0.75, 1.0}) {
        const double rm = hyp.model_radius(rho);
        const double circumference = kTwoPi * rm * hyp.conformal_factor({rm, 0});
        CHECK(std::abs(circumference / kTwoPi - polar_density(hyp, rho, 0.3)) <= 1e-12);
        CHECK(std::abs(hyp.geodesic_radius(rm) - rho) <= 1e-12);
    }
}

TEST_CASE("boundary parametrization") {
    const auto d = DiscSpec::make(MetricModel::hyperbolic());
    const double L = d.boundary_length;
    const Vec2 x0 = boundary_point(d, 0.0);
    CHECK(std::abs(x0.x - std::tanh(0.5)) <= 1e-15);
    CHECK(std::abs(x0.y) <= 1e-15);
    const Vec2 x1 = boundary_point(d, L / 2);
    CHECK(std::abs(x1.x + std::tanh(0.5)) <= 1e-12);
    for (double s = -3.0; s < 2 * L; s += 0.37) {
        const Vec2 p = boundary_point(d, s);
        CHECK(std::abs(distance(d.model, {0, 0}, p) - 1.0) <= 1e-12);
        const Vec2 q = boundary_point(d, s + L);
        CHECK(norm(p - q) <= 1e-12);
        for (double h : {1e-4, 1e-5}) {
            CHECK(std::abs(chord_length(d, s, s + h) / h - 1.0) <= 1e-6 * (1 + h));
        }
    }
}

TEST_CASE("chord examples") {
    const auto d = DiscSpec::make(MetricModel::hyperbolic());
    const double L = d.boundary_length;
    CHECK(std::abs(chord(d, 0, L / 2).length() - 2.0) <= 1e-12);
    CHECK(norm(chord(d, 0, L / 2).sample(0.5)) <= 1e-12);
    CHECK(std::abs(chord(d, 0, L / 4).length() - quarter_chord_oracle(std::numbers::pi / 2)) <= 1e-10);
    CHECK(std::abs(chord_length(d, 0, 1e-7) / 1e-7 - 1.0) <= 1e-6);
    CHECK_THROWS_AS(chord(d, 0.3, 0.3 + L), DegenerateArc);
}

TEST_CASE("chord is shorter than the boundary arc and stays inside") {
    const auto d = DiscSpec::make(MetricModel::hyperbolic());
    const double L = d.boundary_length;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double s0 = L * u(rng);
        const double sep = std::max(1e-3, 0.5 * L * u(rng));
        const auto arc = chord(d, s0, s0 + sep);
        CHECK(arc.length() < sep);
        CHECK(std::abs(arc.length() - quarter_chord_oracle(d.angle_of(sep))) <= 1e-10);
        for (double t = 0.0; t <= 1.0; t += 0.125) {
            CHECK(norm(arc.sample(t)) <= d.model_radius + 1e-12);
        }
    }
}

TEST_CASE("arc sampling is constant speed and matches the metric integral") {
    const auto d = DiscSpec::make(MetricModel::hyperbolic());
    const double L = d.boundary_length;
    for (double sep : {0.3, L / 4, L / 2 - 0.2, L / 2}) {
        const auto arc = chord(d, 0.7, 0.7 + sep);
        CHECK(norm(arc.sample(0.0) - arc.a()) <= 1e-14);
        CHECK(norm(arc.sample(1.0) - arc.b()) <= 1e-14);
        double prev = 0.0;
        for (int k = 1; k <= 10; ++k) {
            const double len = distance(d.model, arc.a(), arc.sample(k / 10.0));
            CHECK(len > prev);
            CHECK(std::abs(len - arc.length() * k / 10.0) <= 1e-10);
            prev = len;
        }
        // midpoint rule for lambda |dx| over a dense polyline of the path
        const auto pts = arc.polyline(20000);
        double integral = 0.0;
        for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
            integral += d.model.conformal_factor(0.5 * (pts[k] + pts[k + 1])) * norm(pts[k + 1] - pts[k]);
        }
        CHECK(std::abs(integral - arc.length()) <= 1e-6);
    }
}

TEST_CASE("polygon metrics") {
    const auto d = DiscSpec::make(MetricModel::hyperbolic());
    const double L = d.boundary_length;
    const double q = quarter_chord_oracle(std::numbers::pi / 2);
    std::vector<Vec2> quad;
    for (double s : {L / 8, 3 * L / 8, 5 * L / 8, 7 * L / 8}) quad.push_back(boundary_point(d, s));
    const auto pm = polygon_metrics(geodesic_polygon(d.model, quad));
    CHECK(std::abs(pm.perimeter - 4 * q) <= 1e-10);
    CHECK(std::abs(pm.perimeter - 6.053497) < 1e-6);
    CHECK(pm.is_simple);
    CHECK(pm.is_ccw);

    const auto tri = polygon_metrics(geodesic_polygon(d.model, {quad[0], quad[1], quad[2]}));
    CHECK(std::abs(tri.perimeter - (2 * q + 2)) <= 1e-10);
    CHECK(tri.is_simple);

    std::vector<Vec2> crossing;
    for (double s : {0.0, L / 2, L / 4, 3 * L / 4}) crossing.push_back(boundary_point(d, s));
    CHECK_FALSE(polygon_metrics(geodesic_polygon(d.model, crossing)).is_simple);

    std::vector<Vec2> cw(quad.rbegin(), quad.rend());
    CHECK_FALSE(polygon_metrics(geodesic_polygon(d.model, cw)).is_ccw);

    CHECK_THROWS_AS(geodesic_polygon(d.model, {quad[0], quad[1]}), MalformedPolygon);
}

TEST_CASE("geodesic circles") {
    const auto m = MetricModel::hyperbolic();
    for (Vec2 c : {Vec2{0, 0}, Vec2{0.3, -0.2}, Vec2{-0.1, 0.4}}) {
        const Circle circ = geodesic_circle(m, c, 0.2);
        for (double t = 0.0; t < kTwoPi; t += 0.5) {
            const Vec2 p = circ.center + circ.radius * Vec2{std::cos(t), std::sin(t)};
            CHECK(std::abs(distance(m, c, p) - 0.2) <= 1e-10);
        }
    }
}

TEST_CASE("geodesic carrier is orthogonal to the rim") {
    const auto m = MetricModel::hyperbolic();
    const auto carrier = geodesic_carrier(m, {0.3, 0.1}, {-0.2, 0.35});
    REQUIRE(carrier.has_value());
    // orthogonal circles: |c|^2 = 1 + R^2
    CHECK(std::abs(norm2(carrier->center) - 1.0 - carrier->radius * carrier->radius) <= 1e-10);
    CHECK_FALSE(geodesic_carrier(m, {0.3, 0.0}, {-0.2, 0.0}).has_value());
}
