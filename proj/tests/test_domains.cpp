#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "scherk/domains.hpp"
#include "scherk/error.hpp"
#include "scherk/parallel.hpp"

using namespace scherk;

namespace {

const DiscSpec& hdisc() {
    static const DiscSpec d = DiscSpec::make(MetricModel::hyperbolic());
    return d;
}

double law_of_cosines(double s0, double s1) {
    const double dt = hdisc().angle_of(s1 - s0);
    const double c = std::cosh(1.0), s = std::sinh(1.0);
    return std::acosh(c * c - s * s * std::cos(dt));
}

struct Slacks {
    double a = std::numeric_limits<double>::infinity();
    double b = std::numeric_limits<double>::infinity();
};

// Straightforward enumeration over index combinations, built from vectors.
Slacks brute_force(const ScherkPolygon& g) {
    const int n = static_cast<int>(g.size());
    Slacks out;
    for (int mask = 0; mask < (1 << n) - 1; ++mask) {
        std::vector<int> chosen;
        for (int i = 0; i < n; ++i) {
            if ((mask >> i) & 1) chosen.push_back(i);
        }
        if (chosen.size() < 3) continue;
        double perim = 0.0, a = 0.0, b = 0.0;
        for (std::size_t k = 0; k < chosen.size(); ++k) {
            const int i = chosen[k], j = chosen[(k + 1) % chosen.size()];
            const double len = chord_length(g.disc, g.vertex_s[i], g.vertex_s[j]);
            perim += len;
            if ((i + 1) % n == j) {
                if (g.labels[i] == SideLabel::A) a += len;
                else b += len;
            }
        }
        out.a = std::min(out.a, perim - 2 * a);
        out.b = std::min(out.b, perim - 2 * b);
    }
    return out;
}

std::vector<int> sorted(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

TEST_CASE("quadrilateral at x0 = 0") {
    const double L = hdisc().boundary_length;
    const auto q = inscribed_quadrilateral(hdisc(), 0.0);
    REQUIRE(q.size() == 4);
    CHECK(std::abs(q.vertex_s[0] - L / 8) <= 1e-9);
    CHECK(std::abs(q.vertex_s[1] - 3 * L / 8) <= 1e-9);
    CHECK(std::abs(q.vertex_s[2] - 5 * L / 8) <= 1e-9);
    CHECK(std::abs(q.vertex_s[3] - 7 * L / 8) <= 1e-9);
    CHECK(q.labels == std::vector<SideLabel>{SideLabel::B, SideLabel::A, SideLabel::B, SideLabel::A});
    CHECK(q.bottom_index == 0);
    const double side = law_of_cosines(0, L / 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(q.side_length(i) - side) <= 1e-9);
    CHECK(std::abs(q.total(SideLabel::A) - q.total(SideLabel::B)) <= 1e-10);
}

TEST_CASE("quadrilateral balance changes sign on the bracket") {
    const double L = hdisc().boundary_length;
    for (double x0 : {0.0, 0.4, 2.0}) {
        const double lo = quadrilateral_balance(hdisc(), x0, 1e-6);
        const double hi = quadrilateral_balance(hdisc(), x0, L / 4 - 1e-6);
        CHECK(lo * hi < 0.0);
    }
}

TEST_CASE("quadrilateral is rotation equivariant") {
    const double L = hdisc().boundary_length;
    const auto base = inscribed_quadrilateral(hdisc(), 0.0);
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 8; ++k) {
        const double c = L * u(rng);
        const auto q = inscribed_quadrilateral(hdisc(), c);
        for (std::size_t i = 0; i < 4; ++i) {
            const double d = reduce_arc(hdisc(), q.vertex_s[i] - c - base.vertex_s[i]);
            CHECK(std::min(d, L - d) <= 1e-9);
            CHECK(std::abs(q.side_length(i) - base.side_length(i)) <= 1e-9);
        }
    }
}

TEST_CASE("validate rejects malformed polygons") {
    const double L = hdisc().boundary_length;
    const auto A = SideLabel::A, B = SideLabel::B;
    CHECK_THROWS_AS(make_scherk_polygon(hdisc(), {0.1, 0.5, 1.0}, {A, B, A}), MalformedPolygon);
    CHECK_THROWS_AS(make_scherk_polygon(hdisc(), {0.1, 0.5, 1.0, 2.0}, {A, A, B, B}), MalformedPolygon);
    CHECK_THROWS_AS(make_scherk_polygon(hdisc(), {0.1, 1.0, 0.5, 2.0}, {A, B, A, B}), MalformedPolygon);
    CHECK_THROWS_AS(make_scherk_polygon(hdisc(), {0.1, 1.0, 2.0, 0.2 + L}, {A, B, A, B}), MalformedPolygon);
}

TEST_CASE("trapezoid on a half turn") {
    const double L = hdisc().boundary_length;
    const double p1 = 0.3, p2 = 0.3 + L / 2;
    const auto t = regular_trapezoid(hdisc(), p1, p2);
    CHECK(std::abs(t.l1 - t.l3) <= 1e-12);
    CHECK(std::abs(t.balance()) <= 1e-10);
    CHECK(std::abs(t.mid_s - (t.minus_s + t.plus_s) / 2) <= 1e-12);
    CHECK(std::abs(t.l4 - 2.0) <= 1e-12);

    // dense scan of 2 l1(s) - l2(s) - l4 with step 1e-6
    const double sbar = L / 4;
    const double mid = (p1 + p2) / 2;
    auto g = [&](double s) {
        return 2 * law_of_cosines(p1, mid - s) - law_of_cosines(mid - s, mid + s) - law_of_cosines(p1, p2);
    };
    double root = -1.0;
    double prev = g(1e-6);
    for (double s = 2e-6; s < sbar; s += 1e-6) {
        const double cur = g(s);
        if ((prev > 0) != (cur > 0)) {
            root = s - 0.5e-6;
            break;
        }
        prev = cur;
    }
    REQUIRE(root > 0.0);
    CHECK(std::abs(t.offset - root) <= 1e-5);
}

TEST_CASE("trapezoid balance changes sign on (0, sbar)") {
    const double L = hdisc().boundary_length;
    for (double sep : {0.5, 1.5, L / 2, 0.8 * L}) {
        const double p1 = 1.0, p2 = 1.0 + sep;
        CHECK(trapezoid_balance(hdisc(), p1, p2, 1e-7) > 0.0);
        CHECK(trapezoid_balance(hdisc(), p1, p2, sep / 2 - 1e-7) < 0.0);
        const auto t = regular_trapezoid(hdisc(), p1, p2);
        CHECK(std::abs(t.balance()) <= 1e-10);
        CHECK(t.minus_s > p1);
        CHECK(t.plus_s < p2);
    }
    CHECK_THROWS_AS(regular_trapezoid(hdisc(), 0.5, 0.5), DegenerateArc);
}

TEST_CASE("symmetric quadrilateral is admissible") {
    const auto q = inscribed_quadrilateral(hdisc(), 0.0);
    const auto r = check_admissible(q);
    CHECK(r.passes);
    CHECK(r.slack_a > 0.0);
    CHECK(r.slack_b > 0.0);
    CHECK(r.condition1_residual <= 1e-10);
    // 4 triangles
    CHECK(r.polygons_checked == 4);
}

TEST_CASE("unbalanced quadrilateral fails condition 1") {
    auto q = inscribed_quadrilateral(hdisc(), 0.0);
    auto s = q.vertex_s;
    s[1] += 0.1;
    const auto moved = make_scherk_polygon(hdisc(), s, q.labels);
    const auto r = check_admissible(moved);
    double a = 0, b = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        const double len = law_of_cosines(s[i], i + 1 < 4 ? s[i + 1] : s[0] + hdisc().boundary_length);
        (q.labels[i] == SideLabel::A ? a : b) += len;
    }
    CHECK(std::abs(r.condition1_residual - std::abs(a - b)) <= 1e-10);
    CHECK(r.condition1_residual > 1e-3);
    CHECK_FALSE(r.passes);
}

TEST_CASE("enumeration agrees with a brute-force oracle") {
    const double L = hdisc().boundary_length;
    const auto A = SideLabel::A, B = SideLabel::B;
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int n : {4, 6, 8}) {
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<double> s;
            for (int i = 0; i < n; ++i) s.push_back(L * u(rng));
            std::sort(s.begin(), s.end());
            std::vector<SideLabel> labels;
            for (int i = 0; i < n; ++i) labels.push_back(i % 2 ? A : B);
            ScherkPolygon g;
            try {
                g = make_scherk_polygon(hdisc(), s, labels);
            } catch (const MalformedPolygon&) {
                continue;
            }
            const auto r = check_admissible(g);
            const auto o = brute_force(g);
            CHECK(std::abs(r.slack_a - o.a) <= 1e-12);
            CHECK(std::abs(r.slack_b - o.b) <= 1e-12);
        }
    }
}

TEST_CASE("enumeration cap") {
    const double L = hdisc().boundary_length;
    std::vector<double> s;
    std::vector<SideLabel> labels;
    for (int i = 0; i < 18; ++i) {
        s.push_back(L * i / 18.0);
        labels.push_back(i % 2 ? SideLabel::A : SideLabel::B);
    }
    CHECK_THROWS_AS(check_admissible(make_scherk_polygon(hdisc(), s, labels)), EnumerationCap);
}

TEST_CASE("unperturbed second domain fails on a trapezoid polygon") {
    const auto q = inscribed_quadrilateral(hdisc(), 0.0);
    const auto att = perturb_attachment(q, 1, 0, 0.0);
    CHECK(att.polygon.size() == 8);
    const auto r = check_admissible(att.unperturbed);
    CHECK_FALSE(r.passes);
    CHECK(r.condition1_residual <= 1e-10);
    const auto worst = sorted(r.worst_polygon);
    CHECK((worst == sorted(att.trapezoid_a) || worst == sorted(att.trapezoid_b)));
    CHECK(std::min(r.slack_a, r.slack_b) <= 1e-10);
}

TEST_CASE("perturbation restores admissibility") {
    const auto q = inscribed_quadrilateral(hdisc(), 0.0);
    const auto att = attach_and_perturb(q, 1, 0, TauSchedule{});
    CHECK(att.tau > 0.0);
    CHECK(att.report.passes);
    CHECK(att.report.condition1_residual <= 1e-10);
    CHECK(att.report.slack_a > 0.0);
    CHECK(att.report.slack_b > 0.0);
    CHECK(att.trapezoid_a_slack > 0.0);
    CHECK(att.trapezoid_b_slack > 0.0);
    CHECK(att.b_shift > 0.0);
    // smallest passing tau on the grid
    const auto grid = TauSchedule{}.grid();
    for (double tau : grid) {
        if (tau >= att.tau) continue;
        const auto p = perturb_attachment(q, 1, 0, tau);
        CHECK_FALSE((p.report.passes && p.trapezoid_a_slack > 1e-10 && p.trapezoid_b_slack > 1e-10));
    }
}

TEST_CASE("trapezoid slack grows with tau near zero") {
    const auto q = inscribed_quadrilateral(hdisc(), 0.0);
    auto grid = TauSchedule{}.grid();
    std::sort(grid.begin(), grid.end());
    double prev = perturb_attachment(q, 1, 0, 0.0).trapezoid_a_slack;
    for (std::size_t k = 0; k < 12; ++k) {
        const double cur = perturb_attachment(q, 1, 0, grid[k]).trapezoid_a_slack;
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("attachment argument errors") {
    const auto q = inscribed_quadrilateral(hdisc(), 0.0);
    CHECK_THROWS_AS(perturb_attachment(q, 0, 1, 0.01), DomainError);
    CHECK_THROWS_AS(perturb_attachment(q, 1, 1, 0.01), DomainError);
    CHECK_THROWS_AS(attach_and_perturb(q, 1, 0, TauSchedule{1e-14, 2}), NoAdmissibleTau);
}

TEST_CASE("compact core") {
    const auto q = inscribed_quadrilateral(hdisc(), 0.0);
    const auto core = compact_core(q, 0.9);
    CHECK(core.contains({0, 0}));
    CHECK(core.outer.sides.size() == q.size());
    CHECK(core.notches.size() == q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        CHECK(std::abs(distance(hdisc().model, {0, 0}, core.outer.vertices[i]) - 0.9) <= 1e-12);
    }
    CHECK_THROWS_AS(compact_core(q, 0.3), DegenerateCore);

    // Monte-Carlo area with common samples: nested cores give monotone areas
    const double R = hdisc().model_radius;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-R, R);
    std::vector<Vec2> pts;
    while (pts.size() < 40000) {
        const Vec2 p{u(rng), u(rng)};
        if (norm(p) < R) pts.push_back(p);
    }
    const auto poly = polygon_polyline(q.polygon(), 64);
    auto area = [&](auto inside) {
        double sum = 0.0;
        for (const auto& p : pts) {
            if (inside(p)) {
                const double lam = hdisc().model.conformal_factor(p);
                sum += lam * lam;
            }
        }
        return sum / static_cast<double>(pts.size()) * std::numbers::pi * R * R;
    };
    double prev = 0.0;
    for (double r : {0.9, 0.95, 0.99}) {
        const auto k = compact_core(q, r);
        const double a = area([&](Vec2 p) { return k.contains(p); });
        CHECK(a > prev);
        prev = a;
    }
    const double full = area([&](Vec2 p) { return point_in_polygon(poly, p); });
    CHECK(prev < full);
    CHECK(prev > 0.9 * full);
}

TEST_CASE("example sequence without gates") {
    ExampleSchedule sched;
    const auto one = iterate_example(hdisc(), 1, sched);
    REQUIRE(one.steps.size() == 1);
    CHECK(one.steps[0].domain.size() == 4);
    CHECK(one.steps[0].report.passes);

    const auto seq = iterate_example(hdisc(), 3, sched);
    REQUIRE(seq.steps.size() == 3);
    CHECK(seq.steps[1].domain.size() == 8);
    CHECK(seq.steps[2].domain.size() == 12);
    for (std::size_t n = 0; n < seq.steps.size(); ++n) {
        const auto& st = seq.steps[n];
        CHECK(st.report.passes);
        CHECK(st.report.condition1_residual <= 1e-10);
        CHECK(std::abs(boundary_gap(st.domain) - st.gap) <= 1e-12);
        if (n > 0) {
            CHECK(st.gap < seq.steps[n - 1].gap);
            CHECK(st.epsilon < seq.steps[n - 1].epsilon);
            CHECK(st.r_core >= seq.steps[n - 1].r_core);
            // previous core inside the new one (grid points; shared sides tie on the boundary)
            const auto& prev = seq.steps[n - 1].core;
            const double R = hdisc().model_radius;
            int inside = 0, escaped = 0;
            for (int iy = 0; iy < 150; ++iy) {
                for (int ix = 0; ix < 150; ++ix) {
                    const Vec2 p{R * (-1 + (2 * ix + 1) / 150.0), R * (-1 + (2 * iy + 1) / 150.0)};
                    if (!prev.contains(p)) continue;
                    ++inside;
                    if (!st.core.contains(p)) ++escaped;
                }
            }
            CHECK(inside > 1000);
            CHECK(escaped == 0);
        }
        if (n > 1) CHECK(st.tau < seq.steps[n - 1].tau);
    }
}

TEST_CASE("admissibility is independent of the worker count") {
    const auto q = inscribed_quadrilateral(hdisc(), 0.0);
    const auto att = perturb_attachment(q, 1, 0, 0.0);
    set_worker_count(1);
    const auto r1 = check_admissible(att.polygon);
    set_worker_count(4);
    const auto r4 = check_admissible(att.polygon);
    set_worker_count(0);
    CHECK(r1.slack_a == r4.slack_a);
    CHECK(r1.slack_b == r4.slack_b);
    CHECK(r1.worst_polygon == r4.worst_polygon);
}
