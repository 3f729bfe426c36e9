#include "scherk/domains.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "scherk/error.hpp"
#include "scherk/parallel.hpp"

namespace scherk {

double ScherkPolygon::side_arc(std::size_t i) const {
    const std::size_t j = next(i);
    return j == 0 ? vertex_s[0] + disc.boundary_length - vertex_s[i] : vertex_s[j] - vertex_s[i];
}

double ScherkPolygon::side_length(std::size_t i) const {
    return chord_length(disc, vertex_s[i], vertex_s[next(i)]);
}

GeodesicPolygon ScherkPolygon::polygon() const {
    std::vector<Vec2> pts;
    pts.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) pts.push_back(vertex(i));
    auto poly = geodesic_polygon(disc.model, pts);
    // Chord lengths from the law of cosines rather than the model formula.
    for (std::size_t i = 0; i < size(); ++i) {
        poly.sides[i] = GeodesicArc(disc.model, pts[i], pts[next(i)], side_length(i));
    }
    return poly;
}

double ScherkPolygon::total(SideLabel label) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        if (labels[i] == label) sum += side_length(i);
    }
    return sum;
}

void validate(const ScherkPolygon& polygon) {
    const std::size_t n = polygon.size();
    if (n < 4 || n % 2 != 0) {
        throw MalformedPolygon("a Scherk polygon needs an even number (>= 4) of sides, got " +
                               std::to_string(n));
    }
    if (polygon.labels.size() != n) throw MalformedPolygon("one label per side is required");
    for (std::size_t i = 0; i < n; ++i) {
        if (polygon.labels[i] == polygon.labels[polygon.next(i)]) {
            throw MalformedPolygon("side labels must alternate between A and B");
        }
        if (i + 1 < n && !(polygon.vertex_s[i + 1] > polygon.vertex_s[i])) {
            throw MalformedPolygon("vertex arc lengths must be strictly increasing");
        }
        if (!std::isfinite(polygon.vertex_s[i])) throw MalformedPolygon("non-finite vertex");
    }
    if (!(polygon.vertex_s.back() - polygon.vertex_s.front() < polygon.disc.boundary_length)) {
        throw MalformedPolygon("vertices must span less than one turn of the boundary");
    }
    if (polygon.bottom_index < 0 || static_cast<std::size_t>(polygon.bottom_index) >= n) {
        throw MalformedPolygon("bottom side index out of range");
    }
}

ScherkPolygon make_scherk_polygon(const DiscSpec& disc, std::vector<double> vertex_s,
                                  std::vector<SideLabel> labels, int bottom_index) {
    if (!vertex_s.empty()) {
        const double shift = reduce_arc(disc, vertex_s[0]) - vertex_s[0];
        if (shift != 0.0) {
            for (double& s : vertex_s) s += shift;
        }
    }
    ScherkPolygon poly{disc, std::move(vertex_s), std::move(labels), bottom_index};
    validate(poly);
    return poly;
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi, int max_iter) {
    double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) {
        throw BracketFailure("no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) +
                             "]");
    }
    for (int it = 0; it < max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double quadrilateral_balance(const DiscSpec& disc, double x0_s, double s) {
    const double half = 0.5 * disc.boundary_length;
    const double p1 = x0_s + s, p2 = x0_s + half - s, p3 = x0_s + half + s, p4 = x0_s - s;
    const double b1 = chord_length(disc, p1, p2);
    const double a1 = chord_length(disc, p2, p3);
    const double b2 = chord_length(disc, p3, p4);
    const double a2 = chord_length(disc, p4, p1);
    return a1 + a2 - b1 - b2;
}

ScherkPolygon inscribed_quadrilateral(const DiscSpec& disc, double x0_s) {
    const double L = disc.boundary_length;
    // The vertex order degenerates at s = L/4, where p1 meets p2.
    const double eps = 1e-9 * L;
    const auto f = [&](double s) { return quadrilateral_balance(disc, x0_s, s); };
    const double s0 = bisect_root(f, eps, 0.25 * L - eps);
    if (std::abs(f(s0)) > 1e-10) throw BracketFailure("quadrilateral balance not reached");
    const double half = 0.5 * L;
    return make_scherk_polygon(
        disc, {x0_s + s0, x0_s + half - s0, x0_s + half + s0, x0_s + L - s0},
        {SideLabel::B, SideLabel::A, SideLabel::B, SideLabel::A}, 0);
}

double trapezoid_balance(const DiscSpec& disc, double p1_s, double p2_s, double s) {
    const double mid = 0.5 * (p1_s + p2_s);
    const double l1 = chord_length(disc, p1_s, mid - s);
    const double l2 = chord_length(disc, mid - s, mid + s);
    const double l3 = chord_length(disc, mid + s, p2_s);
    const double l4 = chord_length(disc, p2_s, p1_s);
    return l1 + l3 - l2 - l4;
}

Trapezoid regular_trapezoid(const DiscSpec& disc, double p1_s, double p2_s) {
    const double L = disc.boundary_length;
    const double gap = reduce_arc(disc, p2_s - p1_s);
    if (gap < 1e-12 * L) throw DegenerateArc("trapezoid base endpoints coincide");
    Trapezoid t;
    t.p1_s = p1_s;
    t.p2_s = p1_s + gap;
    t.mid_s = p1_s + 0.5 * gap;
    const double half = 0.5 * gap;
    const auto f = [&](double s) { return trapezoid_balance(disc, t.p1_s, t.p2_s, s); };
    t.offset = bisect_root(f, 1e-9 * half, half * (1.0 - 1e-9));
    t.minus_s = t.mid_s - t.offset;
    t.plus_s = t.mid_s + t.offset;
    t.l1 = chord_length(disc, t.p1_s, t.minus_s);
    t.l2 = chord_length(disc, t.minus_s, t.plus_s);
    t.l3 = chord_length(disc, t.plus_s, t.p2_s);
    t.l4 = chord_length(disc, t.p2_s, t.p1_s);
    if (std::abs(t.balance()) > 1e-10) throw BracketFailure("trapezoid balance not reached");
    return t;
}

namespace {

std::vector<int> mask_to_indices(std::uint32_t mask) {
    std::vector<int> out;
    for (int i = 0; mask != 0; ++i, mask >>= 1) {
        if (mask & 1u) out.push_back(i);
    }
    return out;
}

struct PolygonSums {
    double perimeter = 0.0;
    double a = 0.0;
    double b = 0.0;
};

PolygonSums inscribed_sums(const ScherkPolygon& poly, const std::vector<int>& idx) {
    PolygonSums s;
    const std::size_t m = idx.size();
    for (std::size_t k = 0; k < m; ++k) {
        const auto i = static_cast<std::size_t>(idx[k]);
        const auto j = static_cast<std::size_t>(idx[(k + 1) % m]);
        const double len = chord_length(poly.disc, poly.vertex_s[i], poly.vertex_s[j]);
        s.perimeter += len;
        if (poly.next(i) == j) (poly.labels[i] == SideLabel::A ? s.a : s.b) += len;
    }
    return s;
}

}  // namespace

AdmissibilityReport check_admissible(const ScherkPolygon& polygon, double tol) {
    validate(polygon);
    const std::size_t n = polygon.size();
    if (n > kMaxAdmissibilityVertices) {
        throw EnumerationCap("admissibility enumeration is capped at " +
                             std::to_string(kMaxAdmissibilityVertices) + " vertices, got " +
                             std::to_string(n));
    }
    std::vector<double> chords(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) chords[i * n + j] = chord_length(polygon.disc, polygon.vertex_s[i], polygon.vertex_s[j]);
        }
    }
    const std::uint32_t full = (1u << n) - 1u;
    constexpr double kNone = std::numeric_limits<double>::infinity();
    std::vector<double> slack_a(full, kNone);
    std::vector<double> slack_b(full, kNone);
    constexpr std::uint32_t kBlock = 4096;
    const std::size_t blocks = (full + kBlock - 1) / kBlock;
    parallel_for(blocks, [&](std::size_t blk) {
        int idx[kMaxAdmissibilityVertices];
        const std::uint32_t lo = std::max<std::uint32_t>(1u, static_cast<std::uint32_t>(blk) * kBlock);
        const std::uint32_t hi = std::min<std::uint32_t>(full, static_cast<std::uint32_t>(blk + 1) * kBlock);
        for (std::uint32_t mask = lo; mask < hi; ++mask) {
            if (std::popcount(mask) < 3) continue;
            int m = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (mask & (1u << i)) idx[m++] = static_cast<int>(i);
            }
            double perim = 0.0, a = 0.0, b = 0.0;
            for (int k = 0; k < m; ++k) {
                const auto i = static_cast<std::size_t>(idx[k]);
                const auto j = static_cast<std::size_t>(idx[(k + 1) % m]);
                const double len = chords[i * n + j];
                perim += len;
                if (polygon.next(i) == j) (polygon.labels[i] == SideLabel::A ? a : b) += len;
            }
            slack_a[mask] = perim - 2.0 * a;
            slack_b[mask] = perim - 2.0 * b;
        }
    });
    // Minimal slack; among polygons within tol of it, the one with the fewest
    // vertices (then the lowest mask) is reported.
    auto worst = [&](const std::vector<double>& slack, double& value) {
        value = kNone;
        for (double v : slack) value = std::min(value, v);
        std::uint32_t pick = 0;
        int pick_size = 1 << 30;
        for (std::uint32_t mask = 1; mask < full; ++mask) {
            if (slack[mask] <= value + tol && std::popcount(mask) < pick_size) {
                pick = mask;
                pick_size = std::popcount(mask);
            }
        }
        return pick;
    };
    AdmissibilityReport report;
    for (std::uint32_t mask = 1; mask < full; ++mask) {
        if (slack_a[mask] != kNone) ++report.polygons_checked;
    }
    const std::uint32_t mask_a = worst(slack_a, report.slack_a);
    const std::uint32_t mask_b = worst(slack_b, report.slack_b);
    report.condition1_residual = std::abs(polygon.total(SideLabel::A) - polygon.total(SideLabel::B));
    report.worst_polygon_a = mask_to_indices(mask_a);
    report.worst_polygon_b = mask_to_indices(mask_b);
    report.worst_polygon =
        report.slack_a <= report.slack_b + tol ? report.worst_polygon_a : report.worst_polygon_b;
    report.passes = report.condition1_residual <= tol && report.slack_a > tol && report.slack_b > tol;
    return report;
}

ScherkPolygon attach_trapezoid(const ScherkPolygon& polygon, std::size_t side, Trapezoid* out) {
    validate(polygon);
    if (side >= polygon.size()) throw DomainError("side index out of range");
    const std::size_t j = polygon.next(side);
    const double p2 = j == 0 ? polygon.vertex_s[0] + polygon.disc.boundary_length : polygon.vertex_s[j];
    const Trapezoid t = regular_trapezoid(polygon.disc, polygon.vertex_s[side], p2);
    if (out) *out = t;
    std::vector<double> s;
    std::vector<SideLabel> labels;
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        s.push_back(polygon.vertex_s[i]);
        labels.push_back(polygon.labels[i]);
        if (i == side) {
            s.push_back(t.minus_s);
            s.push_back(t.plus_s);
            labels.push_back(opposite(polygon.labels[i]));
            labels.push_back(polygon.labels[i]);
        }
    }
    int bottom = polygon.bottom_index;
    if (static_cast<std::size_t>(bottom) > side) bottom += 2;
    return make_scherk_polygon(polygon.disc, std::move(s), std::move(labels), bottom);
}

std::vector<double> TauSchedule::grid() const {
    std::vector<double> g;
    for (int j = 0; j < levels; ++j) g.push_back(std::ldexp(tau_max, -j));
    return g;
}

Attachment perturb_attachment(const ScherkPolygon& polygon, std::size_t a_side, std::size_t b_side,
                              double tau, double tol) {
    validate(polygon);
    const std::size_t n = polygon.size();
    if (a_side >= n || b_side >= n) throw DomainError("side index out of range");
    if (polygon.labels[a_side] != SideLabel::A || polygon.labels[b_side] != SideLabel::B) {
        throw DomainError("a_side must be labelled A and b_side labelled B");
    }
    const bool b_before = polygon.next(b_side) == a_side;  // shared vertex starts the A side
    const bool b_after = polygon.next(a_side) == b_side;   // shared vertex ends the A side
    if (!b_before && !b_after) throw DomainError("the two sides must share exactly one vertex");
    if (!(tau >= 0.0)) throw DomainError("tau must be nonnegative");

    const double L = polygon.disc.boundary_length;
    std::vector<double> s;
    std::vector<SideLabel> labels;
    std::vector<int> new_index(n);
    std::vector<int> inserted_a, inserted_b;  // positions of (minus, plus)
    for (std::size_t i = 0; i < n; ++i) {
        new_index[i] = static_cast<int>(s.size());
        s.push_back(polygon.vertex_s[i]);
        labels.push_back(polygon.labels[i]);
        if (i == a_side || i == b_side) {
            const std::size_t j = polygon.next(i);
            const double p2 = j == 0 ? polygon.vertex_s[0] + L : polygon.vertex_s[j];
            const Trapezoid t = regular_trapezoid(polygon.disc, polygon.vertex_s[i], p2);
            auto& ins = (i == a_side) ? inserted_a : inserted_b;
            ins = {static_cast<int>(s.size()), static_cast<int>(s.size()) + 1};
            s.push_back(t.minus_s);
            s.push_back(t.plus_s);
            labels.push_back(opposite(polygon.labels[i]));
            labels.push_back(polygon.labels[i]);
        }
    }
    int bottom = polygon.bottom_index;
    {
        int shift = 0;
        if (static_cast<std::size_t>(bottom) > a_side) shift += 2;
        if (static_cast<std::size_t>(bottom) > b_side) shift += 2;
        bottom += shift;
    }
    const std::size_t shared_old = b_before ? a_side : b_side;
    const auto shared = static_cast<std::size_t>(new_index[shared_old]);
    // Vertex of each trapezoid nearest the shared vertex, and the direction
    // (in arc length) that moves it toward the shared vertex.
    const auto a1 = static_cast<std::size_t>(b_before ? inserted_a[0] : inserted_a[1]);
    const auto b1 = static_cast<std::size_t>(b_before ? inserted_b[1] : inserted_b[0]);
    const double dir_a = b_before ? -1.0 : 1.0;
    const double dir_b = b_before ? 1.0 : -1.0;
    const double gap_a = reduce_arc(polygon.disc, dir_a * (s[shared] - s[a1]));
    const double gap_b = reduce_arc(polygon.disc, dir_b * (s[shared] - s[b1]));

    Attachment out;
    out.unperturbed = make_scherk_polygon(polygon.disc, s, labels, bottom);
    if (tau >= gap_a * (1.0 - 1e-9)) throw DomainError("tau exceeds the gap to the shared vertex");
    s[a1] += dir_a * tau;

    auto balance = [&](double sigma) {
        ScherkPolygon trial{polygon.disc, s, labels, bottom};
        trial.vertex_s[b1] += dir_b * sigma;
        return trial.total(SideLabel::A) - trial.total(SideLabel::B);
    };
    double sigma = 0.0;
    if (tau > 0.0) {
        sigma = bisect_root(balance, 0.0, gap_b * (1.0 - 1e-9));
        if (std::abs(balance(sigma)) > tol) throw BracketFailure("condition 1 could not be restored");
    }
    s[b1] += dir_b * sigma;

    out.polygon = make_scherk_polygon(polygon.disc, std::move(s), std::move(labels), bottom);
    out.tau = tau;
    out.b_shift = sigma;
    out.shared_vertex = shared;

    auto trapezoid_vertices = [&](std::size_t side_old, const std::vector<int>& ins) {
        const std::size_t j = polygon.next(side_old);
        return std::vector<int>{new_index[side_old], ins[0], ins[1], new_index[j]};
    };
    out.trapezoid_a = trapezoid_vertices(a_side, inserted_a);
    out.trapezoid_b = trapezoid_vertices(b_side, inserted_b);
    {
        auto ea = out.trapezoid_a;
        std::sort(ea.begin(), ea.end());
        const auto sums = inscribed_sums(out.polygon, ea);
        out.trapezoid_a_slack = sums.perimeter - 2.0 * sums.a;
        auto eb = out.trapezoid_b;
        std::sort(eb.begin(), eb.end());
        const auto sumsb = inscribed_sums(out.polygon, eb);
        out.trapezoid_b_slack = sumsb.perimeter - 2.0 * sumsb.b;
    }
    out.report = check_admissible(out.polygon, tol);
    return out;
}

Attachment attach_and_perturb(const ScherkPolygon& polygon, std::size_t a_side, std::size_t b_side,
                              const TauSchedule& schedule, double tol, double tau_bound) {
    auto grid = schedule.grid();
    std::sort(grid.begin(), grid.end());
    for (double tau : grid) {
        if (!(tau > 0.0) || !(tau < tau_bound)) continue;
        try {
            Attachment att = perturb_attachment(polygon, a_side, b_side, tau, tol);
            if (att.report.passes && att.trapezoid_a_slack > tol && att.trapezoid_b_slack > tol) {
                return att;
            }
        } catch (const DomainError&) {
        } catch (const BracketFailure&) {
        }
    }
    throw NoAdmissibleTau("no tau on the grid (tau_max = " + std::to_string(schedule.tau_max) +
                          ") gives an admissible domain");
}

bool CompactCore::contains(Vec2 p) const {
    if (!point_in_polygon(polygon_polyline(outer, 32), p)) return false;
    for (const auto& c : notches) {
        if (norm(p - c.center) < c.radius) return false;
    }
    return true;
}

std::vector<Vec2> CompactCore::side_samples(std::size_t i, int count) const {
    std::vector<Vec2> pts;
    for (int k = 0; k < count; ++k) {
        const double t = count == 1 ? 0.5 : static_cast<double>(k) / (count - 1);
        pts.push_back(outer.sides[i].sample(span_lo[i] + t * (span_hi[i] - span_lo[i])));
    }
    return pts;
}

CompactCore compact_core(const ScherkPolygon& polygon, double r) {
    validate(polygon);
    if (!(r >= 0.5 && r < 1.0)) {
        throw DegenerateCore("core radius must lie in [1/2, 1), got " + std::to_string(r));
    }
    CompactCore core;
    core.model = polygon.disc.model;
    core.r = r;
    core.labels = polygon.labels;
    std::vector<Vec2> centers;
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        centers.push_back(radial_point(core.model, r, polygon.vertex_angle(i)));
    }
    core.outer = geodesic_polygon(core.model, centers);
    const double rad = 1.0 - r;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        core.notches.push_back(geodesic_circle(core.model, centers[i], rad));
        const double len = core.outer.sides[i].length();
        const double lo = rad / len;
        const double hi = 1.0 - rad / len;
        if (!(lo < hi)) {
            throw DegenerateCore("core side " + std::to_string(i) + " is swallowed by its notches");
        }
        core.span_lo.push_back(lo);
        core.span_hi.push_back(hi);
    }
    if (!core.contains(Vec2{0.0, 0.0})) throw DegenerateCore("core does not contain the disc center");
    return core;
}

double boundary_gap(const ScherkPolygon& polygon) {
    double gap = 0.0;
    for (std::size_t i = 0; i < polygon.size(); ++i) gap += polygon.side_arc(i) - polygon.side_length(i);
    return gap;
}

std::size_t side_starting_at(const ScherkPolygon& polygon, double s) {
    const double L = polygon.disc.boundary_length;
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        const double d = reduce_arc(polygon.disc, polygon.vertex_s[i] - s);
        if (d < 1e-9 * L || L - d < 1e-9 * L) return i;
    }
    throw DomainError("no vertex at arc length " + std::to_string(s));
}

namespace {

// Adjacent A/B pair (a_side, b_side) for iteration steps after the third:
// the pair subtending the largest boundary arc, lowest index on ties.
std::pair<std::size_t, std::size_t> widest_pair(const ScherkPolygon& d) {
    double best = -1.0;
    std::pair<std::size_t, std::size_t> pick{0, 0};
    for (std::size_t i = 0; i < d.size(); ++i) {
        const std::size_t j = d.next(i);
        const double arc = d.side_arc(i) + d.side_arc(j);
        if (arc > best + 1e-12) {
            best = arc;
            pick = d.labels[i] == SideLabel::A ? std::pair{i, j} : std::pair{j, i};
        }
    }
    return pick;
}

}  // namespace

ExampleSequence iterate_example(const DiscSpec& disc, int n_steps, const ExampleSchedule& schedule,
                                const GateEvaluator& gate) {
    if (n_steps < 1) throw DomainError("n_steps must be >= 1");
    ExampleSequence seq;
    const ScherkPolygon d1 = inscribed_quadrilateral(disc, 0.0);
    // Vertices of the first quadrilateral: p1..p4 in counter-clockwise order.
    const std::vector<double> q = d1.vertex_s;
    ScherkPolygon current = d1;
    double prev_r = 0.0;
    double prev_tau = std::numeric_limits<double>::infinity();

    for (int n = 1; n <= n_steps; ++n) {
        ExampleStep step;
        step.step = n;
        if (n == 1) {
            step.report = check_admissible(current, schedule.tol);
            if (!step.report.passes) throw NoAdmissibleTau("the inscribed quadrilateral is not admissible");
        } else {
            std::size_t a_side = 0, b_side = 0;
            if (n == 2) {  // A1 = (p2, p3), B1 = (p1, p2)
                a_side = side_starting_at(current, q[1]);
                b_side = side_starting_at(current, q[0]);
            } else if (n == 3) {  // A2 = (p4, p1), B2 = (p3, p4)
                a_side = side_starting_at(current, q[3]);
                b_side = side_starting_at(current, q[2]);
            } else {
                std::tie(a_side, b_side) = widest_pair(current);
            }
            TauSchedule grid = schedule.tau;
            grid.tau_max = std::ldexp(schedule.tau.tau_max, -(n - 2));
            Attachment att = attach_and_perturb(current, a_side, b_side, grid, schedule.tol, prev_tau);
            current = att.polygon;
            step.tau = att.tau;
            step.report = att.report;
            prev_tau = att.tau;
        }
        step.domain = current;
        step.epsilon = static_cast<std::size_t>(n - 1) < schedule.epsilons.size()
                           ? schedule.epsilons[static_cast<std::size_t>(n - 1)]
                           : std::ldexp(1.0, -n);
        double r = static_cast<std::size_t>(n - 1) < schedule.r_core.size()
                       ? schedule.r_core[static_cast<std::size_t>(n - 1)]
                       : schedule.r_default;
        r = std::max(r, prev_r);
        // Cores that swallow a side are pushed toward the boundary.
        for (;;) {
            try {
                step.core = compact_core(current, r);
                break;
            } catch (const DegenerateCore&) {
                if (r >= schedule.r_limit) throw;
                r = std::min(schedule.r_limit, 1.0 - 0.5 * (1.0 - r));
            }
        }
        if (gate) {
            const CompactCore* prev_core = seq.steps.empty() ? nullptr : &seq.steps.back().core;
            for (;;) {
                step.gate = gate(n, current, step.core, prev_core);
                const bool ok_now = step.gate.min_a > n && step.gate.max_b < -n;
                const bool ok_prev =
                    prev_core == nullptr || (step.gate.prev_min_a > n - 1 && step.gate.prev_max_b < -(n - 1));
                step.gate_checked = true;
                step.gate_ok = ok_now && ok_prev;
                if (ok_now || r >= schedule.r_limit) break;
                r = std::min(schedule.r_limit, 1.0 - 0.5 * (1.0 - r));
                step.core = compact_core(current, r);
            }
            if (n == 1) seq.u_center = step.gate.u_center;
        }
        step.r_core = r;
        prev_r = r;
        step.gap = boundary_gap(current);
        seq.steps.push_back(std::move(step));
    }
    return seq;
}

}  // namespace scherk
