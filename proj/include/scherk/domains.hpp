#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "scherk/geometry.hpp"

namespace scherk {

enum class SideLabel : std::uint8_t { A, B };

inline SideLabel opposite(SideLabel l) { return l == SideLabel::A ? SideLabel::B : SideLabel::A; }
inline char to_char(SideLabel l) { return l == SideLabel::A ? 'A' : 'B'; }

// Geodesic polygon inscribed in the disc, vertices on the boundary given by
// arc length, sides labelled alternately A (+infinity data) and B
// (-infinity data). Side i joins vertex i to vertex i+1 (mod n).
struct ScherkPolygon {
    DiscSpec disc;
    std::vector<double> vertex_s;  // strictly increasing, span < L
    std::vector<SideLabel> labels;
    int bottom_index = 0;

    std::size_t size() const { return vertex_s.size(); }
    std::size_t next(std::size_t i) const { return (i + 1) % size(); }
    Vec2 vertex(std::size_t i) const { return boundary_point(disc, vertex_s[i]); }
    double vertex_angle(std::size_t i) const { return disc.angle_of(vertex_s[i]); }
    // Boundary arc length swept counter-clockwise from vertex i to i+1.
    double side_arc(std::size_t i) const;
    double side_length(std::size_t i) const;
    GeodesicPolygon polygon() const;
    double total(SideLabel label) const;
};

// Checks the ScherkPolygon invariants; throws MalformedPolygon.
void validate(const ScherkPolygon& polygon);

// Builds a polygon with vertex_s[0] reduced into [0, L) and the remaining
// vertices unwrapped after it; validates the result.
ScherkPolygon make_scherk_polygon(const DiscSpec& disc, std::vector<double> vertex_s,
                                  std::vector<SideLabel> labels, int bottom_index = 0);

// Bisection on a verified sign change; 200-iteration cap. Throws
// BracketFailure when f(lo) and f(hi) share a sign.
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   int max_iter = 200);

// |A1| + |A2| - |B1| - |B2| for the quadrilateral built at half-offset s.
double quadrilateral_balance(const DiscSpec& disc, double x0_s, double s);

// Balanced quadrilateral associated to the basepoint x0 (vertices at
// x0 +- s0 and x0 + L/2 -+ s0; side 0 is the bottom side B1).
ScherkPolygon inscribed_quadrilateral(const DiscSpec& disc, double x0_s);

struct Trapezoid {
    double p1_s = 0.0;
    double p2_s = 0.0;  // > p1_s
    double mid_s = 0.0;
    double offset = 0.0;  // p- = mid - offset, p+ = mid + offset
    double minus_s = 0.0;
    double plus_s = 0.0;
    double l1 = 0.0, l2 = 0.0, l3 = 0.0, l4 = 0.0;

    double balance() const { return l1 + l3 - l2 - l4; }
};

// l1 + l3 - l2 - l4 for the trapezoid on [p1_s, p2_s] with offset s.
double trapezoid_balance(const DiscSpec& disc, double p1_s, double p2_s, double s);

// Regular trapezoid on the side joining p1 and p2 (p1 to p2 counter-clockwise).
Trapezoid regular_trapezoid(const DiscSpec& disc, double p1_s, double p2_s);

struct AdmissibilityReport {
    double condition1_residual = 0.0;
    double slack_a = 0.0;
    double slack_b = 0.0;
    std::vector<int> worst_polygon;  // vertex indices of the minimal-slack polygon
    std::vector<int> worst_polygon_a;
    std::vector<int> worst_polygon_b;
    std::size_t polygons_checked = 0;
    bool passes = false;
};

constexpr std::size_t kMaxAdmissibilityVertices = 16;

// Jenkins-Serrin conditions: balance of A and B lengths, and
// 2a(P) < |P|, 2b(P) < |P| over every inscribed polygon P != the domain.
// Slacks must exceed tol to pass.
AdmissibilityReport check_admissible(const ScherkPolygon& polygon, double tol = 1e-10);

// Replaces side `side` (label X) by the three sides of its regular trapezoid
// labelled X, opposite(X), X.
ScherkPolygon attach_trapezoid(const ScherkPolygon& polygon, std::size_t side, Trapezoid* out = nullptr);

struct TauSchedule {
    double tau_max = 0.1;
    int levels = 21;  // tau_max * 2^-j, j = 0..levels-1

    std::vector<double> grid() const;
};

struct Attachment {
    ScherkPolygon unperturbed;
    ScherkPolygon polygon;
    double tau = 0.0;
    double b_shift = 0.0;  // solved displacement of the B-trapezoid vertex
    std::size_t shared_vertex = 0;     // index in `polygon`
    std::vector<int> trapezoid_a;      // vertex indices of E(tau)
    std::vector<int> trapezoid_b;      // vertex indices of E'(tau)
    double trapezoid_a_slack = 0.0;    // |E| - 2a(E)
    double trapezoid_b_slack = 0.0;    // |E'| - 2b(E')
    AdmissibilityReport report;
};

// Attaches trapezoids to the adjacent sides a_side (label A) and b_side
// (label B), moves the A-trapezoid vertex nearest the shared vertex toward
// it by tau and solves the B-trapezoid vertex displacement restoring the
// length balance. tau = 0 gives the unperturbed domain.
Attachment perturb_attachment(const ScherkPolygon& polygon, std::size_t a_side, std::size_t b_side,
                              double tau, double tol = 1e-10);

// Smallest grid tau (below tau_bound) for which the perturbed domain is
// admissible. Throws NoAdmissibleTau when the grid is exhausted.
Attachment attach_and_perturb(const ScherkPolygon& polygon, std::size_t a_side, std::size_t b_side,
                              const TauSchedule& schedule, double tol = 1e-10,
                              double tau_bound = std::numeric_limits<double>::infinity());

// Compact core: polygon on the points at geodesic distance r along the radial
// geodesics to each vertex, minus geodesic discs of radius 1 - r about them.
struct CompactCore {
    MetricModel model;
    double r = 0.0;
    GeodesicPolygon outer;
    std::vector<SideLabel> labels;  // label of the parallel domain side
    std::vector<Circle> notches;    // model circles of the removed discs
    std::vector<double> span_lo;    // side i is kept for t in [span_lo, span_hi]
    std::vector<double> span_hi;

    double notch_radius() const { return 1.0 - r; }
    bool contains(Vec2 p) const;
    // Points on the kept part of side i.
    std::vector<Vec2> side_samples(std::size_t i, int count) const;
};

CompactCore compact_core(const ScherkPolygon& polygon, double r);

// Sum over sides of (subtended boundary arc - side length).
double boundary_gap(const ScherkPolygon& polygon);

// Index of the side starting at the vertex with arc length s (mod L).
std::size_t side_starting_at(const ScherkPolygon& polygon, double s);

struct GateResult {
    double min_a = 0.0;  // min of u over A-parallel core sides
    double max_b = 0.0;  // max of u over B-parallel core sides
    double prev_min_a = 0.0;
    double prev_max_b = 0.0;
    double drift = 0.0;  // sup |u_n - u_{n-1}| on the previous core
    double u_center = 0.0;
};

struct ExampleSchedule {
    std::vector<double> epsilons;  // per step; empty -> 2^-n
    TauSchedule tau{};
    std::vector<double> r_core;    // per step; empty or short -> r_default
    double r_default = 0.9;
    double r_limit = 0.995;        // gate tightening stops here
    double tol = 1e-10;
};

struct ExampleStep {
    int step = 0;
    ScherkPolygon domain;
    double tau = 0.0;
    double epsilon = 0.0;
    double r_core = 0.0;
    CompactCore core;
    AdmissibilityReport report;
    double gap = 0.0;
    bool gate_checked = false;
    bool gate_ok = false;
    GateResult gate;
};

struct ExampleSequence {
    std::vector<ExampleStep> steps;
    double u_center = 0.0;  // normalization value u(p0)
};

// Called with (step, domain, current core, previous core or nullptr).
using GateEvaluator =
    std::function<GateResult(int, const ScherkPolygon&, const CompactCore&, const CompactCore*)>;

ExampleSequence iterate_example(const DiscSpec& disc, int n_steps, const ExampleSchedule& schedule,
                                const GateEvaluator& gate = {});

}  // namespace scherk
