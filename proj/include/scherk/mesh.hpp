#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "scherk/domains.hpp"
#include "scherk/geometry.hpp"

namespace scherk {

enum class DomainKind { disc, polygon, core, generic };

// One boundary curve, parametrized over t in [0, 1]. Pieces of a loop are
// listed counter-clockwise and piece k ends where piece k+1 starts.
struct CurvePiece {
    std::function<Vec2(double)> point;
    int marker = 0;  // side id carried by the boundary edges; -1 marks a symmetry axis
    bool straight = false;
};

struct BoundaryLoop {
    std::vector<CurvePiece> pieces;
    std::vector<Vec2> grading_points;  // mesh size drops to h/4 near these
    DomainKind kind = DomainKind::generic;
    MetricModel model;
};

BoundaryLoop disc_boundary(const DiscSpec& disc);
BoundaryLoop polygon_boundary(const GeodesicPolygon& polygon);
BoundaryLoop polygon_boundary(const ScherkPolygon& polygon);
BoundaryLoop straight_polygon_boundary(const std::vector<Vec2>& vertices);
BoundaryLoop core_boundary(const CompactCore& core);

struct MeshOptions {
    double h = 0.05;
    double min_angle_deg = 21.0;
    double grading_rate = 0.5;  // growth of the local size away from grading points
    std::size_t max_nodes = 1'000'000;
    bool use_symmetry = true;  // mirror a half mesh when the domain allows it
};

struct BoundaryEdge {
    int a = 0;
    int b = 0;
    int marker = 0;
};

struct Mesh {
    MetricModel model;
    DomainKind kind = DomainKind::generic;
    double h = 0.0;
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 3>> triangles;  // counter-clockwise
    std::vector<BoundaryEdge> boundary;         // counter-clockwise around the domain
    std::vector<char> on_boundary;
    // Reflection through the origin-line with direction `axis` maps the mesh
    // onto itself when set; mirror[i] is the image of node i.
    std::optional<Vec2> axis;
    std::vector<int> mirror;

    std::size_t node_count() const { return nodes.size(); }
    double area(std::size_t t) const;
    Vec2 centroid(std::size_t t) const;
    double min_angle_deg() const;
    double max_edge_length() const;
};

// Conforming Delaunay refinement of the region bounded by `loop`. Boundary
// edges follow the true curves within h^2/8; interior triangles have
// circumradius <= 0.6 h and angles >= min_angle_deg up to corner effects.
Mesh triangulate(const BoundaryLoop& loop, const MeshOptions& options);

// Scherk domains: meshes half of the domain and mirrors it when the polygon
// has a reflection symmetry through two antipodal vertices.
Mesh triangulate(const ScherkPolygon& polygon, const MeshOptions& options);
Mesh triangulate(const GeodesicPolygon& polygon, const MeshOptions& options);
Mesh triangulate(const DiscSpec& disc, const MeshOptions& options);
Mesh triangulate(const CompactCore& core, const MeshOptions& options);

// Reflection symmetry of a Scherk polygon through the line joining vertices
// i and i + n/2. side_map[k] is the image of side k.
struct PolygonSymmetry {
    std::size_t vertex = 0;
    Vec2 axis;
    std::vector<int> side_map;
    bool swaps_labels = false;
};

std::optional<PolygonSymmetry> find_symmetry(const ScherkPolygon& polygon, double tol = 1e-9);

struct Location {
    std::size_t triangle = 0;
    std::array<double, 3> bary{};
};

class PointLocator {
public:
    explicit PointLocator(const Mesh& mesh);
    std::optional<Location> locate(Vec2 p) const;

private:
    const Mesh* mesh_;
    Vec2 lo_;
    double cell_ = 1.0;
    int nx_ = 1;
    int ny_ = 1;
    std::vector<std::vector<int>> cells_;
};

}  // namespace scherk
