#include "scherk/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <unordered_set>

#include "scherk/error.hpp"

namespace scherk {

namespace {

constexpr int kNone = -1;

struct Tri {
    std::array<int, 3> v{};
    std::array<int, 3> n{kNone, kNone, kNone};  // n[k] lies across the edge opposite v[k]
    bool alive = true;
};

long double orient_l(Vec2 a, Vec2 b, Vec2 c) {
    return (static_cast<long double>(b.x) - a.x) * (static_cast<long double>(c.y) - a.y) -
           (static_cast<long double>(b.y) - a.y) * (static_cast<long double>(c.x) - a.x);
}

// Positive when d lies inside the circumcircle of the counter-clockwise (a, b, c).
long double incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const long double adx = static_cast<long double>(a.x) - d.x, ady = static_cast<long double>(a.y) - d.y;
    const long double bdx = static_cast<long double>(b.x) - d.x, bdy = static_cast<long double>(b.y) - d.y;
    const long double cdx = static_cast<long double>(c.x) - d.x, cdy = static_cast<long double>(c.y) - d.y;
    const long double ad = adx * adx + ady * ady;
    const long double bd = bdx * bdx + bdy * bdy;
    const long double cd = cdx * cdx + cdy * cdy;
    return ad * (bdx * cdy - cdx * bdy) - bd * (adx * cdy - cdx * ady) + cd * (adx * bdy - bdx * ady);
}

Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c) {
    const Vec2 ab = b - a, ac = c - a;
    const double d = 2.0 * cross(ab, ac);
    const double ab2 = norm2(ab), ac2 = norm2(ac);
    return a + Vec2{(ac.y * ab2 - ab.y * ac2) / d, (ab.x * ac2 - ac.x * ab2) / d};
}

double min_angle_of(Vec2 a, Vec2 b, Vec2 c) {
    auto angle = [](Vec2 p, Vec2 q, Vec2 r) {
        const Vec2 u = q - p, v = r - p;
        return std::atan2(std::abs(cross(u, v)), dot(u, v));
    };
    return std::min({angle(a, b, c), angle(b, c, a), angle(c, a, b)});
}

// Incremental Bowyer-Watson triangulation inside a large super triangle
// (vertices 0, 1, 2).
class Delaunay {
public:
    Delaunay(Vec2 lo, Vec2 hi) {
        const Vec2 c = 0.5 * (lo + hi);
        const double span = std::max({hi.x - lo.x, hi.y - lo.y, 1e-3});
        const double big = 64.0 * span;
        pts_ = {c + Vec2{-big, -big}, c + Vec2{big, -big}, c + Vec2{0.0, big}};
        scale_ = span;
        tris_.push_back(Tri{{0, 1, 2}, {kNone, kNone, kNone}, true});
        vtri_ = {0, 0, 0};
    }

    const std::vector<Vec2>& points() const { return pts_; }
    const std::vector<Tri>& tris() const { return tris_; }
    Vec2 point(int v) const { return pts_[static_cast<std::size_t>(v)]; }

    // Returns the new vertex id, or kNone when p duplicates an existing vertex
    // or the cavity could not be repaired.
    int insert(Vec2 p) {
        const int t0 = locate(p);
        if (t0 == kNone) return kNone;
        for (int v : tris_[static_cast<std::size_t>(t0)].v) {
            if (norm(point(v) - p) <= 1e-12 * scale_) return kNone;
        }
        ++stamp_;
        if (mark_.size() < tris_.size()) mark_.resize(tris_.size(), 0);
        std::vector<int> cavity{t0};
        mark_[static_cast<std::size_t>(t0)] = stamp_;
        for (std::size_t i = 0; i < cavity.size(); ++i) {
            const Tri& t = tris_[static_cast<std::size_t>(cavity[i])];
            for (int nb : t.n) {
                if (nb == kNone || mark_[static_cast<std::size_t>(nb)] == stamp_) continue;
                const Tri& o = tris_[static_cast<std::size_t>(nb)];
                if (incircle(point(o.v[0]), point(o.v[1]), point(o.v[2]), p) > 0) {
                    mark_[static_cast<std::size_t>(nb)] = stamp_;
                    cavity.push_back(nb);
                }
            }
        }
        // The cavity must be star-shaped from p; grow it where rounding broke that.
        for (bool changed = true; changed;) {
            changed = false;
            for (std::size_t i = 0; i < cavity.size(); ++i) {
                const Tri t = tris_[static_cast<std::size_t>(cavity[i])];
                for (int k = 0; k < 3; ++k) {
                    const int nb = t.n[k];
                    if (nb != kNone && mark_[static_cast<std::size_t>(nb)] == stamp_) continue;
                    const Vec2 a = point(t.v[(k + 1) % 3]);
                    const Vec2 b = point(t.v[(k + 2) % 3]);
                    if (orient_l(a, b, p) > 0) continue;
                    if (nb == kNone) return kNone;
                    mark_[static_cast<std::size_t>(nb)] = stamp_;
                    cavity.push_back(nb);
                    changed = true;
                }
            }
        }
        struct Edge {
            int a, b, outer;
        };
        std::vector<Edge> rim;
        for (int c : cavity) {
            const Tri& t = tris_[static_cast<std::size_t>(c)];
            for (int k = 0; k < 3; ++k) {
                const int nb = t.n[k];
                if (nb != kNone && mark_[static_cast<std::size_t>(nb)] == stamp_) continue;
                rim.push_back({t.v[(k + 1) % 3], t.v[(k + 2) % 3], nb});
            }
        }
        for (int c : cavity) {
            tris_[static_cast<std::size_t>(c)].alive = false;
            free_.push_back(c);
        }
        const int pid = static_cast<int>(pts_.size());
        pts_.push_back(p);
        vtri_.push_back(kNone);
        std::vector<int> created;
        created.reserve(rim.size());
        for (const Edge& e : rim) {
            int id;
            if (!free_.empty()) {
                id = free_.back();
                free_.pop_back();
            } else {
                id = static_cast<int>(tris_.size());
                tris_.emplace_back();
            }
            Tri& t = tris_[static_cast<std::size_t>(id)];
            t.v = {e.a, e.b, pid};
            t.n = {kNone, kNone, e.outer};
            t.alive = true;
            if (e.outer != kNone) {
                Tri& o = tris_[static_cast<std::size_t>(e.outer)];
                for (int k = 0; k < 3; ++k) {
                    if (o.v[(k + 1) % 3] == e.b && o.v[(k + 2) % 3] == e.a) o.n[k] = id;
                }
            }
            created.push_back(id);
        }
        for (int id : created) {
            Tri& t = tris_[static_cast<std::size_t>(id)];
            for (int other : created) {
                const Tri& o = tris_[static_cast<std::size_t>(other)];
                if (o.v[0] == t.v[1]) t.n[0] = other;  // across (b, p)
                if (o.v[1] == t.v[0]) t.n[1] = other;  // across (p, a)
            }
            vtri_[static_cast<std::size_t>(t.v[0])] = id;
            vtri_[static_cast<std::size_t>(t.v[1])] = id;
        }
        vtri_[static_cast<std::size_t>(pid)] = created.front();
        hint_ = created.front();
        if (mark_.size() < tris_.size()) mark_.resize(tris_.size(), 0);
        return pid;
    }

    // Apexes of the triangles on both sides of edge (a, b); false when the
    // edge is absent.
    bool edge_apexes(int a, int b, int& left, int& right) const {
        left = right = kNone;
        const int start = vtri_[static_cast<std::size_t>(a)];
        int t = start;
        for (int guard = 0; guard < 4096 && t != kNone; ++guard) {
            const Tri& tr = tris_[static_cast<std::size_t>(t)];
            int i = 0;
            while (tr.v[i] != a) ++i;
            const int v1 = tr.v[(i + 1) % 3];
            const int v2 = tr.v[(i + 2) % 3];
            if (v1 == b) left = v2;   // tr = (a, b, v2): v2 left of a->b
            if (v2 == b) right = v1;  // tr = (a, v1, b): v1 right of a->b
            t = tr.n[(i + 2) % 3];
            if (t == start) break;
        }
        return left != kNone || right != kNone;
    }

private:
    int locate(Vec2 p) {
        int t = hint_;
        if (t < 0 || !tris_[static_cast<std::size_t>(t)].alive) {
            t = kNone;
            for (std::size_t i = tris_.size(); i-- > 0;) {
                if (tris_[i].alive) {
                    t = static_cast<int>(i);
                    break;
                }
            }
        }
        const std::size_t limit = 4 * tris_.size() + 64;
        for (std::size_t step = 0; step < limit; ++step) {
            const Tri& tr = tris_[static_cast<std::size_t>(t)];
            bool moved = false;
            const int first = static_cast<int>(walk_++ % 3);
            for (int j = 0; j < 3; ++j) {
                const int k = (first + j) % 3;
                if (orient_l(point(tr.v[(k + 1) % 3]), point(tr.v[(k + 2) % 3]), p) < 0) {
                    if (tr.n[k] == kNone) return kNone;
                    t = tr.n[k];
                    moved = true;
                    break;
                }
            }
            if (!moved) return t;
        }
        return kNone;
    }

    std::vector<Vec2> pts_;
    std::vector<Tri> tris_;
    std::vector<int> vtri_;
    std::vector<int> free_;
    std::vector<int> mark_;
    int stamp_ = 0;
    int hint_ = 0;
    std::uint64_t walk_ = 0;
    double scale_ = 1.0;
};

struct Segment {
    int a = 0;
    int b = 0;
    int piece = 0;
    double t0 = 0.0;
    double t1 = 1.0;
    bool alive = true;
    bool frozen = false;  // too short to split further
};

std::uint64_t edge_key(int a, int b) {
    const auto lo = static_cast<std::uint64_t>(std::min(a, b));
    const auto hi = static_cast<std::uint64_t>(std::max(a, b));
    return (hi << 32) | lo;
}

class Refiner {
public:
    Refiner(const BoundaryLoop& loop, const MeshOptions& opt) : loop_(loop), opt_(opt) {}

    Mesh run() {
        if (loop_.pieces.empty()) throw MeshError("empty boundary loop");
        if (!(opt_.h > 0.0)) throw MeshError("mesh size h must be positive");
        build_boundary();
        min_len_ = opt_.h * std::exp2(-14);
        const double area = std::abs(signed_area(boundary_ring()));
        if (area / (0.3 * opt_.h * opt_.h) > static_cast<double>(opt_.max_nodes)) {
            throw MeshError("mesh size h is too small: node cap exceeded");
        }
        Vec2 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
        Vec2 hi{-lo.x, -lo.y};
        for (const Vec2& p : bpts_) {
            lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
            hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
        }
        dt_.emplace(lo, hi);
        std::vector<int> id(bpts_.size());
        for (std::size_t i = 0; i < bpts_.size(); ++i) {
            id[i] = dt_->insert(bpts_[i]);
            if (id[i] == kNone) throw MeshError("duplicate or degenerate boundary point");
            mark_boundary(id[i], i < loop_.pieces.size());
        }
        for (auto& s : segs_) {
            s.a = id[static_cast<std::size_t>(s.a)];
            s.b = id[static_cast<std::size_t>(s.b)];
        }
        refine();
        return extract();
    }

private:
    double size_at(Vec2 p) const {
        double s = opt_.h;
        for (const Vec2& g : loop_.grading_points) {
            s = std::min(s, 0.25 * opt_.h + opt_.grading_rate * norm(p - g));
        }
        return s;
    }

    Vec2 curve(int piece, double t) const {
        return loop_.pieces[static_cast<std::size_t>(piece)].point(t);
    }

    bool needs_split(Vec2 a, Vec2 b, int piece, double t0, double t1) const {
        const double len = norm(b - a);
        if (len > size_at(0.5 * (a + b))) return true;
        if (loop_.pieces[static_cast<std::size_t>(piece)].straight) return false;
        const Vec2 m = curve(piece, 0.5 * (t0 + t1));
        const double sag = len > 0 ? std::abs(cross(b - a, m - a)) / len : norm(m - a);
        return sag > 0.5 * opt_.h * opt_.h / 8.0;
    }

    void build_boundary() {
        const std::size_t np = loop_.pieces.size();
        std::vector<int> start(np);
        for (std::size_t k = 0; k < np; ++k) {
            start[k] = static_cast<int>(bpts_.size());
            bpts_.push_back(curve(static_cast<int>(k), 0.0));
        }
        std::vector<Segment> stack;
        for (std::size_t k = 0; k < np; ++k) {
            const int n0 = loop_.pieces[k].straight ? 1 : 8;
            int prev = start[k];
            for (int j = 0; j < n0; ++j) {
                const double t0 = static_cast<double>(j) / n0;
                const double t1 = static_cast<double>(j + 1) / n0;
                int next;
                if (j + 1 == n0) {
                    next = start[(k + 1) % np];
                } else {
                    next = static_cast<int>(bpts_.size());
                    bpts_.push_back(curve(static_cast<int>(k), t1));
                }
                stack.push_back({prev, next, static_cast<int>(k), t0, t1, true, false});
                prev = next;
            }
        }
        // Depth-first splitting keeps the segments in boundary order.
        std::reverse(stack.begin(), stack.end());
        while (!stack.empty()) {
            Segment s = stack.back();
            stack.pop_back();
            const Vec2 a = bpts_[static_cast<std::size_t>(s.a)];
            const Vec2 b = bpts_[static_cast<std::size_t>(s.b)];
            if (needs_split(a, b, s.piece, s.t0, s.t1)) {
                if (bpts_.size() > opt_.max_nodes) throw MeshError("node cap exceeded on the boundary");
                const double tm = 0.5 * (s.t0 + s.t1);
                const int m = static_cast<int>(bpts_.size());
                bpts_.push_back(curve(s.piece, tm));
                stack.push_back({m, s.b, s.piece, tm, s.t1, true, false});
                stack.push_back({s.a, m, s.piece, s.t0, tm, true, false});
            } else {
                segs_.push_back(s);
            }
        }
    }

    std::vector<Vec2> boundary_ring() const {
        std::vector<Vec2> ring;
        for (const auto& s : segs_) ring.push_back(bpts_[static_cast<std::size_t>(s.a)]);
        return ring;
    }

    Vec2 P(int v) const { return dt_->point(v); }

    // Splits at the curve midpoint, or on a power-of-two shell around a
    // corner so that small input angles do not trigger endless splitting.
    bool split_segment(std::size_t si) {
        Segment s = segs_[si];
        const Vec2 a = P(s.a), b = P(s.b);
        const double len = norm(b - a);
        if (len < min_len_) {
            segs_[si].frozen = true;
            return false;
        }
        double tm = 0.5 * (s.t0 + s.t1);
        const bool ca = is_corner(s.a), cb = is_corner(s.b);
        if (ca != cb) {
            const Vec2 c = ca ? a : b;
            const double target = std::exp2(std::floor(std::log2(0.75 * len)));
            double lo = s.t0, hi = s.t1;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                const bool near = norm(curve(s.piece, mid) - c) < target;
                if (near == ca) lo = mid; else hi = mid;
            }
            tm = 0.5 * (lo + hi);
        }
        const int m = dt_->insert(curve(s.piece, tm));
        if (m == kNone) {
            segs_[si].frozen = true;
            return false;
        }
        segs_[si].alive = false;
        segs_.push_back({s.a, m, s.piece, s.t0, tm, true, false});
        segs_.push_back({m, s.b, s.piece, tm, s.t1, true, false});
        mark_boundary(m, false);
        if (static_cast<std::size_t>(m) > opt_.max_nodes + 3) throw MeshError("node cap exceeded");
        return true;
    }

    bool is_corner(int v) const { return v < static_cast<int>(corner_.size()) && corner_[static_cast<std::size_t>(v)]; }
    bool is_boundary(int v) const { return v < static_cast<int>(bnd_.size()) && bnd_[static_cast<std::size_t>(v)]; }
    void mark_boundary(int v, bool corner) {
        const auto i = static_cast<std::size_t>(v);
        if (bnd_.size() <= i) {
            bnd_.resize(i + 1, 0);
            corner_.resize(i + 1, 0);
        }
        bnd_[i] = 1;
        if (corner) corner_[i] = 1;
    }

    bool encroached(const Segment& s) const {
        if (s.frozen) return false;
        int left, right;
        if (!dt_->edge_apexes(s.a, s.b, left, right)) return true;
        if (left == kNone || right == kNone) return true;
        const Vec2 a = P(s.a), b = P(s.b);
        for (int c : {left, right}) {
            const Vec2 pc = P(c);
            if (dot(a - pc, b - pc) < 0.0) return true;
        }
        return false;
    }

    void make_conforming() {
        for (bool changed = true; changed;) {
            changed = false;
            const std::size_t count = segs_.size();
            for (std::size_t i = 0; i < count; ++i) {
                if (segs_[i].alive && encroached(segs_[i]) && split_segment(i)) changed = true;
            }
        }
    }

    bool inside_boundary(Vec2 p) const {
        bool inside = false;
        for (const auto& s : segs_) {
            if (!s.alive) continue;
            const Vec2 a = P(s.a), b = P(s.b);
            if ((a.y > p.y) != (b.y > p.y)) {
                const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if (p.x < x) inside = !inside;
            }
        }
        return inside;
    }

    // Flood fill from the super triangle; segments act as walls.
    std::vector<char> classify_inside() const {
        std::unordered_set<std::uint64_t> walls;
        for (const auto& s : segs_) {
            if (s.alive) walls.insert(edge_key(s.a, s.b));
        }
        const auto& tris = dt_->tris();
        std::vector<char> outside(tris.size(), 0);
        std::vector<int> queue;
        for (std::size_t i = 0; i < tris.size(); ++i) {
            if (!tris[i].alive) continue;
            const auto& v = tris[i].v;
            if (v[0] < 3 || v[1] < 3 || v[2] < 3) {
                outside[i] = 1;
                queue.push_back(static_cast<int>(i));
            }
        }
        for (std::size_t q = 0; q < queue.size(); ++q) {
            const Tri& t = tris[static_cast<std::size_t>(queue[q])];
            for (int k = 0; k < 3; ++k) {
                const int nb = t.n[k];
                if (nb == kNone || outside[static_cast<std::size_t>(nb)]) continue;
                if (walls.count(edge_key(t.v[(k + 1) % 3], t.v[(k + 2) % 3]))) continue;
                outside[static_cast<std::size_t>(nb)] = 1;
                queue.push_back(nb);
            }
        }
        std::vector<char> inside(tris.size(), 0);
        for (std::size_t i = 0; i < tris.size(); ++i) inside[i] = tris[i].alive && !outside[i];
        return inside;
    }

    bool is_bad(const Tri& t) const {
        const Vec2 p[3] = {P(t.v[0]), P(t.v[1]), P(t.v[2])};
        const Vec2 cc = circumcenter(p[0], p[1], p[2]);
        const Vec2 g = (1.0 / 3.0) * (p[0] + p[1] + p[2]);
        if (norm(cc - p[0]) > 0.6 * size_at(g)) return true;
        int k = 0;
        double smallest = 4.0;
        for (int j = 0; j < 3; ++j) {
            const Vec2 u = p[(j + 1) % 3] - p[j], v = p[(j + 2) % 3] - p[j];
            const double ang = std::atan2(std::abs(cross(u, v)), dot(u, v));
            if (ang < smallest) {
                smallest = ang;
                k = j;
            }
        }
        if (smallest * 180.0 / std::numbers::pi >= opt_.min_angle_deg) return false;
        // Angles pinned by a sharp input corner cannot be improved.
        return !(is_corner(t.v[k]) && is_boundary(t.v[(k + 1) % 3]) && is_boundary(t.v[(k + 2) % 3]));
    }

    void refine() {
        make_conforming();
        for (int round = 0; round < 200; ++round) {
            const auto inside = classify_inside();
            const auto& tris = dt_->tris();
            std::vector<std::array<int, 3>> bad;
            for (std::size_t i = 0; i < tris.size(); ++i) {
                if (inside[i] && is_bad(tris[i])) bad.push_back(tris[i].v);
            }
            if (bad.empty()) return;
            std::size_t progress = 0;
            for (const auto& v : bad) {
                int left, right;
                // Skip triangles destroyed earlier in this round.
                if (!dt_->edge_apexes(v[0], v[1], left, right) || left != v[2]) continue;
                const Vec2 cc = circumcenter(P(v[0]), P(v[1]), P(v[2]));
                std::vector<std::size_t> hit;
                for (std::size_t si = 0; si < segs_.size(); ++si) {
                    const auto& s = segs_[si];
                    if (!s.alive) continue;
                    const Vec2 a = P(s.a), b = P(s.b);
                    if (!s.frozen && norm2(cc - 0.5 * (a + b)) < 0.25 * norm2(b - a)) hit.push_back(si);
                }
                if (!hit.empty()) {
                    bool split = false;
                    for (std::size_t si : hit) {
                        if (segs_[si].alive && split_segment(si)) split = true;
                    }
                    if (split) ++progress;
                    continue;
                }
                if (!inside_boundary(cc)) continue;
                if (dt_->insert(cc) != kNone) ++progress;
                if (dt_->points().size() > opt_.max_nodes + 3) throw MeshError("node cap exceeded");
            }
            make_conforming();
            if (progress == 0) return;
        }
    }

    Mesh extract() const {
        const auto inside = classify_inside();
        const auto& tris = dt_->tris();
        const auto& pts = dt_->points();
        std::vector<int> remap(pts.size(), kNone);
        Mesh mesh;
        mesh.model = loop_.model;
        mesh.kind = loop_.kind;
        mesh.h = opt_.h;
        auto use = [&](int v) {
            if (remap[static_cast<std::size_t>(v)] == kNone) {
                remap[static_cast<std::size_t>(v)] = static_cast<int>(mesh.nodes.size());
                mesh.nodes.push_back(pts[static_cast<std::size_t>(v)]);
            }
            return remap[static_cast<std::size_t>(v)];
        };
        for (const auto& s : segs_) {
            if (!s.alive) continue;
            mesh.boundary.push_back({use(s.a), use(s.b), loop_.pieces[static_cast<std::size_t>(s.piece)].marker});
        }
        for (std::size_t i = 0; i < tris.size(); ++i) {
            if (!inside[i]) continue;
            const auto& v = tris[i].v;
            if (v[0] < 3 || v[1] < 3 || v[2] < 3) throw MeshError("boundary leak while meshing");
            mesh.triangles.push_back({use(v[0]), use(v[1]), use(v[2])});
        }
        if (mesh.triangles.empty()) throw MeshError("meshing produced no interior triangles");
        mesh.on_boundary.assign(mesh.nodes.size(), 0);
        for (const auto& e : mesh.boundary) {
            mesh.on_boundary[static_cast<std::size_t>(e.a)] = 1;
            mesh.on_boundary[static_cast<std::size_t>(e.b)] = 1;
        }
        return mesh;
    }

    const BoundaryLoop& loop_;
    MeshOptions opt_;
    std::vector<Vec2> bpts_;
    std::vector<Segment> segs_;
    std::optional<Delaunay> dt_;
    std::vector<char> bnd_;
    std::vector<char> corner_;
    double min_len_ = 0.0;
};

Vec2 reflect(Vec2 p, Vec2 axis) { return 2.0 * dot(p, axis) * axis - p; }

Mesh mirror_mesh(const Mesh& half, Vec2 axis, const std::vector<int>& side_map) {
    const std::size_t n = half.nodes.size();
    std::vector<char> on_axis(n, 0);
    for (const auto& e : half.boundary) {
        if (e.marker < 0) on_axis[static_cast<std::size_t>(e.a)] = on_axis[static_cast<std::size_t>(e.b)] = 1;
    }
    Mesh mesh;
    mesh.model = half.model;
    mesh.kind = half.kind;
    mesh.h = half.h;
    mesh.nodes = half.nodes;
    std::vector<int> image(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (on_axis[i]) {
            image[i] = static_cast<int>(i);
        } else {
            image[i] = static_cast<int>(mesh.nodes.size());
            mesh.nodes.push_back(reflect(half.nodes[i], axis));
        }
    }
    mesh.triangles = half.triangles;
    for (const auto& t : half.triangles) {
        mesh.triangles.push_back({image[static_cast<std::size_t>(t[0])], image[static_cast<std::size_t>(t[2])],
                                  image[static_cast<std::size_t>(t[1])]});
    }
    for (const auto& e : half.boundary) {
        if (e.marker < 0) continue;
        mesh.boundary.push_back(e);
    }
    for (const auto& e : half.boundary) {
        if (e.marker < 0) continue;
        mesh.boundary.push_back({image[static_cast<std::size_t>(e.b)], image[static_cast<std::size_t>(e.a)],
                                 side_map[static_cast<std::size_t>(e.marker)]});
    }
    mesh.on_boundary.assign(mesh.nodes.size(), 0);
    for (const auto& e : mesh.boundary) {
        mesh.on_boundary[static_cast<std::size_t>(e.a)] = 1;
        mesh.on_boundary[static_cast<std::size_t>(e.b)] = 1;
    }
    mesh.axis = axis;
    mesh.mirror.resize(mesh.nodes.size());
    for (std::size_t i = 0; i < n; ++i) {
        mesh.mirror[i] = image[i];
        mesh.mirror[static_cast<std::size_t>(image[i])] = static_cast<int>(i);
    }
    return mesh;
}

CurvePiece arc_piece(const GeodesicArc& arc, int marker) {
    const bool straight = !geodesic_carrier(arc.model(), arc.a(), arc.b()).has_value();
    return CurvePiece{[arc](double t) { return arc.sample(t); }, marker, straight};
}

CurvePiece segment_piece(Vec2 a, Vec2 b, int marker) {
    return CurvePiece{[a, b](double t) { return a + t * (b - a); }, marker, true};
}

}  // namespace

BoundaryLoop disc_boundary(const DiscSpec& disc) {
    BoundaryLoop loop;
    loop.kind = DomainKind::disc;
    loop.model = disc.model;
    const double r = disc.model_radius;
    loop.pieces.push_back(CurvePiece{[r](double t) {
                                         const double th = kTwoPi * t;
                                         return Vec2{r * std::cos(th), r * std::sin(th)};
                                     },
                                     0, false});
    return loop;
}

BoundaryLoop polygon_boundary(const GeodesicPolygon& polygon) {
    BoundaryLoop loop;
    loop.kind = DomainKind::polygon;
    loop.model = polygon.model;
    for (std::size_t i = 0; i < polygon.sides.size(); ++i) {
        loop.pieces.push_back(arc_piece(polygon.sides[i], static_cast<int>(i)));
    }
    loop.grading_points = polygon.vertices;
    return loop;
}

BoundaryLoop polygon_boundary(const ScherkPolygon& polygon) { return polygon_boundary(polygon.polygon()); }

BoundaryLoop straight_polygon_boundary(const std::vector<Vec2>& vertices) {
    if (vertices.size() < 3) throw MalformedPolygon("a polygon needs at least 3 vertices");
    BoundaryLoop loop;
    loop.kind = DomainKind::polygon;
    loop.model = MetricModel::euclidean();
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        loop.pieces.push_back(segment_piece(vertices[i], vertices[(i + 1) % vertices.size()], static_cast<int>(i)));
    }
    loop.grading_points = vertices;
    return loop;
}

BoundaryLoop core_boundary(const CompactCore& core) {
    BoundaryLoop loop;
    loop.kind = DomainKind::core;
    loop.model = core.model;
    const std::size_t n = core.outer.sides.size();
    for (std::size_t i = 0; i < n; ++i) {
        const GeodesicArc side = core.outer.sides[i];
        const double lo = core.span_lo[i], hi = core.span_hi[i];
        loop.pieces.push_back(CurvePiece{[side, lo, hi](double t) { return side.sample(lo + t * (hi - lo)); },
                                         static_cast<int>(i), !geodesic_carrier(side.model(), side.a(), side.b())});
        const std::size_t j = (i + 1) % n;
        const Circle c = core.notches[j];
        const Vec2 s = side.sample(hi);
        const Vec2 e = core.outer.sides[j].sample(core.span_lo[j]);
        const double phi_s = std::atan2(s.y - c.center.y, s.x - c.center.x);
        const double phi_e = std::atan2(e.y - c.center.y, e.x - c.center.x);
        double sweep = std::fmod(phi_s - phi_e, kTwoPi);
        if (sweep < 0) sweep += kTwoPi;
        // Walking counter-clockwise around the core, each notch is circled clockwise.
        loop.pieces.push_back(CurvePiece{[c, phi_s, sweep, s, e](double t) {
                                             if (t <= 0.0) return s;
                                             if (t >= 1.0) return e;
                                             const double phi = phi_s - t * sweep;
                                             return c.center + Vec2{c.radius * std::cos(phi), c.radius * std::sin(phi)};
                                         },
                                         static_cast<int>(n + j), false});
    }
    return loop;
}

double Mesh::area(std::size_t t) const {
    const auto& tr = triangles[t];
    return 0.5 * cross(nodes[static_cast<std::size_t>(tr[1])] - nodes[static_cast<std::size_t>(tr[0])],
                       nodes[static_cast<std::size_t>(tr[2])] - nodes[static_cast<std::size_t>(tr[0])]);
}

Vec2 Mesh::centroid(std::size_t t) const {
    const auto& tr = triangles[t];
    return (1.0 / 3.0) * (nodes[static_cast<std::size_t>(tr[0])] + nodes[static_cast<std::size_t>(tr[1])] +
                          nodes[static_cast<std::size_t>(tr[2])]);
}

double Mesh::min_angle_deg() const {
    double m = 180.0;
    for (const auto& t : triangles) {
        m = std::min(m, min_angle_of(nodes[static_cast<std::size_t>(t[0])], nodes[static_cast<std::size_t>(t[1])],
                                     nodes[static_cast<std::size_t>(t[2])]) *
                            180.0 / std::numbers::pi);
    }
    return m;
}

double Mesh::max_edge_length() const {
    double m = 0.0;
    for (const auto& t : triangles) {
        for (int k = 0; k < 3; ++k) {
            m = std::max(m, norm(nodes[static_cast<std::size_t>(t[k])] - nodes[static_cast<std::size_t>(t[(k + 1) % 3])]));
        }
    }
    return m;
}

Mesh triangulate(const BoundaryLoop& loop, const MeshOptions& options) { return Refiner(loop, options).run(); }

std::optional<PolygonSymmetry> find_symmetry(const ScherkPolygon& polygon, double tol) {
    const std::size_t n = polygon.size();
    auto same_angle = [tol](double a, double b) {
        double d = std::fmod(a - b, kTwoPi);
        if (d < 0) d += kTwoPi;
        return d < tol || kTwoPi - d < tol;
    };
    for (bool want_swap : {true, false}) {
        for (std::size_t i = 0; i < n / 2; ++i) {
            const double ti = polygon.vertex_angle(i);
            if (!same_angle(polygon.vertex_angle(i + n / 2), ti + std::numbers::pi)) continue;
            std::vector<int> vmap(n, -1);
            bool ok = true;
            for (std::size_t k = 0; k < n && ok; ++k) {
                const double image = 2.0 * ti - polygon.vertex_angle(k);
                for (std::size_t m = 0; m < n; ++m) {
                    if (same_angle(polygon.vertex_angle(m), image)) vmap[k] = static_cast<int>(m);
                }
                ok = vmap[k] >= 0;
            }
            if (!ok) continue;
            PolygonSymmetry sym;
            sym.vertex = i;
            sym.axis = {std::cos(ti), std::sin(ti)};
            sym.side_map.resize(n);
            bool swaps = true, keeps = true;
            for (std::size_t k = 0; k < n; ++k) {
                const int s = vmap[polygon.next(k)];
                if (polygon.next(static_cast<std::size_t>(s)) != static_cast<std::size_t>(vmap[k])) ok = false;
                sym.side_map[k] = s;
                const bool same = polygon.labels[static_cast<std::size_t>(s)] == polygon.labels[k];
                swaps = swaps && !same;
                keeps = keeps && same;
            }
            if (!ok || (want_swap ? !swaps : !keeps)) continue;
            sym.swaps_labels = swaps;
            return sym;
        }
    }
    return std::nullopt;
}

Mesh triangulate(const ScherkPolygon& polygon, const MeshOptions& options) {
    const GeodesicPolygon poly = polygon.polygon();
    const auto sym = options.use_symmetry ? find_symmetry(polygon) : std::nullopt;
    if (!sym) return triangulate(polygon_boundary(poly), options);
    const std::size_t n = polygon.size();
    BoundaryLoop half;
    half.kind = DomainKind::polygon;
    half.model = poly.model;
    half.grading_points = poly.vertices;
    for (std::size_t k = 0; k < n / 2; ++k) {
        const std::size_t side = (sym->vertex + k) % n;
        half.pieces.push_back(arc_piece(poly.sides[side], static_cast<int>(side)));
    }
    const Vec2 from = poly.vertices[(sym->vertex + n / 2) % n];
    const Vec2 to = poly.vertices[sym->vertex];
    half.pieces.push_back(segment_piece(from, to, -1));
    return mirror_mesh(triangulate(half, options), sym->axis, sym->side_map);
}

Mesh triangulate(const GeodesicPolygon& polygon, const MeshOptions& options) {
    if (!polygon_metrics(polygon).is_simple) throw MalformedPolygon("cannot mesh a self-intersecting polygon");
    return triangulate(polygon_boundary(polygon), options);
}

Mesh triangulate(const DiscSpec& disc, const MeshOptions& options) {
    return triangulate(disc_boundary(disc), options);
}

Mesh triangulate(const CompactCore& core, const MeshOptions& options) {
    return triangulate(core_boundary(core), options);
}

PointLocator::PointLocator(const Mesh& mesh) : mesh_(&mesh) {
    Vec2 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
    Vec2 hi{-lo.x, -lo.y};
    for (const Vec2& p : mesh.nodes) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    lo_ = lo;
    const double w = std::max(hi.x - lo.x, 1e-12), hgt = std::max(hi.y - lo.y, 1e-12);
    const double cells = std::max<double>(1.0, static_cast<double>(mesh.triangles.size()) / 2.0);
    cell_ = std::sqrt(w * hgt / cells);
    nx_ = std::max(1, static_cast<int>(std::ceil(w / cell_)));
    ny_ = std::max(1, static_cast<int>(std::ceil(hgt / cell_)));
    cells_.assign(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_), {});
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        double x0 = std::numeric_limits<double>::max(), y0 = x0, x1 = -x0, y1 = -x0;
        for (int v : mesh.triangles[t]) {
            const Vec2 p = mesh.nodes[static_cast<std::size_t>(v)];
            x0 = std::min(x0, p.x);
            y0 = std::min(y0, p.y);
            x1 = std::max(x1, p.x);
            y1 = std::max(y1, p.y);
        }
        const int i0 = std::clamp(static_cast<int>((x0 - lo_.x) / cell_), 0, nx_ - 1);
        const int i1 = std::clamp(static_cast<int>((x1 - lo_.x) / cell_), 0, nx_ - 1);
        const int j0 = std::clamp(static_cast<int>((y0 - lo_.y) / cell_), 0, ny_ - 1);
        const int j1 = std::clamp(static_cast<int>((y1 - lo_.y) / cell_), 0, ny_ - 1);
        for (int j = j0; j <= j1; ++j) {
            for (int i = i0; i <= i1; ++i) {
                cells_[static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i)]
                    .push_back(static_cast<int>(t));
            }
        }
    }
}

std::optional<Location> PointLocator::locate(Vec2 p) const {
    const int i = static_cast<int>(std::floor((p.x - lo_.x) / cell_));
    const int j = static_cast<int>(std::floor((p.y - lo_.y) / cell_));
    if (i < -1 || j < -1 || i > nx_ || j > ny_) return std::nullopt;
    const int ci = std::clamp(i, 0, nx_ - 1), cj = std::clamp(j, 0, ny_ - 1);
    const auto& bucket =
        cells_[static_cast<std::size_t>(cj) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(ci)];
    std::optional<Location> best;
    double best_min = -std::numeric_limits<double>::infinity();
    for (int t : bucket) {
        const auto& tr = mesh_->triangles[static_cast<std::size_t>(t)];
        const Vec2 a = mesh_->nodes[static_cast<std::size_t>(tr[0])];
        const Vec2 b = mesh_->nodes[static_cast<std::size_t>(tr[1])];
        const Vec2 c = mesh_->nodes[static_cast<std::size_t>(tr[2])];
        const double area = cross(b - a, c - a);
        const std::array<double, 3> bary{cross(b - p, c - p) / area, cross(c - p, a - p) / area,
                                         cross(a - p, b - p) / area};
        const double m = std::min({bary[0], bary[1], bary[2]});
        if (m > best_min) {
            best_min = m;
            best = Location{static_cast<std::size_t>(t), bary};
        }
    }
    if (!best || best_min < -1e-9) return std::nullopt;
    return best;
}

}  // namespace scherk
