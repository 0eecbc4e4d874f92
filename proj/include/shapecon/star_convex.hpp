#pragma once

#include <cassert>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "shapecon/errors.hpp"
#include "shapecon/shape.hpp"
#include "shapecon/snowflake.hpp"

// Star convexity, hole detection, the parallelogram decomposition of star
// convex shapes, convex hulls/sides, and rotational symmetry.

namespace shapecon {

// A hole is a bounded component of the complement region. Unit faces of the
// 1-padded bounding box are flooded from the border; two non-shape faces
// communicate iff their shared edge is not in the shape (a shape edge is a
// barrier, squeezing around its endpoint is the face cycle around that node).
inline bool is_hole_free(const Shape& s) {
    if (s.nodes.empty()) return true;
    int xmin = s.nodes.begin()->x, xmax = xmin, ymin = s.nodes.begin()->y, ymax = ymin;
    for (GridPoint p : s.nodes) {
        xmin = std::min(xmin, p.x); xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y); ymax = std::max(ymax, p.y);
    }
    xmin -= 2; xmax += 2; ymin -= 2; ymax += 2;
    auto in_box = [&](const Face& f) {
        return f.p.x >= xmin && f.p.x <= xmax && f.p.y >= ymin && f.p.y <= ymax;
    };
    std::set<Face> visited;
    std::deque<Face> queue;
    auto push = [&](const Face& f) {
        if (!in_box(f) || s.has_face(f) || visited.count(f)) return;
        visited.insert(f);
        queue.push_back(f);
    };
    // Seed with the border ring.
    for (int x = xmin; x <= xmax; ++x) {
        push(Face{{x, ymin}, Orientation::Up});
        push(Face{{x, ymax}, Orientation::Up});
    }
    for (int y = ymin; y <= ymax; ++y) {
        push(Face{{xmin, y}, Orientation::Up});
        push(Face{{xmax, y}, Orientation::Up});
    }
    while (!queue.empty()) {
        Face f = queue.front();
        queue.pop_front();
        // Neighbors across each of the three boundary edges.
        for (const Edge& e : f.edges()) {
            if (s.has_edge(e)) continue;
            // The two faces sharing edge e.
            Face g1, g2;
            if (e.d == Direction::E) {
                g1 = Face{e.a, Orientation::Up};
                g2 = Face{{e.a.x, e.a.y}, Orientation::Down};
            } else if (e.d == Direction::NE) {
                g1 = Face{e.a, Orientation::Up};
                g2 = Face{{e.a.x - 1, e.a.y + 1}, Orientation::Down};
            } else {
                g1 = Face{{e.a.x - 1, e.a.y}, Orientation::Up};
                g2 = Face{{e.a.x - 1, e.a.y + 1}, Orientation::Down};
            }
            push(f == g1 ? g2 : g1);
        }
    }
    // Any unvisited non-shape face in the box is part of a bounded pocket.
    for (int x = xmin; x <= xmax; ++x)
        for (int y = ymin; y <= ymax; ++y)
            for (Orientation o : {Orientation::Up, Orientation::Down}) {
                Face f{{x, y}, o};
                if (!s.has_face(f) && !visited.count(f)) return false;
            }
    return true;
}

// Decompose v into l1*u_d1 + l2*u_d2 with l1, l2 >= 0 and d2 = rot(d1).
// Every grid vector has such a representation for some direction pair 60
// degrees apart.
inline bool two_direction_rep(GridPoint v, int rot, Direction& d1, long& l1, Direction& d2,
                              long& l2) {
    for (Direction d : all_directions) {
        Direction dd = rotate_direction(d, rot);
        GridPoint u1 = unit_vector(d), u2 = unit_vector(dd);
        long det = static_cast<long>(u1.x) * u2.y - static_cast<long>(u1.y) * u2.x;
        if (det == 0) continue;
        long a = (static_cast<long>(v.x) * u2.y - static_cast<long>(v.y) * u2.x) / det;
        long b = (static_cast<long>(u1.x) * v.y - static_cast<long>(u1.y) * v.x) / det;
        if (a * u1.x + b * u2.x != v.x || a * u1.y + b * u2.y != v.y) continue;
        if (a >= 0 && b >= 0) {
            d1 = d; l1 = a; d2 = dd; l2 = b;
            return true;
        }
    }
    return false;
}

// All shortest paths from c to v lie in the parallelogram spanned by the two
// step directions; they are all contained in S iff every parallelogram edge
// in those directions is.
inline bool all_shortest_paths_contained(const Shape& s, GridPoint c, GridPoint v) {
    Direction d1, d2;
    long l1, l2;
    if (!two_direction_rep(v - c, 1, d1, l1, d2, l2)) return false;
    GridPoint u1 = unit_vector(d1), u2 = unit_vector(d2);
    for (long i = 0; i < l1; ++i)
        for (long j = 0; j <= l2; ++j)
            if (!s.has_edge(c + static_cast<int>(i) * u1 + static_cast<int>(j) * u2, d1))
                return false;
    for (long i = 0; i <= l1; ++i)
        for (long j = 0; j < l2; ++j)
            if (!s.has_edge(c + static_cast<int>(i) * u1 + static_cast<int>(j) * u2, d2))
                return false;
    return true;
}

struct StarConvexity {
    bool star_convex = false;
    std::set<GridPoint> centers;
};

inline StarConvexity is_star_convex(const Shape& s) {
    StarConvexity out;
    if (s.empty()) return out;
    if (!is_hole_free(s)) return out;
    for (GridPoint c : s.nodes) {
        bool ok = true;
        for (GridPoint v : s.nodes)
            if (!all_shortest_paths_contained(s, c, v)) {
                ok = false;
                break;
            }
        if (ok) out.centers.insert(c);
    }
    out.star_convex = !out.centers.empty();
    return out;
}

// --- Decomposition into parallelograms -----------------------------------------

struct StarConvexDecomposition {
    std::vector<Shape> constituents;
    SnowflakeTree tree;
};

namespace detail {

// Subtree for L(d,l) (+) L(d',l'), zero lengths elided.
inline int emit_parallelogram_tree(SnowflakeTree& t, Direction d, long l, Direction dd, long l2,
                                   std::optional<Face> tri_at_origin) {
    int node;
    if (tri_at_origin) {
        auto c = tri_at_origin->corners();
        Direction td = Direction::E;
        bool found = false;
        for (Direction x : all_directions) {
            std::set<GridPoint> want = {unit_vector(x), unit_vector(ccw(x))};
            std::set<GridPoint> got = {c[1], c[2]};
            if (want == got) { td = x; found = true; break; }
        }
        assert(found);
        (void)found;
        t.nodes.push_back({NodeKind::Tri, td, 1, {}});
        node = t.size() - 1;
    } else if (l == 0 && l2 == 0) {
        t.nodes.push_back({NodeKind::Line, Direction::E, 0, {}});
        return t.size() - 1;
    } else if (l == 0) {
        t.nodes.push_back({NodeKind::Line, dd, l2, {}});
        return t.size() - 1;
    } else if (l2 == 0) {
        t.nodes.push_back({NodeKind::Line, d, l, {}});
        return t.size() - 1;
    } else {
        t.nodes.push_back({NodeKind::Line, d, l, {}});
        node = t.size() - 1;
    }
    if (tri_at_origin && l >= 1) {
        t.nodes.push_back({NodeKind::Sum, d, l, {node}});
        node = t.size() - 1;
    }
    if (l2 >= 1) {
        t.nodes.push_back({NodeKind::Sum, dd, l2, {node}});
        node = t.size() - 1;
    }
    return node;
}

}  // namespace detail

// Covers a star convex shape (origin must be a center) by parallelograms
// L(d,l) (+) L(d',l') with d' = cw(d), plus triangle-capped parallelograms
// for boundary elements missed by all shortest paths. Constituents may
// overlap; their union equals the shape exactly.
inline StarConvexDecomposition star_convex_decompose(const Shape& s) {
    auto sc = is_star_convex(s);
    if (!sc.star_convex || !sc.centers.count({0, 0}))
        throw NotStarConvex("shape is not star convex with the origin as a center");

    StarConvexDecomposition out;
    std::set<std::tuple<int, long, int, long, std::optional<Face>>> seen;
    Shape covered;
    std::vector<std::tuple<Direction, long, Direction, long, std::optional<Face>>> parts;

    auto add_part = [&](Direction d, long l, Direction dd, long l2, std::optional<Face> tri,
                        const Shape& shape) {
        auto key = std::make_tuple(static_cast<int>(d), l, static_cast<int>(dd), l2, tri);
        if (seen.count(key)) return;
        seen.insert(key);
        parts.push_back({d, l, dd, l2, tri});
        out.constituents.push_back(shape);
        covered = union_shapes(covered, shape);
    };

    for (GridPoint v : s.nodes) {
        Direction d1, d2;
        long l1, l2;
        bool ok = two_direction_rep(v, -1, d1, l1, d2, l2);
        assert(ok);
        (void)ok;
        Shape p = minkowski_with_line(make_line(d1, static_cast<int>(l1)), d2,
                                      static_cast<int>(l2));
        add_part(d1, l1, d2, l2, std::nullopt, p);
    }
    // Boundary edges (and their faces) not on any shortest path: cover with a
    // triangle Minkowski-summed with the third corner's parallelogram.
    auto cover_with_face = [&](const Face& f) {
        for (GridPoint p : f.corners()) {
            Direction d1, d2;
            long l1, l2;
            if (!two_direction_rep(p, -1, d1, l1, d2, l2)) continue;
            auto c = f.corners();
            auto tri = face_from_corners(c[0] - p, c[1] - p, c[2] - p);
            if (!tri) continue;
            Shape base;
            base.add_face(*tri);
            Shape cand = minkowski_with_line(
                minkowski_with_line(base, d1, static_cast<int>(l1)), d2, static_cast<int>(l2));
            if (!cand.subset_of(s)) continue;
            add_part(d1, l1, d2, l2, tri, cand);
            return true;
        }
        return false;
    };
    for (const Edge& e : s.edges) {
        if (covered.has_edge(e)) continue;
        bool done = false;
        for (const Face& f : s.faces) {
            auto fe = f.edges();
            if (fe[0] != e && fe[1] != e && fe[2] != e) continue;
            if (cover_with_face(f)) { done = true; break; }
        }
        if (!done) throw NotStarConvex("no parallelogram cover for a boundary edge");
    }
    for (const Face& f : s.faces) {
        if (covered.has_face(f)) continue;
        if (!cover_with_face(f)) throw NotStarConvex("no parallelogram cover for a face");
    }
    if (!(covered == s)) throw NotStarConvex("decomposition does not reassemble the shape");

    // Equivalent snowflake tree.
    std::vector<int> roots;
    for (auto& [d, l, dd, l2, tri] : parts)
        roots.push_back(detail::emit_parallelogram_tree(out.tree, d, l, dd, l2, tri));
    if (roots.size() == 1) {
        out.tree.root = roots[0];
    } else {
        out.tree.nodes.push_back({NodeKind::Union, Direction::E, 0, roots});
        out.tree.root = out.tree.size() - 1;
    }
    validate_tree(out.tree);
    return out;
}

// --- Convex shapes ---------------------------------------------------------------

struct HexBounds {
    int xmin, xmax, ymin, ymax, smin, smax;  // s = x + y
};

inline HexBounds hex_bounds(const std::set<GridPoint>& nodes) {
    HexBounds b{};
    bool first = true;
    for (GridPoint p : nodes) {
        int sx = p.x + p.y;
        if (first) {
            b = {p.x, p.x, p.y, p.y, sx, sx};
            first = false;
        } else {
            b.xmin = std::min(b.xmin, p.x); b.xmax = std::max(b.xmax, p.x);
            b.ymin = std::min(b.ymin, p.y); b.ymax = std::max(b.ymax, p.y);
            b.smin = std::min(b.smin, sx);  b.smax = std::max(b.smax, sx);
        }
    }
    return b;
}

// Filled convex hull of a node set: all elements inside the intersection of
// the six half-planes.
inline Shape convex_hull_shape(const std::set<GridPoint>& nodes) {
    HexBounds b = hex_bounds(nodes);
    auto inside = [&](GridPoint p) {
        int sx = p.x + p.y;
        return p.x >= b.xmin && p.x <= b.xmax && p.y >= b.ymin && p.y <= b.ymax &&
               sx >= b.smin && sx <= b.smax;
    };
    Shape out;
    for (int x = b.xmin; x <= b.xmax; ++x)
        for (int y = b.ymin; y <= b.ymax; ++y) {
            GridPoint p{x, y};
            if (!inside(p)) continue;
            out.add_node(p);
            for (Direction d : {Direction::E, Direction::NE, Direction::NW})
                if (inside(p + unit_vector(d))) out.add_edge(p, d);
            for (Orientation o : {Orientation::Up, Orientation::Down}) {
                Face f{p, o};
                auto c = f.corners();
                if (inside(c[0]) && inside(c[1]) && inside(c[2])) out.add_face(f);
            }
        }
    return out;
}

inline bool is_convex(const Shape& s) {
    if (s.empty()) return false;
    return s == convex_hull_shape(s.nodes);
}

struct ConvexSides {
    long a = 0, b = 0, c = 0, d = 0, e = 0, f = 0;

    friend bool operator==(const ConvexSides&, const ConvexSides&) = default;
    bool closed() const { return a + b == d + e && b + c == e + f && c + d == f + a; }
    bool nonneg() const { return a >= 0 && b >= 0 && c >= 0 && d >= 0 && e >= 0 && f >= 0; }
};

// Boundary side lengths counter-clockwise; a = bottom-left side (parallel to
// the Z axis), then b = bottom, c = bottom-right, d = top-right, e = top,
// f = top-left.
inline ConvexSides convex_sides(const Shape& s) {
    if (!is_convex(s)) throw NotConvex("convex_sides requires a convex shape");
    HexBounds b = hex_bounds(s.nodes);
    ConvexSides cs;
    cs.a = b.smin - b.ymin - b.xmin;
    cs.b = b.xmax - b.smin + b.ymin;
    cs.c = b.smax - b.xmax - b.ymin;
    cs.d = b.xmax + b.ymax - b.smax;
    cs.e = b.smax - b.ymax - b.xmin;
    cs.f = b.ymax - b.smin + b.xmin;
    return cs;
}

// Reconstructs the filled convex shape with the given sides, bottom-left
// corner at the origin.
inline Shape convex_shape_from_sides(const ConvexSides& cs) {
    if (!cs.nonneg() || !cs.closed()) throw RangeError("invalid convex side tuple");
    std::set<GridPoint> corners;
    GridPoint cur{0, 0};
    corners.insert(cur);
    auto walk = [&](Direction d, long steps) {
        cur = cur + static_cast<int>(steps) * unit_vector(d);
        corners.insert(cur);
    };
    walk(Direction::E, cs.b);
    walk(Direction::NE, cs.c);
    walk(Direction::NW, cs.d);
    walk(Direction::W, cs.e);
    walk(Direction::SW, cs.f);
    walk(Direction::SE, cs.a);
    assert((cur == GridPoint{0, 0}));
    return convex_hull_shape(corners);
}

// Necessary and sufficient inequalities for fitting one convex shape into
// another under translation (no rotation).
inline bool convex_fits(const ConvexSides& s1, const ConvexSides& s2) {
    return s1.a + s1.b <= s2.a + s2.b && s1.b + s1.c <= s2.b + s2.c &&
           s1.c + s1.d <= s2.c + s2.d && s1.a + s1.b + s1.c <= s2.a + s2.b + s2.c &&
           s1.b + s1.c + s1.d <= s2.b + s2.c + s2.d;
}

// --- Rotational symmetry -----------------------------------------------------------

struct Symmetry {
    bool symmetric = false;
    GridPoint t{};
};

// S is r-symmetric iff S rotated by r*60 degrees equals S after a unique
// grid translation.
inline Symmetry is_r_symmetric(const Shape& s, int r) {
    Symmetry out;
    if (s.empty()) return out;
    Shape rot = rotate_shape(s, r);
    GridPoint t = *s.nodes.begin() - *rot.nodes.begin();
    if (translate_shape(rot, t) == s) {
        out.symmetric = true;
        out.t = t;
    }
    return out;
}

}  // namespace shapecon
