#pragma once

#include <algorithm>
#include <cassert>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "shapecon/errors.hpp"
#include "shapecon/trigrid.hpp"

// Shapes are finite unions of grid nodes, unit edges and unit triangular
// faces, closed under sub-element containment: every edge brings its two
// endpoints, every face its three boundary edges.

namespace shapecon {

// Edges are stored at the endpoint from which the edge direction is one of
// E, NE, NW.
struct Edge {
    GridPoint a;
    Direction d = Direction::E;

    friend constexpr bool operator==(const Edge&, const Edge&) = default;
    friend constexpr auto operator<=>(const Edge&, const Edge&) = default;

    GridPoint b() const { return a + unit_vector(d); }
};

inline Edge make_edge(GridPoint from, Direction d) {
    if (d == Direction::W || d == Direction::SW || d == Direction::SE)
        return Edge{from + unit_vector(d), opposite(d)};
    return Edge{from, d};
}

enum class Orientation : uint8_t { Up = 0, Down = 1 };

// Up face at p has corners {p, p+u_E, p+u_NE} (anchor = SW corner).
// Down face at p has corners {p, p+u_E, p+(1,-1)} (anchor = NW corner).
struct Face {
    GridPoint p;
    Orientation o = Orientation::Up;

    friend constexpr bool operator==(const Face&, const Face&) = default;
    friend constexpr auto operator<=>(const Face&, const Face&) = default;

    std::array<GridPoint, 3> corners() const {
        if (o == Orientation::Up)
            return {p, p + GridPoint{1, 0}, p + GridPoint{0, 1}};
        return {p, p + GridPoint{1, 0}, p + GridPoint{1, -1}};
    }

    std::array<Edge, 3> edges() const {
        auto c = corners();
        return {make_edge(c[0], Direction::E),
                o == Orientation::Up ? Edge{c[0], Direction::NE} : Edge{c[2], Direction::NE},
                o == Orientation::Up ? Edge{c[1], Direction::NW} : Edge{c[2], Direction::NW}};
    }
};

inline std::optional<Face> face_from_corners(GridPoint a, GridPoint b, GridPoint c) {
    std::array<GridPoint, 3> cs = {a, b, c};
    for (GridPoint p : cs) {
        Face up{p, Orientation::Up};
        Face down{p, Orientation::Down};
        auto matches = [&cs](const Face& f) {
            auto fc = f.corners();
            std::array<GridPoint, 3> x = cs, y = {fc[0], fc[1], fc[2]};
            std::sort(x.begin(), x.end());
            std::sort(y.begin(), y.end());
            return x == y;
        };
        if (matches(up)) return up;
        if (matches(down)) return down;
    }
    return std::nullopt;
}

class Shape {
public:
    std::set<GridPoint> nodes;
    std::set<Edge> edges;
    std::set<Face> faces;

    Shape() = default;

    static Shape single_node(GridPoint p = {0, 0}) {
        Shape s;
        s.nodes.insert(p);
        return s;
    }

    void add_node(GridPoint p) { nodes.insert(p); }

    void add_edge(Edge e) {
        edges.insert(e);
        nodes.insert(e.a);
        nodes.insert(e.b());
    }

    void add_edge(GridPoint from, Direction d) { add_edge(make_edge(from, d)); }

    void add_face(Face f) {
        faces.insert(f);
        for (const Edge& e : f.edges()) add_edge(e);
    }

    bool has_node(GridPoint p) const { return nodes.count(p) > 0; }
    bool has_edge(Edge e) const { return edges.count(e) > 0; }
    bool has_edge(GridPoint from, Direction d) const { return has_edge(make_edge(from, d)); }
    bool has_face(Face f) const { return faces.count(f) > 0; }

    bool empty() const { return nodes.empty(); }
    bool trivial() const { return nodes.size() <= 1; }

    friend bool operator==(const Shape&, const Shape&) = default;

    bool subset_of(const Shape& big) const {
        return std::includes(big.nodes.begin(), big.nodes.end(), nodes.begin(), nodes.end()) &&
               std::includes(big.edges.begin(), big.edges.end(), edges.begin(), edges.end()) &&
               std::includes(big.faces.begin(), big.faces.end(), faces.begin(), faces.end());
    }
};

inline Shape make_line(Direction d, int len) {
    if (len < 0) throw RangeError("line length must be >= 0");
    Shape s = Shape::single_node();
    GridPoint cur{0, 0};
    for (int i = 0; i < len; ++i) {
        s.add_edge(cur, d);
        cur = cur + unit_vector(d);
    }
    return s;
}

inline Shape translate_shape(const Shape& s, GridPoint t) {
    Shape r;
    for (GridPoint p : s.nodes) r.nodes.insert(p + t);
    for (const Edge& e : s.edges) r.edges.insert(Edge{e.a + t, e.d});
    for (const Face& f : s.faces) r.faces.insert(Face{f.p + t, f.o});
    return r;
}

inline Shape rotate_shape(const Shape& s, int r) {
    Shape out;
    for (GridPoint p : s.nodes) out.add_node(rotate60(p, r));
    for (const Edge& e : s.edges)
        out.add_edge(make_edge(rotate60(e.a, r), rotate_direction(e.d, r)));
    for (const Face& f : s.faces) {
        auto c = f.corners();
        auto nf = face_from_corners(rotate60(c[0], r), rotate60(c[1], r), rotate60(c[2], r));
        assert(nf);
        out.add_face(*nf);
    }
    return out;
}

inline Shape union_shapes(const Shape& a, const Shape& b) {
    Shape r = a;
    for (GridPoint p : b.nodes) r.nodes.insert(p);
    for (const Edge& e : b.edges) r.add_edge(e);
    for (const Face& f : b.faces) r.add_face(f);
    return r;
}

// The filled size-k triangle with apex-opposite corner at `anchor`,
// matching the orientation of the unit face anchored there.
inline void fill_scaled_face(Shape& out, GridPoint anchor, Orientation o, int k) {
    GridPoint u1 = unit_vector(Direction::E);
    GridPoint u2 = o == Orientation::Up ? unit_vector(Direction::NE) : unit_vector(Direction::SE);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; i + j < k; ++j) {
            GridPoint q = anchor + i * u1 + j * u2;
            out.add_face(Face{q, o});
            if (j >= 1)
                out.add_face(Face{q, o == Orientation::Up ? Orientation::Down : Orientation::Up});
        }
    }
}

inline Shape scale_shape(const Shape& s, int k) {
    if (k < 0) throw RangeError("scale must be >= 0");
    if (k == 0) return Shape::single_node();
    Shape out;
    for (GridPoint p : s.nodes) out.add_node(k * p);
    for (const Edge& e : s.edges) {
        GridPoint cur = k * e.a;
        for (int i = 0; i < k; ++i) {
            out.add_edge(cur, e.d);
            cur = cur + unit_vector(e.d);
        }
    }
    for (const Face& f : s.faces) fill_scaled_face(out, k * f.p, f.o, k);
    return out;
}

inline Shape make_triangle(Direction d, int len) {
    if (len < 1) throw RangeError("triangle side length must be >= 1");
    auto f = face_from_corners({0, 0}, unit_vector(d), unit_vector(ccw(d)));
    assert(f);
    Shape unit;
    unit.add_face(*f);
    return scale_shape(unit, len);
}

// One sweep step of an edge along u_d covers the unit rhombus spanned by the
// edge and u_d, i.e. exactly two faces.
inline void add_swept_faces(Shape& out, const Edge& e, Direction d) {
    GridPoint a = e.a, b = e.b(), u = unit_vector(d);
    auto f1 = face_from_corners(a, b, a + u);
    auto f2 = face_from_corners(b, a + u, b + u);
    if (!f1 || !f2) {
        f1 = face_from_corners(a, b, b + u);
        f2 = face_from_corners(a, a + u, b + u);
    }
    assert(f1 && f2);
    out.add_face(*f1);
    out.add_face(*f2);
}

inline Shape minkowski_with_line(const Shape& s, Direction d, int len) {
    if (len < 0) throw RangeError("minkowski line length must be >= 0");
    Shape out;
    GridPoint u = unit_vector(d);
    for (int i = 0; i <= len; ++i) out = union_shapes(out, translate_shape(s, i * u));
    Axis ax = axis_of(d);
    for (int i = 0; i < len; ++i) {
        for (GridPoint p : s.nodes) out.add_edge(make_edge(p + i * u, d));
        for (const Edge& e : s.edges)
            if (axis_of(e.d) != ax) add_swept_faces(out, Edge{e.a + i * u, e.d}, d);
    }
    return out;
}

// --- Shape invariants ------------------------------------------------------

inline bool shape_closed(const Shape& s) {
    for (const Edge& e : s.edges)
        if (!s.has_node(e.a) || !s.has_node(e.b())) return false;
    for (const Face& f : s.faces)
        for (const Edge& e : f.edges())
            if (!s.has_edge(e)) return false;
    return true;
}

inline bool shape_connected(const Shape& s) {
    if (s.nodes.empty()) return false;
    // Region connectivity: elements are linked through shared sub-elements,
    // which closure guarantees are present.
    std::map<GridPoint, int> id;
    int n = 0;
    for (GridPoint p : s.nodes) id[p] = n++;
    std::vector<int> parent(n);
    for (int i = 0; i < n; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const Edge& e : s.edges) parent[find(id.at(e.a))] = find(id.at(e.b()));
    int root = find(0);
    for (int i = 0; i < n; ++i)
        if (find(i) != root) return false;
    return true;
}

inline bool shape_valid(const Shape& s) {
    return !s.empty() && s.has_node({0, 0}) && shape_closed(s) && shape_connected(s);
}

// --- Axis width -------------------------------------------------------------

// Minimal chord length of the shape along lines parallel to the given axis,
// returned in half-units (the exact value is halves/2).
//
// On a grid line the components are maximal runs of collinear shape edges
// (a lone node counts as length 0). Inside an open band between two grid
// lines the components are maximal runs of m side-adjacent faces; the chord
// infimum of such a run is m/2 for even m and (m-1)/2 for odd m. An edge
// crossing the band with no adjacent shape face is a zero-length component.
inline long axis_width_halves_x(const Shape& s) {
    if (s.empty()) throw RangeError("axis_width of empty shape");
    long best = -1;
    auto consider = [&best](long halves) {
        if (best < 0 || halves < best) best = halves;
    };

    // Grid lines: group by y.
    std::map<int, std::set<int>> line_edges;  // y -> anchors x of E-edges
    std::map<int, std::set<int>> line_nodes;  // y -> x of nodes
    for (const Edge& e : s.edges)
        if (e.d == Direction::E) line_edges[e.a.y].insert(e.a.x);
    for (GridPoint p : s.nodes) line_nodes[p.y].insert(p.x);
    for (auto& [y, xs] : line_nodes) {
        auto it = line_edges.find(y);
        const std::set<int>* ex = it == line_edges.end() ? nullptr : &it->second;
        for (int x : xs) {
            bool incident = ex && (ex->count(x) || ex->count(x - 1));
            if (!incident) consider(0);
        }
        if (ex) {
            int run = 0, prev = 0;
            bool in_run = false;
            for (int x : *ex) {
                if (in_run && x == prev + 1) {
                    ++run;
                } else {
                    if (in_run) consider(2L * run);
                    run = 1;
                }
                prev = x;
                in_run = true;
            }
            if (in_run) consider(2L * run);
        }
    }

    // Bands between y = j and y = j+1. Slot 2x holds Up(x, j), slot 2x+1
    // holds Down(x, j+1); consecutive slots are side-adjacent.
    std::map<int, std::set<long>> band_slots;  // band j -> occupied slots
    for (const Face& f : s.faces) {
        if (f.o == Orientation::Up)
            band_slots[f.p.y].insert(2L * f.p.x);
        else
            band_slots[f.p.y - 1].insert(2L * f.p.x + 1);
    }
    for (auto& [j, slots] : band_slots) {
        long run = 0, prev = 0;
        bool in_run = false;
        auto flush = [&]() {
            if (!in_run) return;
            consider(run % 2 == 0 ? run : run - 1);
        };
        for (long sl : slots) {
            if (in_run && sl == prev + 1) {
                ++run;
            } else {
                flush();
                run = 1;
            }
            prev = sl;
            in_run = true;
        }
        flush();
    }
    // Band-crossing edges with no adjacent face in the band.
    for (const Edge& e : s.edges) {
        if (e.d == Direction::E) continue;
        int j = e.a.y;  // both NE and NW edges at anchor y span band (y, y+1)
        Face f1, f2;
        if (e.d == Direction::NE) {
            f1 = Face{e.a, Orientation::Up};
            f2 = Face{{e.a.x - 1, e.a.y + 1}, Orientation::Down};
        } else {
            f1 = Face{{e.a.x - 1, e.a.y}, Orientation::Up};
            f2 = Face{{e.a.x - 1, e.a.y + 1}, Orientation::Down};
        }
        (void)j;
        if (!s.has_face(f1) && !s.has_face(f2)) consider(0);
    }
    return best;
}

inline long axis_width_halves(const Shape& s, Axis w) {
    switch (w) {
        case Axis::X: return axis_width_halves_x(s);
        case Axis::Y: return axis_width_halves_x(rotate_shape(s, -1));
        case Axis::Z: return axis_width_halves_x(rotate_shape(s, -2));
    }
    return 0;
}

inline double axis_width(const Shape& s, Axis w) {
    return axis_width_halves(s, w) / 2.0;
}

// --- Embedded-region helpers -------------------------------------------------

inline bool point_on_segment(Vec2 z, Vec2 a, Vec2 b, double eps) {
    double abx = b.x - a.x, aby = b.y - a.y;
    double l2 = abx * abx + aby * aby;
    double t = ((z.x - a.x) * abx + (z.y - a.y) * aby) / l2;
    t = std::clamp(t, 0.0, 1.0);
    Vec2 proj{a.x + t * abx, a.y + t * aby};
    return euclid_dist2(z, proj) <= eps * eps;
}

inline bool point_in_triangle(Vec2 z, Vec2 a, Vec2 b, Vec2 c, double eps) {
    auto cross = [](Vec2 o, Vec2 p, Vec2 q) {
        return (p.x - o.x) * (q.y - o.y) - (p.y - o.y) * (q.x - o.x);
    };
    double d1 = cross(a, b, z), d2 = cross(b, c, z), d3 = cross(c, a, z);
    double area = std::abs(cross(a, b, c));
    double tol = eps * std::sqrt(area) * 2 + eps;
    bool has_neg = d1 < -tol || d2 < -tol || d3 < -tol;
    bool has_pos = d1 > tol || d2 > tol || d3 > tol;
    return !(has_neg && has_pos);
}

inline bool region_contains_point(const Shape& s, Vec2 z, double eps = 1e-9) {
    for (const Face& f : s.faces) {
        auto c = f.corners();
        if (point_in_triangle(z, embed(c[0]), embed(c[1]), embed(c[2]), eps)) return true;
    }
    for (const Edge& e : s.edges)
        if (point_on_segment(z, embed(e.a), embed(e.b()), eps)) return true;
    for (GridPoint p : s.nodes)
        if (euclid_dist2(embed(p), z) <= eps * eps) return true;
    return false;
}

// Numeric width oracle: minimal chord component length over horizontal
// offsets of the rotated embedding. Component lengths are piecewise linear
// in the offset within each band, so the infimum is attained either on a
// grid line or as a one-sided limit at one; both are evaluated exactly, and
// interior offsets are sampled on top of that (skipping any sampled offset
// within `exclusion` of a grid line).
inline double axis_width_sampled(const Shape& shape, Axis w, int offsets = 10000,
                                 double exclusion = 1e-6) {
    Shape s = shape;
    if (w == Axis::Y) s = rotate_shape(shape, -1);
    if (w == Axis::Z) s = rotate_shape(shape, -2);

    const double row = std::sqrt(3.0) / 2.0;
    int ymin = 0, ymax = 0;
    bool first = true;
    for (GridPoint p : s.nodes) {
        if (first || p.y < ymin) ymin = p.y;
        if (first || p.y > ymax) ymax = p.y;
        first = false;
    }

    double best = -1.0;
    // mode 0: exact grid line at level `level`; all elements contribute.
    // mode -1/+1: one-sided limit at `level`, restricted to elements of the
    // band just below / above (their intersection with the line equals the
    // limiting chord of that band).
    auto eval_line = [&](double c, int mode, int level) {
        std::vector<std::pair<double, double>> iv;
        auto band_of_face = [](const Face& f) {
            return f.o == Orientation::Up ? f.p.y : f.p.y - 1;
        };
        for (const Face& f : s.faces) {
            if (mode == -1 && band_of_face(f) != level - 1) continue;
            if (mode == +1 && band_of_face(f) != level) continue;
            auto cs = f.corners();
            double lo = 1e300, hi = -1e300;
            bool any = false;
            Vec2 vs[3] = {embed(cs[0]), embed(cs[1]), embed(cs[2])};
            for (int i = 0; i < 3; ++i) {
                Vec2 p = vs[i], q = vs[(i + 1) % 3];
                if (std::abs(p.y - c) < 1e-12 && std::abs(q.y - c) < 1e-12) {
                    lo = std::min({lo, p.x, q.x});
                    hi = std::max({hi, p.x, q.x});
                    any = true;
                } else if ((p.y - c) * (q.y - c) <= 0 && p.y != q.y) {
                    double t = (c - p.y) / (q.y - p.y);
                    if (t >= 0 && t <= 1) {
                        double x = p.x + t * (q.x - p.x);
                        lo = std::min(lo, x);
                        hi = std::max(hi, x);
                        any = true;
                    }
                }
            }
            if (any) iv.push_back({lo, hi});
        }
        for (const Edge& e : s.edges) {
            bool crossing = e.d != Direction::E;
            if (mode == -1 && !(crossing && e.a.y == level - 1)) continue;
            if (mode == +1 && !(crossing && e.a.y == level)) continue;
            Vec2 p = embed(e.a), q = embed(e.b());
            if (std::abs(p.y - c) < 1e-12 && std::abs(q.y - c) < 1e-12) {
                iv.push_back({std::min(p.x, q.x), std::max(p.x, q.x)});
            } else if ((p.y - c) * (q.y - c) <= 0 && p.y != q.y) {
                double t = (c - p.y) / (q.y - p.y);
                if (t >= 0 && t <= 1) {
                    double x = p.x + t * (q.x - p.x);
                    iv.push_back({x, x});
                }
            }
        }
        if (mode == 0)
            for (GridPoint p : s.nodes) {
                Vec2 z = embed(p);
                if (std::abs(z.y - c) < 1e-12) iv.push_back({z.x, z.x});
            }
        if (iv.empty()) return;
        std::sort(iv.begin(), iv.end());
        double lo = iv[0].first, hi = iv[0].second;
        auto flush = [&]() {
            double len = hi - lo;
            if (best < 0 || len < best) best = len;
        };
        for (size_t i = 1; i < iv.size(); ++i) {
            if (iv[i].first <= hi + 1e-9) {
                hi = std::max(hi, iv[i].second);
            } else {
                flush();
                lo = iv[i].first;
                hi = iv[i].second;
            }
        }
        flush();
    };

    for (int j = ymin; j <= ymax; ++j) {
        eval_line(j * row, 0, j);
        eval_line(j * row, -1, j);
        eval_line(j * row, +1, j);
    }
    double lo = ymin * row, hi = ymax * row;
    if (hi > lo)
        for (int i = 0; i < offsets; ++i) {
            double c = lo + (hi - lo) * (i + 0.5) / offsets;
            double frac = std::abs(c / row - std::round(c / row)) * row;
            if (frac < exclusion) continue;
            eval_line(c, 2, 0);
        }
    return best;
}

}  // namespace shapecon
