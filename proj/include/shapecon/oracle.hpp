#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "shapecon/errors.hpp"
#include "shapecon/shape.hpp"
#include "shapecon/snowflake.hpp"

// Brute-force ground truth, computed directly from node sets and sharing no
// code with the distributed algorithms, plus instance generators.

namespace shapecon {

// All p in A such that the node set of k*rot(S, r) translated by p lies in A.
inline std::set<GridPoint> oracle_placements(const std::set<GridPoint>& a, const Shape& s, int k,
                                             int r) {
    if (k < 1) throw RangeError("oracle_placements requires k >= 1");
    Shape scaled = scale_shape(rotate_shape(s, r), k);
    std::set<GridPoint> out;
    for (GridPoint p : a) {
        bool ok = true;
        for (GridPoint v : scaled.nodes)
            if (!a.count(v + p)) {
                ok = false;
                break;
            }
        if (ok) out.insert(p);
    }
    return out;
}

// Largest k admitting a placement under any rotation. Node count of k*S grows
// strictly in k for non-trivial S, bounding the search.
inline int oracle_kmax(const std::set<GridPoint>& a, const Shape& s) {
    if (s.nodes.size() <= 1) throw TrivialShape("kmax undefined for a single-node shape");
    int best = 0;
    for (int k = 1; scale_shape(s, k).nodes.size() <= a.size(); ++k) {
        bool any = false;
        for (int r = 0; r < 6 && !any; ++r) any = !oracle_placements(a, s, k, r).empty();
        if (any) best = k;
    }
    return best;
}

// Does some rotation of k*S fit into k'*S under a grid translation?
inline bool oracle_self_contained(const Shape& s, int k, int kp) {
    if (k >= kp) throw RangeError("oracle_self_contained requires k < k'");
    Shape big = scale_shape(s, kp);
    int xmin = big.nodes.begin()->x, xmax = xmin, ymin = big.nodes.begin()->y, ymax = ymin;
    for (GridPoint p : big.nodes) {
        xmin = std::min(xmin, p.x); xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y); ymax = std::max(ymax, p.y);
    }
    for (int r = 0; r < 6; ++r) {
        Shape small = scale_shape(rotate_shape(s, r), k);
        int sxmin = small.nodes.begin()->x, sxmax = sxmin;
        int symin = small.nodes.begin()->y, symax = symin;
        for (GridPoint p : small.nodes) {
            sxmin = std::min(sxmin, p.x); sxmax = std::max(sxmax, p.x);
            symin = std::min(symin, p.y); symax = std::max(symax, p.y);
        }
        for (int tx = xmin - sxmin; tx <= xmax - sxmax; ++tx)
            for (int ty = ymin - symin; ty <= ymax - symax; ++ty)
                if (translate_shape(small, {tx, ty}).subset_of(big)) return true;
    }
    return false;
}

// The lower-bound probe shape: a long east arm with a short bent tail.
inline Shape two_arm_shape() {
    Shape s = make_line(Direction::E, 2);
    s.add_edge({0, -1}, Direction::NE);
    s.add_edge({-1, -1}, Direction::E);
    return s;
}

struct LowerBoundInstance {
    std::set<GridPoint> nodes;
    std::vector<GridPoint> p;  // candidate placements p_i = (0, i)
    std::vector<GridPoint> q;  // switch positions q_i = (-k, -k+i)
    std::set<GridPoint> expected;  // valid placements of the k-scaled two-arm shape
};

// Adversarial family forcing distance-k information transfer: a (2k+1) x k
// block, a k x k block attached by a single edge, and a mask-selected column
// of switches q_i whose occupancy decides placement p_i.
inline LowerBoundInstance gen_lower_bound(int k, const std::vector<bool>& occupied_q) {
    if (k < 2) throw RangeError("gen_lower_bound requires k >= 2");
    if (occupied_q.size() != static_cast<size_t>(k))
        throw RangeError("occupancy mask must have length k");
    if (std::none_of(occupied_q.begin(), occupied_q.end(), [](bool b) { return b; }))
        throw RangeError("at least one q_i must be occupied");

    LowerBoundInstance inst;
    for (int x = 0; x <= 2 * k; ++x)
        for (int y = 0; y <= k - 1; ++y) inst.nodes.insert({x, y});
    for (int x = -k + 1; x <= 0; ++x)
        for (int y = -k; y <= -1; ++y) inst.nodes.insert({x, y});
    for (int i = 0; i < k; ++i) {
        inst.p.push_back({0, i});
        inst.q.push_back({-k, -k + i});
        if (occupied_q[i]) {
            inst.nodes.insert(inst.q.back());
            inst.expected.insert(inst.p[i]);
        }
    }
    return inst;
}

// Connected structure of exactly n nodes grown by uniform frontier accretion.
inline std::set<GridPoint> gen_random_structure(int n, uint64_t seed) {
    if (n < 1) throw RangeError("structure needs at least one amoebot");
    std::mt19937_64 rng(seed);
    std::set<GridPoint> nodes = {{0, 0}};
    std::vector<GridPoint> frontier;
    std::set<GridPoint> in_frontier;
    auto expand = [&](GridPoint p) {
        for (Direction d : all_directions) {
            GridPoint q = p + unit_vector(d);
            if (!nodes.count(q) && !in_frontier.count(q)) {
                frontier.push_back(q);
                in_frontier.insert(q);
            }
        }
    };
    expand({0, 0});
    while (static_cast<int>(nodes.size()) < n) {
        size_t i = std::uniform_int_distribution<size_t>(0, frontier.size() - 1)(rng);
        GridPoint p = frontier[i];
        frontier[i] = frontier.back();
        frontier.pop_back();
        in_frontier.erase(p);
        nodes.insert(p);
        expand(p);
    }
    return nodes;
}

namespace detail {

inline int gen_tree_node(SnowflakeTree& t, int budget, std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> dir6(0, 5);
    std::uniform_int_distribution<int> small_len(1, 4);
    int kind = budget <= 1 || depth >= 6 ? std::uniform_int_distribution<int>(0, 1)(rng)
                                         : std::uniform_int_distribution<int>(0, 4)(rng);
    SnowflakeNode n;
    switch (kind) {
        case 0:
            n = {NodeKind::Line, all_directions[dir6(rng)],
                 std::uniform_int_distribution<int>(0, 4)(rng), {}};
            break;
        case 1:
            n = {NodeKind::Tri, all_directions[dir6(rng)], small_len(rng), {}};
            break;
        case 2: {
            n.kind = NodeKind::Union;
            int arity = std::uniform_int_distribution<int>(2, std::max(2, std::min(3, budget - 1)))(rng);
            for (int i = 0; i < arity; ++i)
                n.children.push_back(gen_tree_node(t, (budget - 1) / arity, rng, depth + 1));
            break;
        }
        case 3:
            n = {NodeKind::Sum, all_directions[dir6(rng)], small_len(rng), {}};
            n.children.push_back(gen_tree_node(t, budget - 1, rng, depth + 1));
            break;
        default: {
            n = {NodeKind::Shift, all_directions[dir6(rng)], small_len(rng), {}};
            // Regenerate the child until it has width on the shift axis; fall
            // back to a line along the shift direction.
            int child = -1;
            for (int tries = 0; tries < 16 && child < 0; ++tries) {
                SnowflakeTree scratch = t;
                int c = gen_tree_node(scratch, budget - 1, rng, depth + 1);
                if (axis_width_halves(eval_node(scratch, c), axis_of(n.d)) > 0) {
                    t = scratch;
                    child = c;
                }
            }
            if (child < 0) {
                t.nodes.push_back({NodeKind::Line, n.d, small_len(rng), {}});
                child = t.size() - 1;
            }
            n.children.push_back(child);
            break;
        }
    }
    t.nodes.push_back(n);
    return t.size() - 1;
}

}  // namespace detail

inline SnowflakeTree gen_random_snowflake(int max_nodes, uint64_t seed) {
    if (max_nodes < 1) throw RangeError("tree needs at least one node");
    std::mt19937_64 rng(seed);
    SnowflakeTree t;
    t.root = detail::gen_tree_node(t, max_nodes, rng, 0);
    validate_tree(t);
    return t;
}

// Snap a real translation with S + t contained in region(S') to a nearest
// grid node preserving containment.
inline GridPoint snap_translation(const Shape& s, const Shape& sp, Vec2 t) {
    auto premise_holds = [&] {
        for (GridPoint p : s.nodes) {
            Vec2 e = embed(p);
            if (!region_contains_point(sp, {e.x + t.x, e.y + t.y}, 1e-7)) return false;
        }
        return true;
    };
    if (!premise_holds()) throw PremiseViolated("S + t does not lie in S'");

    std::vector<GridPoint> cands;
    for (GridPoint c : nearest_grid_points(t)) cands.push_back(c);
    GridPoint base = cands.front();
    for (int dx = -2; dx <= 2; ++dx)
        for (int dy = -2; dy <= 2; ++dy) cands.push_back(base + GridPoint{dx, dy});
    std::sort(cands.begin(), cands.end(), [&](GridPoint a, GridPoint b) {
        double da = euclid_dist2(embed(a), t), db = euclid_dist2(embed(b), t);
        if (da != db) return da < db;
        return a < b;
    });
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
    for (GridPoint c : cands)
        if (translate_shape(s, c).subset_of(sp)) return c;
    throw PremiseViolated("no grid snap preserves containment");
}

}  // namespace shapecon
