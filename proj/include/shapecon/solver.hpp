#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <queue>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "shapecon/placement.hpp"
#include "shapecon/snowflake.hpp"
#include "shapecon/star_convex.hpp"

// End-to-end shape containment: snowflake placement search over the tree,
// linear and binary scale search, the solver entry point, and placement
// construction. The host sequences phases and picks probe scales; all
// placement flags and value comparisons are computed in-world.

namespace shapecon {

struct SolveResult {
    uint64_t k_max = 0;
    std::array<std::set<GridPoint>, 6> placements;  // per rotation at k_max
    long rounds_used = 0;
    std::vector<std::pair<uint64_t, bool>> search_trace;  // (scale, found any)
};

namespace detail {

// Global OR over a flag slot: everyone merges onto one circuit, flagged
// agents beep, everyone latches the answer into scratch. 2 rounds.
inline bool any_flag(World& w, int slot) {
    long r0 = w.round();
    RoundHandler h = [slot, r0](AgentCtx& ctx) {
        auto& ps = ctx.state<PlacementState>();
        if (ctx.round == r0) {
            for (int pin = 0; pin < kPinCount; ++pin) ctx.join(pin, 0);
            if (ps.flag[slot]) ctx.send(0);
        } else {
            ps.flag[kScratchB] = ctx.heard(0);
            reset_singleton(ctx);
        }
    };
    w.step(h);
    w.step(h);
    return w.size() > 0 && w.agent_state<PlacementState>(0).flag[kScratchB];
}

// Flag-slot demand of a subtree (Sethi-Ullman over the union nodes).
inline int slot_need(const SnowflakeTree& t, int idx) {
    const SnowflakeNode& n = t.at(idx);
    switch (n.kind) {
        case NodeKind::Line:
        case NodeKind::Tri: return 1;
        case NodeKind::Sum:
        case NodeKind::Shift: return slot_need(t, n.children[0]);
        case NodeKind::Union: {
            std::vector<int> needs;
            for (int c : n.children) needs.push_back(slot_need(t, c));
            std::sort(needs.rbegin(), needs.rend());
            int need = 0;
            for (size_t i = 0; i < needs.size(); ++i)
                need = std::max(need, needs[i] + static_cast<int>(i));
            return need;
        }
    }
    return 1;
}

struct SnowflakeEval {
    World& w;
    const SnowflakeTree& t;
    uint64_t k;
    std::vector<int> free_slots;  // 0..kScratchB-1, scratch excluded
    bool rejected = false;

    int alloc() {
        if (free_slots.empty()) throw RangeError("snowflake tree needs too many flag slots");
        int s = free_slots.back();
        free_slots.pop_back();
        return s;
    }

    // Fresh counters holding the probe scale on the axis of d; dead counters
    // mean the needed value cannot even be represented, hence no placements.
    bool counters(Direction d, uint64_t scale_by) {
        init_counters(w, d, k);
        if (counters_alive(w, d) && scale_by > 1) {
            counter_scale_const(w, d, scale_by);
            counters_prune(w, d);
        }
        if (!counters_alive(w, d)) {
            rejected = true;
            return false;
        }
        return true;
    }

    int eval(int idx) {
        const SnowflakeNode& n = t.at(idx);
        switch (n.kind) {
            case NodeKind::Line: {
                int slot = alloc();
                if (rejected) return slot;
                if (n.len == 0) {
                    fill_flags(w, slot, true);  // single node: every amoebot
                } else if (counters(n.d, static_cast<uint64_t>(n.len))) {
                    if (line_placements(w, n.d, n.d, slot).rejected) rejected = true;
                }
                return slot;
            }
            case NodeKind::Tri: {
                int slot = alloc();
                if (rejected) return slot;
                if (counters(n.d, static_cast<uint64_t>(n.len)))
                    if (triangle_placements(w, n.d, n.d, slot).rejected) rejected = true;
                return slot;
            }
            case NodeKind::Sum: {
                int slot = eval(n.children[0]);
                if (!rejected && counters(n.d, 1))
                    if (stretched_placements(w, slot, slot, n.d, static_cast<int>(n.len), n.d)
                            .rejected)
                        rejected = true;
                return slot;
            }
            case NodeKind::Shift: {
                int slot = eval(n.children[0]);
                if (!rejected && counters(n.d, 1))
                    if (shifted_shape_placements(w, slot, slot, n.d, static_cast<int>(n.len),
                                                 n.d)
                            .rejected)
                        rejected = true;
                return slot;
            }
            case NodeKind::Union: {
                std::vector<std::pair<int, int>> order;  // (need, child), greedy deep-first
                for (int c : n.children) order.push_back({slot_need(t, c), c});
                std::sort(order.rbegin(), order.rend());
                int acc = -1;
                for (auto [need, c] : order) {
                    int s = eval(c);
                    if (acc < 0) {
                        acc = s;
                    } else {
                        if (!rejected) flags_and(w, acc, s);
                        free_slots.push_back(s);
                    }
                }
                return acc;
            }
        }
        return alloc();
    }
};

}  // namespace detail

// flag[dst] <- V(k * S, A) for the rotated tree's shape S. Returns false when
// the scale is rejected outright (some needed counter value fits on no
// segment of its axis, so no placements exist); flags are cleared then.
inline bool snowflake_placements(World& w, const SnowflakeTree& t, uint64_t k, int dst) {
    detail::SnowflakeEval ev{w, t, k, {}};
    for (int s = kScratchB - 1; s >= 0; --s) ev.free_slots.push_back(s);
    int slot = ev.eval(t.root);
    if (ev.rejected) {
        fill_flags(w, dst, false);
        return false;
    }
    if (slot != dst) {
        local_flags(w, [slot, dst](PlacementState& ps) { ps.flag[dst] = ps.flag[slot]; });
    }
    return true;
}

// All six rotations by rotating the tree's direction labels.
inline std::array<std::set<GridPoint>, 6> snowflake_placements_all(World& w,
                                                                   const SnowflakeTree& t,
                                                                   uint64_t k) {
    std::array<std::set<GridPoint>, 6> out;
    for (int r = 0; r < 6; ++r) {
        SnowflakeTree rt = rotate_tree(t, r);
        if (snowflake_placements(w, rt, k, 0)) out[r] = flag_points(w, 0);
    }
    return out;
}

namespace detail {

// One scale probe: true iff any rotation has a placement (in-world vote).
inline bool probe_scale(World& w, const SnowflakeTree& t, uint64_t k) {
    for (int r = 0; r < 6; ++r) {
        SnowflakeTree rt = rotate_tree(t, r);
        if (snowflake_placements(w, rt, k, 0) && any_flag(w, 0)) return true;
    }
    return false;
}

}  // namespace detail

// Checks K, K-1, ... until a scale with a nonempty rotation, or 0.
inline SolveResult linear_scale_search(World& w, const SnowflakeTree& t, uint64_t big_k) {
    SolveResult res;
    long r0 = w.round();
    for (uint64_t k = big_k; k >= 1; --k) {
        bool found = detail::probe_scale(w, t, k);
        res.search_trace.push_back({k, found});
        if (found) {
            res.k_max = k;
            res.placements = snowflake_placements_all(w, t, k);
            break;
        }
    }
    res.rounds_used = w.round() - r0;
    return res;
}

// Doubling to the first failing scale (<= 2*k_max by self-containment), then
// bisection. Requires eval_tree(t) star convex.
inline SolveResult binary_scale_search(World& w, const SnowflakeTree& t) {
    SolveResult res;
    long r0 = w.round();
    auto probe = [&](uint64_t k) {
        bool found = detail::probe_scale(w, t, k);
        res.search_trace.push_back({k, found});
        return found;
    };
    if (!probe(1)) {
        res.rounds_used = w.round() - r0;
        return res;
    }
    uint64_t lo = 1, hi = 2;
    while (probe(hi)) {
        lo = hi;
        hi *= 2;
    }
    while (hi > lo + 1) {
        uint64_t mid = lo + (hi - lo) / 2;
        if (probe(mid))
            lo = mid;
        else
            hi = mid;
    }
    res.k_max = lo;
    res.placements = snowflake_placements_all(w, t, lo);
    res.rounds_used = w.round() - r0;
    return res;
}

// Full algorithm: star convex shapes by binary search; other snowflakes by a
// triangle binary search for an upper bound K (every non-star-convex
// snowflake contains a face), then linear search downward from K.
inline SolveResult solve(World& w, const SnowflakeTree& t) {
    validate_tree(t);
    Shape s = eval_tree(t);
    if (s.trivial()) throw TrivialShape("shape containment needs >= 2 nodes");
    long r0 = w.round();
    SolveResult res;
    if (is_star_convex(s).star_convex) {
        res = binary_scale_search(w, t);
    } else {
        SnowflakeTree tri = parse_snowflake("(tri E 1)");
        SolveResult bound = binary_scale_search(w, tri);
        res = linear_scale_search(w, t, bound.k_max);
        res.search_trace.insert(res.search_trace.begin(), bound.search_trace.begin(),
                                bound.search_trace.end());
    }
    res.rounds_used = w.round() - r0;
    return res;
}

// --- Report serialization -----------------------------------------------------------

inline std::string serialize_solve_result(const SolveResult& res) {
    std::ostringstream os;
    os << "solve-report v1\n";
    os << "k_max " << res.k_max << "\n";
    os << "rounds " << res.rounds_used << "\n";
    os << "trace";
    for (auto [k, found] : res.search_trace) os << " " << k << ":" << (found ? "yes" : "no");
    os << "\n";
    for (int r = 0; r < 6; ++r) {
        os << "r" << r;
        for (GridPoint p : res.placements[r]) os << " " << p.x << " " << p.y;
        os << "\n";
    }
    return os.str();
}

inline SolveResult parse_solve_result(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != "solve-report v1")
        throw SyntaxError(0, "solve-report v1 header");
    SolveResult res;
    std::string word;
    auto expect_line = [&](const std::string& key) {
        if (!std::getline(is, line) || line.rfind(key + " ", 0) != 0)
            throw SyntaxError(0, key.c_str());
        return line.substr(key.size() + 1);
    };
    res.k_max = std::stoull(expect_line("k_max"));
    res.rounds_used = std::stol(expect_line("rounds"));
    if (!std::getline(is, line) || line.rfind("trace", 0) != 0) throw SyntaxError(0, "trace");
    {
        std::istringstream ts(line.substr(5));
        while (ts >> word) {
            size_t colon = word.find(':');
            if (colon == std::string::npos) throw SyntaxError(0, "scale:verdict");
            res.search_trace.push_back(
                {std::stoull(word.substr(0, colon)), word.substr(colon + 1) == "yes"});
        }
    }
    for (int r = 0; r < 6; ++r) {
        if (!std::getline(is, line) || line.rfind("r" + std::to_string(r), 0) != 0)
            throw SyntaxError(0, "rotation line");
        std::istringstream ps(line.substr(2));
        long x, y;
        while (ps >> x >> y) res.placements[r].insert({static_cast<int>(x), static_cast<int>(y)});
    }
    return res;
}

// --- Placement construction -----------------------------------------------------------

struct ConstructState {
    PlacementState place;  // must stay first: chain/flag handlers alias this prefix
    uint8_t kind = 0;      // 0 none, 1 node, 2 edge interior, 3 face interior
    uint8_t id = 0;
    uint8_t cursor = 0;
};
static_assert(std::is_trivially_copyable_v<ConstructState>);
static_assert(sizeof(ConstructState) <= kMaxAgentMemory);
static_assert(offsetof(ConstructState, place) == 0);

struct ElementTables {
    std::vector<GridPoint> nodes;
    std::vector<Edge> edges;
    std::vector<Face> faces;
};

struct ElementLabel {
    int kind = 0;  // 0 none, 1 node, 2 edge, 3 face
    int id = 0;

    friend bool operator==(const ElementLabel&, const ElementLabel&) = default;
};

struct ConstructResult {
    ElementTables elements;
    std::vector<ElementLabel> labels;  // per agent
    long rounds = 0;
};

namespace detail {

inline Direction direction_of_unit(GridPoint v) {
    for (Direction d : all_directions)
        if (unit_vector(d) == v) return d;
    throw RangeError("not a unit grid vector");
}

// One PASC edge walk: the cursor (node label src_id) roots a cut chain toward
// d and the agent at index k takes the far node label, indices 1..k-1 the
// edge label.
inline void construct_walk(World& w, Direction d, uint8_t src_id, uint8_t dst_id,
                           uint8_t edge_id, uint64_t k) {
    Direction dchain = opposite(d);
    w.step([dchain, src_id](AgentCtx& ctx) {
        auto cp = chain_pins(ctx, dchain);
        auto& cs = ctx.state<ConstructState>();
        cs.cursor = cs.kind == 1 && cs.id == src_id;
        cs.place.chain.cut_pred = cs.cursor;
        cs.place.chain.cut_succ = 0;
        cs.place.participate = 0;
        reset_singleton(ctx);
        if (cs.cursor && cp.has_pred) ctx.send(cp.p1);
    });
    w.step([dchain](AgentCtx& ctx) {
        auto cp = chain_pins(ctx, dchain);
        auto& cs = ctx.state<ConstructState>();
        cs.place.chain.cut_succ = cp.has_succ && ctx.heard(cp.s1);
        bool hp = cp.has_pred && !cs.place.chain.cut_pred;
        bool hs = cp.has_succ && !cs.place.chain.cut_succ;
        reset_singleton(ctx);
        if (hp && hs) ctx.join(cp.s0, cp.p0);
        if (!hp && cs.place.chain.cut_pred) ctx.send((*ctx.pins)[cp.s0]);
    });
    w.step([dchain](AgentCtx& ctx) {
        auto cp = chain_pins(ctx, dchain);
        auto& cs = ctx.state<ConstructState>();
        bool hp = cp.has_pred && !cs.place.chain.cut_pred;
        cs.place.participate = ctx.heard(hp ? (*ctx.pins)[cp.p0] : (*ctx.pins)[cp.s0]);
        reset_singleton(ctx);
    });
    // Counter orientation must match the seeding direction of its axis.
    pasc_compare(w, dchain, axis_direction(axis_of(d)), kDefaultRoundCap, /*honor_cuts=*/true);
    (void)k;
    local_flags(w, [dst_id, edge_id](PlacementState& base) {
        auto& cs = reinterpret_cast<ConstructState&>(base);
        if (cs.place.participate && cs.kind == 0) {
            if (cs.place.chain.rel == 0) {
                cs.kind = 1;
                cs.id = dst_id;
            } else if (cs.place.chain.rel < 0 && !cs.cursor) {
                cs.kind = 2;
                cs.id = edge_id;
            }
        }
        cs.place.chain.cut_pred = cs.place.chain.cut_succ = 0;
        cs.place.participate = 0;
        cs.cursor = 0;
    });
}

}  // namespace detail

// Labels every amoebot of V(k * S^(r) + p) with the shape element it
// represents: nodes via PASC walks along a directed edge order from the
// anchor, edge interiors along the walked chains, face interiors by flooding
// the circuit enclosed by each face's labeled boundary.
inline ConstructResult construct_placement(World& w, const SnowflakeTree& t, uint64_t k,
                                           GridPoint p, int r) {
    if (k < 1) throw RangeError("construction needs scale >= 1");
    Shape s = eval_tree(rotate_tree(t, r));
    long r0 = w.round();

    ConstructResult out;
    out.elements.nodes.assign(s.nodes.begin(), s.nodes.end());
    out.elements.edges.assign(s.edges.begin(), s.edges.end());
    out.elements.faces.assign(s.faces.begin(), s.faces.end());
    if (out.elements.nodes.size() > 250 || out.elements.edges.size() > 250 ||
        out.elements.faces.size() > 250)
        throw RangeError("shape too large for one-byte element labels");
    std::map<GridPoint, uint8_t> node_id;
    for (size_t i = 0; i < out.elements.nodes.size(); ++i)
        node_id[out.elements.nodes[i]] = static_cast<uint8_t>(i);
    std::map<Edge, uint8_t> edge_id;
    for (size_t i = 0; i < out.elements.edges.size(); ++i)
        edge_id[out.elements.edges[i]] = static_cast<uint8_t>(i);

    // Counters hold k on every axis the walks will compare against.
    for (Axis ax : {Axis::X, Axis::Y, Axis::Z}) init_counters(w, axis_direction(ax), k);

    // Anchor: the solver elects a placement host-side; inject its node label.
    if (!s.nodes.count({0, 0})) throw PremiseViolated("snowflake shape misses its anchor");
    int anchor = w.structure().find(p);
    if (anchor < 0) throw InvalidPlacement("no amoebot at the anchor");
    uint8_t origin_id = node_id[{0, 0}];
    {
        int cursor = 0;
        w.step([&](AgentCtx& ctx) {
            auto& cs = ctx.state<ConstructState>();
            cs.kind = 0;
            cs.id = 0;
            cs.cursor = 0;
            if (cursor == anchor) {
                cs.kind = 1;
                cs.id = origin_id;
            }
            ++cursor;
            detail::reset_singleton(ctx);
        });
    }

    // Directed edge order: BFS tree edges first (labeling each new node),
    // then the remaining edges (interiors only).
    std::map<GridPoint, std::vector<Edge>> incident;
    for (const Edge& e : out.elements.edges) {
        incident[e.a].push_back(e);
        incident[e.b()].push_back(e);
    }
    std::vector<std::pair<Edge, bool>> order;  // (edge, walk from a-side)
    std::set<GridPoint> visited = {{0, 0}};
    std::set<Edge> queued;
    std::queue<GridPoint> bfs;
    bfs.push({0, 0});
    while (!bfs.empty()) {
        GridPoint v = bfs.front();
        bfs.pop();
        for (const Edge& e : incident[v]) {
            if (queued.count(e)) continue;
            GridPoint other = e.a == v ? e.b() : e.a;
            if (visited.count(other)) continue;
            queued.insert(e);
            order.push_back({e, e.a == v});
            visited.insert(other);
            bfs.push(other);
        }
    }
    if (visited.size() != s.nodes.size()) throw PremiseViolated("shape graph not connected");
    for (const Edge& e : out.elements.edges)
        if (!queued.count(e)) order.push_back({e, true});

    for (auto& [e, from_a] : order) {
        GridPoint src = from_a ? e.a : e.b();
        GridPoint dst = from_a ? e.b() : e.a;
        Direction d = from_a ? e.d : opposite(e.d);
        // A missing amoebot along the walk means the placement was invalid.
        for (uint64_t i = 1; i <= k; ++i) {
            GridPoint q = p + static_cast<int>(k) * src + static_cast<int>(i) * unit_vector(d);
            if (w.structure().find(q) < 0)
                throw InvalidPlacement("walk left the structure: no amoebot at (" +
                                       std::to_string(q.x) + " " + std::to_string(q.y) + ")");
        }
        detail::construct_walk(w, d, node_id[src], node_id[dst], edge_id[e], k);
    }

    // Face floods: everyone off the face's boundary joins one circuit; the
    // boundary separates inside from outside, and the base-edge interiors
    // beep one step inward. Interiors exist only for k >= 3.
    if (k >= 3) {
        for (size_t fi = 0; fi < out.elements.faces.size(); ++fi) {
            const Face& f = out.elements.faces[fi];
            auto fe = f.edges();
            auto fc = f.corners();
            std::array<uint8_t, 3> corner_ids, eids;
            for (int i = 0; i < 3; ++i) {
                corner_ids[i] = node_id[fc[i]];
                eids[i] = edge_id[fe[i]];
            }
            const Edge& base = fe[0];
            GridPoint third{};
            for (GridPoint c : fc)
                if (c != base.a && c != base.b()) third = c;
            Direction inward = detail::direction_of_unit(third - base.a);
            uint8_t base_eid = edge_id[base];
            uint8_t face_id = static_cast<uint8_t>(fi);

            w.step([corner_ids, eids, base_eid, inward](AgentCtx& ctx) {
                auto& cs = ctx.state<ConstructState>();
                bool barrier =
                    (cs.kind == 1 && (cs.id == corner_ids[0] || cs.id == corner_ids[1] ||
                                      cs.id == corner_ids[2])) ||
                    (cs.kind == 2 &&
                     (cs.id == eids[0] || cs.id == eids[1] || cs.id == eids[2]));
                detail::reset_singleton(ctx);
                if (!barrier) {
                    for (int pin = 0; pin < kPinCount; ++pin) ctx.join(pin, 0);
                } else if (cs.kind == 2 && cs.id == base_eid) {
                    ctx.send((*ctx.pins)[pin_id(inward, 0)]);
                }
            });
            w.step([face_id](AgentCtx& ctx) {
                auto& cs = ctx.state<ConstructState>();
                if (cs.kind == 0 && ctx.heard(0)) {
                    cs.kind = 3;
                    cs.id = face_id;
                }
                detail::reset_singleton(ctx);
            });
        }
    }

    out.labels.resize(w.size());
    for (int i = 0; i < w.size(); ++i) {
        const auto& cs = w.agent_state<ConstructState>(i);
        out.labels[i] = {cs.kind, cs.id};
    }
    out.rounds = w.round() - r0;
    return out;
}

}  // namespace shapecon
