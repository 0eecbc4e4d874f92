#pragma once

#include <bit>
#include <cstddef>
#include <set>

#include "shapecon/chain_ops.hpp"
#include "shapecon/shape.hpp"

// Placement primitives: boundary distances, line placements, longest-segment
// tournaments, stretched (Minkowski) placements, k-segmented shifting, shifted
// shapes, and the triangle decomposition. Flags live in per-agent slots; the
// host sequences phases and seeds program constants, all value computation
// happens in-world on the counters.

namespace shapecon {

inline constexpr int kFlagSlots = 8;
// Slots 6 and 7 are scratch for the composite primitives below.
inline constexpr int kScratchB = 6;
inline constexpr int kScratchT = 7;

struct PlacementState {
    ChainOpsState chain;  // must stay first: chain-op handlers alias this prefix
    uint8_t flag[kFlagSlots] = {};
    uint8_t line_ok = 0, participate = 0;
    // solve_unit_line scratch
    uint8_t seg_alive = 0, seg_finished = 0, latch_marker = 0, tmark = 0;
    // shift_segmented scratch
    uint8_t is_start = 0, is_end = 0, first_start = 0, last_end = 0;
    uint8_t new_start = 0, new_end = 0;
};
static_assert(std::is_trivially_copyable_v<PlacementState>);
static_assert(sizeof(PlacementState) <= kMaxAgentMemory);
static_assert(offsetof(PlacementState, chain) == 0);

struct PrimResult {
    long rounds = 0;
    bool rejected = false;  // all counters overflowed: no placements at this scale
};

namespace detail {

// Keep-alive beeps go out on a pin off the working axis; nothing reads there.
inline int noise_pin(Direction d) { return pin_id(ccw(d), 0); }

}  // namespace detail

// --- Flag plumbing (zero-round semantics, one world step each) ---------------------

inline void local_flags(World& w, const std::function<void(PlacementState&)>& fn) {
    w.step([&](AgentCtx& ctx) {
        fn(ctx.state<PlacementState>());
        detail::reset_singleton(ctx);
    });
}

inline void fill_flags(World& w, int slot, bool v) {
    local_flags(w, [=](PlacementState& ps) { ps.flag[slot] = v; });
}

inline void flags_and(World& w, int dst, int src) {
    local_flags(w, [=](PlacementState& ps) { ps.flag[dst] &= ps.flag[src]; });
}

inline void flags_not(World& w, int dst, int src) {
    local_flags(w, [=](PlacementState& ps) { ps.flag[dst] = !ps.flag[src]; });
}

inline void set_flags(World& w, int slot, const std::vector<uint8_t>& vals) {
    int cursor = 0;
    w.step([&](AgentCtx& ctx) {
        ctx.state<PlacementState>().flag[slot] = vals[cursor++] ? 1 : 0;
        detail::reset_singleton(ctx);
    });
}

inline void set_flag_points(World& w, int slot, const std::set<GridPoint>& pts) {
    std::vector<uint8_t> vals(w.size(), 0);
    for (int i = 0; i < w.size(); ++i)
        vals[i] = pts.count(w.structure().points[i]) ? 1 : 0;
    set_flags(w, slot, vals);
}

inline std::vector<uint8_t> get_flags(const World& w, int slot) {
    std::vector<uint8_t> out(w.size());
    for (int i = 0; i < w.size(); ++i)
        out[i] = w.agent_state<PlacementState>(i).flag[slot];
    return out;
}

inline std::set<GridPoint> flag_points(const World& w, int slot) {
    std::set<GridPoint> out;
    for (int i = 0; i < w.size(); ++i)
        if (w.agent_state<PlacementState>(i).flag[slot]) out.insert(w.structure().points[i]);
    return out;
}

// --- Counter lifecycle --------------------------------------------------------------

inline bool counters_alive(const World& w, Direction dc) {
    int axis = static_cast<int>(axis_of(dc));
    for (int i = 0; i < w.size(); ++i)
        if (w.agent_state<ChainOpsState>(i).lane[axis].in_counter) return true;
    return false;
}

// Seed a value on every maximal segment of the axis; segments too short to
// represent it are deactivated up front (seed_counter truncates silently).
inline void init_counters(World& w, Direction dc, uint64_t value) {
    auto chains = build_segments(w, dc);
    std::vector<uint8_t> ok(w.size(), 1);
    for (const auto& c : chains) {
        bool fits = c.size() >= 64 || (value >> c.size()) == 0;
        if (!fits)
            for (int id : c) ok[id] = 0;
    }
    seed_counter(w, dc, value, 0);
    int axis = static_cast<int>(axis_of(dc));
    int cursor = 0;
    w.step([&](AgentCtx& ctx) {
        auto& lane = ctx.state<ChainOpsState>().lane[axis];
        lane.in_counter = lane.in_counter && ok[cursor++];
        detail::reset_singleton(ctx);
    });
}

// Broadcast each counter's sticky overflow segment-wide and retire it. 2 rounds.
inline long counters_prune(World& w, Direction dc) {
    int axis = static_cast<int>(axis_of(dc));
    long r0 = w.round();
    RoundHandler h = [dc, axis, r0](AgentCtx& ctx) {
        auto cp = detail::chain_pins(ctx, dc);
        auto& lane = ctx.state<ChainOpsState>().lane[axis];
        if (ctx.round == r0) {
            detail::reset_singleton(ctx);
            ctx.join(cp.s0, cp.p0);
            if (lane.in_counter && lane.overflow) ctx.send((*ctx.pins)[cp.p0]);
        } else {
            if (ctx.heard(cp.p0)) {
                lane.in_counter = 0;
                lane.overflow = 0;
            }
            detail::reset_singleton(ctx);
        }
    };
    w.step(h);
    w.step(h);
    return w.round() - r0;
}

// Local copy between counter cells a/b/q (0/1/2) on active counters. 1 round.
inline void counter_copy(World& w, Direction dc, int from, int to) {
    int axis = static_cast<int>(axis_of(dc));
    local_flags(w, [axis, from, to](PlacementState& ps) {
        auto& lane = ps.chain.lane[axis];
        if (!lane.in_counter) return;
        auto cell = [&lane](int sel) -> uint8_t& {
            return sel == 0 ? lane.a : sel == 1 ? lane.b : lane.q;
        };
        cell(to) = cell(from);
    });
}

// Host-seeds a program constant into a cell lane, preserving counter
// membership and flags (unlike seed_counter).
inline void counter_seed_const(World& w, Direction dc, uint64_t value, int lane_sel) {
    auto chains = build_segments(w, dc);
    std::vector<uint8_t> bit(w.size(), 0);
    for (const auto& chain : chains)
        for (size_t i = 0; i < chain.size(); ++i)
            bit[chain[i]] = i < 64 ? (value >> i) & 1 : 0;
    int axis = static_cast<int>(axis_of(dc));
    int cursor = 0;
    w.step([&](AgentCtx& ctx) {
        auto& lane = ctx.state<ChainOpsState>().lane[axis];
        if (lane.in_counter) {
            uint8_t* cell = lane_sel == 0 ? &lane.a : lane_sel == 1 ? &lane.b : &lane.q;
            *cell = bit[cursor];
        }
        ++cursor;
        detail::reset_singleton(ctx);
    });
}

// a <- a * c for a program constant c >= 1, by MSB-first doublings/additions.
// Clobbers b; overflow is sticky, prune afterwards.
inline OpResult counter_scale_const(World& w, Direction dc, uint64_t c) {
    long r0 = w.round();
    counter_copy(w, dc, 0, 1);
    int top = std::bit_width(c) - 1;
    for (int i = top - 1; i >= 0; --i) {
        counter_double(w, dc);
        if ((c >> i) & 1) counter_add(w, dc);
    }
    return {w.round() - r0, counter_overflowed(w, dc), 0};
}

// --- Boundary distances and line placements -----------------------------------------

// Each agent streams its distance to the structure boundary in direction d,
// LSB first (the largest l with p in V(L(d,l), A)).
inline PascResult boundary_distance(World& w, Direction d) { return pasc(w, d); }

// flag[dst] <- boundary_distance(d) >= counter value (axis of dc).
inline PrimResult line_placements(World& w, Direction d, Direction dc, int dst) {
    long r0 = w.round();
    if (!counters_alive(w, dc)) {
        fill_flags(w, dst, false);
        return {w.round() - r0, true};
    }
    pasc_compare(w, d, dc);
    local_flags(w, [dst](PlacementState& ps) { ps.flag[dst] = ps.chain.rel >= 0; });
    return {w.round() - r0, false};
}

// --- Longest segments ---------------------------------------------------------------

struct UnitLineResult {
    uint64_t kmax = 0;
    long rounds = 0;
};

// Computes m = longest maximal segment length on the axis of d via a
// length-latching PASC (segments finishing early retire) followed by an
// MSB-first tournament among segments of equal bit length. Survivors keep
// binary counters holding m; for base length ell, k = floor(m / ell) and
// flag[dst] <- V(L(d, k * ell), A).
inline UnitLineResult solve_unit_line(World& w, Direction d, int dst, uint64_t ell = 1) {
    int axis = static_cast<int>(axis_of(d));
    long r0 = w.round();
    int noise = detail::noise_pin(d);

    w.step([d, axis, noise](AgentCtx& ctx) {
        auto cp = detail::chain_pins(ctx, d);
        auto& ps = ctx.state<PlacementState>();
        auto& lane = ps.chain.lane[axis];
        lane.a = lane.b = lane.q = 0;
        lane.in_counter = 1;
        lane.overflow = lane.shiftout = lane.marker = lane.alive = lane.msb = 0;
        ps.chain.pasc_active = 1;
        ps.seg_alive = 1;
        ps.seg_finished = 0;
        ps.latch_marker = !cp.has_pred;  // latches bit j at cell j
        ps.tmark = 0;
        detail::reset_singleton(ctx);
        ctx.send(noise);
    });
    long r1 = w.round();

    // Phase 1: stream each segment's length; the chain end broadcasts bit j
    // on wire 0, live active agents keep wire 1 up; a segment finishes when
    // wire 1 falls silent, and finished segments hearing the global
    // "unfinished exists" beep retire (their length has fewer bits).
    RoundHandler latch = [d, axis, noise, r1](AgentCtx& ctx) {
        auto cp = detail::chain_pins(ctx, d);
        auto& ps = ctx.state<PlacementState>();
        auto& lane = ps.chain.lane[axis];
        switch ((ctx.round - r1) % 4) {
            case 0: {
                if (cp.has_pred && ctx.heard(cp.p1)) ps.latch_marker = 1;
                detail::pasc_chain_round(ctx, cp, ps.chain.pasc_active, ps.seg_finished);
                if (!ps.seg_finished && !cp.has_pred && !cp.has_succ) ctx.send(noise);
                break;
            }
            case 1: {
                int bit = detail::pasc_read_bit(ctx, cp, ps.chain.pasc_active);
                if (!ps.seg_finished && ps.chain.pasc_active && bit) ps.chain.pasc_active = 0;
                detail::reset_singleton(ctx);
                ctx.join(cp.s0, cp.p0);  // wire 0: length bit broadcast
                ctx.join(cp.s1, cp.p1);  // wire 1: actives still alive
                if (!ps.seg_finished) {
                    if (!cp.has_succ && cp.has_pred && bit) ctx.send((*ctx.pins)[cp.p0]);
                    if (ps.chain.pasc_active && cp.has_pred) ctx.send((*ctx.pins)[cp.p1]);
                }
                break;
            }
            case 2: {
                if (!ps.seg_finished) {
                    if (ps.latch_marker) lane.a = ctx.heard(cp.p0);
                    if (!ctx.heard(cp.p1)) ps.seg_finished = 1;
                }
                detail::config_two_globals(ctx);
                if (!ps.seg_finished) ctx.send(0);
                break;
            }
            default: {
                if (ps.seg_finished && ctx.heard(0)) ps.seg_alive = 0;
                detail::reset_singleton(ctx);
                if (!ps.seg_finished && ps.latch_marker) {
                    ctx.send((*ctx.pins)[cp.s1]);  // marker handoff to cell j+1
                    ps.latch_marker = 0;
                }
                break;
            }
        }
    };
    w.run_phase(latch);

    // Phase 2: tournament, MSB first. The latch marker sits at the MSB cell of
    // every surviving segment; markers with bit 0 retire their segment if any
    // marker beeped bit 1, then walk one cell toward the chain start.
    w.step([noise](AgentCtx& ctx) {
        auto& ps = ctx.state<PlacementState>();
        ps.tmark = ps.latch_marker && ps.seg_alive;
        detail::reset_singleton(ctx);
        ctx.send(noise);
    });
    RoundHandler tourney = [d, axis, r2 = w.round()](AgentCtx& ctx) {
        auto cp = detail::chain_pins(ctx, d);
        auto& ps = ctx.state<PlacementState>();
        auto& lane = ps.chain.lane[axis];
        if ((ctx.round - r2) % 2 == 0) {
            if (ctx.heard(cp.p0)) {  // segment-wide retire broadcast
                ps.seg_alive = 0;
                ps.tmark = 0;
            } else if (ps.seg_alive && cp.has_succ && ctx.heard(cp.s1)) {
                ps.tmark = 1;
            }
            detail::config_two_globals(ctx);
            if (ps.tmark && ps.seg_alive) {
                ctx.send(1);              // survivors exist
                if (lane.a) ctx.send(0);  // some survivor has bit 1 here
            }
        } else {
            bool bit1 = ctx.heard(0);
            detail::reset_singleton(ctx);
            ctx.join(cp.s0, cp.p0);
            if (ps.tmark && ps.seg_alive) {
                if (!lane.a && bit1) {
                    ctx.send((*ctx.pins)[cp.p0]);
                    ps.tmark = 0;
                    ps.seg_alive = 0;
                } else {
                    if (cp.has_pred) ctx.send((*ctx.pins)[cp.p1]);
                    ps.tmark = 0;
                }
            }
        }
    };
    w.run_phase(tourney);

    // Survivors become the counters holding m.
    local_flags(w, [axis](PlacementState& ps) {
        ps.chain.lane[axis].in_counter = ps.seg_alive;
        ps.seg_alive = ps.seg_finished = ps.latch_marker = ps.tmark = 0;
    });

    uint64_t m = read_counter(w, d, 0);
    uint64_t k = m;
    if (ell > 1) {
        if (ell > m) {
            counter_seed_const(w, d, 0, 0);
            k = 0;
        } else {
            counter_seed_const(w, d, ell, 1);
            counter_div(w, d);
            k = read_counter(w, d, 0);
            counter_scale_const(w, d, ell);  // a = k * ell for the line check
        }
    }
    line_placements(w, d, d, dst);
    return {k, w.round() - r0};
}

// --- Stretched placements -----------------------------------------------------------

namespace detail {

// flag[dst] <- V(S', A) for S' = S + L(d, v) with flag[src] = V(S, A) and v on
// the counters of axis(dc): line check for v, then every invalid agent roots
// an elimination chain extending opposite d (cut at the next invalid agent)
// and chain members at index <= v are eliminated.
inline PrimResult stretched_core(World& w, int src, int dst, Direction d, Direction dc) {
    long r0 = w.round();
    if (!counters_alive(w, dc)) {
        fill_flags(w, dst, false);
        return {w.round() - r0, true};
    }
    pasc_compare(w, d, dc);

    // Cut setup: invalid agents cut their pred edge and tell that neighbor.
    w.step([src, d](AgentCtx& ctx) {
        auto cp = detail::chain_pins(ctx, d);
        auto& ps = ctx.state<PlacementState>();
        ps.line_ok = ps.chain.rel >= 0;
        bool invalid = !ps.flag[src];
        ps.chain.cut_pred = invalid;
        ps.chain.cut_succ = 0;
        ps.participate = 0;
        detail::reset_singleton(ctx);
        if (invalid && cp.has_pred) ctx.send(cp.p1);
    });
    // Participation wire along each cut chain; invalid roots claim theirs.
    w.step([src, d](AgentCtx& ctx) {
        auto cp = detail::chain_pins(ctx, d);
        auto& ps = ctx.state<PlacementState>();
        ps.chain.cut_succ = cp.has_succ && ctx.heard(cp.s1);
        bool hp = cp.has_pred && !ps.chain.cut_pred;
        bool hs = cp.has_succ && !ps.chain.cut_succ;
        detail::reset_singleton(ctx);
        if (hp && hs) ctx.join(cp.s0, cp.p0);
        if (!hp && !ps.flag[src]) ctx.send((*ctx.pins)[cp.s0]);
    });
    w.step([d](AgentCtx& ctx) {
        auto cp = detail::chain_pins(ctx, d);
        auto& ps = ctx.state<PlacementState>();
        bool hp = cp.has_pred && !ps.chain.cut_pred;
        ps.participate = ctx.heard(hp ? (*ctx.pins)[cp.p0] : (*ctx.pins)[cp.s0]);
        detail::reset_singleton(ctx);
    });

    pasc_compare(w, d, dc, kDefaultRoundCap, /*honor_cuts=*/true);

    local_flags(w, [src, dst](PlacementState& ps) {
        ps.flag[dst] =
            ps.flag[src] && ps.line_ok && !(ps.participate && ps.chain.rel <= 0);
        ps.chain.cut_pred = ps.chain.cut_succ = 0;
        ps.participate = ps.line_ok = 0;
    });
    return {w.round() - r0, false};
}

}  // namespace detail

// flag[dst] <- V(k * (S + L(d, ell)), A) with flag[src] = V(k*S, A), k on the
// counters, ell a program constant >= 1. The counter value k is restored.
inline PrimResult stretched_placements(World& w, int src, int dst, Direction d, int ell,
                                       Direction dc) {
    long r0 = w.round();
    counter_copy(w, dc, 0, 2);  // stash k
    counter_scale_const(w, dc, static_cast<uint64_t>(ell));
    counters_prune(w, dc);
    PrimResult res = detail::stretched_core(w, src, dst, d, dc);
    if (!res.rejected) counter_copy(w, dc, 2, 0);  // restore k on survivors
    return {w.round() - r0, res.rejected};
}

// --- Segment shifting ---------------------------------------------------------------

// flag[slot] <- per maximal segment M of axis(d): M intersect (C + k*u_d),
// where C = flag[slot] and k is on the counters of axis(dc). Requires C
// k-segmented on the axis of d (interior segments hold >= k agents). Only the
// segment start/end points move, in four passes by boundary role; the moved
// endpoints then flood their image (to the boundary when an endpoint fell off).
inline PrimResult shift_segmented(World& w, int slot, Direction d, Direction dc) {
    long r0 = w.round();
    if (!counters_alive(w, dc)) {
        fill_flags(w, slot, false);
        return {w.round() - r0, true};
    }
    Direction dchain = opposite(d);  // chains extend toward the shift direction
    const int wd0 = pin_id(d, 0), wd1 = pin_id(d, 1);
    const int ed0 = pin_id(opposite(d), 0), ed1 = pin_id(opposite(d), 1);

    // Announce membership to both axis neighbors (index-0 pin toward d,
    // index-1 pin away), so reads are free of self-noise.
    w.step([slot, wd0, ed1](AgentCtx& ctx) {
        auto& ps = ctx.state<PlacementState>();
        ps.new_start = ps.new_end = 0;
        detail::reset_singleton(ctx);
        if (ps.flag[slot]) {
            ctx.send(wd0);
            ctx.send(ed1);
        }
    });
    // Classify endpoints; wires find the extreme start/end across the segment.
    w.step([slot, d, wd0, wd1, ed0, ed1](AgentCtx& ctx) {
        auto& ps = ctx.state<PlacementState>();
        bool c = ps.flag[slot];
        ps.is_start = c && !ctx.heard(wd1);  // no member toward d
        ps.is_end = c && !ctx.heard(ed0);    // no member away from d
        detail::reset_singleton(ctx);
        if (!ps.is_start) ctx.join(ed0, wd0);  // start-class wire, beeps travel away from d
        if (!ps.is_end) ctx.join(wd1, ed1);    // end-class wire, beeps travel toward d
        if (ps.is_start) ctx.send((*ctx.pins)[ed0]);
        if (ps.is_end) ctx.send((*ctx.pins)[wd1]);
    });
    w.step([wd0, ed1](AgentCtx& ctx) {
        auto& ps = ctx.state<PlacementState>();
        ps.first_start = ps.is_start && !ctx.heard(wd0);
        ps.last_end = ps.is_end && !ctx.heard(ed1);
        detail::reset_singleton(ctx);
    });

    // Four passes: interior starts, interior ends, the extreme start, the
    // extreme end. Interior roots are >= k+1 apart along the chain, so cutting
    // chains at same-pass roots keeps every image point reachable.
    for (int pass = 0; pass < 4; ++pass) {
        auto root_of = [pass](const PlacementState& ps) -> bool {
            switch (pass) {
                case 0: return ps.is_start && !ps.first_start;
                case 1: return ps.is_end && !ps.last_end;
                case 2: return ps.first_start;
                default: return ps.last_end;
            }
        };
        w.step([root_of, dchain](AgentCtx& ctx) {
            auto cp = detail::chain_pins(ctx, dchain);
            auto& ps = ctx.state<PlacementState>();
            ps.chain.cut_pred = root_of(ps);
            ps.chain.cut_succ = 0;
            ps.participate = 0;
            detail::reset_singleton(ctx);
            if (ps.chain.cut_pred && cp.has_pred) ctx.send(cp.p1);
        });
        w.step([dchain](AgentCtx& ctx) {
            auto cp = detail::chain_pins(ctx, dchain);
            auto& ps = ctx.state<PlacementState>();
            ps.chain.cut_succ = cp.has_succ && ctx.heard(cp.s1);
            bool hp = cp.has_pred && !ps.chain.cut_pred;
            bool hs = cp.has_succ && !ps.chain.cut_succ;
            detail::reset_singleton(ctx);
            if (hp && hs) ctx.join(cp.s0, cp.p0);
            if (!hp && ps.chain.cut_pred) ctx.send((*ctx.pins)[cp.s0]);
        });
        w.step([dchain](AgentCtx& ctx) {
            auto cp = detail::chain_pins(ctx, dchain);
            auto& ps = ctx.state<PlacementState>();
            bool hp = cp.has_pred && !ps.chain.cut_pred;
            ps.participate = ctx.heard(hp ? (*ctx.pins)[cp.p0] : (*ctx.pins)[cp.s0]);
            detail::reset_singleton(ctx);
        });
        pasc_compare(w, dchain, dc, kDefaultRoundCap, /*honor_cuts=*/true);
        bool marks_start = pass == 0 || pass == 2;
        local_flags(w, [marks_start](PlacementState& ps) {
            if (ps.participate && ps.chain.rel == 0) {
                if (marks_start)
                    ps.new_start = 1;
                else
                    ps.new_end = 1;
            }
            ps.chain.cut_pred = ps.chain.cut_succ = 0;
            ps.participate = 0;
        });
    }

    // Moved ends beep toward d along a wire cut at moved starts; everything
    // reached lies in the image. A coinciding start/end is a one-agent image.
    w.step([wd0, ed0](AgentCtx& ctx) {
        auto& ps = ctx.state<PlacementState>();
        detail::reset_singleton(ctx);
        if (ps.new_start) return;  // both pins stay singleton (wire cut)
        if (ps.new_end)
            ctx.send((*ctx.pins)[wd0]);
        else
            ctx.join(ed0, wd0);
    });
    w.step([slot, wd0, ed0](AgentCtx& ctx) {
        auto& ps = ctx.state<PlacementState>();
        bool marked = ps.new_end || (ps.new_start ? ctx.heard(ed0) : ctx.heard(wd0));
        ps.flag[slot] = marked;
        ps.is_start = ps.is_end = ps.first_start = ps.last_end = 0;
        ps.new_start = ps.new_end = 0;
        detail::reset_singleton(ctx);
    });
    return {w.round() - r0, false};
}

// --- Shifted shapes -----------------------------------------------------------------

// flag[dst] <- V(k * ((S + ell*u_d) union L(d, ell)), A) with flag[src] =
// V(k*S, A), S wide on the axis of d (so the invalid set is k-segmented).
// The counter value k is restored unless the scale is rejected.
inline PrimResult shifted_shape_placements(World& w, int src, int dst, Direction d, int ell,
                                           Direction dc) {
    long r0 = w.round();
    if (!counters_alive(w, dc)) {
        fill_flags(w, dst, false);
        return {w.round() - r0, true};
    }
    flags_not(w, kScratchT, src);
    for (int i = 0; i < ell; ++i) shift_segmented(w, kScratchT, opposite(d), dc);

    counter_copy(w, dc, 0, 2);  // stash k
    counter_scale_const(w, dc, static_cast<uint64_t>(ell));
    counters_prune(w, dc);
    if (!counters_alive(w, dc)) {
        fill_flags(w, dst, false);
        return {w.round() - r0, true};
    }
    pasc_compare(w, d, dc);
    local_flags(w, [dst](PlacementState& ps) {
        ps.flag[dst] = ps.chain.rel >= 0 && !ps.flag[kScratchT];
    });
    counter_copy(w, dc, 2, 0);  // restore k
    return {w.round() - r0, false};
}

// --- Triangle placements ------------------------------------------------------------

// flag[dst] <- V(T(d, L), A) for the counter value L >= 1, via the
// three-parallelogram decomposition with l' = floor(L/2), l'' = L - l'.
// Uses scratch slots 6 and 7; the counter value L is restored.
inline PrimResult triangle_placements(World& w, Direction d, Direction dc, int dst) {
    long r0 = w.round();
    if (!counters_alive(w, dc)) {
        fill_flags(w, dst, false);
        return {w.round() - r0, true};
    }
    uint64_t big_l = read_counter(w, dc, 0);  // host-side schedule branching only
    if (big_l == 0) throw RangeError("triangle side must be >= 1");
    Direction d1 = d, d2 = ccw(d), d3 = ccw(d2);

    if (big_l == 1) {
        // V(T(d,1)) = V(L(d1,1)) intersect V(L(d2,1)).
        line_placements(w, d1, dc, dst);
        line_placements(w, d2, dc, kScratchB);
        flags_and(w, dst, kScratchB);
        return {w.round() - r0, false};
    }

    bool odd = big_l & 1;
    counter_copy(w, dc, 0, 2);  // stash L in q
    auto set_half = [&] {       // a <- l'
        counter_copy(w, dc, 2, 0);
        counter_halve(w, dc);
    };
    auto set_half_up = [&] {  // a <- l''
        set_half();
        if (odd) {
            counter_seed_const(w, dc, 1, 1);
            counter_add(w, dc);
        }
    };

    // One shifted-parallelogram piece: V((L(da,l') + L(db,l'') + l''*u_da)
    // union L(da, l'')), written to flag[out].
    auto piece = [&](Direction da, Direction db, int out) {
        fill_flags(w, out, true);
        set_half();
        detail::stretched_core(w, out, out, da, dc);
        set_half_up();
        detail::stretched_core(w, out, out, db, dc);
        flags_not(w, kScratchT, out);
        set_half();
        shift_segmented(w, kScratchT, opposite(da), dc);
        if (odd) {
            counter_seed_const(w, dc, 1, 0);
            shift_segmented(w, kScratchT, opposite(da), dc);
        }
        set_half_up();
        pasc_compare(w, da, dc);
        local_flags(w, [out](PlacementState& ps) {
            ps.flag[out] = ps.chain.rel >= 0 && !ps.flag[kScratchT];
        });
    };

    // P1: the central parallelogram, two plain Minkowski steps at l'.
    fill_flags(w, dst, true);
    set_half();
    detail::stretched_core(w, dst, dst, d1, dc);
    detail::stretched_core(w, dst, dst, d2, dc);

    piece(d1, d3, kScratchB);
    flags_and(w, dst, kScratchB);
    piece(d2, opposite(d3), kScratchB);
    flags_and(w, dst, kScratchB);

    counter_copy(w, dc, 2, 0);  // restore L
    counter_seed_const(w, dc, 0, 2);
    return {w.round() - r0, false};
}

}  // namespace shapecon
