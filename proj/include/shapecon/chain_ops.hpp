#pragma once

#include <vector>

#include "shapecon/errors.hpp"
#include "shapecon/runtime.hpp"

// Chain and segment infrastructure: distributed binary counters on maximal
// segments, streamed arithmetic, PASC (primary/secondary circuit distance
// binarization), and PASC-with-cutoff against a counter value.
//
// All handlers are identical across agents and branch only on the local
// neighborhood, received beeps, own state, and the global round counter; the
// host sequences phases and reads results through observer taps/state.

namespace shapecon {

// --- Streamed arithmetic (O(1) state per stream) --------------------------------

struct StreamAdd {
    uint8_t carry = 0;
    int step(int a, int b) {
        int s = a + b + carry;
        carry = s >> 1;
        return s & 1;
    }
};

struct StreamSub {
    uint8_t borrow = 0;  // left high after the last bit: a < b
    int step(int a, int b) {
        int s = a - b - borrow;
        borrow = s < 0;
        return s & 1;
    }
};

struct StreamCompare {
    int8_t rel = 0;  // -1: a<b, 0: equal so far, +1: a>b; last differing bit decides
    void step(int a, int b) {
        if (a != b) rel = a > b ? 1 : -1;
    }
};

// --- Per-agent chain state --------------------------------------------------------

struct ChainOpsState {
    // Counter lanes, one per axis: bit cells and per-cell flags.
    struct Lane {
        uint8_t a = 0, b = 0, q = 0;  // operand / operand / quotient cells
        uint8_t in_counter = 0;       // member of the seeded counter chain
        uint8_t marker = 0, alive = 0, msb = 0;
        uint8_t overflow = 0, shiftout = 0, ge = 0;
    };
    Lane lane[3];

    // PASC per-agent flags.
    uint8_t pasc_active = 0, pasc_done = 0, pend = 0, resolving = 0;
    int8_t rel = 0;  // stream-compare relation vs the cutoff counter

    // Virtual chain cuts: pasc_compare with honor_cuts treats the physical
    // neighbor on the pred/succ side as absent, splitting chains mid-segment.
    uint8_t cut_pred = 0, cut_succ = 0;
};

namespace detail {

struct ChainPins {
    int p0, p1, s0, s1;  // pred-side and succ-side pin ids
    bool has_pred, has_succ;
};

inline ChainPins chain_pins(const AgentCtx& ctx, Direction d) {
    Direction dp = d, ds = opposite(d);
    return {pin_id(dp, 0), pin_id(dp, 1), pin_id(ds, 0), pin_id(ds, 1),
            ctx.neighbor(dp), ctx.neighbor(ds)};
}

inline void reset_singleton(AgentCtx& ctx) { *ctx.pins = singleton_pins(); }

// All pins with index i into one set; labels 0 and 1.
inline void config_two_globals(AgentCtx& ctx) {
    for (int pin = 0; pin < kPinCount; ++pin) ctx.join(pin, pin_index(pin));
}

}  // namespace detail

// Maximal segments along the axis of d, each ordered from the amoebot
// furthest in direction d (chain start) toward opposite(d).
inline std::vector<std::vector<int>> build_segments(const World& w, Direction d) {
    const AmoebotStructure& a = w.structure();
    std::vector<std::vector<int>> chains;
    for (int i = 0; i < a.size(); ++i) {
        if (a.neighbors[i][static_cast<int>(d)] >= 0) continue;  // not a start
        std::vector<int> chain;
        for (int cur = i; cur >= 0; cur = a.neighbors[cur][static_cast<int>(opposite(d))])
            chain.push_back(cur);
        chains.push_back(std::move(chain));
    }
    return chains;
}

// --- Counter seeding and observer reads -------------------------------------------

// Host initialization: writes value bits LSB-first along every maximal
// segment of the axis, marks membership, clears op flags.
inline void seed_counter(World& w, Direction d, uint64_t value, int lane_sel = 0) {
    auto chains = build_segments(w, d);
    std::vector<uint8_t> bit(w.size(), 0), member(w.size(), 0);
    for (const auto& chain : chains)
        for (size_t i = 0; i < chain.size(); ++i) {
            member[chain[i]] = 1;
            bit[chain[i]] = i < 64 ? (value >> i) & 1 : 0;
        }
    int axis = static_cast<int>(axis_of(d));
    int cursor = 0;
    w.step([&](AgentCtx& ctx) {
        auto& lane = ctx.state<ChainOpsState>().lane[axis];
        uint8_t* cell = lane_sel == 0 ? &lane.a : &lane.b;
        *cell = bit[cursor];
        lane.in_counter = member[cursor];
        lane.overflow = lane.shiftout = lane.marker = lane.alive = lane.msb = 0;
        lane.q = lane_sel == 0 ? 0 : lane.q;
        ++cursor;
        detail::reset_singleton(ctx);
    });
}

inline uint64_t read_counter(const World& w, Direction d, int lane_sel = 0) {
    auto chains = build_segments(w, d);
    int axis = static_cast<int>(axis_of(d));
    uint64_t v = 0;
    for (const auto& chain : chains)
        for (size_t i = 0; i < chain.size() && i < 64; ++i) {
            const auto& lane = w.agent_state<ChainOpsState>(chain[i]).lane[axis];
            if (!lane.in_counter) continue;
            uint8_t bit = lane_sel == 0 ? lane.a : lane_sel == 1 ? lane.b : lane.q;
            v |= uint64_t{bit} << i;
        }
    return v;
}

inline bool counter_overflowed(const World& w, Direction d) {
    int axis = static_cast<int>(axis_of(d));
    for (int i = 0; i < w.size(); ++i)
        if (w.agent_state<ChainOpsState>(i).lane[axis].overflow) return true;
    return false;
}

struct OpResult {
    long rounds = 0;
    bool overflow = false;
    int relation = 0;  // compare: -1, 0, +1 (a vs b)
};

// --- O(1)-round counter operations -------------------------------------------------

namespace detail {

// a <- a (+) b with a carry/borrow circuit: propagate through a != b
// (add) or a == b (sub); generators beep toward their successor. 2 rounds.
inline OpResult add_sub(World& w, Direction d, bool subtract) {
    int axis = static_cast<int>(axis_of(d));
    long r0 = w.round();
    RoundHandler h = [d, axis, subtract, r0](AgentCtx& ctx) {
        auto cp = chain_pins(ctx, d);
        auto& lane = ctx.state<ChainOpsState>().lane[axis];
        if (!lane.in_counter) {
            reset_singleton(ctx);
            return;
        }
        long phase = ctx.round - r0;
        if (phase == 0) {
            reset_singleton(ctx);
            bool propagate = subtract ? lane.a == lane.b : lane.a != lane.b;
            bool generate = subtract ? (lane.a == 0 && lane.b == 1)
                                     : (lane.a == 1 && lane.b == 1);
            if (propagate) ctx.join(cp.s0, cp.p0);  // pass-through wire
            if (generate) ctx.send((*ctx.pins)[cp.s0]);
        } else {
            bool c_in = ctx.heard(cp.p0) && cp.has_pred;
            bool c_out = subtract ? ((!lane.a && lane.b) || (c_in && lane.a == lane.b))
                                  : ((lane.a && lane.b) || (c_in && lane.a != lane.b));
            lane.a = lane.a ^ lane.b ^ c_in;
            if (!cp.has_succ && c_out) lane.overflow = 1;
            reset_singleton(ctx);
        }
    };
    w.step(h);
    w.step(h);
    return {w.round() - r0, counter_overflowed(w, d), 0};
}

// Shift cells by one position toward the successor (double) or the
// predecessor (halve). 2 rounds.
inline OpResult shift_cells(World& w, Direction d, bool toward_succ) {
    int axis = static_cast<int>(axis_of(d));
    long r0 = w.round();
    RoundHandler h = [d, axis, toward_succ, r0](AgentCtx& ctx) {
        auto cp = chain_pins(ctx, d);
        auto& lane = ctx.state<ChainOpsState>().lane[axis];
        reset_singleton(ctx);
        if (!lane.in_counter) return;
        long phase = ctx.round - r0;
        if (phase == 0) {
            if (lane.a) ctx.send((*ctx.pins)[toward_succ ? cp.s0 : cp.p0]);
        } else {
            if (toward_succ && !cp.has_succ && lane.a) lane.overflow = 1;
            bool incoming = toward_succ ? (cp.has_pred && ctx.heard(cp.p0))
                                        : (cp.has_succ && ctx.heard(cp.s0));
            lane.a = incoming;
        }
    };
    w.step(h);
    w.step(h);
    return {w.round() - r0, counter_overflowed(w, d), 0};
}

// Three-way compare of lanes x vs y (selected by cell pointers inside the
// handler via a selector). The topmost differing cell decides and broadcasts
// the result on chain-wide wires. 3 rounds. Every agent stores the relation
// in lane.ge (2 = '>', 1 = '=', 0 = '<').
template <class SelX, class SelY>
inline OpResult compare_lanes(World& w, Direction d, SelX selx, SelY sely) {
    int axis = static_cast<int>(axis_of(d));
    long r0 = w.round();
    RoundHandler h = [d, axis, selx, sely, r0](AgentCtx& ctx) {
        auto cp = chain_pins(ctx, d);
        auto& lane = ctx.state<ChainOpsState>().lane[axis];
        if (!lane.in_counter) {
            reset_singleton(ctx);
            return;
        }
        uint8_t x = selx(lane), y = sely(lane);
        bool differ = x != y;
        long phase = ctx.round - r0;
        if (phase == 0) {
            reset_singleton(ctx);
            // Equal cells pass wire 0; differing cells cut it and beep toward
            // the chain start, so a differing cell hears on its successor
            // side iff a differing cell exists above it.
            if (!differ) ctx.join(cp.s0, cp.p0);
            if (differ) ctx.send((*ctx.pins)[cp.p0]);
        } else if (phase == 1) {
            bool topmost = differ && !(cp.has_succ && ctx.heard((*ctx.pins)[cp.s0]));
            reset_singleton(ctx);
            ctx.join(cp.s0, cp.p0);  // chain-wide wire 0: "x > y"
            ctx.join(cp.s1, cp.p1);  // chain-wide wire 1: "x < y"
            if (topmost) ctx.send(x > y ? cp.p0 : cp.p1);
        } else {
            lane.ge = ctx.heard(cp.p0) ? 2 : ctx.heard(cp.p1) ? 0 : 1;
            reset_singleton(ctx);
        }
    };
    w.step(h);
    w.step(h);
    w.step(h);
    long rounds = w.round() - r0;
    int rel = 0;
    for (int i = 0; i < w.size(); ++i) {
        const auto& lane = w.agent_state<ChainOpsState>(i).lane[axis];
        if (lane.in_counter) {
            rel = static_cast<int>(lane.ge) - 1;
            break;
        }
    }
    return {rounds, false, rel};
}

}  // namespace detail

inline OpResult counter_add(World& w, Direction d) { return detail::add_sub(w, d, false); }
inline OpResult counter_sub(World& w, Direction d) { return detail::add_sub(w, d, true); }
inline OpResult counter_double(World& w, Direction d) { return detail::shift_cells(w, d, true); }
inline OpResult counter_halve(World& w, Direction d) { return detail::shift_cells(w, d, false); }

inline OpResult counter_compare(World& w, Direction d) {
    return detail::compare_lanes(
        w, d, [](const ChainOpsState::Lane& l) { return l.a; },
        [](const ChainOpsState::Lane& l) { return l.b; });
}

// Marks the cell holding the most significant 1 of lane a (chain start for
// value 0). 2 rounds.
inline OpResult counter_mark_msb(World& w, Direction d) {
    int axis = static_cast<int>(axis_of(d));
    long r0 = w.round();
    RoundHandler h = [d, axis, r0](AgentCtx& ctx) {
        auto cp = detail::chain_pins(ctx, d);
        auto& lane = ctx.state<ChainOpsState>().lane[axis];
        if (!lane.in_counter) {
            detail::reset_singleton(ctx);
            return;
        }
        long phase = ctx.round - r0;
        if (phase == 0) {
            detail::reset_singleton(ctx);
            // 1-cells cut wire 0 and beep downward; wire 1 chain-wide carries
            // "any 1 exists" for the value-0 convention.
            if (!lane.a) ctx.join(cp.s0, cp.p0);
            ctx.join(cp.s1, cp.p1);
            if (lane.a) {
                ctx.send((*ctx.pins)[cp.p0]);
                ctx.send(cp.p1);
            }
        } else {
            bool one_above = cp.has_succ && ctx.heard((*ctx.pins)[cp.s0]);
            bool any_one = ctx.heard(cp.p1);
            lane.msb = (lane.a && !one_above) || (!any_one && !cp.has_pred);
            detail::reset_singleton(ctx);
        }
    };
    w.step(h);
    w.step(h);
    return {w.round() - r0, false, 0};
}

// a <- a * b: marker walks the multiplier (b) cells from the LSB; per bit,
// broadcast it, conditionally add the running shifted copy (kept in q), and
// double the copy. 6 rounds per bit.
inline OpResult counter_mul(World& w, Direction d) {
    int axis = static_cast<int>(axis_of(d));
    auto chains = build_segments(w, d);
    size_t m = 0;
    for (const auto& c : chains) m = std::max(m, c.size());
    long r0 = w.round();

    // Setup: q (running shifted copy) <- a; a <- 0 (accumulator); marker at
    // chain start. One round.
    w.step([d, axis](AgentCtx& ctx) {
        auto cp = detail::chain_pins(ctx, d);
        detail::reset_singleton(ctx);
        auto& lane = ctx.state<ChainOpsState>().lane[axis];
        if (!lane.in_counter) return;
        lane.q = lane.a;
        lane.a = 0;
        lane.marker = !cp.has_pred;
        lane.shiftout = 0;
        ctx.send(cp.p0);  // keep the phase machinery uniform (self-noise)
    });
    long r1 = w.round();

    RoundHandler h = [d, axis, r1](AgentCtx& ctx) {
        auto cp = detail::chain_pins(ctx, d);
        auto& st = ctx.state<ChainOpsState>();
        auto& lane = st.lane[axis];
        if (!lane.in_counter) {
            detail::reset_singleton(ctx);
            return;
        }
        long phase = (ctx.round - r1) % 4;
        switch (phase) {
            case 0:
                // Broadcast the marker's multiplier bit on chain wire 0;
                // marker handoff beep on wire 1 toward the successor.
                detail::reset_singleton(ctx);
                ctx.join(cp.s0, cp.p0);
                if (lane.marker) {
                    if (lane.b) ctx.send(cp.p0);
                    ctx.send((*ctx.pins)[cp.s1]);
                }
                break;
            case 1: {
                bool bit = ctx.heard(cp.p0);
                bool take_marker = cp.has_pred && ctx.heard(cp.p1);
                // Multiplier bit set while the copy has lost high bits:
                // the product exceeds m bits.
                if (bit && lane.shiftout) lane.overflow = 1;
                lane.ge = bit;  // reuse as the pending "add this round" flag
                lane.marker = take_marker;
                // Conditional add a += q, carry circuit round 1.
                detail::reset_singleton(ctx);
                if (bit) {
                    if (lane.a != lane.q) ctx.join(cp.s0, cp.p0);
                    if (lane.a && lane.q) ctx.send((*ctx.pins)[cp.s0]);
                } else {
                    ctx.send(cp.p0);  // keep-alive self-noise
                }
                break;
            }
            case 2: {
                if (lane.ge) {
                    bool c_in = cp.has_pred && ctx.heard(cp.p0);
                    bool c_out = (lane.a && lane.q) || (c_in && lane.a != lane.q);
                    lane.a = lane.a ^ lane.q ^ c_in;
                    if (!cp.has_succ && c_out) lane.overflow = 1;
                }
                // Double the copy: shift q toward the successor, round 1.
                detail::reset_singleton(ctx);
                if (lane.q) ctx.send((*ctx.pins)[cp.s0]);
                if (!cp.has_pred) ctx.send(cp.p1);  // keep-alive
                break;
            }
            default:
                if (!cp.has_succ && lane.q) lane.shiftout = 1;
                lane.q = cp.has_pred && ctx.heard(cp.p0);
                detail::reset_singleton(ctx);
                if (!cp.has_pred) ctx.send(cp.p1);  // keep-alive
                break;
        }
    };
    // 4 rounds per multiplier bit.
    for (size_t it = 0; it < m; ++it)
        for (int ph = 0; ph < 4; ++ph) w.step(h);
    // Clear the scratch lane.
    w.step([axis](AgentCtx& ctx) {
        detail::reset_singleton(ctx);
        auto& lane = ctx.state<ChainOpsState>().lane[axis];
        lane.q = 0;
        lane.ge = 0;
    });
    return {w.round() - r0, counter_overflowed(w, d), 0};
}

// Long division, MSB-first: per dividend bit (marker walking from the chain
// end), r <- 2r + bit, compare r to the divisor, conditionally subtract, and
// write the quotient bit at the marker. Quotient lands in q, remainder in r's
// cells; 6 rounds per bit.
//
// Lane roles during the loop: a = dividend (read via marker), b = divisor,
// q = quotient bits, and the running remainder lives in `ge`'s sibling cell
// `pend`-free storage: we reuse lane.shiftout for the virtual top bit and a
// dedicated remainder cell kept in lane.ge bit 1? -- kept simple: remainder
// overwrites a as the loop consumes dividend bits from the top.
inline OpResult counter_divmod(World& w, Direction d, bool want_mod) {
    int axis = static_cast<int>(axis_of(d));
    auto chains = build_segments(w, d);
    size_t m = 0;
    for (const auto& c : chains) m = std::max(m, c.size());
    if (read_counter(w, d, 1) == 0) throw DivideByZero("division by zero counter");
    long r0 = w.round();

    // Setup: marker at the chain end (MSB-first walk); q <- 0; the remainder
    // is accumulated in a fresh cell: move the dividend into q temporarily?
    // The dividend bit at the marker is consumed exactly once, so the
    // remainder can reuse cell a of already-visited positions. Instead we
    // keep it simpler: remainder r lives in cell q; dividend stays in a;
    // quotient bits are written into a at the marker position after its
    // dividend bit was consumed.
    w.step([d, axis](AgentCtx& ctx) {
        auto cp = detail::chain_pins(ctx, d);
        detail::reset_singleton(ctx);
        auto& lane = ctx.state<ChainOpsState>().lane[axis];
        if (!lane.in_counter) return;
        lane.q = 0;
        lane.marker = !cp.has_succ;
        lane.shiftout = 0;
        ctx.send(cp.p0);
    });
    long r1 = w.round();

    RoundHandler h = [d, axis, r1](AgentCtx& ctx) {
        auto cp = detail::chain_pins(ctx, d);
        auto& st = ctx.state<ChainOpsState>();
        auto& lane = st.lane[axis];
        if (!lane.in_counter) {
            detail::reset_singleton(ctx);
            return;
        }
        long phase = (ctx.round - r1) % 5;
        switch (phase) {
            case 0:
                // Shift remainder q up (toward succ) on wire 0; broadcast the
                // marker's dividend bit chain-wide on wire 1.
                detail::reset_singleton(ctx);
                if (lane.q) ctx.send((*ctx.pins)[cp.s0]);
                ctx.join(cp.s1, cp.p1);
                if (lane.marker) {
                    if (lane.a) ctx.send(cp.p1);
                    lane.a = 0;  // consumed; the cell will hold a quotient bit
                }
                if (!cp.has_pred && !lane.q) ctx.send(cp.p0);  // keep-alive
                break;
            case 1: {
                if (!cp.has_succ && lane.q) lane.shiftout = 1;  // virtual top bit
                bool dividend_bit = ctx.heard(cp.p1);
                lane.q = cp.has_pred ? (ctx.heard(cp.p0) ? 1 : 0) : dividend_bit;
                // Compare r (q cells + virtual top) to divisor b, round 1.
                detail::reset_singleton(ctx);
                bool differ = lane.q != lane.b;
                if (!differ) ctx.join(cp.s0, cp.p0);
                if (differ) ctx.send((*ctx.pins)[cp.p0]);
                if (!cp.has_succ) ctx.send(cp.s1);  // keep-alive
                break;
            }
            case 2: {
                bool differ = lane.q != lane.b;
                bool topmost = differ && !(cp.has_succ && ctx.heard((*ctx.pins)[cp.s0]));
                detail::reset_singleton(ctx);
                ctx.join(cp.s0, cp.p0);  // chain wire 0: "r >= b"
                ctx.join(cp.s1, cp.p1);  // chain wire 1: "some cell differs"
                if (lane.shiftout && !cp.has_succ) {
                    ctx.send(cp.p0);  // virtual top bit outranks every cell
                } else if (topmost && lane.q > lane.b) {
                    ctx.send(cp.p0);
                }
                if (differ) ctx.send(cp.p1);
                break;
            }
            case 3: {
                bool ge = ctx.heard(cp.p0) || !ctx.heard(cp.p1);
                lane.ge = ge;
                // Conditional subtract r -= b: borrow circuit round 1.
                detail::reset_singleton(ctx);
                if (ge) {
                    if (lane.q == lane.b) ctx.join(cp.s0, cp.p0);
                    if (!lane.q && lane.b) ctx.send((*ctx.pins)[cp.s0]);
                }
                // Marker handoff toward the predecessor on wire 1.
                if (lane.marker) ctx.send((*ctx.pins)[cp.p1]);
                break;
            }
            default: {
                if (lane.ge) {
                    bool b_in = cp.has_pred && ctx.heard(cp.p0);
                    lane.q = lane.q ^ lane.b ^ b_in;
                }
                lane.shiftout = 0;
                if (lane.marker) lane.a = lane.ge;  // quotient bit, correct position
                lane.marker = cp.has_succ && ctx.heard(cp.s1);
                detail::reset_singleton(ctx);
                if (!cp.has_pred) ctx.send(cp.p0);  // keep-alive
                break;
            }
        }
    };
    for (size_t it = 0; it < m; ++it)
        for (int ph = 0; ph < 5; ++ph) w.step(h);

    // Select the requested output into a; clear scratch.
    w.step([axis, want_mod](AgentCtx& ctx) {
        detail::reset_singleton(ctx);
        auto& lane = ctx.state<ChainOpsState>().lane[axis];
        if (!lane.in_counter) return;
        if (want_mod) lane.a = lane.q;
        lane.q = 0;
        lane.ge = 0;
        lane.marker = 0;
    });
    return {w.round() - r0, counter_overflowed(w, d), 0};
}

inline OpResult counter_div(World& w, Direction d) { return counter_divmod(w, d, false); }
inline OpResult counter_mod(World& w, Direction d) { return counter_divmod(w, d, true); }

// --- PASC --------------------------------------------------------------------------

struct PascResult {
    long rounds = 0;
    int iterations = 0;
    std::vector<std::vector<int>> streams;  // per agent, LSB-first bits
};

namespace detail {

// Chain wiring for one PASC round. Wire labels: pred-side pins' own ids.
// Active agents cross the two wires, passive agents pass them straight; the
// start beeps the physical wire entering its successor on pin 0. Chain ends
// only read, and starts never touch their pred-side pins, so virtual cuts
// (has_pred/has_succ cleared despite a physical neighbor) stay silent.
inline void pasc_chain_round(AgentCtx& ctx, const ChainPins& cp, bool active, bool done) {
    reset_singleton(ctx);
    if (!cp.has_pred) {
        if (cp.has_succ && !done) ctx.send((*ctx.pins)[cp.s0]);  // wire PRIM
        return;
    }
    if (!cp.has_succ) return;
    if (active) {
        ctx.join(cp.s1, cp.p0);  // PRIM: pred 0 <-> succ 1
        ctx.join(cp.s0, cp.p1);  // SEC:  pred 1 <-> succ 0
    } else {
        ctx.join(cp.s0, cp.p0);
        ctx.join(cp.s1, cp.p1);
    }
}

// Reads this agent's PASC bit from the previous chain round.
inline int pasc_read_bit(AgentCtx& ctx, const ChainPins& cp, bool active) {
    if (!cp.has_pred) return 0;
    bool prim = ctx.heard(cp.p0);
    bool sec = ctx.heard(cp.p1);
    (void)sec;
    return active ? prim : !prim && (sec ? 1 : 0);
}

}  // namespace detail

// PASC over all maximal chains of direction d simultaneously: in iteration j
// every agent learns bit j of its chain index; iterations are synchronized by
// a global circuit and stop when every non-start agent went passive.
inline PascResult pasc(World& w, Direction d, long cap = kDefaultRoundCap) {
    long r0 = w.round();
    std::vector<size_t> tap_base(w.size());
    for (int i = 0; i < w.size(); ++i) tap_base[i] = w.tap(i).size();
    w.step([d](AgentCtx& ctx) {  // init: everyone active, clear done
        auto cp = detail::chain_pins(ctx, d);
        auto& st = ctx.state<ChainOpsState>();
        st.pasc_active = 1;
        st.pasc_done = 0;
        detail::reset_singleton(ctx);
        ctx.send(cp.p0);  // keep the first phase-0 round reachable
    });
    long r1 = w.round();
    RoundHandler h = [d, r1](AgentCtx& ctx) {
        auto cp = detail::chain_pins(ctx, d);
        auto& st = ctx.state<ChainOpsState>();
        long phase = (ctx.round - r1) % 2;
        if (phase == 0) {
            // Read the sync result (except on the very first round).
            if (ctx.round - r1 > 0 && !ctx.heard(0)) st.pasc_done = 1;
            detail::pasc_chain_round(ctx, cp, st.pasc_active, st.pasc_done);
        } else {
            int bit = detail::pasc_read_bit(ctx, cp, st.pasc_active);
            if (!st.pasc_done) {
                // Singleton chains know i = 0 without any iteration.
                if (cp.has_pred || cp.has_succ) ctx.tap(bit);
                if (st.pasc_active && bit) st.pasc_active = 0;
            }
            // Global sync: all pins one set; active non-starts beep.
            for (int pin = 0; pin < kPinCount; ++pin) ctx.join(pin, 0);
            if (!st.pasc_done && st.pasc_active && cp.has_pred) ctx.send(0);
        }
    };
    long used = w.run_phase(h, cap);

    PascResult out;
    out.rounds = w.round() - r0;
    out.streams.resize(w.size());
    size_t iters = 0;
    for (int i = 0; i < w.size(); ++i) {
        const auto& taps = w.tap(i);
        for (size_t t = tap_base[i]; t < taps.size(); ++t)
            out.streams[i].push_back(static_cast<int>(taps[t]));
        iters = std::max(iters, out.streams[i].size());
    }
    out.iterations = static_cast<int>(iters);
    (void)used;
    return out;
}

// --- PASC with cutoff ---------------------------------------------------------------

struct PascCompareResult {
    long rounds = 0;
    std::vector<int> relation;  // per agent: -1 (i < d), 0 (=), +1 (>)
};

// Compares every chain index i against the value of the counter seeded on
// lane a of axis(d_counter) (msb flags are established here). Four rounds per
// iteration: chain round, global round (continue + counter bit), counter
// marker handoff round, global round (counter alive + PASC alive).
inline PascCompareResult pasc_compare(World& w, Direction d, Direction d_counter,
                                      long cap = kDefaultRoundCap, bool honor_cuts = false) {
    long r0 = w.round();
    counter_mark_msb(w, d_counter);
    int caxis = static_cast<int>(axis_of(d_counter));

    w.step([d, d_counter, caxis](AgentCtx& ctx) {  // init
        auto cp = detail::chain_pins(ctx, d);
        auto ccp = detail::chain_pins(ctx, d_counter);
        auto& st = ctx.state<ChainOpsState>();
        st.pasc_active = 1;
        st.pasc_done = 0;
        st.resolving = 0;
        st.rel = 0;
        auto& lane = st.lane[caxis];
        lane.marker = lane.in_counter && !ccp.has_pred;
        lane.alive = lane.marker;
        detail::reset_singleton(ctx);
        ctx.send(cp.p0);
    });
    long r1 = w.round();

    RoundHandler h = [d, d_counter, caxis, r1, honor_cuts](AgentCtx& ctx) {
        auto cp = detail::chain_pins(ctx, d);
        auto ccp = detail::chain_pins(ctx, d_counter);
        auto& st = ctx.state<ChainOpsState>();
        auto& lane = st.lane[caxis];
        if (honor_cuts) {
            cp.has_pred = cp.has_pred && !st.cut_pred;
            cp.has_succ = cp.has_succ && !st.cut_succ;
        }
        if (st.resolving == 1) {
            // Counter exhausted with PASC unfinished. After j streamed bits
            // the still-active agents sit at the multiples of 2^j, so exactly
            // the agents before the first active non-start agent have their
            // index fully streamed; the wire cut at active agents told them.
            if (st.pasc_active && cp.has_pred)
                st.rel = 1;
            else if (cp.has_pred && !ctx.heard(cp.p0))
                st.rel = 1;
            st.pasc_done = 1;
            st.resolving = 2;
            detail::reset_singleton(ctx);
            return;
        }
        long phase = (ctx.round - r1) % 4;
        switch (phase) {
            case 0: {
                // Delivery from phase 3: G0 = counter alive, G1 = PASC alive.
                if (ctx.round - r1 > 0 && !st.pasc_done) {
                    bool counter_alive = ctx.heard(0);
                    bool pasc_alive = ctx.heard(1);
                    if (!counter_alive && pasc_alive) {
                        // Resolution round: passive agents pass wire 0, active
                        // agents cut it, the start beeps along it.
                        st.resolving = 1;
                        detail::reset_singleton(ctx);
                        bool act = st.pasc_active && cp.has_pred;
                        if (!act && cp.has_pred && cp.has_succ) ctx.join(cp.s0, cp.p0);
                        if (!cp.has_pred && cp.has_succ) ctx.send((*ctx.pins)[cp.s0]);
                        return;
                    } else if (counter_alive && !pasc_alive) {
                        st.rel = -1;
                        st.pasc_done = 1;
                    } else if (!counter_alive && !pasc_alive) {
                        st.pasc_done = 1;
                    }
                }
                detail::pasc_chain_round(ctx, cp, st.pasc_active, st.pasc_done);
                // Keep the round audible while the counter still has bits,
                // even when every chain is a lone agent (quiet otherwise).
                if (!st.pasc_done && lane.marker && lane.alive) {
                    for (int pin = 0; pin < kPinCount; ++pin) {
                        Axis ax = axis_of(pin_direction(pin));
                        if (ax != axis_of(d) && ax != axis_of(d_counter)) {
                            ctx.send(pin);
                            break;
                        }
                    }
                }
                break;
            }
            case 1: {
                st.pend = static_cast<uint8_t>(detail::pasc_read_bit(ctx, cp, st.pasc_active));
                if (!st.pasc_done && st.pasc_active && st.pend) st.pasc_active = 0;
                // Two global circuits: G0 = protocol continue, G1 = d bit.
                detail::config_two_globals(ctx);
                if (!st.pasc_done) {
                    if (st.pasc_active && cp.has_pred) ctx.send(0);
                    if (lane.marker && lane.alive) {
                        ctx.send(0);
                        if (lane.a) ctx.send(1);
                    }
                }
                break;
            }
            case 2: {
                bool continue_beep = ctx.heard(0);
                bool d_bit = ctx.heard(1);
                if (!st.pasc_done) {
                    if (st.pend != d_bit) st.rel = st.pend > d_bit ? 1 : -1;
                    if (!continue_beep) st.pasc_done = 1;
                }
                // Counter marker handoff on the counter chain.
                detail::reset_singleton(ctx);
                if (!st.pasc_done && lane.marker) {
                    ctx.send((*ctx.pins)[ccp.s0]);                       // take marker
                    if (lane.alive && !lane.msb) ctx.send((*ctx.pins)[ccp.s1]);  // stay alive
                }
                if (!st.pasc_done && st.pasc_active && cp.has_pred) {
                    // Keep-alive noise on a pin off both chain axes.
                    for (int pin = 0; pin < kPinCount; ++pin) {
                        Axis ax = axis_of(pin_direction(pin));
                        if (ax != axis_of(d) && ax != axis_of(d_counter)) {
                            ctx.send(pin);
                            break;
                        }
                    }
                }
                break;
            }
            default: {
                bool take = lane.in_counter && ccp.has_pred && ctx.heard(ccp.p0);
                bool alive = lane.in_counter && ccp.has_pred && ctx.heard(ccp.p1);
                lane.marker = take;
                lane.alive = take && alive;
                detail::config_two_globals(ctx);
                if (!st.pasc_done) {
                    if (lane.marker && lane.alive) ctx.send(0);
                    if (st.pasc_active && cp.has_pred) ctx.send(1);
                }
                break;
            }
        }
    };
    w.run_phase(h, cap);

    PascCompareResult out;
    out.rounds = w.round() - r0;
    out.relation.resize(w.size());
    for (int i = 0; i < w.size(); ++i)
        out.relation[i] = w.agent_state<ChainOpsState>(i).rel;
    return out;
}

}  // namespace shapecon
