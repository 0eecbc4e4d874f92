#pragma once

#include <array>
#include <cstring>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "shapecon/errors.hpp"
#include "shapecon/trigrid.hpp"

// The synchronous amoebot world: occupied nodes, pin configurations (2 pins
// per incident edge), circuits as connected components over partition sets,
// beep delivery in the next round, and constant-memory auditing.

namespace shapecon {

inline constexpr int kPinsPerEdge = 2;
inline constexpr int kPinCount = 6 * kPinsPerEdge;
inline constexpr int kMaxAgentMemory = 256;
inline constexpr long kDefaultRoundCap = 1'000'000;

// Pin (d, i): the i-th pin on the edge toward d. Both endpoints of an edge
// label its physical pins identically (shared compass).
inline constexpr int pin_id(Direction d, int i) { return static_cast<int>(d) * kPinsPerEdge + i; }
inline constexpr Direction pin_direction(int pin) {
    return static_cast<Direction>(pin / kPinsPerEdge);
}
inline constexpr int pin_index(int pin) { return pin % kPinsPerEdge; }

// Partition of an agent's pins, stored as pin -> set label. Any labeling is a
// valid partition (sets are the label preimages).
using PinConfiguration = std::array<int8_t, kPinCount>;

inline PinConfiguration singleton_pins() {
    PinConfiguration p;
    for (int i = 0; i < kPinCount; ++i) p[i] = static_cast<int8_t>(i);
    return p;
}

struct AmoebotStructure {
    std::vector<GridPoint> points;               // sorted, unique
    std::vector<std::array<int, 6>> neighbors;   // agent index per direction, -1 if none
    std::map<GridPoint, int> index;

    int size() const { return static_cast<int>(points.size()); }
    int find(GridPoint p) const {
        auto it = index.find(p);
        return it == index.end() ? -1 : it->second;
    }
};

inline AmoebotStructure load_structure(const std::vector<GridPoint>& pts) {
    if (pts.empty()) throw Disconnected("structure must be non-empty");
    AmoebotStructure a;
    for (GridPoint p : pts) {
        if (a.index.count(p))
            throw DuplicatePoint("duplicate point (" + std::to_string(p.x) + " " +
                                 std::to_string(p.y) + ")");
        a.index.emplace(p, 0);
    }
    for (auto& [p, idx] : a.index) {
        idx = static_cast<int>(a.points.size());
        a.points.push_back(p);
    }
    a.neighbors.assign(a.points.size(), {-1, -1, -1, -1, -1, -1});
    for (int i = 0; i < a.size(); ++i)
        for (Direction d : all_directions)
            a.neighbors[i][static_cast<int>(d)] = a.find(a.points[i] + unit_vector(d));

    std::vector<char> seen(a.points.size(), 0);
    std::deque<int> queue = {0};
    seen[0] = 1;
    size_t reached = 1;
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (int v : a.neighbors[u])
            if (v >= 0 && !seen[v]) {
                seen[v] = 1;
                ++reached;
                queue.push_back(v);
            }
    }
    if (reached != a.points.size()) {
        GridPoint inside = a.points[0], outside{};
        for (int i = 0; i < a.size(); ++i)
            if (!seen[i]) {
                outside = a.points[i];
                break;
            }
        throw Disconnected("structure is disconnected: no path between (" +
                           std::to_string(inside.x) + " " + std::to_string(inside.y) +
                           ") and (" + std::to_string(outside.x) + " " +
                           std::to_string(outside.y) + ")");
    }
    return a;
}

// Structure file: one "x y" pair per line, '#' comments.
inline std::vector<GridPoint> parse_structure_text(const std::string& text) {
    std::vector<GridPoint> pts;
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        long x, y;
        if (!(ls >> x)) {
            std::string rest;
            if (ls.clear(), ls >> rest)
                throw SyntaxError(lineno, "integer pair \"x y\"");
            continue;  // blank line
        }
        std::string trailing;
        if (!(ls >> y) || (ls >> trailing))
            throw SyntaxError(lineno, "integer pair \"x y\"");
        pts.push_back({static_cast<int>(x), static_cast<int>(y)});
    }
    return pts;
}

inline std::string serialize_structure(const std::vector<GridPoint>& pts) {
    std::ostringstream os;
    for (GridPoint p : pts) os << p.x << " " << p.y << "\n";
    return os.str();
}

struct TraceRecord {
    long round = 0;
    int circuits = 0;
    int beeping_circuits = 0;

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

// Per-agent view handed to the round handler. Handlers are identical across
// agents and may branch only on local neighborhood, received beeps, their own
// constant-size memory, and the global phase counter.
struct AgentCtx {
    long round = 0;
    std::array<bool, 6> has_neighbor{};
    std::array<bool, kPinCount> received{};  // per set label, beeps from last round

    std::vector<uint8_t>* memory = nullptr;
    PinConfiguration* pins = nullptr;
    std::array<bool, kPinCount>* beep = nullptr;   // per set label, send this round
    std::vector<uint64_t>* tap_sink = nullptr;     // observer-only, write-only

    template <class T>
    T& state() {
        static_assert(std::is_trivially_copyable_v<T>);
        if (memory->size() < sizeof(T)) memory->resize(sizeof(T), 0);
        return *reinterpret_cast<T*>(memory->data());
    }
    bool neighbor(Direction d) const { return has_neighbor[static_cast<int>(d)]; }
    bool heard(int label) const { return received[label]; }
    void join(int pin, int label) { (*pins)[pin] = static_cast<int8_t>(label); }
    void send(int label) { (*beep)[label] = true; }
    void tap(uint64_t v) { tap_sink->push_back(v); }
};

using RoundHandler = std::function<void(AgentCtx&)>;

namespace detail {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[a] = b;
    }
};

}  // namespace detail

class World {
  public:
    explicit World(AmoebotStructure a) : structure_(std::move(a)) {
        int n = structure_.size();
        memory_.resize(n);
        pins_.assign(n, singleton_pins());
        received_.assign(n, {});
        taps_.resize(n);
    }

    const AmoebotStructure& structure() const { return structure_; }
    int size() const { return structure_.size(); }
    long round() const { return round_; }
    const std::vector<TraceRecord>& trace() const { return trace_; }
    const std::vector<uint64_t>& tap(int agent) const { return taps_[agent]; }
    const std::vector<uint8_t>& agent_memory(int agent) const { return memory_[agent]; }
    const PinConfiguration& agent_pins(int agent) const { return pins_[agent]; }

    template <class T>
    const T& agent_state(int agent) const {
        static_assert(std::is_trivially_copyable_v<T>);
        static const T zero{};
        if (memory_[agent].size() < sizeof(T)) return zero;
        return *reinterpret_cast<const T*>(memory_[agent].data());
    }

    // Component id of an agent's partition set after the last step (for
    // cross-checks); id space is agent * kPinCount + label.
    int circuit_of(int agent, int label) const { return circuit_ids_[agent * kPinCount + label]; }
    int circuit_count() const { return circuit_count_; }

    int audit_state_size() const {
        size_t mx = 0;
        for (const auto& m : memory_) mx = std::max(mx, m.size());
        return static_cast<int>(mx);
    }

    // One fully synchronous round: run the handler everywhere with last
    // round's beep flags, rebuild circuits, deliver beeps for the next round.
    void step(const RoundHandler& handler) {
        if (round_limit_ >= 0 && round_ >= round_limit_)
            throw RoundLimitExceeded("round cap of " + std::to_string(round_limit_) +
                                     " rounds exhausted");
        int n = size();
        std::vector<std::array<bool, kPinCount>> beeps(n);
        for (int i = 0; i < n; ++i) {
            AgentCtx ctx;
            ctx.round = round_;
            for (int d = 0; d < 6; ++d) ctx.has_neighbor[d] = structure_.neighbors[i][d] >= 0;
            ctx.received = received_[i];
            ctx.memory = &memory_[i];
            ctx.pins = &pins_[i];
            ctx.beep = &beeps[i];
            ctx.tap_sink = &taps_[i];
            handler(ctx);
            if (memory_[i].size() > kMaxAgentMemory)
                throw HandlerStateOverflow("agent state grew to " +
                                           std::to_string(memory_[i].size()) + " bytes");
        }

        // Node space: (agent, set label); pins with equal labels are already
        // identified. External links join the facing pins' sets.
        detail::UnionFind uf(n * kPinCount);
        for (int i = 0; i < n; ++i) {
            for (int d = 0; d < 6; ++d) {
                int j = structure_.neighbors[i][d];
                if (j < i) continue;  // each edge once
                if (j < 0) continue;
                Direction dd = static_cast<Direction>(d);
                for (int k = 0; k < kPinsPerEdge; ++k)
                    uf.unite(i * kPinCount + pins_[i][pin_id(dd, k)],
                             j * kPinCount + pins_[j][pin_id(opposite(dd), k)]);
            }
        }

        std::vector<char> fired(n * kPinCount, 0);
        last_beeps_sent_ = 0;
        for (int i = 0; i < n; ++i)
            for (int label = 0; label < kPinCount; ++label)
                if (beeps[i][label]) {
                    ++last_beeps_sent_;
                    fired[uf.find(i * kPinCount + label)] = 1;
                }

        circuit_ids_.assign(n * kPinCount, -1);
        std::map<int, int> root_id;
        int beeping = 0;
        for (int i = 0; i < n; ++i) {
            received_[i] = {};
            for (int pin = 0; pin < kPinCount; ++pin) {
                int label = pins_[i][pin];
                int root = uf.find(i * kPinCount + label);
                auto [it, fresh] = root_id.emplace(root, static_cast<int>(root_id.size()));
                if (fresh && fired[root]) ++beeping;
                circuit_ids_[i * kPinCount + label] = it->second;
                received_[i][label] = fired[root];
            }
        }
        circuit_count_ = static_cast<int>(root_id.size());
        ++round_;
        trace_.push_back({round_, circuit_count_, beeping});
    }

    // Run until a quiet round (no agent sends any beep); exact round count.
    long run_phase(const RoundHandler& handler, long cap = kDefaultRoundCap) {
        long start = round_;
        while (true) {
            if (round_ - start >= cap)
                throw RoundLimitExceeded("phase exceeded " + std::to_string(cap) + " rounds");
            step(handler);
            if (last_beeps_sent_ == 0) return round_ - start;
        }
    }

    void reset_pins() { pins_.assign(size(), singleton_pins()); }

    // Hard budget on total rounds; -1 disables. Stepping past it throws.
    void set_round_limit(long limit) { round_limit_ = limit; }

  private:
    AmoebotStructure structure_;
    std::vector<std::vector<uint8_t>> memory_;
    std::vector<PinConfiguration> pins_;
    std::vector<std::array<bool, kPinCount>> received_;
    std::vector<std::vector<uint64_t>> taps_;
    std::vector<int> circuit_ids_;
    std::vector<TraceRecord> trace_;
    long round_ = 0;
    long round_limit_ = -1;
    int circuit_count_ = 0;
    long last_beeps_sent_ = 0;
};

}  // namespace shapecon
