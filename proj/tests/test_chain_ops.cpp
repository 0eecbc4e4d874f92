#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "shapecon/chain_ops.hpp"
#include "shapecon/oracle.hpp"
#include "shapecon/shape.hpp"

using namespace shapecon;

namespace {

World line_world(int n) {
    std::vector<GridPoint> pts;
    for (int i = 0; i < n; ++i) pts.push_back({i, 0});
    return World(load_structure(pts));
}

uint64_t stream_value(const std::vector<int>& bits) {
    uint64_t v = 0;
    for (size_t i = 0; i < bits.size(); ++i) v |= uint64_t{static_cast<uint64_t>(bits[i])} << i;
    return v;
}

}  // namespace

TEST_CASE("build_segments") {
    World w = line_world(7);
    auto chains = build_segments(w, Direction::E);
    REQUIRE(chains.size() == 1);
    CHECK(chains[0].size() == 7);
    CHECK(w.structure().points[chains[0][0]] == GridPoint{6, 0});  // easternmost start
    CHECK(w.structure().points[chains[0][6]] == GridPoint{0, 0});

    Shape tri = make_triangle(Direction::E, 2);
    World wt(load_structure({tri.nodes.begin(), tri.nodes.end()}));
    auto tc = build_segments(wt, Direction::E);
    std::multiset<size_t> sizes;
    for (auto& c : tc) sizes.insert(c.size());
    CHECK(sizes == std::multiset<size_t>{1, 2, 3});

    // Plus sign: NE segments per column.
    std::vector<GridPoint> plus;
    for (int i = -2; i <= 2; ++i) plus.push_back({i, 0});
    for (int j = -2; j <= 2; ++j)
        if (j != 0) plus.push_back({0, j});
    World wp(load_structure(plus));
    auto pc = build_segments(wp, Direction::NE);
    std::multiset<size_t> psizes;
    for (auto& c : pc) psizes.insert(c.size());
    CHECK(psizes == std::multiset<size_t>{1, 1, 1, 1, 5});
}

TEST_CASE("stream arithmetic") {
    StreamAdd add;
    std::vector<int> sum;
    int a = 5, b = 3;
    for (int i = 0; i < 4; ++i) sum.push_back(add.step((a >> i) & 1, (b >> i) & 1));
    CHECK(stream_value(sum) == 8);

    StreamCompare eq;
    for (int i = 0; i < 6; ++i) eq.step((37 >> i) & 1, (37 >> i) & 1);
    CHECK(eq.rel == 0);

    std::mt19937 rng(17);
    for (int t = 0; t < 256; ++t) {
        uint32_t x = rng() & 0xffff, y = rng() & 0xffff;
        StreamAdd sa;
        StreamSub ss;
        StreamCompare sc;
        uint32_t sum_bits = 0, dif_bits = 0;
        for (int i = 0; i < 16; ++i) {
            sum_bits |= static_cast<uint32_t>(sa.step((x >> i) & 1, (y >> i) & 1)) << i;
            dif_bits |= static_cast<uint32_t>(ss.step((x >> i) & 1, (y >> i) & 1)) << i;
            sc.step((x >> i) & 1, (y >> i) & 1);
        }
        CHECK(sum_bits == ((x + y) & 0xffff));
        CHECK(dif_bits == ((x - y) & 0xffff));
        CHECK(ss.borrow == (x < y));
        CHECK(sc.rel == (x == y ? 0 : x > y ? 1 : -1));
    }
}

TEST_CASE("counter op examples") {
    World w = line_world(8);
    Direction d = Direction::E;

    seed_counter(w, d, 13, 0);
    seed_counter(w, d, 9, 1);
    counter_add(w, d);
    CHECK(read_counter(w, d, 0) == 22);

    seed_counter(w, d, 13, 0);
    counter_sub(w, d);
    CHECK(read_counter(w, d, 0) == 4);

    seed_counter(w, d, 13, 0);
    counter_mul(w, d);
    CHECK(read_counter(w, d, 0) == 117);

    seed_counter(w, d, 13, 0);
    counter_div(w, d);
    CHECK(read_counter(w, d, 0) == 1);

    seed_counter(w, d, 13, 0);
    counter_mod(w, d);
    CHECK(read_counter(w, d, 0) == 4);

    seed_counter(w, d, 13, 0);
    seed_counter(w, d, 0, 1);
    counter_add(w, d);
    CHECK(read_counter(w, d, 0) == 13);

    seed_counter(w, d, 13, 0);
    seed_counter(w, d, 1, 1);
    counter_mul(w, d);
    CHECK(read_counter(w, d, 0) == 13);

    seed_counter(w, d, 13, 0);
    seed_counter(w, d, 0, 1);
    CHECK_THROWS_AS(counter_div(w, d), DivideByZero);
}

TEST_CASE("counter ops match host arithmetic with round budgets") {
    const int m = 16;
    World w = line_world(m);
    Direction d = Direction::E;
    std::mt19937 rng(321);
    std::uniform_int_distribution<uint32_t> val(0, (1u << m) - 1);

    for (int t = 0; t < 120; ++t) {
        uint32_t a = val(rng), b = val(rng);
        uint32_t mask = (1u << m) - 1;

        seed_counter(w, d, a, 0);
        seed_counter(w, d, b, 1);
        auto r = counter_add(w, d);
        CHECK(read_counter(w, d, 0) == ((a + b) & mask));
        CHECK(r.overflow == (static_cast<uint64_t>(a) + b > mask));
        CHECK(r.rounds <= 8);

        seed_counter(w, d, a, 0);
        r = counter_sub(w, d);
        CHECK(read_counter(w, d, 0) == ((a - b) & mask));
        CHECK(r.overflow == (a < b));
        CHECK(r.rounds <= 8);

        seed_counter(w, d, a, 0);
        r = counter_compare(w, d);
        CHECK(r.relation == (a == b ? 0 : a > b ? 1 : -1));
        CHECK(r.rounds <= 8);

        seed_counter(w, d, a, 0);
        r = counter_double(w, d);
        CHECK(read_counter(w, d, 0) == ((a << 1) & mask));
        CHECK(r.overflow == (a >= (1u << (m - 1))));
        CHECK(r.rounds <= 8);

        seed_counter(w, d, a, 0);
        r = counter_halve(w, d);
        CHECK(read_counter(w, d, 0) == (a >> 1));
        CHECK(r.rounds <= 8);

        seed_counter(w, d, a, 0);
        seed_counter(w, d, b, 1);
        r = counter_mul(w, d);
        CHECK(read_counter(w, d, 0) == ((static_cast<uint64_t>(a) * b) & mask));
        CHECK(r.overflow == (static_cast<uint64_t>(a) * b > mask));
        CHECK(r.rounds <= 8 * m);

        if (b != 0) {
            seed_counter(w, d, a, 0);
            r = counter_div(w, d);
            CHECK(read_counter(w, d, 0) == a / b);
            CHECK(r.rounds <= 8 * m);

            seed_counter(w, d, a, 0);
            r = counter_mod(w, d);
            CHECK(read_counter(w, d, 0) == a % b);
            CHECK(r.rounds <= 8 * m);
        }
    }
}

TEST_CASE("counter algebraic identities") {
    const int m = 12;
    World w = line_world(m);
    Direction d = Direction::E;
    std::mt19937 rng(55);
    for (int t = 0; t < 50; ++t) {
        uint32_t a = rng() & 0x3ff, b = rng() & 0x3ff;
        if (a < b) std::swap(a, b);
        seed_counter(w, d, a, 0);
        seed_counter(w, d, b, 1);
        counter_add(w, d);
        counter_sub(w, d);
        CHECK(read_counter(w, d, 0) == a);

        seed_counter(w, d, a, 0);
        counter_double(w, d);
        counter_halve(w, d);
        CHECK(read_counter(w, d, 0) == a);

        seed_counter(w, d, a, 0);
        counter_halve(w, d);
        counter_double(w, d);
        CHECK(read_counter(w, d, 0) == a - (a & 1));
    }
}

TEST_CASE("msb discovery") {
    const int m = 14;
    World w = line_world(m);
    Direction d = Direction::E;
    auto chains = build_segments(w, d);
    REQUIRE(chains.size() == 1);
    std::mt19937 rng(77);
    for (int t = 0; t < 200; ++t) {
        uint32_t v = t == 0 ? 0 : rng() & ((1u << m) - 1);
        seed_counter(w, d, v, 0);
        counter_mark_msb(w, d);
        int pos = -1, count = 0;
        for (size_t i = 0; i < chains[0].size(); ++i) {
            const auto& lane =
                w.agent_state<ChainOpsState>(chains[0][i]).lane[static_cast<int>(axis_of(d))];
            if (lane.msb) {
                pos = static_cast<int>(i);
                ++count;
            }
        }
        REQUIRE(count == 1);
        int expect = 0;
        for (int i = 0; i < m; ++i)
            if ((v >> i) & 1) expect = i;
        CHECK(pos == expect);
    }
}

TEST_CASE("pasc computes chain indices") {
    for (int m = 1; m <= 64; ++m) {
        World w = line_world(m);
        auto chains = build_segments(w, Direction::E);
        REQUIRE(chains.size() == 1);
        PascResult res = pasc(w, Direction::E);
        int expected_iters = 0;
        while ((1 << expected_iters) < m) ++expected_iters;
        CHECK(res.iterations == expected_iters);
        for (size_t i = 0; i < chains[0].size(); ++i) {
            CHECK(stream_value(res.streams[chains[0][i]]) == i);
            if (m >= 2) CHECK(res.streams[chains[0][i]].size() == static_cast<size_t>(expected_iters));
        }
        CHECK(res.rounds <= 3 * expected_iters + 4);
    }
}

TEST_CASE("simultaneous pasc equals solo runs") {
    // Rows of different lengths stacked via NE steps; chains run per row.
    std::vector<GridPoint> pts;
    std::vector<int> lens = {3, 7, 1, 12, 5};
    for (int row = 0; row < static_cast<int>(lens.size()); ++row)
        for (int i = 0; i < lens[row]; ++i) pts.push_back({i - row, row});
    World w(load_structure(pts));
    PascResult joint = pasc(w, Direction::E);
    auto chains = build_segments(w, Direction::E);

    for (auto& chain : chains) {
        // Solo run on an isolated copy of this row.
        World solo = line_world(static_cast<int>(chain.size()));
        PascResult sres = pasc(solo, Direction::E);
        auto schains = build_segments(solo, Direction::E);
        REQUIRE(schains.size() == 1);
        for (size_t i = 0; i < chain.size(); ++i)
            CHECK(stream_value(joint.streams[chain[i]]) ==
                  stream_value(sres.streams[schains[0][i]]));
    }
}

TEST_CASE("pasc_compare against a counter") {
    auto relations_for = [](int m, uint64_t dval) {
        World w = line_world(m);
        seed_counter(w, Direction::E, dval, 0);
        auto res = pasc_compare(w, Direction::E, Direction::E);
        auto chains = build_segments(w, Direction::E);
        std::vector<int> rel(m);
        for (size_t i = 0; i < chains[0].size(); ++i) rel[i] = res.relation[chains[0][i]];
        return rel;
    };

    CHECK(relations_for(6, 3) == std::vector<int>{-1, -1, -1, 0, 1, 1});
    CHECK(relations_for(6, 0) == std::vector<int>{0, 1, 1, 1, 1, 1});
    CHECK(relations_for(16, 100) == std::vector<int>(16, -1));

    std::mt19937 rng(404);
    for (int t = 0; t < 25; ++t) {
        int m = std::uniform_int_distribution<int>(2, 24)(rng);
        // The counter lives on the same m cells, so its value needs m bits.
        uint64_t cap = std::min<uint64_t>(2 * m, (uint64_t{1} << m) - 1);
        uint64_t dv = std::uniform_int_distribution<uint64_t>(0, cap)(rng);
        auto rel = relations_for(m, dv);
        for (int i = 0; i < m; ++i) {
            int expect = static_cast<uint64_t>(i) == dv ? 0 : static_cast<uint64_t>(i) < dv ? -1 : 1;
            CHECK(rel[i] == expect);
        }
    }
}

TEST_CASE("pasc_compare round count scales with the smaller of d and m") {
    World big = line_world(64);
    seed_counter(big, Direction::E, 2, 0);
    auto res = pasc_compare(big, Direction::E, Direction::E);
    // Cutoff: the counter dies after two bits regardless of the chain length.
    CHECK(res.rounds <= 24);
}
