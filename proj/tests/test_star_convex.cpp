#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "shapecon/star_convex.hpp"

using namespace shapecon;

namespace {

// Two collinear edges plus a bent tail: hole-free but no valid center.
Shape two_arm_shape() {
    Shape s = make_line(Direction::E, 2);
    s.add_edge({0, -1}, Direction::NE);
    s.add_edge({-1, -1}, Direction::E);
    return s;
}

Shape hexagon_ring() {
    Shape s;
    GridPoint cur{0, 0};
    for (Direction d : {Direction::E, Direction::NE, Direction::NW, Direction::W, Direction::SW,
                        Direction::SE}) {
        s.add_edge(make_edge(cur, d));
        cur = cur + unit_vector(d);
    }
    return s;
}

bool brute_force_fits(const Shape& s1, const Shape& s2) {
    HexBounds b1 = hex_bounds(s1.nodes), b2 = hex_bounds(s2.nodes);
    for (int tx = b2.xmin - b1.xmax; tx <= b2.xmax - b1.xmin; ++tx)
        for (int ty = b2.ymin - b1.ymax; ty <= b2.ymax - b1.ymin; ++ty)
            if (translate_shape(s1, {tx, ty}).subset_of(s2)) return true;
    return false;
}

Shape random_convex(std::mt19937& rng, int max_side) {
    std::uniform_int_distribution<int> coord(-max_side, max_side);
    std::set<GridPoint> pts;
    int count = std::uniform_int_distribution<int>(1, 5)(rng);
    for (int i = 0; i < count; ++i) pts.insert({coord(rng), coord(rng)});
    return convex_hull_shape(pts);
}

}  // namespace

TEST_CASE("hole detection") {
    CHECK(is_hole_free(make_triangle(Direction::E, 3)));
    CHECK(is_hole_free(make_line(Direction::NE, 4)));
    CHECK(is_hole_free(two_arm_shape()));
    CHECK(is_hole_free(Shape::single_node()));
    CHECK_FALSE(is_hole_free(hexagon_ring()));

    // Filling the ring restores hole-freedom.
    Shape filled = convex_shape_from_sides({1, 1, 1, 1, 1, 1});
    CHECK(is_hole_free(filled));
}

TEST_CASE("star convexity") {
    auto tri = is_star_convex(make_triangle(Direction::E, 2));
    CHECK(tri.star_convex);
    CHECK(tri.centers == make_triangle(Direction::E, 2).nodes);

    auto node = is_star_convex(Shape::single_node());
    CHECK(node.star_convex);
    CHECK(node.centers == std::set<GridPoint>{{0, 0}});

    CHECK_FALSE(is_star_convex(two_arm_shape()).star_convex);
    CHECK_FALSE(is_star_convex(hexagon_ring()).star_convex);

    // Three spikes out of the origin: star convex with the origin as the only
    // junction center.
    Shape spikes = union_shapes(union_shapes(make_line(Direction::E, 2), make_line(Direction::NW, 2)),
                                make_line(Direction::SW, 2));
    auto sp = is_star_convex(spikes);
    CHECK(sp.star_convex);
    CHECK(sp.centers.count({0, 0}) == 1);
}

TEST_CASE("two-direction representation") {
    std::mt19937 rng(42);
    std::uniform_int_distribution<int> coord(-20, 20);
    for (int i = 0; i < 200; ++i) {
        GridPoint v{coord(rng), coord(rng)};
        for (int rot : {1, -1}) {
            Direction d1, d2;
            long l1, l2;
            REQUIRE(two_direction_rep(v, rot, d1, l1, d2, l2));
            CHECK(d2 == rotate_direction(d1, rot));
            CHECK(l1 >= 0);
            CHECK(l2 >= 0);
            GridPoint back = static_cast<int>(l1) * unit_vector(d1) +
                             static_cast<int>(l2) * unit_vector(d2);
            CHECK(back == v);
        }
    }
}

TEST_CASE("star convex decomposition reassembles the shape") {
    std::vector<Shape> fixtures = {
        make_triangle(Direction::E, 2),
        make_triangle(Direction::SW, 3),
        make_line(Direction::E, 4),
        Shape::single_node(),
        minkowski_with_line(make_line(Direction::E, 2), Direction::NE, 1),
        convex_shape_from_sides({1, 1, 1, 1, 1, 1}),
        convex_shape_from_sides({2, 1, 2, 1, 2, 1}),
        union_shapes(union_shapes(make_line(Direction::E, 2), make_line(Direction::NW, 2)),
                     make_line(Direction::SW, 2)),
    };
    for (Shape& s : fixtures) {
        // Re-anchor at a center so decomposition applies.
        auto sc = is_star_convex(s);
        REQUIRE(sc.star_convex);
        s = translate_shape(s, GridPoint{0, 0} - *sc.centers.begin());

        auto dec = star_convex_decompose(s);
        Shape u;
        for (const Shape& part : dec.constituents) {
            CHECK(part.subset_of(s));
            u = union_shapes(u, part);
        }
        CHECK(u == s);
        CHECK(eval_tree(dec.tree) == s);
        CHECK(dec.constituents.size() <= 7 * s.nodes.size());
    }
}

TEST_CASE("decomposition rejects bad inputs") {
    CHECK_THROWS_AS(star_convex_decompose(two_arm_shape()), NotStarConvex);
    // Star convex, but the origin is not a node.
    Shape off = translate_shape(make_triangle(Direction::E, 2), {10, 10});
    CHECK_THROWS_AS(star_convex_decompose(off), NotStarConvex);
}

TEST_CASE("convexity and sides") {
    CHECK(is_convex(make_triangle(Direction::E, 3)));
    CHECK(is_convex(Shape::single_node()));
    CHECK(is_convex(make_line(Direction::NE, 3)));
    CHECK_FALSE(is_convex(two_arm_shape()));
    CHECK_FALSE(is_convex(hexagon_ring()));

    ConvexSides t = convex_sides(make_triangle(Direction::E, 3));
    CHECK(t == ConvexSides{0, 3, 0, 3, 0, 3});
    CHECK(t.closed());

    ConvexSides n = convex_sides(Shape::single_node());
    CHECK(n == ConvexSides{0, 0, 0, 0, 0, 0});

    ConvexSides hexa{1, 1, 1, 1, 1, 1};
    CHECK(convex_sides(convex_shape_from_sides(hexa)) == hexa);

    CHECK_THROWS_AS(convex_sides(two_arm_shape()), NotConvex);
    CHECK_THROWS_AS(convex_shape_from_sides({1, 0, 0, 0, 0, 0}), RangeError);
}

TEST_CASE("sides round-trip on random convex shapes") {
    std::mt19937 rng(7);
    for (int i = 0; i < 40; ++i) {
        Shape s = random_convex(rng, 4);
        REQUIRE(is_convex(s));
        ConvexSides cs = convex_sides(s);
        CHECK(cs.closed());
        CHECK(cs.nonneg());
        Shape back = convex_shape_from_sides(cs);
        HexBounds b = hex_bounds(s.nodes);
        // from_sides anchors the bottom-left corner at the origin.
        CHECK(translate_shape(back, {b.smin - b.ymin, b.ymin}) == s);
    }
}

TEST_CASE("convex_fits matches brute force") {
    std::mt19937 rng(1234);
    for (int i = 0; i < 60; ++i) {
        Shape s1 = random_convex(rng, 3);
        Shape s2 = random_convex(rng, 4);
        ConvexSides c1 = convex_sides(s1), c2 = convex_sides(s2);
        CHECK(convex_fits(c1, c2) == brute_force_fits(s1, s2));
        CHECK(convex_fits(c2, c1) == brute_force_fits(s2, s1));
    }
    // Exhaustive over small tuples: every fit decision agrees with search.
    std::vector<ConvexSides> tuples;
    for (int a = 0; a <= 2; ++a)
        for (int b = 0; b <= 2; ++b)
            for (int c = 0; c <= 2; ++c)
                for (int d = 0; d <= 2; ++d) {
                    long e = a + b - d, f = b + c - e;
                    ConvexSides cs{a, b, c, d, e, f};
                    if (cs.nonneg() && cs.closed()) tuples.push_back(cs);
                }
    for (const ConvexSides& c1 : tuples)
        for (const ConvexSides& c2 : tuples)
            CHECK(convex_fits(c1, c2) ==
                  brute_force_fits(convex_shape_from_sides(c1), convex_shape_from_sides(c2)));
}

TEST_CASE("rotational symmetry") {
    Shape rhombus = minkowski_with_line(make_line(Direction::E, 1), Direction::NE, 1);
    CHECK(is_r_symmetric(rhombus, 3).symmetric);
    CHECK_FALSE(is_r_symmetric(rhombus, 1).symmetric);
    CHECK_FALSE(is_r_symmetric(rhombus, 2).symmetric);

    Shape tri = make_triangle(Direction::E, 1);
    CHECK(is_r_symmetric(tri, 2).symmetric);
    CHECK_FALSE(is_r_symmetric(tri, 3).symmetric);

    Shape hexa = convex_shape_from_sides({1, 1, 1, 1, 1, 1});
    for (int r = 0; r < 6; ++r) CHECK(is_r_symmetric(hexa, r).symmetric);

    // r = 0 is trivially symmetric, and symmetry is invariant under translation.
    Shape moved = translate_shape(two_arm_shape(), {5, -3});
    CHECK(is_r_symmetric(moved, 0).symmetric);
    CHECK_FALSE(is_r_symmetric(moved, 2).symmetric);
}
