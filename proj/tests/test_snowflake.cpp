#include <catch2/catch_amalgamated.hpp>

#include "shapecon/snowflake.hpp"

using namespace shapecon;

TEST_CASE("parse leaves") {
    SnowflakeTree t = parse_snowflake("(line E 3)");
    REQUIRE(t.size() == 1);
    CHECK(t.at(t.root).kind == NodeKind::Line);
    CHECK(t.at(t.root).d == Direction::E);
    CHECK(t.at(t.root).len == 3);

    SnowflakeTree tri = parse_snowflake("(tri SW 2)");
    CHECK(tri.at(tri.root).kind == NodeKind::Tri);
    CHECK(tri.at(tri.root).d == Direction::SW);
}

TEST_CASE("parse nested with comments and whitespace") {
    SnowflakeTree t = parse_snowflake(
        "# a rhombus shifted east\n"
        "(shift E 2  # distance two\n"
        "  (sum NE 1 (line E 1)))\n");
    CHECK(t.at(t.root).kind == NodeKind::Shift);
    CHECK(t.at(t.root).len == 2);
    const SnowflakeNode& child = t.at(t.at(t.root).children[0]);
    CHECK(child.kind == NodeKind::Sum);
}

TEST_CASE("serialize then parse round-trips") {
    for (const char* text : {
             "(line E 0)",
             "(tri NW 5)",
             "(union (line E 2) (line NE 2) (tri W 1))",
             "(sum NE 2 (line E 1))",
             "(shift E 2 (sum NE 1 (line E 1)))",
         }) {
        SnowflakeTree t = parse_snowflake(text);
        std::string ser = serialize_snowflake(t);
        CHECK(ser == text);
        CHECK(serialize_snowflake(parse_snowflake(ser)) == ser);
    }
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(parse_snowflake("(line E 3"), SyntaxError);
    CHECK_THROWS_AS(parse_snowflake("(circle E 3)"), SyntaxError);
    CHECK_THROWS_AS(parse_snowflake("(line Q 3)"), SyntaxError);
    CHECK_THROWS_AS(parse_snowflake("(line E x)"), SyntaxError);
    CHECK_THROWS_AS(parse_snowflake("(line E 3) junk"), SyntaxError);
    CHECK_THROWS_AS(parse_snowflake("(union (line E 1))"), ArityError);
    CHECK_THROWS_AS(parse_snowflake("(tri E 0)"), RangeError);
    CHECK_THROWS_AS(parse_snowflake("(line E 1048577)"), RangeError);
    CHECK_THROWS_AS(parse_snowflake("(sum E 0 (line E 1))"), RangeError);

    try {
        parse_snowflake("(line E ?)");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.position == 8);
    }
}

TEST_CASE("shift width constraint") {
    CHECK_THROWS_AS(parse_snowflake("(shift E 1 (line NE 2))"), InvalidShift);
    CHECK_THROWS_AS(parse_snowflake("(shift E 1 (tri E 3))"), InvalidShift);
    CHECK_NOTHROW(parse_snowflake("(shift E 1 (line E 2))"));
    CHECK_NOTHROW(parse_snowflake("(shift NE 1 (sum NE 1 (line E 1)))"));
}

TEST_CASE("eval_tree") {
    CHECK(eval_tree(parse_snowflake("(line E 2)")) == make_line(Direction::E, 2));
    CHECK(eval_tree(parse_snowflake("(tri W 2)")) == make_triangle(Direction::W, 2));
    CHECK(eval_tree(parse_snowflake("(sum NE 1 (line E 1))")) ==
          minkowski_with_line(make_line(Direction::E, 1), Direction::NE, 1));

    Shape rhombus = minkowski_with_line(make_line(Direction::E, 1), Direction::NE, 1);
    Shape expect = union_shapes(translate_shape(rhombus, {2, 0}), make_line(Direction::E, 2));
    CHECK(eval_tree(parse_snowflake("(shift E 2 (sum NE 1 (line E 1)))")) == expect);

    Shape u = eval_tree(parse_snowflake("(union (line E 2) (line NE 2))"));
    CHECK(u == union_shapes(make_line(Direction::E, 2), make_line(Direction::NE, 2)));
}

TEST_CASE("evaluated trees satisfy shape invariants") {
    for (const char* text : {
             "(union (tri E 2) (line SW 3))",
             "(sum W 2 (sum NE 1 (line E 2)))",
             "(shift NE 3 (sum NE 2 (line E 1)))",
         }) {
        Shape s = eval_tree(parse_snowflake(text));
        CHECK(shape_valid(s));
    }
}

TEST_CASE("rotate_tree rotates the evaluated shape") {
    SnowflakeTree t = parse_snowflake("(union (tri E 2) (sum NE 1 (line E 3)))");
    for (int r = 0; r < 6; ++r)
        CHECK(eval_tree(rotate_tree(t, r)) == rotate_shape(eval_tree(t), r));
}
