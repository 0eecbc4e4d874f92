#include <sys/wait.h>

#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "shapecon/oracle.hpp"
#include "shapecon/report.hpp"
#include "shapecon/runtime.hpp"

using namespace shapecon;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "shapecon_cli_test";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

struct CliRun {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

CliRun run_cli(const std::string& args) {
    fs::path cap = work_dir() / "capture.txt";
    std::string cmd = std::string(CLI_BINARY) + " " + args + " > " + cap.string() + " 2>&1";
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    CliRun r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.output = slurp(cap);
    return r;
}

fs::path triangle_structure(int ell, const std::string& name) {
    std::ostringstream os;
    for (GridPoint p : make_triangle(Direction::E, ell).nodes) os << p.x << " " << p.y << "\n";
    fs::path f = work_dir() / name;
    spit(f, os.str());
    return f;
}

size_t count_occurrences(const std::string& hay, const std::string& needle) {
    size_t n = 0;
    for (size_t at = hay.find(needle); at != std::string::npos; at = hay.find(needle, at + 1)) ++n;
    return n;
}

}  // namespace

TEST_CASE("solve reports k_max on the size-6 triangle") {
    fs::path structure = triangle_structure(6, "tri6.structure");
    fs::path out = work_dir() / "tri6.report";
    CliRun r = run_cli("solve " + structure.string() + " --tree \"(tri E 1)\" --out " +
                       out.string());
    REQUIRE(r.exit_code == 0);
    RunReport rep = parse_run_report(slurp(out));
    CHECK(rep.result.k_max == 6);
    CHECK(rep.verdict == "SKIPPED");
    CHECK(rep.tree_text == "(tri E 1)");
    CHECK(rep.result.placements[0] == std::set<GridPoint>{{0, 0}});
    CHECK(rep.input_hash != 0);
}

TEST_CASE("solve --check passes on seeded random instances") {
    for (uint64_t seed : {3u, 11u, 29u}) {
        std::set<GridPoint> nodes = gen_random_structure(80, seed);
        std::ostringstream os;
        for (GridPoint p : nodes) os << p.x << " " << p.y << "\n";
        fs::path structure = work_dir() / ("rand" + std::to_string(seed) + ".structure");
        spit(structure, os.str());

        SnowflakeTree t;
        uint64_t ts = seed;
        do t = gen_random_snowflake(5, ts++);
        while (eval_tree(t).trivial());

        CliRun r = run_cli("solve " + structure.string() + " --tree \"" + serialize_snowflake(t) +
                           "\" --check --seed " + std::to_string(seed));
        INFO(serialize_snowflake(t) << "\n" << r.output);
        CHECK(r.exit_code == 0);
        CHECK(r.output.find("verdict PASS") != std::string::npos);
    }
}

TEST_CASE("malformed DSL exits 2 with the error position") {
    fs::path structure = triangle_structure(2, "tri2.structure");
    CliRun r = run_cli("solve " + structure.string() + " --tree \"(tri E\"");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("position") != std::string::npos);
}

TEST_CASE("corrupted placements never pass the check") {
    fs::path structure = triangle_structure(3, "tri3.structure");
    CliRun r = run_cli("solve " + structure.string() + " --tree \"(tri E 1)\" --check --corrupt");
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("verdict FAIL") != std::string::npos);
    CHECK(r.output.find("verdict PASS") == std::string::npos);
}

TEST_CASE("round cap exits 4") {
    fs::path structure = triangle_structure(6, "tri6cap.structure");
    CliRun r = run_cli("solve " + structure.string() + " --tree \"(tri E 1)\" --round-cap 50");
    CHECK(r.exit_code == 4);
}

TEST_CASE("generate lower-bound writes the 120-point family with a sidecar") {
    fs::path out = work_dir() / "lb6.structure";
    CliRun r = run_cli("generate lower-bound --k 6 --out " + out.string());
    REQUIRE(r.exit_code == 0);
    std::vector<GridPoint> pts = parse_structure_text(slurp(out));
    CHECK(pts.size() == 120);
    CHECK_NOTHROW(load_structure(pts));

    std::istringstream es(slurp(out.string() + ".expected"));
    std::string key;
    int k = 0;
    REQUIRE((es >> key >> k));
    CHECK(key == "k");
    CHECK(k == 6);
    std::set<GridPoint> expected;
    long x, y;
    while (es >> x >> y) expected.insert({static_cast<int>(x), static_cast<int>(y)});
    std::set<GridPoint> want;
    for (int i = 0; i < 6; ++i) want.insert({0, i});
    CHECK(expected == want);
}

TEST_CASE("generated random structures and trees reload") {
    fs::path sf = work_dir() / "gen.structure";
    CliRun r = run_cli("generate random-structure --n 200 --seed 7 --out " + sf.string());
    REQUIRE(r.exit_code == 0);
    std::vector<GridPoint> pts = parse_structure_text(slurp(sf));
    CHECK(pts.size() == 200);
    CHECK_NOTHROW(load_structure(pts));

    fs::path tf = work_dir() / "gen.tree";
    r = run_cli("generate random-tree --max-nodes 6 --seed 7 --out " + tf.string());
    REQUIRE(r.exit_code == 0);
    std::string text = slurp(tf);
    CHECK_NOTHROW(validate_tree(parse_snowflake(text)));
}

TEST_CASE("render draws the triangle deterministically") {
    fs::path structure = triangle_structure(2, "tri2r.structure");
    fs::path svg1 = work_dir() / "a.svg";
    fs::path svg2 = work_dir() / "b.svg";
    REQUIRE(run_cli("render " + structure.string() + " --out " + svg1.string()).exit_code == 0);
    REQUIRE(run_cli("render " + structure.string() + " --out " + svg2.string()).exit_code == 0);
    std::string svg = slurp(svg1);
    CHECK(svg == slurp(svg2));  // byte-identical
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(count_occurrences(svg, "class=\"node\"") == 6);
    CHECK(count_occurrences(svg, "class=\"edge\"") == 9);
    CHECK(count_occurrences(svg, "class=\"placement") == 0);
}

TEST_CASE("render overlays placement rings from a report") {
    fs::path structure = triangle_structure(6, "tri6r.structure");
    fs::path report = work_dir() / "tri6r.report";
    REQUIRE(run_cli("solve " + structure.string() + " --tree \"(tri E 1)\" --out " +
                    report.string())
                .exit_code == 0);
    CliRun r = run_cli("render " + structure.string() + " --report " + report.string());
    REQUIRE(r.exit_code == 0);
    // One origin per rotation r0/r2/r4 at k_max = 6.
    CHECK(count_occurrences(r.output, "class=\"placement") == 3);
}

TEST_CASE("bench handles sweeps and the empty sweep") {
    CliRun r = run_cli("bench --suite line --min 16 --max 64");
    REQUIRE(r.exit_code == 0);
    std::istringstream is(r.output);
    std::string line;
    REQUIRE(std::getline(is, line));
    CHECK(line == "bench line");
    REQUIRE(std::getline(is, line));
    CHECK(line == "size rounds");
    long prev = -1;
    int rows = 0;
    while (std::getline(is, line) && line.rfind("fit ", 0) != 0) {
        std::istringstream ls(line);
        long size, rounds;
        REQUIRE((ls >> size >> rounds));
        CHECK(rounds > prev);  // monotone in n
        prev = rounds;
        ++rows;
    }
    CHECK(rows == 3);
    CHECK(line.rfind("fit slope ", 0) == 0);

    r = run_cli("bench --suite line --min 16 --max 8");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("size rounds\nfit ") != std::string::npos);
}

TEST_CASE("check-shape analyzes a tree") {
    CliRun r = run_cli("check-shape \"(sum NE 2 (line E 3))\"");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("star-convex yes") != std::string::npos);
    CHECK(r.output.find("nodes 12") != std::string::npos);
    CHECK(r.output.find("decomposition (") != std::string::npos);

    r = run_cli("check-shape \"(line E 99999999999)\"");
    CHECK(r.exit_code == 2);
}

TEST_CASE("run reports round-trip losslessly") {
    RunReport rep;
    rep.structure_file = "some/dir/instance.structure";
    rep.tree_text = "(union (line E 2) (tri NW 1))";
    rep.seed = 42;
    rep.input_hash = fnv1a("payload");
    rep.verdict = "PASS";
    rep.wall_seconds = "0.123456";
    rep.result.k_max = 3;
    rep.result.rounds_used = 777;
    rep.result.search_trace = {{1, true}, {4, false}, {3, true}};
    rep.result.placements[0] = {{0, 0}, {2, -1}};
    rep.result.placements[5] = {{-3, 4}};

    std::string text = serialize_run_report(rep);
    RunReport back = parse_run_report(text);
    CHECK(back == rep);
    CHECK(serialize_run_report(back) == text);

    CHECK_THROWS_AS(parse_run_report("run-report v2\n"), SyntaxError);
    CHECK_THROWS_AS(parse_run_report("garbage"), SyntaxError);
}
