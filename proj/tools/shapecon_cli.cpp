#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "shapecon/oracle.hpp"
#include "shapecon/report.hpp"
#include "shapecon/runtime.hpp"
#include "shapecon/solver.hpp"
#include "shapecon/star_convex.hpp"

// Batch front end: solve instances (optionally cross-checked against the
// oracle), generate instance files, render structures to SVG, and run
// round-complexity bench sweeps.
//
// Exit codes: 0 success, 2 parse/validation error, 3 oracle mismatch,
// 4 round cap exhausted.

namespace {

using namespace shapecon;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty())
        std::cout << text;
    else
        write_file(out_path, text);
}

struct SolveOpts {
    std::string structure_path;
    std::string tree_text;
    std::string tree_file;
    std::string out_path;
    uint64_t seed = 0;
    long round_cap = kDefaultRoundCap;
    bool check = false;
    bool corrupt = false;
};

int cmd_solve(const SolveOpts& o) {
    std::string structure_text = read_file(o.structure_path);
    std::string tree_text = o.tree_text.empty() ? read_file(o.tree_file) : o.tree_text;
    while (!tree_text.empty() && (tree_text.back() == '\n' || tree_text.back() == '\r'))
        tree_text.pop_back();

    std::vector<GridPoint> pts = parse_structure_text(structure_text);
    SnowflakeTree tree = parse_snowflake(tree_text);
    World w(load_structure(pts));
    w.set_round_limit(o.round_cap);

    RunReport rep;
    rep.structure_file = o.structure_path;
    rep.tree_text = tree_text;
    rep.seed = o.seed;
    rep.input_hash = fnv1a(structure_text + "\n--\n" + tree_text);

    auto t0 = std::chrono::steady_clock::now();
    rep.result = solve(w, tree);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", wall);
    rep.wall_seconds = buf;

    if (o.corrupt) rep.result.placements[0].insert({9999, 9999});

    rep.verdict = "SKIPPED";
    if (o.check) {
        std::set<GridPoint> aset(pts.begin(), pts.end());
        Shape s = eval_tree(tree);
        bool ok = rep.result.k_max == static_cast<uint64_t>(oracle_kmax(aset, s));
        for (int r = 0; r < 6 && ok; ++r) {
            std::set<GridPoint> expected =
                rep.result.k_max >= 1
                    ? oracle_placements(aset, s, static_cast<int>(rep.result.k_max), r)
                    : std::set<GridPoint>{};
            ok = rep.result.placements[r] == expected;
        }
        rep.verdict = ok ? "PASS" : "FAIL";
    }

    emit(o.out_path, serialize_run_report(rep));
    return rep.verdict == "FAIL" ? 3 : 0;
}

struct GenerateOpts {
    int k = 6;
    std::string mask = "all";
    int n = 100;
    int max_nodes = 6;
    uint64_t seed = 0;
    std::string out_path;
};

int cmd_generate_lower_bound(const GenerateOpts& o) {
    std::vector<bool> mask(o.k, true);
    if (o.mask != "all") {
        if (static_cast<int>(o.mask.size()) != o.k)
            throw RangeError("mask must be \"all\" or a 0/1 string of length k");
        for (int i = 0; i < o.k; ++i) {
            if (o.mask[i] != '0' && o.mask[i] != '1')
                throw RangeError("mask must be \"all\" or a 0/1 string of length k");
            mask[i] = o.mask[i] == '1';
        }
    }
    LowerBoundInstance inst = gen_lower_bound(o.k, mask);
    std::ostringstream os;
    os << "# lower-bound k=" << o.k << " mask=" << o.mask << "\n";
    os << serialize_structure({inst.nodes.begin(), inst.nodes.end()});
    write_file(o.out_path, os.str());

    std::ostringstream es;
    es << "k " << o.k << "\n";
    for (GridPoint p : inst.expected) es << p.x << " " << p.y << "\n";
    write_file(o.out_path + ".expected", es.str());
    std::cout << "wrote " << inst.nodes.size() << " points to " << o.out_path << " (+.expected)\n";
    return 0;
}

int cmd_generate_random_structure(const GenerateOpts& o) {
    std::set<GridPoint> nodes = gen_random_structure(o.n, o.seed);
    std::ostringstream os;
    os << "# random-structure n=" << o.n << " seed=" << o.seed << "\n";
    os << serialize_structure({nodes.begin(), nodes.end()});
    write_file(o.out_path, os.str());
    std::cout << "wrote " << nodes.size() << " points to " << o.out_path << "\n";
    return 0;
}

int cmd_generate_random_tree(const GenerateOpts& o) {
    SnowflakeTree t = gen_random_snowflake(o.max_nodes, o.seed);
    write_file(o.out_path, serialize_snowflake(t) + "\n");
    std::cout << "wrote tree with " << t.size() << " nodes to " << o.out_path << "\n";
    return 0;
}

struct RenderOpts {
    std::string structure_path;
    std::string report_path;
    std::string out_path;
};

int cmd_render(const RenderOpts& o) {
    std::vector<GridPoint> pts = parse_structure_text(read_file(o.structure_path));
    load_structure(pts);  // validate connectivity before drawing
    std::array<std::set<GridPoint>, 6> placements;
    bool have_placements = false;
    if (!o.report_path.empty()) {
        std::string text = read_file(o.report_path);
        placements = text.rfind("run-report", 0) == 0 ? parse_run_report(text).result.placements
                                                      : parse_solve_result(text).placements;
        have_placements = true;
    }
    emit(o.out_path, render_svg(pts, have_placements ? &placements : nullptr));
    return 0;
}

struct BenchOpts {
    std::string suite;
    long min_size = -1;
    long max_size = -1;
    std::string out_path;
};

int cmd_bench(const BenchOpts& o) {
    long lo = o.min_size, hi = o.max_size;
    std::string tree_text;
    if (o.suite == "line") {
        if (lo < 0) lo = 16;
        if (hi < 0) hi = 4096;
        tree_text = "(line E 1)";
    } else if (o.suite == "triangle") {
        if (lo < 0) lo = 2;
        if (hi < 0) hi = 64;
        tree_text = "(tri E 1)";
    } else {
        if (lo < 0) lo = 2;
        if (hi < 0) hi = 16;
        // A U-shaped (non star convex) snowflake: linear-search regime.
        tree_text = "(union (sum E 1 (line NE 2)) (shift E 4 (sum E 1 (line NE 2))))";
    }
    SnowflakeTree tree = parse_snowflake(tree_text);
    Shape shape = eval_tree(tree);

    std::ostringstream os;
    os << "bench " << o.suite << "\n";
    os << "size rounds\n";
    std::vector<std::pair<double, double>> xy;
    for (long s = lo; s <= hi; s *= 2) {
        std::vector<GridPoint> pts;
        if (o.suite == "line") {
            for (long x = 0; x < s; ++x) pts.push_back({static_cast<int>(x), 0});
        } else {
            Shape big = scale_shape(shape, static_cast<int>(s));
            pts.assign(big.nodes.begin(), big.nodes.end());
        }
        World w(load_structure(pts));
        SolveResult res = solve(w, tree);
        os << s << " " << res.rounds_used << "\n";
        double x = o.suite == "line"       ? std::log2(static_cast<double>(s))
                   : o.suite == "triangle" ? std::pow(std::log2(static_cast<double>(s)), 2)
                                           : s * std::log2(static_cast<double>(s) + 2);
        xy.push_back({x, static_cast<double>(res.rounds_used)});
    }
    LinearFit fit = fit_linear(xy);
    char fit_line[96];
    std::snprintf(fit_line, sizeof fit_line, "fit slope %.4f intercept %.4f\n", fit.slope,
                  fit.intercept);
    os << fit_line;
    const char* model = o.suite == "line"       ? "log2 n"
                        : o.suite == "triangle" ? "log2^2 k"
                                                : "k*log2(k+2)";
    os << "summary: " << xy.size() << " runs, rounds fitted against " << model << "\n";
    emit(o.out_path, os.str());
    return 0;
}

struct CheckShapeOpts {
    std::string tree_text;
    std::string tree_file;
};

int cmd_check_shape(const CheckShapeOpts& o) {
    std::string tree_text = o.tree_text.empty() ? read_file(o.tree_file) : o.tree_text;
    while (!tree_text.empty() && (tree_text.back() == '\n' || tree_text.back() == '\r'))
        tree_text.pop_back();
    SnowflakeTree t = parse_snowflake(tree_text);
    Shape s = eval_tree(t);

    std::cout << "tree " << serialize_snowflake(t) << "\n";
    std::cout << "nodes " << s.nodes.size() << " edges " << s.edges.size() << " faces "
              << s.faces.size() << "\n";
    StarConvexity sc = is_star_convex(s);
    std::cout << "star-convex " << (sc.star_convex ? "yes" : "no") << " centers "
              << sc.centers.size() << "\n";
    char widths[128];
    std::snprintf(widths, sizeof widths, "width X %.6f Y %.6f Z %.6f\n", axis_width(s, Axis::X),
                  axis_width(s, Axis::Y), axis_width(s, Axis::Z));
    std::cout << widths;
    std::cout << "symmetry";
    for (int r = 1; r <= 5; ++r)
        std::cout << " r" << r << "=" << (is_r_symmetric(s, r).symmetric ? "yes" : "no");
    std::cout << "\n";
    if (sc.star_convex)
        std::cout << "decomposition " << serialize_snowflake(star_convex_decompose(s).tree)
                  << "\n";
    else
        std::cout << "decomposition none\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"shape containment solver for amoebot structures on the triangular grid"};
    app.require_subcommand(1);
    int rc = 0;

    SolveOpts so;
    CLI::App* solve = app.add_subcommand("solve", "solve an instance and print a run report");
    solve->add_option("structure", so.structure_path, "structure file (one \"x y\" per line)")
        ->required();
    auto* tree_opt = solve->add_option("--tree", so.tree_text, "shape tree DSL text");
    solve->add_option("--tree-file", so.tree_file, "file holding the shape tree DSL")
        ->excludes(tree_opt);
    solve->add_option("--seed", so.seed, "seed recorded in the report");
    solve->add_option("--round-cap", so.round_cap, "abort after this many rounds");
    solve->add_option("--out", so.out_path, "write the report here instead of stdout");
    solve->add_flag("--check", so.check, "cross-check against the brute-force oracle");
    solve->add_flag("--corrupt", so.corrupt, "deliberately corrupt the placements (test hook)")
        ->group("");
    solve->callback([&] {
        if (so.tree_text.empty() && so.tree_file.empty())
            throw CLI::RequiredError("--tree or --tree-file");
        rc = cmd_solve(so);
    });

    GenerateOpts go;
    CLI::App* gen = app.add_subcommand("generate", "write instance files");
    gen->require_subcommand(1);
    CLI::App* lb = gen->add_subcommand("lower-bound", "adversarial two-block family");
    lb->add_option("--k", go.k, "scale parameter")->required();
    lb->add_option("--mask", go.mask, "\"all\" or 0/1 string selecting occupied switches");
    lb->add_option("--out", go.out_path, "structure file path")->required();
    lb->callback([&] { rc = cmd_generate_lower_bound(go); });
    CLI::App* rs = gen->add_subcommand("random-structure", "connected random structure");
    rs->add_option("--n", go.n, "number of amoebots")->required();
    rs->add_option("--seed", go.seed, "rng seed");
    rs->add_option("--out", go.out_path, "structure file path")->required();
    rs->callback([&] { rc = cmd_generate_random_structure(go); });
    CLI::App* rt = gen->add_subcommand("random-tree", "random snowflake tree");
    rt->add_option("--max-nodes", go.max_nodes, "node budget");
    rt->add_option("--seed", go.seed, "rng seed");
    rt->add_option("--out", go.out_path, "tree file path")->required();
    rt->callback([&] { rc = cmd_generate_random_tree(go); });

    RenderOpts ro;
    CLI::App* render = app.add_subcommand("render", "draw a structure as SVG");
    render->add_option("structure", ro.structure_path, "structure file")->required();
    render->add_option("--report", ro.report_path, "overlay placements from a report");
    render->add_option("--out", ro.out_path, "write the SVG here instead of stdout");
    render->callback([&] { rc = cmd_render(ro); });

    BenchOpts bo;
    CLI::App* bench = app.add_subcommand("bench", "round-complexity sweeps");
    bench->add_option("--suite", bo.suite, "line | triangle | snowflake")
        ->required()
        ->check(CLI::IsMember({"line", "triangle", "snowflake"}));
    bench->add_option("--min", bo.min_size, "sweep start (doubling)");
    bench->add_option("--max", bo.max_size, "sweep end");
    bench->add_option("--out", bo.out_path, "write the table here instead of stdout");
    bench->callback([&] { rc = cmd_bench(bo); });

    CheckShapeOpts co;
    CLI::App* cs = app.add_subcommand("check-shape", "analyze a shape tree");
    cs->add_option("tree", co.tree_text, "shape tree DSL text");
    cs->add_option("--tree-file", co.tree_file, "file holding the shape tree DSL");
    cs->callback([&] {
        if (co.tree_text.empty() && co.tree_file.empty())
            throw CLI::RequiredError("tree or --tree-file");
        rc = cmd_check_shape(co);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const shapecon::RoundLimitExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return rc;
}
