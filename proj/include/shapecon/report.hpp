#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "shapecon/solver.hpp"

// Artifact plumbing for the CLI: run reports, SVG rendering of structures
// with placement overlays, and least-squares fitting for the bench tables.

namespace shapecon {

inline uint64_t fnv1a(std::string_view s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

struct RunReport {
    std::string structure_file;
    std::string tree_text;
    uint64_t seed = 0;
    uint64_t input_hash = 0;
    std::string verdict;       // PASS | FAIL | SKIPPED
    std::string wall_seconds;  // fixed-precision text so round-trips are exact
    SolveResult result;

    friend bool operator==(const RunReport& a, const RunReport& b) {
        return a.structure_file == b.structure_file && a.tree_text == b.tree_text &&
               a.seed == b.seed && a.input_hash == b.input_hash && a.verdict == b.verdict &&
               a.wall_seconds == b.wall_seconds && a.result.k_max == b.result.k_max &&
               a.result.placements == b.result.placements &&
               a.result.rounds_used == b.result.rounds_used &&
               a.result.search_trace == b.result.search_trace;
    }
};

inline std::string serialize_run_report(const RunReport& r) {
    std::ostringstream os;
    os << "run-report v1\n";
    os << "structure " << r.structure_file << "\n";
    os << "tree " << r.tree_text << "\n";
    os << "seed " << r.seed << "\n";
    os << "input-hash " << r.input_hash << "\n";
    os << "verdict " << r.verdict << "\n";
    os << "wall-seconds " << r.wall_seconds << "\n";
    os << serialize_solve_result(r.result);
    return os.str();
}

inline RunReport parse_run_report(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != "run-report v1")
        throw SyntaxError(0, "run-report v1 header");
    RunReport r;
    auto expect = [&](const std::string& key) {
        if (!std::getline(is, line) || line.rfind(key, 0) != 0 ||
            (line.size() > key.size() && line[key.size()] != ' '))
            throw SyntaxError(0, key.c_str());
        return line.size() > key.size() ? line.substr(key.size() + 1) : std::string();
    };
    r.structure_file = expect("structure");
    r.tree_text = expect("tree");
    r.seed = std::stoull(expect("seed"));
    r.input_hash = std::stoull(expect("input-hash"));
    r.verdict = expect("verdict");
    r.wall_seconds = expect("wall-seconds");
    std::ostringstream rest;
    rest << is.rdbuf();
    r.result = parse_solve_result(rest.str());
    return r;
}

// --- SVG -----------------------------------------------------------------------------

namespace detail {

inline std::string svg_num(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << v;
    return os.str();
}

}  // namespace detail

// Structure on the embedded grid; unit edge 40 px, margin 1 unit. Placement
// origins (if given) are ringed per rotation in distinct stroke styles.
// Output is deterministic: everything is emitted in sorted point order.
inline std::string render_svg(const std::vector<GridPoint>& pts,
                              const std::array<std::set<GridPoint>, 6>* placements = nullptr) {
    constexpr double kScale = 40.0;  // px per unit edge
    constexpr double kMargin = 1.0;  // units
    std::set<GridPoint> nodes(pts.begin(), pts.end());
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    bool first = true;
    for (GridPoint p : nodes) {
        Vec2 e = embed(p);
        if (first) {
            xmin = xmax = e.x;
            ymin = ymax = e.y;
            first = false;
        }
        xmin = std::min(xmin, e.x);
        xmax = std::max(xmax, e.x);
        ymin = std::min(ymin, e.y);
        ymax = std::max(ymax, e.y);
    }
    auto sx = [&](double x) { return (x - xmin + kMargin) * kScale; };
    auto sy = [&](double y) { return (ymax - y + kMargin) * kScale; };  // SVG y grows down
    double w = (xmax - xmin + 2 * kMargin) * kScale;
    double h = (ymax - ymin + 2 * kMargin) * kScale;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::svg_num(w)
       << "\" height=\"" << detail::svg_num(h) << "\" viewBox=\"0 0 " << detail::svg_num(w) << " "
       << detail::svg_num(h) << "\">\n";
    for (GridPoint p : nodes)
        for (Direction d : {Direction::E, Direction::NE, Direction::NW}) {
            GridPoint q = p + unit_vector(d);
            if (!nodes.count(q)) continue;
            Vec2 a = embed(p), b = embed(q);
            os << "  <line class=\"edge\" x1=\"" << detail::svg_num(sx(a.x)) << "\" y1=\""
               << detail::svg_num(sy(a.y)) << "\" x2=\"" << detail::svg_num(sx(b.x))
               << "\" y2=\"" << detail::svg_num(sy(b.y))
               << "\" stroke=\"#888\" stroke-width=\"3\"/>\n";
        }
    for (GridPoint p : nodes) {
        Vec2 e = embed(p);
        os << "  <circle class=\"node\" cx=\"" << detail::svg_num(sx(e.x)) << "\" cy=\""
           << detail::svg_num(sy(e.y)) << "\" r=\"6\" fill=\"#333\"/>\n";
    }
    if (placements) {
        static const char* kRotColor[6] = {"#d62728", "#1f77b4", "#2ca02c",
                                           "#ff7f0e", "#9467bd", "#17becf"};
        for (int r = 0; r < 6; ++r)
            for (GridPoint p : (*placements)[r]) {
                Vec2 e = embed(p);
                os << "  <circle class=\"placement r" << r << "\" cx=\""
                   << detail::svg_num(sx(e.x)) << "\" cy=\"" << detail::svg_num(sy(e.y))
                   << "\" r=\"" << detail::svg_num(10.0 + 2.0 * r) << "\" fill=\"none\" stroke=\""
                   << kRotColor[r] << "\" stroke-width=\"2\"/>\n";
            }
    }
    os << "</svg>\n";
    return os.str();
}

// --- Bench fitting ---------------------------------------------------------------------

struct LinearFit {
    double slope = 0;
    double intercept = 0;
};

// Least squares y = slope*x + intercept; degenerate sweeps get slope 0.
inline LinearFit fit_linear(const std::vector<std::pair<double, double>>& xy) {
    LinearFit f;
    size_t n = xy.size();
    if (n == 0) return f;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : xy) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double denom = n * sxx - sx * sx;
    if (denom == 0) {
        f.intercept = sy / n;
        return f;
    }
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

}  // namespace shapecon
