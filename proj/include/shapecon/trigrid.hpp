#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

// Exact integer geometry of the triangular grid in axial coordinates.
// A point (x, y) sits at x*u_E + y*u_NE; the Euclidean embedding is
// (x + y/2, y*sqrt(3)/2).

namespace shapecon {

struct GridPoint {
    int x = 0;
    int y = 0;

    friend constexpr GridPoint operator+(GridPoint a, GridPoint b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr GridPoint operator-(GridPoint a, GridPoint b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr GridPoint operator*(int k, GridPoint p) { return {k * p.x, k * p.y}; }
    constexpr GridPoint operator-() const { return {-x, -y}; }
    friend constexpr bool operator==(GridPoint a, GridPoint b) = default;
    friend constexpr auto operator<=>(GridPoint a, GridPoint b) = default;
};

struct GridPointHash {
    size_t operator()(GridPoint p) const {
        uint64_t v = (static_cast<uint64_t>(static_cast<uint32_t>(p.x)) << 32) |
                     static_cast<uint32_t>(p.y);
        v *= 0x9e3779b97f4a7c15ull;
        return static_cast<size_t>(v ^ (v >> 32));
    }
};

enum class Direction : uint8_t { E = 0, NE = 1, NW = 2, W = 3, SW = 4, SE = 5 };

inline constexpr std::array<Direction, 6> all_directions = {
    Direction::E, Direction::NE, Direction::NW, Direction::W, Direction::SW, Direction::SE};

constexpr GridPoint unit_vector(Direction d) {
    constexpr std::array<GridPoint, 6> units = {
        GridPoint{1, 0}, GridPoint{0, 1}, GridPoint{-1, 1},
        GridPoint{-1, 0}, GridPoint{0, -1}, GridPoint{1, -1}};
    return units[static_cast<int>(d)];
}

constexpr Direction rotate_direction(Direction d, int r) {
    int i = (static_cast<int>(d) + r) % 6;
    if (i < 0) i += 6;
    return static_cast<Direction>(i);
}

constexpr Direction ccw(Direction d) { return rotate_direction(d, 1); }
constexpr Direction cw(Direction d) { return rotate_direction(d, -1); }
constexpr Direction opposite(Direction d) { return rotate_direction(d, 3); }

inline const char* direction_name(Direction d) {
    constexpr const char* names[6] = {"E", "NE", "NW", "W", "SW", "SE"};
    return names[static_cast<int>(d)];
}

inline bool parse_direction(const std::string& s, Direction& out) {
    for (Direction d : all_directions)
        if (s == direction_name(d)) { out = d; return true; }
    return false;
}

enum class Axis : uint8_t { X = 0, Y = 1, Z = 2 };

constexpr Axis axis_of(Direction d) {
    return static_cast<Axis>(static_cast<int>(d) % 3);
}

// Positive direction of an axis (E for X, NE for Y, NW for Z).
constexpr Direction axis_direction(Axis a) {
    return static_cast<Direction>(static_cast<int>(a));
}

constexpr GridPoint rotate60(GridPoint p, int r) {
    int rr = r % 6;
    if (rr < 0) rr += 6;
    for (int i = 0; i < rr; ++i) p = GridPoint{-p.y, p.x + p.y};
    return p;
}

constexpr int grid_distance(GridPoint p, GridPoint q) {
    int dx = q.x - p.x, dy = q.y - p.y;
    if ((dx >= 0) == (dy >= 0)) return std::abs(dx) + std::abs(dy);
    return std::max(std::abs(dx), std::abs(dy));
}

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 embed(GridPoint p) {
    return {p.x + p.y * 0.5, p.y * std::sqrt(3.0) / 2.0};
}

inline double euclid_dist2(Vec2 a, Vec2 b) {
    double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

// All grid nodes at minimal Euclidean distance from t (1 node generically,
// 2 on an edge midpoint, 3 at a face centroid).
inline std::vector<GridPoint> nearest_grid_points(Vec2 t) {
    // Invert the embedding to fractional axial coordinates, then scan the
    // surrounding integer candidates.
    double fy = t.y * 2.0 / std::sqrt(3.0);
    double fx = t.x - fy * 0.5;
    int cx = static_cast<int>(std::floor(fx));
    int cy = static_cast<int>(std::floor(fy));
    std::vector<GridPoint> best;
    double best_d = 0.0;
    constexpr double eps = 1e-9;
    for (int dx = -1; dx <= 2; ++dx) {
        for (int dy = -1; dy <= 2; ++dy) {
            GridPoint p{cx + dx, cy + dy};
            double d = euclid_dist2(embed(p), t);
            if (best.empty() || d < best_d - eps) {
                best.assign(1, p);
                best_d = d;
            } else if (d <= best_d + eps) {
                best.push_back(p);
                if (d < best_d) best_d = d;
            }
        }
    }
    return best;
}

}  // namespace shapecon
