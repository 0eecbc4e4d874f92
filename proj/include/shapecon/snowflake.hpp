#pragma once

#include <cctype>
#include <sstream>
#include <string>
#include <vector>

#include "shapecon/errors.hpp"
#include "shapecon/shape.hpp"

// Snowflake trees: shapes built from line and triangle leaves by union,
// Minkowski-sum-with-line and shift-with-line nodes.
//
// Concrete syntax (parenthesized prefix, '#' starts a comment):
//   shape := "(line" DIR NAT ")" | "(tri" DIR POS ")"
//          | "(union" shape shape+ ")"
//          | "(sum" DIR POS shape ")" | "(shift" DIR POS shape ")"

namespace shapecon {

enum class NodeKind : uint8_t { Line, Tri, Union, Sum, Shift };

struct SnowflakeNode {
    NodeKind kind = NodeKind::Line;
    Direction d = Direction::E;
    long len = 0;
    std::vector<int> children;
};

struct SnowflakeTree {
    std::vector<SnowflakeNode> nodes;
    int root = 0;

    const SnowflakeNode& at(int i) const { return nodes[i]; }
    int size() const { return static_cast<int>(nodes.size()); }
};

inline constexpr long kMaxDslLength = 1L << 20;

inline Shape eval_node(const SnowflakeTree& t, int idx) {
    const SnowflakeNode& n = t.nodes[idx];
    switch (n.kind) {
        case NodeKind::Line:
            return make_line(n.d, static_cast<int>(n.len));
        case NodeKind::Tri:
            return make_triangle(n.d, static_cast<int>(n.len));
        case NodeKind::Union: {
            Shape s = eval_node(t, n.children[0]);
            for (size_t i = 1; i < n.children.size(); ++i)
                s = union_shapes(s, eval_node(t, n.children[i]));
            return s;
        }
        case NodeKind::Sum:
            return minkowski_with_line(eval_node(t, n.children[0]), n.d,
                                       static_cast<int>(n.len));
        case NodeKind::Shift: {
            Shape child = eval_node(t, n.children[0]);
            Shape moved = translate_shape(child, static_cast<int>(n.len) * unit_vector(n.d));
            return union_shapes(moved, make_line(n.d, static_cast<int>(n.len)));
        }
    }
    return {};
}

inline Shape eval_tree(const SnowflakeTree& t) { return eval_node(t, t.root); }

// Structural checks plus the shift-width constraint (a shift child must have
// positive minimal width on the shift axis, otherwise the shifted copies are
// not attached detectably).
inline void validate_tree(const SnowflakeTree& t) {
    if (t.nodes.empty()) throw ArityError("empty tree");
    for (int i = 0; i < t.size(); ++i) {
        const SnowflakeNode& n = t.nodes[i];
        switch (n.kind) {
            case NodeKind::Line:
                if (!n.children.empty()) throw ArityError("line must be a leaf");
                if (n.len < 0 || n.len > kMaxDslLength) throw RangeError("line length out of range");
                break;
            case NodeKind::Tri:
                if (!n.children.empty()) throw ArityError("tri must be a leaf");
                if (n.len < 1 || n.len > kMaxDslLength) throw RangeError("tri length out of range");
                break;
            case NodeKind::Union:
                if (n.children.size() < 2) throw ArityError("union needs at least 2 children");
                break;
            case NodeKind::Sum:
            case NodeKind::Shift:
                if (n.children.size() != 1) throw ArityError("sum/shift take exactly 1 child");
                if (n.len < 1 || n.len > kMaxDslLength) throw RangeError("sum/shift length out of range");
                break;
        }
    }
    for (int i = 0; i < t.size(); ++i) {
        const SnowflakeNode& n = t.nodes[i];
        if (n.kind != NodeKind::Shift) continue;
        Shape child = eval_node(t, n.children[0]);
        if (axis_width_halves(child, axis_of(n.d)) <= 0)
            throw InvalidShift("shift child has zero width on the shift axis");
    }
}

// --- Parser -------------------------------------------------------------------

namespace detail {

struct Token {
    enum Kind { LParen, RParen, Symbol, End } kind;
    std::string text;
    size_t pos;
};

inline std::vector<Token> tokenize_dsl(const std::string& text) {
    std::vector<Token> out;
    size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') ++i;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '(') {
            out.push_back({Token::LParen, "(", i});
            ++i;
        } else if (c == ')') {
            out.push_back({Token::RParen, ")", i});
            ++i;
        } else {
            size_t start = i;
            while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) &&
                   text[i] != '(' && text[i] != ')' && text[i] != '#')
                ++i;
            out.push_back({Token::Symbol, text.substr(start, i - start), start});
        }
    }
    out.push_back({Token::End, "", text.size()});
    return out;
}

struct DslParser {
    const std::vector<Token>& toks;
    size_t i = 0;

    const Token& peek() const { return toks[i]; }
    const Token& next() { return toks[i++]; }

    void expect_lparen() {
        if (peek().kind != Token::LParen) throw SyntaxError(peek().pos, "'('");
        next();
    }
    void expect_rparen() {
        if (peek().kind != Token::RParen) throw SyntaxError(peek().pos, "')'");
        next();
    }
    std::string expect_symbol(const char* what) {
        if (peek().kind != Token::Symbol) throw SyntaxError(peek().pos, what);
        return next().text;
    }
    Direction expect_direction() {
        const Token& tk = peek();
        std::string s = expect_symbol("direction");
        Direction d;
        if (!parse_direction(s, d)) throw SyntaxError(tk.pos, "direction (E|NE|NW|W|SW|SE)");
        return d;
    }
    long expect_number(long lo, long hi) {
        const Token& tk = peek();
        std::string s = expect_symbol("number");
        for (char c : s)
            if (!std::isdigit(static_cast<unsigned char>(c)))
                throw SyntaxError(tk.pos, "non-negative integer");
        if (s.size() > 8) throw RangeError("number out of range at position " + std::to_string(tk.pos));
        long v = std::stol(s);
        if (v < lo || v > hi)
            throw RangeError("number " + std::to_string(v) + " out of range [" +
                             std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return v;
    }

    int parse_shape(SnowflakeTree& t) {
        expect_lparen();
        const Token& head = peek();
        std::string op = expect_symbol("operator (line|tri|union|sum|shift)");
        SnowflakeNode n;
        if (op == "line" || op == "tri") {
            n.kind = op == "line" ? NodeKind::Line : NodeKind::Tri;
            n.d = expect_direction();
            n.len = expect_number(op == "line" ? 0 : 1, kMaxDslLength);
        } else if (op == "union") {
            n.kind = NodeKind::Union;
            while (peek().kind == Token::LParen) n.children.push_back(parse_shape(t));
            if (n.children.size() < 2)
                throw ArityError("union needs at least 2 children (position " +
                                 std::to_string(head.pos) + ")");
        } else if (op == "sum" || op == "shift") {
            n.kind = op == "sum" ? NodeKind::Sum : NodeKind::Shift;
            n.d = expect_direction();
            n.len = expect_number(1, kMaxDslLength);
            n.children.push_back(parse_shape(t));
        } else {
            throw SyntaxError(head.pos, "operator (line|tri|union|sum|shift)");
        }
        expect_rparen();
        t.nodes.push_back(n);
        return static_cast<int>(t.nodes.size()) - 1;
    }
};

}  // namespace detail

inline SnowflakeTree parse_snowflake(const std::string& text) {
    auto toks = detail::tokenize_dsl(text);
    detail::DslParser p{toks};
    SnowflakeTree t;
    t.root = p.parse_shape(t);
    if (p.peek().kind != detail::Token::End) throw SyntaxError(p.peek().pos, "end of input");
    validate_tree(t);
    return t;
}

inline void serialize_node(const SnowflakeTree& t, int idx, std::ostream& os) {
    const SnowflakeNode& n = t.nodes[idx];
    switch (n.kind) {
        case NodeKind::Line:
            os << "(line " << direction_name(n.d) << " " << n.len << ")";
            break;
        case NodeKind::Tri:
            os << "(tri " << direction_name(n.d) << " " << n.len << ")";
            break;
        case NodeKind::Union:
            os << "(union";
            for (int c : n.children) {
                os << " ";
                serialize_node(t, c, os);
            }
            os << ")";
            break;
        case NodeKind::Sum:
        case NodeKind::Shift:
            os << (n.kind == NodeKind::Sum ? "(sum " : "(shift ") << direction_name(n.d) << " "
               << n.len << " ";
            serialize_node(t, n.children[0], os);
            os << ")";
            break;
    }
}

inline std::string serialize_snowflake(const SnowflakeTree& t) {
    std::ostringstream os;
    serialize_node(t, t.root, os);
    return os.str();
}

// Rotating a snowflake tree's direction labels rotates its shape.
inline SnowflakeTree rotate_tree(const SnowflakeTree& t, int r) {
    SnowflakeTree out = t;
    for (SnowflakeNode& n : out.nodes) n.d = rotate_direction(n.d, r);
    return out;
}

}  // namespace shapecon
