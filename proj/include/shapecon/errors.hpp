#pragma once

#include <stdexcept>
#include <string>

namespace shapecon {

struct SyntaxError : std::runtime_error {
    size_t position;
    SyntaxError(size_t pos, const std::string& expected)
        : std::runtime_error("syntax error at position " + std::to_string(pos) +
                             ": expected " + expected),
          position(pos) {}
};

struct ArityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RangeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidShift : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotStarConvex : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotConvex : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Disconnected : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DuplicatePoint : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct HandlerStateOverflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RoundLimitExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CounterOverflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DivideByZero : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TrivialShape : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidPlacement : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PremiseViolated : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace shapecon
