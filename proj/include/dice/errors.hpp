#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dice {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Surface-syntax errors carry the byte offset of the offending token.
struct ParseError : Error {
    ParseError(std::size_t offset, const std::string& what)
        : Error(what + " (at offset " + std::to_string(offset) + ")"), offset(offset) {}
    std::size_t offset;
};

struct EvalError : Error {
    using Error::Error;
};

// No exponent n <= n_max makes all coefficients nonnegative. Either the
// target does not map into the open simplex or the cap is too small.
struct PolyaExhausted : Error {
    using Error::Error;
};

struct NormalizationError : Error {
    using Error::Error;
};

// The common denominator is nonpositive somewhere on the evaluation grid.
struct GridRootError : Error {
    using Error::Error;
};

struct CapExceeded : Error {
    using Error::Error;
};

struct NonterminationError : Error {
    using Error::Error;
};

struct IterationCapExceeded : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace dice
