#ifndef PBC_ERRORS_HPP
#define PBC_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pbc {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidArgument : Error {
    using Error::Error;
};

// -- geometry / plane evaluation --
struct ZeroWeight : Error {
    ZeroWeight() : Error("signed distance requires a nonzero weight vector") {}
};
struct DimensionMismatch : Error {
    using Error::Error;
};

// -- loss evaluation --
struct MissingStats : Error {
    MissingStats() : Error("rfdpc within-loss requires cluster statistics") {}
};
struct DegenerateCluster : Error {
    using Error::Error;
};

// -- solvers --
struct UnboundedObjective : Error {
    using Error::Error;
};
struct NonDecreasingStep : Error {
    using Error::Error;
};

// -- engine --
struct TooFewSamples : Error {
    using Error::Error;
};

// -- metrics --
struct LengthMismatch : Error {
    using Error::Error;
};

// -- data I/O --
struct ParseError : Error {
    std::size_t line;
    std::size_t column;
    ParseError(std::size_t ln, std::size_t col, const std::string& what)
        : Error("parse error at line " + std::to_string(ln) + ", column " +
                std::to_string(col) + ": " + what),
          line(ln), column(col) {}
};
struct RaggedRows : Error {
    using Error::Error;
};
struct EmptyFile : Error {
    using Error::Error;
};

}  // namespace pbc

#endif  // PBC_ERRORS_HPP
