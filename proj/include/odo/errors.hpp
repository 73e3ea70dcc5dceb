#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace odo {

// Error taxonomy mirrored by the CLI exit codes (see tools/).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad run configuration or malformed input file.
struct ConfigError : Error {
    using Error::Error;
};

// A constructed object violates one of its invariants.
struct ValidationError : Error {
    using Error::Error;
};

// The operation is not defined at this point (e.g. ζ_n on its excluded cylinder).
struct DomainError : Error {
    using Error::Error;
};

// The operation needed more digits than the point carries. `needed_prefix`
// is the smallest prefix length that would have sufficed, when known.
struct UndeterminedError : Error {
    std::size_t needed_prefix = 0;
    explicit UndeterminedError(const std::string& what, std::size_t needed = 0)
        : Error(what), needed_prefix(needed) {}
};

// A configured budget (letters, factorial size, precision, depth) was exceeded.
struct ResourceError : Error {
    using Error::Error;
};

// An internal invariant failed; always a bug.
struct InternalError : Error {
    using Error::Error;
};

}  // namespace odo
