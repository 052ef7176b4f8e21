#pragma once

#include <stdexcept>

namespace doobdec {

// Malformed tree/process shapes: wrong slice lengths, bad child links, ...
struct StructureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad numeric input: weights off the simplex, nonpositive probabilities,
// tolerance violations in data that is required to be exact.
struct ValueError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace doobdec
