#pragma once

#include <stdexcept>
#include <string>

namespace eklab {

// Error taxonomy shared by the whole library.  The CLI maps these to exit
// codes: validation/ambiguity -> 2, precision/budget -> 3.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad inputs: parse failures, domain violations, malformed matrices.
struct validation_error : error {
    using error::error;
};

// The data admits more than one answer at the requested scale
// (e.g. two major-arc centers both inside the tolerance window).
struct ambiguity_error : error {
    using error::error;
};

// A certified computation ran out of precision: decimal digits exhausted,
// or the refinement ladder's top rung cannot separate the candidates.
struct precision_error : error {
    using error::error;
};

// An enumeration or memory budget would be exceeded; the message carries
// the offending count so callers can shrink parameters.
struct budget_error : error {
    using error::error;
};

} // namespace eklab
