#pragma once

#include <stdexcept>
#include <string>

namespace rsrp {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed arguments to an operation (mismatched towers, bad lengths, ...).
struct invalid_input : error {
    using error::error;
};

// Construction parameters that violate a precondition (d <= k, repeated degrees, ...).
struct parameter_error : error {
    using error::error;
};

// Reconstruction targets that fail to span the symbol field.
struct not_a_basis_error : error {
    using error::error;
};

// Fewer than k coordinates available for decoding.
struct insufficient_data_error : error {
    using error::error;
};

// Stored or reconstructed data inconsistent with what it must equal.
struct corruption_error : error {
    using error::error;
};

// A helper answered with a symbol outside the repair subfield.
struct protocol_error : error {
    using error::error;
};

// An exhaustive check was refused because the search space exceeds its guard.
struct guard_error : error {
    using error::error;
};

struct io_error : error {
    using error::error;
};

}  // namespace rsrp
