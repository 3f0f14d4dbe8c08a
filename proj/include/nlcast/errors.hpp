#pragma once

#include <stdexcept>
#include <string>

namespace nlcast {

/// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input data (bad header token, unparsable field, ...).
struct parse_error : error {
    using error::error;
};

/// Filesystem failure (missing file, unwritable path, short read).
struct io_error : error {
    using error::error;
};

/// A documented precondition was violated by the caller.
struct contract_error : error {
    using error::error;
};

/// Mismatched companion data (bitmap vs records, factors vs side info).
struct integrity_error : error {
    using error::error;
};

/// A chunk with zero signal variance reached the power allocator.
/// Callers are expected to drop such chunks or bypass them with a zero
/// scale factor before allocating.
struct degenerate_chunk_error : contract_error {
    using contract_error::contract_error;
};

} // namespace nlcast
