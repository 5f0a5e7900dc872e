#pragma once

#include <stdexcept>
#include <string>

namespace tedkit {

// Bad user input (arguments, contract violations) -> std::invalid_argument.
// The types below cover the remaining failure classes so the C boundary can
// map exceptions onto status codes.

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed file contents (CSV, model JSON, options JSON).
struct format_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operation not valid for the object's current state, e.g. asking a baseline
// model for an explanation or deriving Y from a non-functional codec.
struct state_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace tedkit
