#pragma once

#include <stdexcept>
#include <string>

namespace qwalk {

/// A caller supplied input outside the documented domain of an operation.
class validation_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// The two bands touch at the requested point, so velocity, Bloch vector or
/// winding are undefined there.
class gap_closure_error : public validation_error {
public:
  using validation_error::validation_error;
};

} // namespace qwalk
