#pragma once

#include <stdexcept>
#include <string>

namespace splice {

/// Raised for every contract violation or malformed input in the toolkit.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace splice
