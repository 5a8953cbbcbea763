#pragma once

#include <stdexcept>
#include <string>

namespace mrct {

/// Base class for every domain failure raised by the library. The CLI maps it
/// to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mrct
