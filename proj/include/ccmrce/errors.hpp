#pragma once

#include <stdexcept>
#include <string>

namespace ccmrce {

// Thrown when input *content* is unusable (dimension mismatch, bad values,
// unparsable files). The CLI maps this to exit code 65.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown on filesystem failures. CLI exit code 2.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ccmrce
