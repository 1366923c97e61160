#pragma once

#include <stdexcept>
#include <string>

namespace rbox {

/// Thrown when a box has non-finite fields or non-positive extents.
struct InvalidBoxError : std::invalid_argument {
    explicit InvalidBoxError(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when a covariance is not symmetric positive definite.
struct DecompositionError : std::runtime_error {
    explicit DecompositionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rbox
