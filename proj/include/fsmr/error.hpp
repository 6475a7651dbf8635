#pragma once

#include <stdexcept>
#include <string>

namespace fsmr {

/// Raised for out-of-range parameters, malformed dimensions, or unknown names.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class SingularTransform : public std::runtime_error {
public:
    SingularTransform() : std::runtime_error("affine transform matrix is singular") {}
};

/// No frequency pair in the dictionary has a usable (finite, non-degenerate) energy reduction.
class NoSelectableBasis : public std::runtime_error {
public:
    NoSelectableBasis() : std::runtime_error("no selectable basis function") {}
};

/// Model generation requested on an area without any samples.
class EmptyArea : public std::runtime_error {
public:
    EmptyArea() : std::runtime_error("reconstruction area holds no samples") {}
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace fsmr
