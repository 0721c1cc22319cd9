#pragma once

#include <stdexcept>
#include <string>

namespace diagwalk {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Argument outside its mathematical domain (e.g. |c| > 1 for a cosine).
class OutOfRangeError : public Error {
public:
    using Error::Error;
};

/// Point dimension does not match the domain dimension.
class DimensionMismatchError : public Error {
public:
    using Error::Error;
};

/// A point required to be interior is not.
class NotInteriorError : public Error {
public:
    using Error::Error;
};

/// Operation not defined for this domain shape (e.g. boundary of an infinite domain).
class UnsupportedDomainError : public Error {
public:
    using Error::Error;
};

/// Walk is recurrent (d <= 2 full lattice); the requested quantity diverges.
class RecurrentLatticeError : public Error {
public:
    using Error::Error;
};

/// Problem size exceeds a hard cap (e.g. dense-solver state count).
class TooLargeError : public Error {
public:
    using Error::Error;
};

} // namespace diagwalk
