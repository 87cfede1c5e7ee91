#ifndef CPOFDM_ERROR_HPP
#define CPOFDM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace cpofdm {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Matrix or sequence shapes that do not fit together.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A Hermitian input that is not Hermitian within tolerance.
class SymmetryError : public Error {
public:
    using Error::Error;
};

/// A configuration value violating a documented invariant.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Too few samples to build a segmentation with M' >= N'.
class InsufficientDataError : public Error {
public:
    InsufficientDataError(const std::string& what, std::size_t required_len)
        : Error(what), required_len_(required_len) {}

    std::size_t required_length() const noexcept { return required_len_; }

private:
    std::size_t required_len_;
};

/// Caller broke a documented precondition on a value (e.g. unsorted spectrum).
class ContractError : public Error {
public:
    using Error::Error;
};

/// File read/write failure; the message carries the path.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace cpofdm

#endif // CPOFDM_ERROR_HPP
