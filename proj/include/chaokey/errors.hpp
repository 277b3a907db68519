#ifndef CHAOKEY_ERRORS_HPP
#define CHAOKEY_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace chaokey {

/// Base class for all chaokey errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller violated a documented precondition.
class InvalidArgError : public Error {
public:
    using Error::Error;
};

/// A trajectory or derived value left the finite range (divergence, misuse).
class NonFiniteError : public Error {
public:
    using Error::Error;
};

/// Input has no usable information for the requested statistic
/// (zero variance, zero energy, ...).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// Two images/channels with incompatible dimensions.
class DimensionMismatchError : public Error {
public:
    using Error::Error;
};

/// A serialized container or key file is corrupt or truncated.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Filesystem-level failure.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace chaokey

#endif
