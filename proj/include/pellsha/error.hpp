#pragma once

#include <stdexcept>
#include <string>

namespace pellsha {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A fixed-width intermediate result did not fit in 64 bits.
class OverflowError : public Error {
public:
    using Error::Error;
};

/// A precondition on an argument was violated.
class DomainError : public Error {
public:
    using Error::Error;
};

class NotFundamental : public DomainError {
public:
    using DomainError::DomainError;
};

class PerfectSquare : public DomainError {
public:
    using DomainError::DomainError;
};

class DiscriminantMismatch : public DomainError {
public:
    using DomainError::DomainError;
};

class ImprimitiveForm : public DomainError {
public:
    using DomainError::DomainError;
};

class ModulusTooLarge : public DomainError {
public:
    using DomainError::DomainError;
};

/// Exact division by two was impossible in the ambient ring.
class HalvingFailure : public Error {
public:
    using Error::Error;
};

/// The split-prime scan ran past its bound without generating the target class.
class NoSplitGenerators : public Error {
public:
    using Error::Error;
};

}  // namespace pellsha
