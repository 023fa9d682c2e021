#pragma once

#include <stdexcept>
#include <string>

namespace qsocp {

/// Base class for every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// A cone operator was evaluated at a point on or outside the cone boundary.
class ConeBoundaryError : public Error {
public:
    using Error::Error;
};

class ScalingFailure : public Error {
public:
    using Error::Error;
};

class ExpansionFailure : public Error {
public:
    using Error::Error;
};

/// Problem data does not belong to the sparsity family a plan was built for.
class FamilyMismatch : public Error {
public:
    using Error::Error;
};

class InvalidProblem : public Error {
public:
    using Error::Error;
};

/// Malformed plan or instance file.
class FormatError : public Error {
public:
    enum class Kind { BadMagic, VersionMismatch, Truncated, ChecksumMismatch, Malformed };

    FormatError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

}  // namespace qsocp
