#pragma once

#include <stdexcept>
#include <string>

namespace scherk {

// Base of every error raised by the library. Subclasses carry the category
// the CLI maps onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input outside the admissible domain of an operation (points outside the
// model disc, nonpositive radii, malformed polygons, bad JSON).
class DomainError : public Error {
public:
    using Error::Error;
};

class MalformedPolygon : public DomainError {
public:
    using DomainError::DomainError;
};

class DegenerateArc : public DomainError {
public:
    using DomainError::DomainError;
};

// A root bracket that should exist by construction did not show a sign change.
class BracketFailure : public Error {
public:
    using Error::Error;
};

class EnumerationCap : public DomainError {
public:
    using DomainError::DomainError;
};

class NoAdmissibleTau : public Error {
public:
    using Error::Error;
};

class DegenerateCore : public DomainError {
public:
    using DomainError::DomainError;
};

class MeshError : public Error {
public:
    using Error::Error;
};

class UnsupportedDomain : public DomainError {
public:
    using DomainError::DomainError;
};

class SolverError : public Error {
public:
    SolverError(const std::string& what, int step = -1) : Error(what), step_(step) {}
    int step() const noexcept { return step_; }

private:
    int step_;
};

}  // namespace scherk
