#pragma once

#include <stdexcept>
#include <string>

namespace sagnacsr {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside an operation's domain (e.g. zero blocks, empty schedule).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Physically unrepresentable or inconsistent configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Grid too coarse to resolve the fringes it is asked to count.
class ResolutionError : public Error {
public:
    using Error::Error;
};

/// Trace on which a metric is undefined (all-zero, flat, no slope).
class DegenerateTraceError : public Error {
public:
    using Error::Error;
};

}  // namespace sagnacsr
