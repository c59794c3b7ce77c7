#pragma once

#include <stdexcept>
#include <string>

namespace qonline {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad construction parameters: capacity bounds, mismatched modes/channels.
class ConfigError : public Error {
public:
    using Error::Error;
};

// A problem instance violates its structural invariants.
class ValidationError : public Error {
public:
    using Error::Error;
};

// A function was evaluated outside its mathematical domain.
class DomainError : public Error {
public:
    using Error::Error;
};

// A multi-step exchange was driven out of order (feed counts, advice length).
class ProtocolError : public Error {
public:
    using Error::Error;
};

// Joint measurement asked to decode a state outside the coding basis.
class DecodeError : public Error {
public:
    using Error::Error;
};

// Declared resource budget exceeded: qubits, branch counts, search capacity.
class ResourceError : public Error {
public:
    using Error::Error;
};

// A caller broke a documented precondition (e.g. adversary needs determinism).
class PreconditionError : public Error {
public:
    using Error::Error;
};

// A randomized construction failed to find a verified witness.
class SearchError : public Error {
public:
    using Error::Error;
};

}  // namespace qonline
