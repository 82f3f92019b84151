#pragma once

#include <stdexcept>
#include <string>

namespace prclab {

// Base of every validation/feasibility error thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Population/subset sizes out of range (m < 1, m >= N, empty subset, ...).
class InvalidSizeError : public Error {
public:
    using Error::Error;
};

// Bad argument values that are not sizes (p outside [0,1/2], delta outside (0,1),
// non-finite matrix entries, bound violations).
class InvalidArgumentError : public Error {
public:
    using Error::Error;
};

// An operation that needs an even length was given an odd one.
class ParityError : public Error {
public:
    using Error::Error;
};

// Exact mode would enumerate more outcomes than the configured cap.
class CapExceededError : public Error {
public:
    using Error::Error;
};

// Table loss lookup failed for a (prediction, label) pair.
class MissingEntryError : public Error {
public:
    using Error::Error;
};

// Malformed input file (ragged CSV, non-numeric cell, schema mismatch).
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace prclab
