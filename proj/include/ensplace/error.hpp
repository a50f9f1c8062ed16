#pragma once

#include <stdexcept>
#include <string>

namespace ensplace {

// Bad input: malformed description, violated precondition, out-of-range parameter.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A computation that was well posed but could not produce a trustworthy
// number: pole proximity, winding snap failure, non-normalisable eigenvector.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File system failure while reading configs or writing artifacts.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ensplace
