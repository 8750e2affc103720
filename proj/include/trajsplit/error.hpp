#pragma once

#include <stdexcept>
#include <string>

namespace trajsplit {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidScenario : public Error {
public:
    using Error::Error;
};

class InvalidShape : public Error {
public:
    using Error::Error;
};

class InvalidConfig : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// Raised when an objective or constraint evaluator produces a non-finite value.
class EvaluatorError : public Error {
public:
    using Error::Error;
};

}  // namespace trajsplit
