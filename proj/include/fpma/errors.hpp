#pragma once

#include <stdexcept>
#include <string>

namespace fpma {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input outside a model's validity range (bias, gate voltage, bad parameter).
class DomainError : public Error {
public:
    using Error::Error;
};

// Constant-current criterion not bracketed by the sampled curve.
class ExtractionError : public Error {
public:
    using Error::Error;
};

// Partial write issued from a state that must be erased first.
class ProgramSequenceError : public Error {
public:
    using Error::Error;
};

// Read-back threshold pair equidistant from two states.
class DecodeError : public Error {
public:
    using Error::Error;
};

// Operation issued while the array is in the wrong configuration.
class ModeError : public Error {
public:
    using Error::Error;
};

class BoundsError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& msg, double last_residual)
        : Error(msg), last_residual_(last_residual) {}
    double last_residual() const { return last_residual_; }

private:
    double last_residual_ = 0.0;
};

class TopologyError : public Error {
public:
    using Error::Error;
};

// Session/params file with a missing or unsupported schema version.
class SchemaError : public Error {
public:
    using Error::Error;
};

}  // namespace fpma
