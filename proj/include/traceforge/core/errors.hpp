#pragma once

#include <stdexcept>
#include <string>

namespace traceforge {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Broken invariant or violated precondition in caller-supplied data.
struct ValidationError : Error {
    using Error::Error;
};

// Remote generator/retriever/judge failure after retries are exhausted.
struct BackendError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

// Content hash of a file does not match its manifest.
struct IntegrityError : Error {
    using Error::Error;
};

}  // namespace traceforge
