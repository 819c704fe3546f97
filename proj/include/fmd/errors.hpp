#pragma once

#include <stdexcept>
#include <string>

namespace fmd {

// Root of the toolkit error hierarchy.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid input data, arguments or configuration. The CLI maps these to exit code 2.
struct ValidationError : Error {
    using Error::Error;
};

// Failures occurring after inputs were accepted. The CLI maps these to exit code 1.
struct RuntimeFailure : Error {
    using Error::Error;
};

struct DegenerateBone : ValidationError {
    int frame;
    int bone;
    DegenerateBone(int frame_, int bone_)
        : ValidationError("degenerate bone " + std::to_string(bone_) + " at frame " +
                          std::to_string(frame_) + ": joint coincides with its parent"),
          frame(frame_),
          bone(bone_) {}
};

struct TooShort : ValidationError {
    using ValidationError::ValidationError;
};

struct ParseError : ValidationError {
    long line;
    ParseError(long line_, const std::string& reason)
        : ValidationError("parse error at line " + std::to_string(line_) + ": " + reason),
          line(line_) {}
};

struct TopologyError : ValidationError {
    using ValidationError::ValidationError;
};

struct DimensionMismatch : ValidationError {
    using ValidationError::ValidationError;
};

struct InsufficientData : ValidationError {
    using ValidationError::ValidationError;
};

struct InsufficientSamples : ValidationError {
    using ValidationError::ValidationError;
};

struct NotSymmetric : ValidationError {
    using ValidationError::ValidationError;
};

struct ChecksumMismatch : ValidationError {
    using ValidationError::ValidationError;
};

struct ConfigError : ValidationError {
    std::string field;
    ConfigError(std::string field_, const std::string& reason)
        : ValidationError("config field '" + field_ + "': " + reason), field(std::move(field_)) {}
};

struct EigenFailure : RuntimeFailure {
    using RuntimeFailure::RuntimeFailure;
};

struct IOError : RuntimeFailure {
    using RuntimeFailure::RuntimeFailure;
};

}  // namespace fmd
