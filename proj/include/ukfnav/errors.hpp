#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ukfnav {

/// Base class for every structured error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// geodesy
class NearSingularity : public Error { using Error::Error; };

// ukf core
class InvalidScaling : public Error { using Error::Error; };
class DecompositionFailure : public Error { using Error::Error; };
class SingularInnovationCov : public Error { using Error::Error; };

// gnss measurement
class InvalidNoise : public Error { using Error::Error; };

// pipeline
class EmptyImuStream : public Error { using Error::Error; };
class EmptyStream : public Error { using Error::Error; };

class NonMonotonicTime : public Error {
public:
    NonMonotonicTime(const std::string& what, std::size_t index)
        : Error(what + " (index " + std::to_string(index) + ")"), index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

// kitti ingest
class MalformedRecord : public Error { using Error::Error; };
class MissingTimestamps : public Error { using Error::Error; };
class RecordCountMismatch : public Error { using Error::Error; };

// simulator
class UnknownProfileKind : public Error { using Error::Error; };

// evaluation
class TimeSpanMismatch : public Error { using Error::Error; };
class EmptySeries : public Error { using Error::Error; };
class IoError : public Error { using Error::Error; };

}  // namespace ukfnav
