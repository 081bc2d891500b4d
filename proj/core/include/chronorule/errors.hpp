#pragma once

#include <stdexcept>

namespace chronorule {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input line with fewer than four fields.
struct MalformedLineError : Error {
    using Error::Error;
};

// Timestamp string that is neither an ISO date nor a non-negative integer.
struct UnparsableTimestampError : Error {
    using Error::Error;
};

struct EmptyDatasetError : Error {
    using Error::Error;
};

// Walk sampling requested for a relation with no edges in the store.
struct NoHeadEdgesError : Error {
    using Error::Error;
};

struct EmptyCandidateSetError : Error {
    using Error::Error;
};

struct NoGroundingsError : Error {
    using Error::Error;
};

struct UnknownRelationError : Error {
    using Error::Error;
};

struct TruthOutOfUniverseError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace chronorule
