#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dse {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Topology construction rejected (too few nodes, disconnected graph, ...).
struct InvalidTopologyError : Error {
    using Error::Error;
};

// A documented precondition of an operation was violated by the caller.
struct ContractViolation : Error {
    using Error::Error;
};

// A theory-prescribed quantity left its admissible range (alpha > 1,
// horizon below the corollary minimum, ...).
struct TheoryViolation : Error {
    using Error::Error;
};

// A parameter vector became non-finite during a run. Carries the iteration
// at which the first non-finite coordinate was observed.
struct DivergenceError : Error {
    DivergenceError(std::int64_t iteration_, const std::string& what_)
        : Error(what_), iteration(iteration_) {}
    std::int64_t iteration;
};

// Dirichlet partitioning could not give every node a sample within the
// retry budget.
struct PartitionFailure : Error {
    using Error::Error;
};

// Config file could not be parsed or failed validation.
struct ConfigError : Error {
    using Error::Error;
};

// Filesystem-level failure (unwritable path, artifact conflict, ...).
struct IoError : Error {
    using Error::Error;
};

}  // namespace dse
