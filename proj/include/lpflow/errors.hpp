#pragma once

#include <stdexcept>
#include <string>

namespace lpflow {

/// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Mismatched grids, component counts, or field shapes.
class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& msg) : Error(msg) {}
};

/// Invalid parameter values (bad indices, violated index constraints,
/// unknown names). Maps to CLI exit code 2.
class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& msg) : Error(msg) {}
};

/// Operation called on an object in an unusable state (e.g. empty
/// accumulator).
class StateError : public Error {
public:
    explicit StateError(const std::string& msg) : Error(msg) {}
};

/// File read/write failure or malformed file contents. Maps to CLI exit
/// code 2.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

/// Iterative solver failed to converge. Carries the measured contraction
/// (or growth) factor and the iteration count at abort. Maps to CLI exit
/// code 3.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& msg, double contraction, int iterations)
        : Error(msg), contraction_factor(contraction), iterations(iterations) {}
    double contraction_factor;
    int iterations;
};

/// Advective CFL limit exceeded. Maps to CLI exit code 3.
class StabilityError : public Error {
public:
    StabilityError(const std::string& msg, double cfl, double limit)
        : Error(msg), cfl(cfl), limit(limit) {}
    double cfl;
    double limit;
};

/// A regularity-loss schedule dropped below its floor index mid-run.
/// Carries the breach time. Maps to CLI exit code 3.
class ScheduleError : public Error {
public:
    ScheduleError(const std::string& msg, double breach_time)
        : Error(msg), breach_time(breach_time) {}
    double breach_time;
};

}  // namespace lpflow
