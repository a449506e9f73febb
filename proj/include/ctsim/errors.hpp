#pragma once

#include <stdexcept>
#include <string>

namespace cts {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Map document errors
struct SyntaxError : Error {
    SyntaxError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line(line) {}
    std::size_t line;
};
struct SemanticError : Error {
    using Error::Error;
};

// Planning errors
struct EmptyGraph : Error {
    using Error::Error;
};
struct NoRoute : Error {
    using Error::Error;
};
struct DegenerateGeometry : Error {
    using Error::Error;
};
struct DomainError : Error {
    using Error::Error;
};
struct SingularDerivative : Error {
    using Error::Error;
};
struct EmptyTrajectory : Error {
    using Error::Error;
};

// Scheduling errors
struct IndexOutOfRange : Error {
    using Error::Error;
};
struct IllegalState : Error {
    using Error::Error;
};

// Simulation errors
struct InvalidTimestep : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace cts
