#pragma once

#include <stdexcept>
#include <string>

namespace contdef {

// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateTriangle : Error {
    explicit DegenerateTriangle(const std::string& what) : Error(what) {}
};

struct SingularTransform : Error {
    explicit SingularTransform(const std::string& what) : Error(what) {}
};

struct InfeasibleConstraint : Error {
    explicit InfeasibleConstraint(const std::string& what) : Error(what) {}
};

struct NoConvergence : Error {
    explicit NoConvergence(const std::string& what) : Error(what) {}
};

struct OutOfRange : Error {
    explicit OutOfRange(const std::string& what) : Error(what) {}
};

struct CoincidentAgents : Error {
    explicit CoincidentAgents(const std::string& what) : Error(what) {}
};

struct CovarianceDivergence : Error {
    explicit CovarianceDivergence(const std::string& what) : Error(what) {}
};

struct NumericalBlowup : Error {
    explicit NumericalBlowup(const std::string& what) : Error(what) {}
};

struct UpperBoundInfeasible : Error {
    explicit UpperBoundInfeasible(const std::string& what) : Error(what) {}
};

struct BracketInvalid : Error {
    explicit BracketInvalid(const std::string& what) : Error(what) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error(what) {}
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& what) : Error(what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace contdef
