#ifndef POC_ERRORS_HPP
#define POC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace poc {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class UnknownNodeError : public Error {
public:
    explicit UnknownNodeError(const std::string& node)
        : Error("unknown node: " + node) {}
};

/// Structural transition violates a graph invariant (dangling edge,
/// duplicate add, missing item).
class DeltaError : public Error {
public:
    explicit DeltaError(const std::string& msg) : Error(msg) {}
};

class InvalidDistributionError : public Error {
public:
    explicit InvalidDistributionError(const std::string& msg) : Error(msg) {}
};

class InvalidNoiseError : public Error {
public:
    explicit InvalidNoiseError(const std::string& msg) : Error(msg) {}
};

class InsufficientDataError : public Error {
public:
    explicit InsufficientDataError(const std::string& msg) : Error(msg) {}
};

class MixedTimestepError : public Error {
public:
    explicit MixedTimestepError(const std::string& msg) : Error(msg) {}
};

class NonConsecutiveSeriesError : public Error {
public:
    explicit NonConsecutiveSeriesError(const std::string& msg) : Error(msg) {}
};

/// Theorem verification called on sample-based summaries.
class EmpiricalSourceError : public Error {
public:
    explicit EmpiricalSourceError(const std::string& msg) : Error(msg) {}
};

class DegenerateDesignError : public Error {
public:
    explicit DegenerateDesignError(const std::string& msg) : Error(msg) {}
};

class InconsistentMomentsError : public Error {
public:
    explicit InconsistentMomentsError(const std::string& msg) : Error(msg) {}
};

class ScenarioError : public Error {
public:
    explicit ScenarioError(const std::string& msg) : Error(msg) {}
};

/// Positioned error from the snapshot / event-log parsers.
class ParseError : public Error {
public:
    ParseError(long line, const std::string& reason)
        : Error("line " + std::to_string(line) + ": " + reason), line_(line) {}

    long line() const { return line_; }

private:
    long line_;
};

} // namespace poc

#endif // POC_ERRORS_HPP
