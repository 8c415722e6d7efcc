#pragma once

#include <stdexcept>
#include <string>

namespace nocprio {

// Parameter outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A queue or server would saturate; `where` names the offending element.
class StabilityError : public std::runtime_error {
public:
    StabilityError(std::string where, const std::string& what)
        : std::runtime_error(what), where_(std::move(where)) {}
    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

// Malformed input files (traffic matrices, reports).
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Two artifacts that must agree do not (missing coverage, mismatched pair sets).
class ConsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A statistic was requested from too few samples.
class DiagnosticsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace nocprio
