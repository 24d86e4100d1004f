// Error types shared across the toolkit.
//
// Fatal problems (unreadable input, violated preconditions) are thrown;
// recoverable findings (unmatched events, condition violations) are returned
// as values by the operation that discovered them.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cpat {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown by the CSV, XES, benchmark and JSON readers.
class ParseError : public Error {
public:
    enum class Kind {
        MalformedRow,
        DuplicateEventId,
        UnparseableTimestamp,
        XmlSyntax,
        MissingTimestamp,
        BadHeader,
        RowLengthMismatch,
        NegativeDuration,
        BadMachineIndex,
        MissingRows,
        TrailingContent,
        BadJson,
    };

    ParseError(Kind kind, std::size_t line, const std::string& message)
        : Error(message), kind_(kind), line_(line) {}

    Kind kind() const { return kind_; }

    /// 1-based line (CSV, benchmark) or byte offset (XES) of the failure.
    std::size_t line() const { return line_; }

private:
    Kind kind_;
    std::size_t line_;
};

/// extract_instance requires a report in which the Job Shop pattern holds.
class PatternNotDetected : public Error {
public:
    using Error::Error;
};

/// Model emission was asked for a pattern without a template in the
/// requested dialect (metadata-only patterns, or no published variant).
class UnsupportedPattern : public Error {
public:
    UnsupportedPattern(const std::string& pattern, const std::string& message)
        : Error(message), pattern_(pattern) {}

    const std::string& pattern() const { return pattern_; }

private:
    std::string pattern_;
};

/// An operation was called outside its stated precondition.
class PreconditionViolated : public Error {
public:
    using Error::Error;
};

/// execute_schedule refuses schedules that fail validation.
class InfeasibleSchedule : public Error {
public:
    using Error::Error;
};

/// The exhaustive oracle only accepts tiny instances.
class TooLarge : public Error {
public:
    using Error::Error;
};

/// diff_reports requires both reports to cover the same pattern ids.
class RegistryMismatch : public Error {
public:
    using Error::Error;
};

}  // namespace cpat
