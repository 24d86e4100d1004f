// Event logs and derived operation sequences.
//
// An event log is a set of cases (process instances: jobs or machines), each
// carrying an ordered trace of attributed events. Matching "start"/"complete"
// event pairs are grouped into operations, from which per-job and per-machine
// operation sequences are derived. All types are immutable after construction
// and safe to read concurrently.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cpat/errors.hpp"
#include "cpat/time.hpp"

namespace cpat {

using EventId = std::int64_t;

/// A strongly typed timestamp attribute value (distinct from plain integers).
struct Timestamp {
    TimeMs ms = 0;
    friend bool operator==(const Timestamp&, const Timestamp&) = default;
};

/// Attribute value: null, string, integer or timestamp.
using AttrValue = std::variant<std::monostate, std::string, std::int64_t, Timestamp>;

inline bool is_null(const AttrValue& v) { return std::holds_alternative<std::monostate>(v); }

/// One logged event. The attributes every pattern condition reads are stored
/// in dedicated fields (empty string / kNoTime meaning absent); anything else
/// the source file carried is kept in `extra`.
struct Event {
    EventId id = 0;
    TimeMs timestamp = kNoTime;
    std::string activity;
    std::string transaction;        // e.g. "start processing"
    std::string machine;            // machine id, jobs-as-cases perspective
    std::string job;                // job id, machines-as-cases perspective
    std::string activity_instance;  // groups the start/complete pair
    std::vector<std::pair<std::string, AttrValue>> extra;

    /// Def.-1 style access: the value of attribute `name`, null when absent.
    /// Canonical names: "event", "timestamp", "activity", "transaction",
    /// "machine", "job", "activity_instance".
    AttrValue attr(std::string_view name) const;
};

struct Case {
    std::string id;
    std::vector<Event> trace;
};

enum class Perspective { Job, Machine };

struct EventLog {
    Perspective case_perspective = Perspective::Job;
    std::vector<Case> cases;

    std::size_t event_count() const;
};

/// Maps source columns/keys onto the canonical attribute slots and fixes the
/// timestamp format. Works for CSV headers; the XES reader uses the standard
/// extension keys and shares the perspective flag.
struct LogSchema {
    std::string case_col = "case";
    std::string event_col = "event";
    std::string timestamp_col = "timestamp";
    std::string activity_col = "activity";
    std::string transaction_col = "transaction";
    std::string machine_col = "machine";
    std::string job_col = "job";
    std::string activity_instance_col = "activity_instance";
    /// Adapter for logs carrying (start, duration) per row instead of
    /// start/complete event pairs: end := start + duration.
    std::string duration_col = "duration";
    std::string timestamp_format = std::string(kDefaultTimestampFormat);
    Perspective perspective = Perspective::Job;
};

/// Parses a CSV event log (UTF-8, header row, RFC-4180 quoting).
/// Throws ParseError{MalformedRow, DuplicateEventId, UnparseableTimestamp}.
EventLog parse_csv_log(std::string_view text, const LogSchema& schema = {});

/// Parses an XES event log (trace/event elements with string/date/int
/// attributes). Events have no ids in XES; sequential ids are assigned in
/// document order unless an "identity:id" integer attribute is present.
/// Throws ParseError{XmlSyntax, MissingTimestamp, DuplicateEventId}.
EventLog parse_xes_log(std::string_view text, const LogSchema& schema = {});

enum class TransactionKind { Processing, Other };

/// A grouped start/complete event pair (an activity instance).
struct Operation {
    std::string activity;
    TimeMs start = 0;
    TimeMs end = 0;  // >= start
    std::string machine;  // empty = absent
    std::string job;      // empty = absent
    TransactionKind transaction_kind = TransactionKind::Processing;
    std::string transaction_name;  // "processing", "setup", ...
    EventId start_event = 0;
    EventId complete_event = 0;

    TimeMs duration() const { return end - start; }
};

/// Operations of one owner (a job or a machine), ordered by ascending start
/// time; ties broken by (end time, start event id).
struct OperationSequence {
    std::string owner;
    std::vector<Operation> ops;
};

/// Non-fatal findings from grouping events into operations.
struct Diagnostic {
    enum class Kind {
        UnmatchedEvent,    // start without complete or vice versa
        ClockSkew,         // pair with end < start (excluded from sequences)
        UngroupableEvent,  // missing activity or timestamp
    };
    Kind kind;
    std::vector<EventId> events;
    std::string detail;
};

/// Job and machine operation sequences derived from one log in a single pass.
struct DerivedSequences {
    std::map<std::string, OperationSequence> jobs;
    std::map<std::string, OperationSequence> machines;
    std::vector<Diagnostic> diagnostics;
};

DerivedSequences derive_sequences(const EventLog& log);

/// Convenience forms of derive_sequences for one perspective at a time.
std::map<std::string, OperationSequence> derive_job_sequences(const EventLog& log);
std::map<std::string, OperationSequence> derive_machine_sequences(const EventLog& log);

/// The processing subsequence: operations whose transaction kind is
/// Processing, order preserved. Idempotent.
OperationSequence filter_processing(const OperationSequence& seq);

/// Content hash of a log (perspective, cases, events, attributes).
/// Identical logs hash identically regardless of how they were built.
std::string log_digest(const EventLog& log);

}  // namespace cpat
