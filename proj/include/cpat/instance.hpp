// Scheduling problem instances, built from event logs or benchmark files.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cpat/detection.hpp"
#include "cpat/event_log.hpp"

namespace cpat {

enum class TimeUnit { Milliseconds, Abstract };

/// A disjunctive scheduling instance: per-job machine routes and durations.
/// Machines are dense indices 0..n_machines-1; `machine_labels` keeps the
/// original ids. Routes may revisit a machine. A flow-shop instance has
/// identical routes visiting every machine exactly once.
struct ProblemInstance {
    std::size_t n_jobs = 0;
    std::size_t n_machines = 0;
    std::vector<std::vector<std::size_t>> route;     // [job][position] -> machine
    std::vector<std::vector<std::int64_t>> duration; // [job][position]
    bool flow_shop = false;
    TimeUnit unit = TimeUnit::Abstract;
    std::vector<std::string> machine_labels;  // index -> original id
    std::vector<std::string> job_labels;
    /// Activity names per operation when extracted from a log; empty when the
    /// instance has none (executed logs then synthesize machine-bound names).
    std::vector<std::vector<std::string>> activities;

    std::size_t total_operations() const;
    std::int64_t total_duration() const;

    /// Checks the structural invariants (matching row lengths, machine
    /// indices in range, flow-shop routes identical and exactly-once).
    /// Returns human-readable problems, empty when consistent.
    std::vector<std::string> consistency_issues() const;
};

/// True when all routes are identical and visit every machine exactly once.
bool routes_are_flow_shop(const ProblemInstance& inst);

/// Builds an instance from a detected log. Requires report.JobShop = Holds
/// (throws PatternNotDetected otherwise). One route entry per processing
/// operation per job, in sequence order; durations are end - start;
/// flow_shop mirrors the FlowShop verdict.
ProblemInstance extract_instance(const EventLog& log, const DetectionReport& report);

/// Parses the standard job-shop benchmark text format: optional comment
/// lines (starting with '#' or "//"), a "n_jobs n_machines" header, then one
/// line per job with n_machines (machine, duration) pairs, machines 0-based.
/// Throws ParseError{BadHeader, RowLengthMismatch, NegativeDuration,
/// BadMachineIndex, MissingRows, TrailingContent}.
ProblemInstance parse_benchmark_file(std::string_view text);

/// Serializes the instance in the benchmark text format (lossy: labels and
/// activity names are dropped).
std::string instance_to_benchmark(const ProblemInstance& inst);

std::string instance_to_json(const ProblemInstance& inst, bool pretty = true);
ProblemInstance instance_from_json(const std::string& text);

/// Content hash over routes, durations, unit and flow-shop flag.
std::string instance_digest(const ProblemInstance& inst);

}  // namespace cpat
