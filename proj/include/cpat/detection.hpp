// Pattern applicability checking on derived operation sequences.
//
// Each evaluator takes the processing subsequences of the job and machine
// operation sequences and returns a verdict: the pattern holds, is violated
// (with the events that break each condition), or could not be evaluated
// because a prerequisite pattern is missing or no evaluator exists.
//
// Timing comparisons tolerate a noise margin delta: an inequality
// end <= start becomes end <= start + delta. Categorical conditions
// (machine presence, fixed activity-machine binding, route equality) are
// never relaxed.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cpat/event_log.hpp"
#include "cpat/registry.hpp"

namespace cpat {

struct DetectionConfig {
    TimeMs delta = 0;  // noise margin, >= 0
    /// When true, metadata-only patterns get their prerequisites checked so
    /// a missing prerequisite is reported instead of "no evaluator".
    bool evaluate_metadata_only = false;
    /// At most this many violations are recorded per condition label.
    std::size_t violation_cap = 100;
};

struct ConditionViolation {
    std::string condition;  // e.g. "JobShop.b"
    std::string subject;    // job or machine id
    std::pair<std::size_t, std::size_t> operation_indices{0, 0};
    std::vector<EventId> event_ids;
    /// Amount by which the unrelaxed inequality fails; violations are only
    /// reported when slack > delta (timing conditions) or slack is
    /// irrelevant (categorical conditions, slack = 0).
    TimeMs slack = 0;
};

enum class VerdictStatus { Holds, Violated, NotEvaluated };

enum class NotEvaluatedReason { None, MissingPrerequisite, NoEvaluator };

struct Verdict {
    std::string pattern;
    VerdictStatus status = VerdictStatus::NotEvaluated;
    NotEvaluatedReason reason = NotEvaluatedReason::NoEvaluator;
    /// Holds with empty quantification domains (no operations to check).
    bool vacuous = false;
    std::vector<ConditionViolation> violations;

    bool holds() const { return status == VerdictStatus::Holds; }
    /// Holds on a non-empty domain; vacuous verdicts do not count as
    /// substantive for drift purposes.
    bool holds_substantive() const { return holds() && !vacuous; }
};

struct DetectionReport {
    std::map<std::string, Verdict> verdicts;
    DetectionConfig config;
    std::string log_digest;
    std::vector<Diagnostic> diagnostics;

    const Verdict* find(const std::string& pattern) const;
};

using SequenceMap = std::map<std::string, OperationSequence>;

/// Job Shop conditions on processing subsequences:
///   (a) every operation names a machine,
///   (b) consecutive operations of a job do not overlap (delta-relaxed),
///   (c) consecutive operations on a machine do not overlap (delta-relaxed),
///   (d) an activity always runs on the same machine.
/// Machine sequences that are empty while job operations reference machines
/// make (c) unevaluable and the pattern is reported violated.
Verdict check_job_shop(const SequenceMap& jobs, const SequenceMap& machines,
                       const DetectionConfig& cfg);

/// Flow Shop: requires the Job Shop verdict as prerequisite. Holds when every
/// job has exactly one operation per machine and all jobs share one route.
Verdict check_flow_shop(const SequenceMap& jobs, const SequenceMap& machines,
                        const DetectionConfig& cfg, const Verdict& job_shop);

/// No Wait: requires the Job Shop verdict as prerequisite. Holds when the gap
/// between consecutive operations of every job is within delta in absolute
/// value.
Verdict check_no_wait(const SequenceMap& jobs, const DetectionConfig& cfg,
                      const Verdict& job_shop);

/// Derives sequences once, filters to processing subsequences, and evaluates
/// all registry patterns in prerequisite order. Parser/grouping diagnostics
/// are attached to the report; noisy logs never abort detection.
DetectionReport detect_all(const EventLog& log, const Registry& registry,
                           const DetectionConfig& cfg);

/// Same evaluation on already-derived sequences (not yet processing-filtered).
DetectionReport detect_on_sequences(const DerivedSequences& derived, const std::string& digest,
                                    const Registry& registry, const DetectionConfig& cfg);

struct DriftReport {
    struct Gained {
        std::string pattern;
        std::string note;  // e.g. "vacuous -> substantive"
    };
    struct Lost {
        std::string pattern;
        std::vector<ConditionViolation> violations;  // evidence from the after report
    };
    std::vector<Gained> gained;
    std::vector<Lost> lost;
    std::vector<std::string> unchanged;
};

/// Compares two reports built against the same registry. A pattern counts as
/// present when it holds substantively (vacuous verdicts count as absent).
/// Throws RegistryMismatch when the pattern id sets differ.
DriftReport diff_reports(const DetectionReport& before, const DetectionReport& after);

std::string report_to_json(const DetectionReport& report, bool pretty = true);
DetectionReport report_from_json(const std::string& text);
std::string drift_to_json(const DriftReport& drift, bool pretty = true);

}  // namespace cpat
