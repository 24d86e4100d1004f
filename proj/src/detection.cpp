#include "cpat/detection.hpp"

#include <algorithm>
#include <cstdlib>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "cpat/errors.hpp"

namespace cpat {

const Verdict* DetectionReport::find(const std::string& pattern) const {
    auto it = verdicts.find(pattern);
    return it == verdicts.end() ? nullptr : &it->second;
}

namespace {

// Collects violations with a per-condition cap.
class ViolationSink {
public:
    explicit ViolationSink(std::size_t cap) : cap_(cap) {}

    void add(ConditionViolation v) {
        std::size_t& count = per_condition_[v.condition];
        ++count;
        if (count <= cap_) violations_.push_back(std::move(v));
    }

    bool empty() const { return violations_.empty(); }
    std::vector<ConditionViolation> take() { return std::move(violations_); }

private:
    std::size_t cap_;
    std::unordered_map<std::string, std::size_t> per_condition_;
    std::vector<ConditionViolation> violations_;
};

Verdict finish(std::string pattern, ViolationSink& sink, bool domain_empty) {
    Verdict v;
    v.pattern = std::move(pattern);
    if (sink.empty()) {
        v.status = VerdictStatus::Holds;
        v.reason = NotEvaluatedReason::None;
        v.vacuous = domain_empty;
    } else {
        v.status = VerdictStatus::Violated;
        v.reason = NotEvaluatedReason::None;
        v.violations = sink.take();
    }
    return v;
}

Verdict not_evaluated(std::string pattern, NotEvaluatedReason reason) {
    Verdict v;
    v.pattern = std::move(pattern);
    v.status = VerdictStatus::NotEvaluated;
    v.reason = reason;
    return v;
}

std::size_t total_ops(const SequenceMap& seqs) {
    std::size_t n = 0;
    for (const auto& [_, seq] : seqs) n += seq.ops.size();
    return n;
}

}  // namespace

Verdict check_job_shop(const SequenceMap& jobs, const SequenceMap& machines,
                       const DetectionConfig& cfg) {
    ViolationSink sink(cfg.violation_cap);
    const TimeMs delta = cfg.delta;

    bool any_machine_ref = false;
    // (a) every processing operation runs on a machine.
    for (const auto& [job, seq] : jobs) {
        for (std::size_t i = 0; i < seq.ops.size(); ++i) {
            const Operation& op = seq.ops[i];
            if (op.machine.empty())
                sink.add({"JobShop.a", job, {i, i}, {op.start_event}, 0});
            else
                any_machine_ref = true;
        }
    }
    // (b) consecutive operations of one job do not overlap.
    for (const auto& [job, seq] : jobs) {
        for (std::size_t i = 0; i + 1 < seq.ops.size(); ++i) {
            const Operation& cur = seq.ops[i];
            const Operation& next = seq.ops[i + 1];
            TimeMs slack = cur.end - next.start;
            if (slack > delta)
                sink.add({"JobShop.b",
                          job,
                          {i, i + 1},
                          {cur.complete_event, next.start_event},
                          slack});
        }
    }
    // (c) consecutive operations on one machine do not overlap.
    for (const auto& [machine, seq] : machines) {
        for (std::size_t i = 0; i + 1 < seq.ops.size(); ++i) {
            const Operation& cur = seq.ops[i];
            const Operation& next = seq.ops[i + 1];
            TimeMs slack = cur.end - next.start;
            if (slack > delta)
                sink.add({"JobShop.c",
                          machine,
                          {i, i + 1},
                          {cur.complete_event, next.start_event},
                          slack});
        }
    }
    // Machine sequences stated over an empty domain while jobs reference
    // machines: (c) cannot be checked, so the pattern does not hold.
    if (machines.empty() && any_machine_ref)
        sink.add({"JobShop.c", "", {0, 0}, {}, 0});
    // (d) an activity is bound to one machine across the whole log.
    {
        struct First {
            const Operation* op;
            const std::string* job;
        };
        std::unordered_map<std::string_view, First> machine_of;
        for (const auto& [job, seq] : jobs) {
            for (std::size_t i = 0; i < seq.ops.size(); ++i) {
                const Operation& op = seq.ops[i];
                if (op.machine.empty() || op.activity.empty()) continue;
                auto [it, inserted] = machine_of.try_emplace(op.activity, First{&op, &job});
                if (!inserted && it->second.op->machine != op.machine)
                    sink.add({"JobShop.d",
                              job,
                              {i, i},
                              {it->second.op->start_event, op.start_event},
                              0});
            }
        }
    }
    return finish("JobShop", sink, total_ops(jobs) == 0 && total_ops(machines) == 0);
}

Verdict check_flow_shop(const SequenceMap& jobs, const SequenceMap& machines,
                        const DetectionConfig& cfg, const Verdict& job_shop) {
    if (!job_shop.holds()) return not_evaluated("FlowShop", NotEvaluatedReason::MissingPrerequisite);
    ViolationSink sink(cfg.violation_cap);
    const std::size_t n_machines = machines.size();

    const OperationSequence* reference = nullptr;  // first job's route
    for (const auto& [job, seq] : jobs) {
        if (seq.ops.size() != n_machines) {
            EventId witness = seq.ops.empty() ? 0 : seq.ops.front().start_event;
            sink.add({"FlowShop.length",
                      job,
                      {seq.ops.size(), n_machines},
                      witness ? std::vector<EventId>{witness} : std::vector<EventId>{},
                      0});
        }
        // Each machine at most once per job.
        std::unordered_map<std::string_view, std::size_t> first_visit;
        for (std::size_t i = 0; i < seq.ops.size(); ++i) {
            auto [it, inserted] = first_visit.try_emplace(seq.ops[i].machine, i);
            if (!inserted)
                sink.add({"FlowShop.once",
                          job,
                          {it->second, i},
                          {seq.ops[it->second].start_event, seq.ops[i].start_event},
                          0});
        }
        // All jobs share the reference route.
        if (!reference) {
            reference = &seq;
        } else {
            std::size_t common = std::min(reference->ops.size(), seq.ops.size());
            for (std::size_t i = 0; i < common; ++i) {
                if (reference->ops[i].machine != seq.ops[i].machine) {
                    sink.add({"FlowShop.order",
                              job,
                              {i, i},
                              {seq.ops[i].start_event, reference->ops[i].start_event},
                              0});
                    break;  // first divergence is the evidence
                }
            }
        }
    }
    return finish("FlowShop", sink, total_ops(jobs) == 0);
}

Verdict check_no_wait(const SequenceMap& jobs, const DetectionConfig& cfg,
                      const Verdict& job_shop) {
    if (!job_shop.holds()) return not_evaluated("NoWait", NotEvaluatedReason::MissingPrerequisite);
    ViolationSink sink(cfg.violation_cap);
    for (const auto& [job, seq] : jobs) {
        for (std::size_t i = 0; i + 1 < seq.ops.size(); ++i) {
            const Operation& cur = seq.ops[i];
            const Operation& next = seq.ops[i + 1];
            TimeMs gap = next.start - cur.end;
            TimeMs slack = std::abs(gap);
            if (slack > cfg.delta)
                sink.add({"NoWait.gap",
                          job,
                          {i, i + 1},
                          {cur.complete_event, next.start_event},
                          slack});
        }
    }
    return finish("NoWait", sink, total_ops(jobs) == 0);
}

DetectionReport detect_on_sequences(const DerivedSequences& derived, const std::string& digest,
                                    const Registry& registry, const DetectionConfig& cfg) {
    SequenceMap jobs;
    SequenceMap machines;
    for (const auto& [id, seq] : derived.jobs) jobs.emplace(id, filter_processing(seq));
    for (const auto& [id, seq] : derived.machines) machines.emplace(id, filter_processing(seq));

    DetectionReport report;
    report.config = cfg;
    report.log_digest = digest;
    report.diagnostics = derived.diagnostics;

    for (const std::string& id : registry.evaluation_order()) {
        const PatternDescriptor& pattern = registry.get(id);

        bool missing_prereq = false;
        for (const std::string& dep : pattern.necessary) {
            const Verdict* v = report.find(dep);
            if (!v || !v->holds()) {
                missing_prereq = true;
                break;
            }
        }

        Verdict verdict;
        if (!pattern.has_evaluator) {
            verdict = not_evaluated(id, cfg.evaluate_metadata_only && missing_prereq
                                            ? NotEvaluatedReason::MissingPrerequisite
                                            : NotEvaluatedReason::NoEvaluator);
        } else if (id == "JobShop") {
            verdict = check_job_shop(jobs, machines, cfg);
        } else if (id == "FlowShop") {
            verdict = check_flow_shop(jobs, machines, cfg, *report.find("JobShop"));
        } else if (id == "NoWait") {
            verdict = check_no_wait(jobs, cfg, *report.find("JobShop"));
        } else {
            verdict = not_evaluated(id, NotEvaluatedReason::NoEvaluator);
        }
        report.verdicts.emplace(id, std::move(verdict));
    }
    return report;
}

DetectionReport detect_all(const EventLog& log, const Registry& registry,
                           const DetectionConfig& cfg) {
    return detect_on_sequences(derive_sequences(log), log_digest(log), registry, cfg);
}

DriftReport diff_reports(const DetectionReport& before, const DetectionReport& after) {
    auto same_keys = [&] {
        if (before.verdicts.size() != after.verdicts.size()) return false;
        auto a = before.verdicts.begin();
        auto b = after.verdicts.begin();
        for (; a != before.verdicts.end(); ++a, ++b)
            if (a->first != b->first) return false;
        return true;
    };
    if (!same_keys())
        throw RegistryMismatch("drift: reports were built against different pattern sets");

    DriftReport drift;
    for (const auto& [id, before_v] : before.verdicts) {
        const Verdict& after_v = after.verdicts.at(id);
        const bool was = before_v.holds_substantive();
        const bool is = after_v.holds_substantive();
        if (!was && is) {
            std::string note;
            if (before_v.holds() && before_v.vacuous) note = "vacuous -> substantive";
            drift.gained.push_back({id, std::move(note)});
        } else if (was && !is) {
            drift.lost.push_back({id, after_v.violations});
        } else {
            drift.unchanged.push_back(id);
        }
    }
    return drift;
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

namespace {

nlohmann::json violation_to_json(const ConditionViolation& v) {
    return {{"condition", v.condition},
            {"subject", v.subject},
            {"op_indices", {v.operation_indices.first, v.operation_indices.second}},
            {"event_ids", v.event_ids},
            {"slack_ms", v.slack}};
}

ConditionViolation violation_from_json(const nlohmann::json& j) {
    ConditionViolation v;
    v.condition = j.at("condition").get<std::string>();
    v.subject = j.at("subject").get<std::string>();
    if (j.contains("op_indices")) {
        v.operation_indices.first = j["op_indices"].at(0).get<std::size_t>();
        v.operation_indices.second = j["op_indices"].at(1).get<std::size_t>();
    }
    v.event_ids = j.value("event_ids", std::vector<EventId>{});
    v.slack = j.at("slack_ms").get<TimeMs>();
    return v;
}

const char* status_name(VerdictStatus s) {
    switch (s) {
        case VerdictStatus::Holds: return "holds";
        case VerdictStatus::Violated: return "violated";
        case VerdictStatus::NotEvaluated: return "not_evaluated";
    }
    return "not_evaluated";
}

const char* reason_name(NotEvaluatedReason r) {
    switch (r) {
        case NotEvaluatedReason::MissingPrerequisite: return "missing_prerequisite";
        case NotEvaluatedReason::NoEvaluator: return "no_evaluator";
        case NotEvaluatedReason::None: return "";
    }
    return "";
}

}  // namespace

std::string report_to_json(const DetectionReport& report, bool pretty) {
    nlohmann::json j;
    j["log_digest"] = report.log_digest;
    j["delta"] = report.config.delta;
    nlohmann::json verdicts = nlohmann::json::array();
    for (const auto& [id, v] : report.verdicts) {
        nlohmann::json jv;
        jv["pattern"] = id;
        jv["status"] = status_name(v.status);
        if (v.status == VerdictStatus::NotEvaluated) jv["reason"] = reason_name(v.reason);
        if (v.vacuous) jv["vacuous"] = true;
        nlohmann::json arr = nlohmann::json::array();
        for (const ConditionViolation& cv : v.violations) arr.push_back(violation_to_json(cv));
        jv["violations"] = arr;
        verdicts.push_back(std::move(jv));
    }
    j["verdicts"] = verdicts;
    if (!report.diagnostics.empty()) {
        nlohmann::json diags = nlohmann::json::array();
        for (const Diagnostic& d : report.diagnostics) {
            const char* kind = d.kind == Diagnostic::Kind::UnmatchedEvent ? "unmatched_event"
                               : d.kind == Diagnostic::Kind::ClockSkew    ? "clock_skew"
                                                                          : "ungroupable_event";
            diags.push_back({{"kind", kind}, {"events", d.events}, {"detail", d.detail}});
        }
        j["diagnostics"] = diags;
    }
    return pretty ? j.dump(2) : j.dump();
}

DetectionReport report_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw ParseError(ParseError::Kind::BadJson, 0, "report: not valid JSON");
    DetectionReport report;
    try {
        report.log_digest = j.at("log_digest").get<std::string>();
        report.config.delta = j.at("delta").get<TimeMs>();
        for (const auto& jv : j.at("verdicts")) {
            Verdict v;
            v.pattern = jv.at("pattern").get<std::string>();
            std::string status = jv.at("status").get<std::string>();
            if (status == "holds") {
                v.status = VerdictStatus::Holds;
                v.reason = NotEvaluatedReason::None;
            } else if (status == "violated") {
                v.status = VerdictStatus::Violated;
                v.reason = NotEvaluatedReason::None;
            } else {
                v.status = VerdictStatus::NotEvaluated;
                std::string reason = jv.value("reason", "no_evaluator");
                v.reason = reason == "missing_prerequisite" ? NotEvaluatedReason::MissingPrerequisite
                                                            : NotEvaluatedReason::NoEvaluator;
            }
            v.vacuous = jv.value("vacuous", false);
            if (jv.contains("violations"))
                for (const auto& cv : jv.at("violations"))
                    v.violations.push_back(violation_from_json(cv));
            report.verdicts.emplace(v.pattern, std::move(v));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(ParseError::Kind::BadJson, 0,
                         std::string("report: malformed field: ") + e.what());
    }
    return report;
}

std::string drift_to_json(const DriftReport& drift, bool pretty) {
    nlohmann::json j;
    nlohmann::json gained = nlohmann::json::array();
    for (const auto& g : drift.gained) {
        nlohmann::json item{{"pattern", g.pattern}};
        if (!g.note.empty()) item["note"] = g.note;
        gained.push_back(std::move(item));
    }
    nlohmann::json lost = nlohmann::json::array();
    for (const auto& l : drift.lost) {
        nlohmann::json arr = nlohmann::json::array();
        for (const ConditionViolation& cv : l.violations) arr.push_back(violation_to_json(cv));
        lost.push_back({{"pattern", l.pattern}, {"violations", arr}});
    }
    j["gained"] = gained;
    j["lost"] = lost;
    j["unchanged"] = drift.unchanged;
    return pretty ? j.dump(2) : j.dump();
}

}  // namespace cpat
