#include "cpat/executor.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

#include "cpat/errors.hpp"

namespace cpat {

namespace {

std::string activity_name(const ProblemInstance& inst, std::size_t job, std::size_t pos) {
    if (job < inst.activities.size() && pos < inst.activities[job].size() &&
        !inst.activities[job][pos].empty())
        return inst.activities[job][pos];
    // Synthesized names are keyed by machine so that one activity never
    // appears on two machines.
    std::size_t m = inst.route[job][pos];
    return "op_" + (m < inst.machine_labels.size() ? inst.machine_labels[m]
                                                   : "m" + std::to_string(m));
}

}  // namespace

EventLog execute_schedule(const ProblemInstance& inst, const Schedule& s, TimeMs epoch,
                          Perspective perspective) {
    std::vector<ScheduleViolation> violations = validate_schedule(inst, s);
    if (!violations.empty())
        throw InfeasibleSchedule("execute: schedule does not validate: " +
                                 violations.front().detail);

    EventLog log;
    log.case_perspective = perspective;

    // Case ids in stable order: job order (or machine index order).
    std::map<std::string, std::size_t> case_index;
    auto case_of = [&](const std::string& id) -> Case& {
        auto [it, inserted] = case_index.try_emplace(id, log.cases.size());
        if (inserted) log.cases.push_back(Case{id, {}});
        return log.cases[it->second];
    };

    if (perspective == Perspective::Job)
        for (std::size_t j = 0; j < inst.n_jobs; ++j)
            case_of(j < inst.job_labels.size() ? inst.job_labels[j] : "j" + std::to_string(j));
    else
        for (std::size_t m = 0; m < inst.n_machines; ++m)
            case_of(m < inst.machine_labels.size() ? inst.machine_labels[m]
                                                   : "m" + std::to_string(m));

    EventId next_event = 1;
    std::int64_t next_instance = 1;
    for (std::size_t j = 0; j < inst.n_jobs; ++j) {
        const std::string job_id =
            j < inst.job_labels.size() ? inst.job_labels[j] : "j" + std::to_string(j);
        for (std::size_t k = 0; k < inst.route[j].size(); ++k) {
            const std::size_t m = inst.route[j][k];
            const std::string machine_id =
                m < inst.machine_labels.size() ? inst.machine_labels[m] : "m" + std::to_string(m);

            Event start;
            start.id = next_event++;
            start.timestamp = epoch + s.start[j][k];
            start.activity = activity_name(inst, j, k);
            start.transaction = "start processing";
            start.activity_instance = std::to_string(next_instance);
            Event complete = start;
            complete.id = next_event++;
            complete.timestamp = epoch + s.start[j][k] + inst.duration[j][k];
            complete.transaction = "complete processing";
            ++next_instance;

            if (perspective == Perspective::Job) {
                start.machine = machine_id;
                complete.machine = machine_id;
                Case& cs = case_of(job_id);
                cs.trace.push_back(std::move(start));
                cs.trace.push_back(std::move(complete));
            } else {
                start.job = job_id;
                complete.job = job_id;
                Case& cs = case_of(machine_id);
                cs.trace.push_back(std::move(start));
                cs.trace.push_back(std::move(complete));
            }
        }
    }

    // Traces ordered by time, matching how a real log would be recorded.
    for (Case& cs : log.cases)
        std::stable_sort(cs.trace.begin(), cs.trace.end(), [](const Event& a, const Event& b) {
            if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
            return a.id < b.id;
        });
    return log;
}

EventLog inject_noise(const EventLog& log, const NoiseSpec& spec) {
    EventLog out = log;
    if (spec.magnitude == 0) return out;
    std::mt19937_64 rng(spec.seed);
    std::uniform_int_distribution<TimeMs> offset(-spec.magnitude, spec.magnitude);
    for (Case& cs : out.cases) {
        for (Event& ev : cs.trace)
            if (ev.timestamp != kNoTime) ev.timestamp += offset(rng);
        std::stable_sort(cs.trace.begin(), cs.trace.end(), [](const Event& a, const Event& b) {
            if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
            return a.id < b.id;
        });
    }
    return out;
}

// ---------------------------------------------------------------------------
// Writers
// ---------------------------------------------------------------------------

namespace {

std::string csv_quote(const std::string& value) {
    if (value.find_first_of(",\"\n\r") == std::string::npos) return value;
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void xml_escape(std::ostringstream& out, const std::string& value) {
    for (char c : value) {
        switch (c) {
            case '&': out << "&amp;"; break;
            case '<': out << "&lt;"; break;
            case '>': out << "&gt;"; break;
            case '"': out << "&quot;"; break;
            case '\'': out << "&apos;"; break;
            default: out << c;
        }
    }
}

}  // namespace

std::string write_csv(const EventLog& log, const LogSchema& schema) {
    const bool machine_perspective = log.case_perspective == Perspective::Machine;
    std::ostringstream out;
    out << schema.case_col << ',' << schema.event_col << ',' << schema.timestamp_col << ','
        << schema.activity_col << ',' << schema.transaction_col << ','
        << (machine_perspective ? schema.job_col : schema.machine_col) << ','
        << schema.activity_instance_col << '\n';
    for (const Case& cs : log.cases) {
        for (const Event& ev : cs.trace) {
            out << csv_quote(cs.id) << ',' << ev.id << ','
                << format_timestamp(ev.timestamp, schema.timestamp_format) << ','
                << csv_quote(ev.activity) << ',' << csv_quote(ev.transaction) << ','
                << csv_quote(machine_perspective ? ev.job : ev.machine) << ','
                << csv_quote(ev.activity_instance) << '\n';
        }
    }
    return out.str();
}

std::string write_xes(const EventLog& log) {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<log xes.version=\"1.0\" xes.features=\"\">\n";
    out << "  <extension name=\"Concept\" prefix=\"concept\" "
           "uri=\"http://www.xes-standard.org/concept.xesext\"/>\n";
    out << "  <extension name=\"Time\" prefix=\"time\" "
           "uri=\"http://www.xes-standard.org/time.xesext\"/>\n";
    out << "  <extension name=\"Lifecycle\" prefix=\"lifecycle\" "
           "uri=\"http://www.xes-standard.org/lifecycle.xesext\"/>\n";
    out << "  <extension name=\"Organizational\" prefix=\"org\" "
           "uri=\"http://www.xes-standard.org/org.xesext\"/>\n";
    auto string_attr = [&](int indent, const std::string& key, const std::string& value) {
        out << std::string(static_cast<std::size_t>(indent), ' ') << "<string key=\"";
        xml_escape(out, key);
        out << "\" value=\"";
        xml_escape(out, value);
        out << "\"/>\n";
    };
    for (const Case& cs : log.cases) {
        out << "  <trace>\n";
        string_attr(4, "concept:name", cs.id);
        for (const Event& ev : cs.trace) {
            out << "    <event>\n";
            out << "      <int key=\"identity:id\" value=\"" << ev.id << "\"/>\n";
            if (!ev.activity.empty()) string_attr(6, "concept:name", ev.activity);
            if (ev.timestamp != kNoTime)
                out << "      <date key=\"time:timestamp\" value=\"" << format_iso8601(ev.timestamp)
                    << "\"/>\n";
            if (!ev.transaction.empty()) string_attr(6, "lifecycle:transition", ev.transaction);
            if (!ev.machine.empty()) string_attr(6, "org:resource", ev.machine);
            if (!ev.job.empty()) string_attr(6, "cpat:job", ev.job);
            if (!ev.activity_instance.empty())
                string_attr(6, "concept:instance", ev.activity_instance);
            for (const auto& [name, value] : ev.extra) {
                if (const auto* s = std::get_if<std::string>(&value)) {
                    string_attr(6, name, *s);
                } else if (const auto* i = std::get_if<std::int64_t>(&value)) {
                    out << "      <int key=\"";
                    xml_escape(out, name);
                    out << "\" value=\"" << *i << "\"/>\n";
                } else if (const auto* t = std::get_if<Timestamp>(&value)) {
                    out << "      <date key=\"";
                    xml_escape(out, name);
                    out << "\" value=\"" << format_iso8601(t->ms) << "\"/>\n";
                }
            }
            out << "    </event>\n";
        }
        out << "  </trace>\n";
    }
    out << "</log>\n";
    return out.str();
}

}  // namespace cpat
