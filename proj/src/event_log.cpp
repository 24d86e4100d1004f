#include "cpat/event_log.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_map>
#include <unordered_set>

#include "cpat/digest.hpp"

namespace cpat {

AttrValue Event::attr(std::string_view name) const {
    if (name == "event") return id;
    if (name == "timestamp")
        return timestamp == kNoTime ? AttrValue{} : AttrValue{Timestamp{timestamp}};
    if (name == "activity") return activity.empty() ? AttrValue{} : AttrValue{activity};
    if (name == "transaction") return transaction.empty() ? AttrValue{} : AttrValue{transaction};
    if (name == "machine") return machine.empty() ? AttrValue{} : AttrValue{machine};
    if (name == "job") return job.empty() ? AttrValue{} : AttrValue{job};
    if (name == "activity_instance")
        return activity_instance.empty() ? AttrValue{} : AttrValue{activity_instance};
    for (const auto& [key, value] : extra)
        if (key == name) return value;
    return {};
}

std::size_t EventLog::event_count() const {
    std::size_t n = 0;
    for (const auto& c : cases) n += c.trace.size();
    return n;
}

// ---------------------------------------------------------------------------
// CSV parsing
// ---------------------------------------------------------------------------

namespace {

// One CSV record, RFC-4180 quoting. Returns false at end of input.
// `line` is advanced past every newline consumed (including quoted ones).
bool next_record(std::string_view text, std::size_t& pos, std::size_t& line,
                 std::vector<std::string>& fields) {
    fields.clear();
    if (pos >= text.size()) return false;
    std::string field;
    bool in_quotes = false;
    bool any = false;
    while (pos < text.size()) {
        char c = text[pos];
        if (in_quotes) {
            if (c == '"') {
                if (pos + 1 < text.size() && text[pos + 1] == '"') {
                    field += '"';
                    ++pos;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            ++pos;
            continue;
        }
        if (c == '"' && field.empty()) {
            in_quotes = true;
            ++pos;
            any = true;
            continue;
        }
        if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            ++pos;
            any = true;
            continue;
        }
        if (c == '\n' || c == '\r') {
            if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
            ++pos;
            ++line;
            fields.push_back(std::move(field));
            return true;
        }
        field += c;
        ++pos;
        any = true;
    }
    (void)any;
    fields.push_back(std::move(field));
    ++line;
    return true;
}

bool parse_int64(std::string_view s, std::int64_t& out) {
    if (s.empty()) return false;
    std::size_t i = 0;
    bool neg = false;
    if (s[0] == '+' || s[0] == '-') {
        neg = s[0] == '-';
        i = 1;
        if (i == s.size()) return false;
    }
    std::int64_t v = 0;
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
        v = v * 10 + (s[i] - '0');
    }
    out = neg ? -v : v;
    return true;
}

}  // namespace

EventLog parse_csv_log(std::string_view text, const LogSchema& schema) {
    std::size_t pos = 0;
    std::size_t line = 1;
    std::vector<std::string> fields;

    if (!next_record(text, pos, line, fields) || (fields.size() == 1 && fields[0].empty()))
        throw ParseError(ParseError::Kind::BadHeader, 1, "csv: missing header row");

    constexpr int kMissing = -1;
    int col_case = kMissing, col_event = kMissing, col_ts = kMissing, col_act = kMissing,
        col_tx = kMissing, col_mach = kMissing, col_job = kMissing, col_inst = kMissing,
        col_dur = kMissing;
    std::vector<int> extra_cols;
    std::vector<std::string> header = fields;
    for (int i = 0; i < static_cast<int>(header.size()); ++i) {
        const std::string& h = header[i];
        if (h == schema.case_col) col_case = i;
        else if (h == schema.event_col) col_event = i;
        else if (h == schema.timestamp_col) col_ts = i;
        else if (h == schema.activity_col) col_act = i;
        else if (h == schema.transaction_col) col_tx = i;
        else if (h == schema.machine_col) col_mach = i;
        else if (h == schema.job_col) col_job = i;
        else if (h == schema.activity_instance_col) col_inst = i;
        else if (h == schema.duration_col) col_dur = i;
        else extra_cols.push_back(i);
    }
    if (col_case == kMissing || col_event == kMissing || col_ts == kMissing ||
        col_act == kMissing)
        throw ParseError(ParseError::Kind::BadHeader, 1,
                         "csv: header must map case, event, timestamp and activity columns");
    // (start, duration) logs have no transaction column; each row is one
    // operation and the completion event is synthesized.
    const bool duration_adapter = col_tx == kMissing && col_dur != kMissing;
    if (col_tx == kMissing && !duration_adapter)
        throw ParseError(ParseError::Kind::BadHeader, 1,
                         "csv: header must map a transaction (or duration) column");

    EventLog log;
    log.case_perspective = schema.perspective;
    std::unordered_map<std::string, std::size_t> case_index;
    std::unordered_set<std::int64_t> seen_ids;
    const std::size_t ncols = header.size();

    auto get = [&](int col) -> const std::string& { return fields[static_cast<std::size_t>(col)]; };

    std::size_t row_ordinal = 0;
    while (next_record(text, pos, line, fields)) {
        const std::size_t row_line = line - 1;  // line already advanced past the record
        if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
        if (fields.size() != ncols)
            throw ParseError(ParseError::Kind::MalformedRow, row_line,
                             "csv: row has " + std::to_string(fields.size()) + " fields, header has " +
                                 std::to_string(ncols));
        ++row_ordinal;

        Event ev;
        if (!parse_int64(get(col_event), ev.id))
            throw ParseError(ParseError::Kind::MalformedRow, row_line,
                             "csv: event id is not an integer: '" + get(col_event) + "'");
        if (!seen_ids.insert(ev.id).second)
            throw ParseError(ParseError::Kind::DuplicateEventId, row_line,
                             "csv: duplicate event id " + std::to_string(ev.id));
        auto ts = parse_timestamp(get(col_ts), schema.timestamp_format);
        if (!ts)
            throw ParseError(ParseError::Kind::UnparseableTimestamp, row_line,
                             "csv: unparseable timestamp '" + get(col_ts) + "'");
        ev.timestamp = *ts;
        ev.activity = get(col_act);
        if (col_mach != kMissing) ev.machine = get(col_mach);
        if (col_job != kMissing) ev.job = get(col_job);
        if (col_inst != kMissing) ev.activity_instance = get(col_inst);
        for (int i : extra_cols)
            if (!get(i).empty()) ev.extra.emplace_back(header[static_cast<std::size_t>(i)], get(i));

        const std::string& case_id = get(col_case);
        if (case_id.empty())
            throw ParseError(ParseError::Kind::MalformedRow, row_line, "csv: empty case id");
        auto [it, inserted] = case_index.try_emplace(case_id, log.cases.size());
        if (inserted) log.cases.push_back(Case{case_id, {}});
        Case& cs = log.cases[it->second];

        if (duration_adapter) {
            std::int64_t dur = 0;
            if (!parse_int64(get(col_dur), dur) || dur < 0)
                throw ParseError(ParseError::Kind::MalformedRow, row_line,
                                 "csv: duration is not a non-negative integer: '" + get(col_dur) +
                                     "'");
            if (ev.id < 0)
                throw ParseError(ParseError::Kind::MalformedRow, row_line,
                                 "csv: duration-adapter logs need non-negative event ids");
            Event complete = ev;
            complete.id = -ev.id - 1;  // synthesized completion id, disjoint from file ids
            complete.timestamp = ev.timestamp + dur;
            ev.transaction = "start processing";
            complete.transaction = "complete processing";
            if (ev.activity_instance.empty()) {
                ev.activity_instance = "r" + std::to_string(row_ordinal);
                complete.activity_instance = ev.activity_instance;
            }
            cs.trace.push_back(std::move(ev));
            cs.trace.push_back(std::move(complete));
        } else {
            ev.transaction = get(col_tx);
            cs.trace.push_back(std::move(ev));
        }
    }
    return log;
}

// ---------------------------------------------------------------------------
// Operation derivation
// ---------------------------------------------------------------------------

namespace {

enum class Phase { Start, Complete, Unknown };

// "start processing" -> (Start, "processing"); "complete" -> (Complete, "").
Phase split_transaction(std::string_view tx, std::string_view& kind_name) {
    std::size_t space = tx.find(' ');
    std::string_view head = space == std::string_view::npos ? tx : tx.substr(0, space);
    kind_name = space == std::string_view::npos ? std::string_view{} : tx.substr(space + 1);
    if (head == "start") return Phase::Start;
    if (head == "complete") return Phase::Complete;
    return Phase::Unknown;
}

struct PendingGroup {
    std::vector<const Event*> starts;
    std::vector<const Event*> completes;
    std::string kind_name;
};

}  // namespace

DerivedSequences derive_sequences(const EventLog& log) {
    DerivedSequences out;
    std::vector<Operation> ops;

    for (const Case& cs : log.cases) {
        // Group key: activity-instance attribute when present, otherwise
        // (activity, transaction kind) with ordinal pairing in trace order.
        std::unordered_map<std::string, PendingGroup> groups;
        std::vector<const std::string*> group_order;

        for (const Event& ev : cs.trace) {
            if (ev.timestamp == kNoTime) {
                out.diagnostics.push_back({Diagnostic::Kind::UngroupableEvent,
                                           {ev.id},
                                           "event has no timestamp"});
                continue;
            }
            std::string_view kind_name;
            Phase phase = split_transaction(ev.transaction, kind_name);
            if (phase == Phase::Unknown) {
                out.diagnostics.push_back({Diagnostic::Kind::UngroupableEvent,
                                           {ev.id},
                                           "unrecognized transaction '" + ev.transaction + "'"});
                continue;
            }
            std::string key;
            if (!ev.activity_instance.empty()) {
                key = "i\x1f" + ev.activity_instance;
            } else if (!ev.activity.empty()) {
                key = "a\x1f" + ev.activity + "\x1f" + std::string(kind_name);
            } else {
                out.diagnostics.push_back({Diagnostic::Kind::UngroupableEvent,
                                           {ev.id},
                                           "event has neither activity instance nor activity"});
                continue;
            }
            auto [it, inserted] = groups.try_emplace(std::move(key));
            if (inserted) {
                it->second.kind_name = std::string(kind_name);
                group_order.push_back(&it->first);
            }
            if (phase == Phase::Start)
                it->second.starts.push_back(&ev);
            else
                it->second.completes.push_back(&ev);
        }

        for (const std::string* key : group_order) {
            PendingGroup& g = groups[*key];
            const std::size_t paired = std::min(g.starts.size(), g.completes.size());
            for (std::size_t k = 0; k < paired; ++k) {
                const Event& s = *g.starts[k];
                const Event& c = *g.completes[k];
                if (c.timestamp < s.timestamp) {
                    out.diagnostics.push_back({Diagnostic::Kind::ClockSkew,
                                               {s.id, c.id},
                                               "operation completes before it starts"});
                    continue;
                }
                Operation op;
                op.activity = s.activity.empty() ? c.activity : s.activity;
                op.start = s.timestamp;
                op.end = c.timestamp;
                op.transaction_name = g.kind_name.empty() ? "processing" : g.kind_name;
                op.transaction_kind = op.transaction_name == "processing"
                                          ? TransactionKind::Processing
                                          : TransactionKind::Other;
                op.start_event = s.id;
                op.complete_event = c.id;
                std::string machine_attr = s.machine.empty() ? c.machine : s.machine;
                std::string job_attr = s.job.empty() ? c.job : s.job;
                if (log.case_perspective == Perspective::Job) {
                    op.job = cs.id;
                    op.machine = std::move(machine_attr);
                } else {
                    op.machine = cs.id;
                    op.job = std::move(job_attr);
                }
                ops.push_back(std::move(op));
            }
            for (std::size_t k = paired; k < g.starts.size(); ++k)
                out.diagnostics.push_back({Diagnostic::Kind::UnmatchedEvent,
                                           {g.starts[k]->id},
                                           "start event without completion"});
            for (std::size_t k = paired; k < g.completes.size(); ++k)
                out.diagnostics.push_back({Diagnostic::Kind::UnmatchedEvent,
                                           {g.completes[k]->id},
                                           "completion event without start"});
        }
    }

    for (const Operation& op : ops) {
        if (!op.job.empty()) {
            auto [it, inserted] = out.jobs.try_emplace(op.job);
            if (inserted) it->second.owner = op.job;
            it->second.ops.push_back(op);
        }
        if (!op.machine.empty()) {
            auto [it, inserted] = out.machines.try_emplace(op.machine);
            if (inserted) it->second.owner = op.machine;
            it->second.ops.push_back(op);
        }
    }
    auto by_start = [](const Operation& a, const Operation& b) {
        if (a.start != b.start) return a.start < b.start;
        if (a.end != b.end) return a.end < b.end;
        return a.start_event < b.start_event;
    };
    for (auto& [_, seq] : out.jobs) std::sort(seq.ops.begin(), seq.ops.end(), by_start);
    for (auto& [_, seq] : out.machines) std::sort(seq.ops.begin(), seq.ops.end(), by_start);
    return out;
}

std::map<std::string, OperationSequence> derive_job_sequences(const EventLog& log) {
    return derive_sequences(log).jobs;
}

std::map<std::string, OperationSequence> derive_machine_sequences(const EventLog& log) {
    return derive_sequences(log).machines;
}

OperationSequence filter_processing(const OperationSequence& seq) {
    OperationSequence out;
    out.owner = seq.owner;
    out.ops.reserve(seq.ops.size());
    for (const Operation& op : seq.ops)
        if (op.transaction_kind == TransactionKind::Processing) out.ops.push_back(op);
    return out;
}

std::string log_digest(const EventLog& log) {
    Fnv1a h;
    h.update(log.case_perspective == Perspective::Job ? "job" : "machine");
    for (const Case& cs : log.cases) {
        h.sep();
        h.update(cs.id);
        for (const Event& ev : cs.trace) {
            h.sep();
            h.update(ev.id);
            h.update(ev.timestamp);
            h.update(ev.activity);
            h.sep();
            h.update(ev.transaction);
            h.sep();
            h.update(ev.machine);
            h.sep();
            h.update(ev.job);
            h.sep();
            h.update(ev.activity_instance);
            for (const auto& [name, value] : ev.extra) {
                h.sep();
                h.update(name);
                h.sep();
                if (const auto* s = std::get_if<std::string>(&value)) h.update(*s);
                else if (const auto* i = std::get_if<std::int64_t>(&value)) h.update(*i);
                else if (const auto* t = std::get_if<Timestamp>(&value)) h.update(t->ms);
            }
        }
    }
    return h.hex();
}

}  // namespace cpat
