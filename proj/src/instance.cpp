#include "cpat/instance.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cpat/digest.hpp"
#include "cpat/errors.hpp"

namespace cpat {

std::size_t ProblemInstance::total_operations() const {
    std::size_t n = 0;
    for (const auto& r : route) n += r.size();
    return n;
}

std::int64_t ProblemInstance::total_duration() const {
    std::int64_t d = 0;
    for (const auto& row : duration)
        for (std::int64_t v : row) d += v;
    return d;
}

std::vector<std::string> ProblemInstance::consistency_issues() const {
    std::vector<std::string> issues;
    if (route.size() != n_jobs) issues.push_back("route rows != n_jobs");
    if (duration.size() != n_jobs) issues.push_back("duration rows != n_jobs");
    for (std::size_t j = 0; j < std::min(route.size(), duration.size()); ++j) {
        if (route[j].size() != duration[j].size())
            issues.push_back("job " + std::to_string(j) + ": route/duration length mismatch");
        for (std::size_t m : route[j])
            if (m >= n_machines)
                issues.push_back("job " + std::to_string(j) + ": machine index out of range");
        for (std::int64_t d : duration[j])
            if (d < 0) issues.push_back("job " + std::to_string(j) + ": negative duration");
    }
    if (!machine_labels.empty() && machine_labels.size() != n_machines)
        issues.push_back("machine_labels size != n_machines");
    if (!job_labels.empty() && job_labels.size() != n_jobs)
        issues.push_back("job_labels size != n_jobs");
    if (flow_shop && !routes_are_flow_shop(*this))
        issues.push_back("flow_shop set but routes are not a flow shop");
    return issues;
}

bool routes_are_flow_shop(const ProblemInstance& inst) {
    if (inst.route.empty()) return true;
    const auto& first = inst.route.front();
    if (first.size() != inst.n_machines) return false;
    std::vector<bool> seen(inst.n_machines, false);
    for (std::size_t m : first) {
        if (m >= inst.n_machines || seen[m]) return false;
        seen[m] = true;
    }
    for (const auto& r : inst.route)
        if (r != first) return false;
    return true;
}

ProblemInstance extract_instance(const EventLog& log, const DetectionReport& report) {
    const Verdict* job_shop = report.find("JobShop");
    if (!job_shop || !job_shop->holds())
        throw PatternNotDetected(
            "extract_instance: the Job Shop pattern does not hold on this log");

    DerivedSequences derived = derive_sequences(log);

    ProblemInstance inst;
    inst.unit = TimeUnit::Milliseconds;

    // Dense machine indices in machine-id order.
    std::map<std::string, std::size_t> machine_index;
    for (const auto& [id, _] : derived.machines) {
        machine_index.emplace(id, machine_index.size());
        inst.machine_labels.push_back(id);
    }
    inst.n_machines = machine_index.size();

    for (const auto& [job, seq] : derived.jobs) {
        OperationSequence processing = filter_processing(seq);
        inst.job_labels.push_back(job);
        std::vector<std::size_t> route;
        std::vector<std::int64_t> durations;
        std::vector<std::string> names;
        for (const Operation& op : processing.ops) {
            route.push_back(machine_index.at(op.machine));
            durations.push_back(op.duration());
            names.push_back(op.activity);
        }
        inst.route.push_back(std::move(route));
        inst.duration.push_back(std::move(durations));
        inst.activities.push_back(std::move(names));
    }
    inst.n_jobs = inst.route.size();

    const Verdict* flow_shop = report.find("FlowShop");
    inst.flow_shop = flow_shop && flow_shop->holds();
    return inst;
}

// ---------------------------------------------------------------------------
// Benchmark text format
// ---------------------------------------------------------------------------

namespace {

bool is_comment_or_blank(std::string_view line) {
    std::size_t i = line.find_first_not_of(" \t\r");
    if (i == std::string_view::npos) return true;
    return line[i] == '#' || line.substr(i, 2) == "//";
}

std::vector<std::int64_t> split_ints(std::string_view line, bool& ok) {
    std::vector<std::int64_t> out;
    ok = true;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        if (i >= line.size()) break;
        bool neg = false;
        if (line[i] == '-') {
            neg = true;
            ++i;
        }
        if (i >= line.size() || line[i] < '0' || line[i] > '9') {
            ok = false;
            return out;
        }
        std::int64_t v = 0;
        while (i < line.size() && line[i] >= '0' && line[i] <= '9') {
            v = v * 10 + (line[i] - '0');
            ++i;
        }
        if (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') {
            ok = false;
            return out;
        }
        out.push_back(neg ? -v : v);
    }
    return out;
}

}  // namespace

ProblemInstance parse_benchmark_file(std::string_view text) {
    std::vector<std::pair<std::size_t, std::string_view>> lines;  // (1-based line, content)
    {
        std::size_t start = 0;
        std::size_t line_no = 1;
        while (start <= text.size()) {
            std::size_t end = text.find('\n', start);
            if (end == std::string_view::npos) end = text.size();
            std::string_view line = text.substr(start, end - start);
            if (!is_comment_or_blank(line)) lines.emplace_back(line_no, line);
            if (end == text.size()) break;
            start = end + 1;
            ++line_no;
        }
    }
    if (lines.empty())
        throw ParseError(ParseError::Kind::BadHeader, 1, "benchmark: no header line");

    bool ok = false;
    std::vector<std::int64_t> header = split_ints(lines[0].second, ok);
    if (!ok || header.size() != 2 || header[0] <= 0 || header[1] <= 0)
        throw ParseError(ParseError::Kind::BadHeader, lines[0].first,
                         "benchmark: header must be 'n_jobs n_machines'");
    const std::size_t n_jobs = static_cast<std::size_t>(header[0]);
    const std::size_t n_machines = static_cast<std::size_t>(header[1]);

    if (lines.size() - 1 < n_jobs)
        throw ParseError(ParseError::Kind::MissingRows, lines.back().first,
                         "benchmark: expected " + std::to_string(n_jobs) + " job rows, found " +
                             std::to_string(lines.size() - 1));
    if (lines.size() - 1 > n_jobs)
        throw ParseError(ParseError::Kind::TrailingContent, lines[1 + n_jobs].first,
                         "benchmark: unexpected content after the last job row");

    ProblemInstance inst;
    inst.n_jobs = n_jobs;
    inst.n_machines = n_machines;
    inst.unit = TimeUnit::Abstract;
    for (std::size_t j = 0; j < n_jobs; ++j) {
        const auto& [line_no, line] = lines[1 + j];
        std::vector<std::int64_t> values = split_ints(line, ok);
        if (!ok)
            throw ParseError(ParseError::Kind::RowLengthMismatch, line_no,
                             "benchmark: job row " + std::to_string(j) + " is not a list of integers");
        if (values.size() != 2 * n_machines)
            throw ParseError(ParseError::Kind::RowLengthMismatch, line_no,
                             "benchmark: job row " + std::to_string(j) + " has " +
                                 std::to_string(values.size()) + " values, expected " +
                                 std::to_string(2 * n_machines));
        std::vector<std::size_t> route;
        std::vector<std::int64_t> durations;
        for (std::size_t k = 0; k < n_machines; ++k) {
            std::int64_t machine = values[2 * k];
            std::int64_t dur = values[2 * k + 1];
            if (machine < 0 || machine >= static_cast<std::int64_t>(n_machines))
                throw ParseError(ParseError::Kind::BadMachineIndex, line_no,
                                 "benchmark: machine index " + std::to_string(machine) +
                                     " out of range in job " + std::to_string(j));
            if (dur < 0)
                throw ParseError(ParseError::Kind::NegativeDuration, line_no,
                                 "benchmark: negative duration in job " + std::to_string(j) +
                                     " position " + std::to_string(k));
            route.push_back(static_cast<std::size_t>(machine));
            durations.push_back(dur);
        }
        inst.route.push_back(std::move(route));
        inst.duration.push_back(std::move(durations));
    }
    for (std::size_t m = 0; m < n_machines; ++m) inst.machine_labels.push_back("m" + std::to_string(m));
    for (std::size_t j = 0; j < n_jobs; ++j) inst.job_labels.push_back("j" + std::to_string(j));
    inst.flow_shop = routes_are_flow_shop(inst);
    return inst;
}

std::string instance_to_benchmark(const ProblemInstance& inst) {
    std::ostringstream out;
    out << inst.n_jobs << ' ' << inst.n_machines << '\n';
    for (std::size_t j = 0; j < inst.n_jobs; ++j) {
        for (std::size_t k = 0; k < inst.route[j].size(); ++k) {
            if (k) out << ' ';
            out << inst.route[j][k] << ' ' << inst.duration[j][k];
        }
        out << '\n';
    }
    return out.str();
}

std::string instance_to_json(const ProblemInstance& inst, bool pretty) {
    nlohmann::json j;
    j["n_jobs"] = inst.n_jobs;
    j["n_machines"] = inst.n_machines;
    j["route"] = inst.route;
    j["duration"] = inst.duration;
    j["flow_shop"] = inst.flow_shop;
    j["unit"] = inst.unit == TimeUnit::Milliseconds ? "ms" : "abstract";
    if (!inst.machine_labels.empty()) j["machine_labels"] = inst.machine_labels;
    if (!inst.job_labels.empty()) j["job_labels"] = inst.job_labels;
    if (!inst.activities.empty()) j["activities"] = inst.activities;
    return pretty ? j.dump(2) : j.dump();
}

ProblemInstance instance_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw ParseError(ParseError::Kind::BadJson, 0, "instance: not valid JSON");
    ProblemInstance inst;
    try {
        inst.n_jobs = j.at("n_jobs").get<std::size_t>();
        inst.n_machines = j.at("n_machines").get<std::size_t>();
        inst.route = j.at("route").get<std::vector<std::vector<std::size_t>>>();
        inst.duration = j.at("duration").get<std::vector<std::vector<std::int64_t>>>();
        inst.flow_shop = j.value("flow_shop", false);
        inst.unit = j.value("unit", "abstract") == "ms" ? TimeUnit::Milliseconds
                                                        : TimeUnit::Abstract;
        inst.machine_labels = j.value("machine_labels", std::vector<std::string>{});
        inst.job_labels = j.value("job_labels", std::vector<std::string>{});
        inst.activities = j.value("activities", std::vector<std::vector<std::string>>{});
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(ParseError::Kind::BadJson, 0,
                         std::string("instance: malformed field: ") + e.what());
    }
    std::vector<std::string> issues = inst.consistency_issues();
    if (!issues.empty())
        throw ParseError(ParseError::Kind::BadJson, 0, "instance: " + issues.front());
    return inst;
}

std::string instance_digest(const ProblemInstance& inst) {
    Fnv1a h;
    h.update(static_cast<std::int64_t>(inst.n_jobs));
    h.update(static_cast<std::int64_t>(inst.n_machines));
    h.update(inst.unit == TimeUnit::Milliseconds ? "ms" : "abstract");
    h.update(static_cast<std::int64_t>(inst.flow_shop ? 1 : 0));
    for (std::size_t j = 0; j < inst.route.size(); ++j) {
        h.sep();
        for (std::size_t k = 0; k < inst.route[j].size(); ++k) {
            h.update(static_cast<std::int64_t>(inst.route[j][k]));
            h.update(inst.duration[j][k]);
        }
    }
    return h.hex();
}

}  // namespace cpat
