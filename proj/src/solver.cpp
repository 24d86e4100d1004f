#include "cpat/solver.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cpat/errors.hpp"

namespace cpat {

namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

struct SearchState {
    const ProblemInstance& inst;
    std::vector<std::size_t> next_pos;     // per job: next unscheduled route position
    std::vector<std::int64_t> job_ready;   // per job: completion of its last scheduled op
    std::vector<std::int64_t> mach_avail;  // per machine: completion of its last op
    std::vector<std::int64_t> job_remaining;   // per job: unscheduled work
    std::vector<std::int64_t> mach_remaining;  // per machine: unscheduled work
    std::vector<std::vector<std::int64_t>> start;
    std::size_t scheduled = 0;
    std::size_t total = 0;

    std::int64_t best_makespan = kInf;
    Schedule best;
    std::vector<std::int64_t> incumbents;

    std::uint64_t nodes = 0;
    bool timed_out = false;
    std::chrono::steady_clock::time_point deadline;

    explicit SearchState(const ProblemInstance& instance) : inst(instance) {
        const std::size_t jobs = inst.n_jobs;
        next_pos.assign(jobs, 0);
        job_ready.assign(jobs, 0);
        mach_avail.assign(inst.n_machines, 0);
        job_remaining.assign(jobs, 0);
        mach_remaining.assign(inst.n_machines, 0);
        start.resize(jobs);
        for (std::size_t j = 0; j < jobs; ++j) {
            start[j].assign(inst.route[j].size(), 0);
            total += inst.route[j].size();
            for (std::size_t k = 0; k < inst.route[j].size(); ++k) {
                job_remaining[j] += inst.duration[j][k];
                mach_remaining[inst.route[j][k]] += inst.duration[j][k];
            }
        }
    }

    std::int64_t current_makespan() const {
        std::int64_t m = 0;
        for (std::int64_t t : job_ready) m = std::max(m, t);
        return m;
    }

    // max over jobs (head + remaining work) and machines (avail + remaining).
    std::int64_t lower_bound() const {
        std::int64_t lb = current_makespan();
        for (std::size_t j = 0; j < inst.n_jobs; ++j)
            lb = std::max(lb, job_ready[j] + job_remaining[j]);
        for (std::size_t m = 0; m < inst.n_machines; ++m)
            lb = std::max(lb, mach_avail[m] + mach_remaining[m]);
        return lb;
    }

    bool deadline_hit() {
        if (timed_out) return true;
        if ((nodes & 1023) == 0 && std::chrono::steady_clock::now() >= deadline)
            timed_out = true;
        return timed_out;
    }

    void record_leaf() {
        std::int64_t makespan = current_makespan();
        if (makespan < best_makespan) {
            best_makespan = makespan;
            best.start = start;
            best.makespan = makespan;
            incumbents.push_back(makespan);
        }
    }

    void dfs() {
        ++nodes;
        if (deadline_hit()) return;
        if (scheduled == total) {
            record_leaf();
            return;
        }
        if (lower_bound() >= best_makespan) return;

        struct Candidate {
            std::size_t job;
            std::int64_t est;  // earliest feasible start
            std::int64_t ect;  // earliest completion
        };
        // One ready operation per unfinished job.
        std::vector<Candidate> ready;
        ready.reserve(inst.n_jobs);
        std::int64_t min_ect = kInf;
        for (std::size_t j = 0; j < inst.n_jobs; ++j) {
            std::size_t pos = next_pos[j];
            if (pos >= inst.route[j].size()) continue;
            std::int64_t est = std::max(job_ready[j], mach_avail[inst.route[j][pos]]);
            std::int64_t ect = est + inst.duration[j][pos];
            ready.push_back({j, est, ect});
            min_ect = std::min(min_ect, ect);
        }
        // Operations that cannot start before the earliest completion are
        // dominated: scheduling the earliest-completing operation first never
        // delays them. Keep only genuine conflicts (and always the earliest
        // starter itself).
        std::vector<Candidate> branches;
        for (const Candidate& c : ready)
            if (c.est < min_ect) branches.push_back(c);
        if (branches.empty()) {
            // Degenerate: the earliest completion belongs to a zero-duration
            // operation starting at the global earliest start. Committing it
            // consumes no capacity and is dominant, so no branching is needed.
            auto best_it = std::min_element(ready.begin(), ready.end(),
                                            [](const Candidate& a, const Candidate& b) {
                                                if (a.ect != b.ect) return a.ect < b.ect;
                                                if (a.est != b.est) return a.est < b.est;
                                                return a.job < b.job;
                                            });
            branches.push_back(*best_it);
        }
        std::sort(branches.begin(), branches.end(), [](const Candidate& a, const Candidate& b) {
            if (a.est != b.est) return a.est < b.est;
            return a.job < b.job;
        });

        for (const Candidate& c : branches) {
            const std::size_t j = c.job;
            const std::size_t pos = next_pos[j];
            const std::size_t m = inst.route[j][pos];
            const std::int64_t dur = inst.duration[j][pos];

            const std::int64_t saved_job_ready = job_ready[j];
            const std::int64_t saved_mach_avail = mach_avail[m];

            start[j][pos] = c.est;
            job_ready[j] = c.est + dur;
            mach_avail[m] = c.est + dur;
            job_remaining[j] -= dur;
            mach_remaining[m] -= dur;
            next_pos[j] = pos + 1;
            ++scheduled;

            dfs();

            --scheduled;
            next_pos[j] = pos;
            job_ready[j] = saved_job_ready;
            mach_avail[m] = saved_mach_avail;
            job_remaining[j] += dur;
            mach_remaining[m] += dur;

            if (timed_out) return;
        }
    }
};

}  // namespace

SolveResult solve(const ProblemInstance& inst, std::int64_t time_limit_ms) {
    if (time_limit_ms <= 0) throw PreconditionViolated("solve: time limit must be positive");
    std::vector<std::string> issues = inst.consistency_issues();
    if (!issues.empty()) throw PreconditionViolated("solve: inconsistent instance: " + issues.front());

    const auto start_time = std::chrono::steady_clock::now();
    SearchState state(inst);
    state.deadline = start_time + std::chrono::milliseconds(time_limit_ms);

    const std::int64_t root_lb = state.lower_bound();
    state.dfs();

    SolveResult result;
    result.schedule = std::move(state.best);
    result.nodes_explored = state.nodes;
    result.incumbents = std::move(state.incumbents);
    result.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - start_time)
                              .count();
    if (state.best_makespan >= kInf) {
        result.status = SolveStatus::TimedOut;  // no leaf reached within the limit
        result.bound_gap = kInf;
    } else if (!state.timed_out || result.schedule.makespan == root_lb) {
        result.status = SolveStatus::Optimal;
        result.bound_gap = 0;
    } else {
        result.status = SolveStatus::Feasible;
        result.bound_gap = result.schedule.makespan - root_lb;
    }
    return result;
}

// ---------------------------------------------------------------------------
// Exhaustive oracle
// ---------------------------------------------------------------------------

namespace {

struct OpRef {
    std::size_t job;
    std::size_t pos;
};

// Earliest-start schedule for fixed per-machine orders; false when the
// orders conflict with job precedence (a cycle).
bool earliest_start_schedule(const ProblemInstance& inst,
                             const std::vector<std::vector<OpRef>>& machine_order, Schedule& out) {
    const std::size_t n_jobs = inst.n_jobs;
    std::vector<std::size_t> next_pos(n_jobs, 0);
    std::vector<std::int64_t> job_ready(n_jobs, 0);
    std::vector<std::size_t> mach_next(inst.n_machines, 0);
    std::vector<std::int64_t> mach_avail(inst.n_machines, 0);

    out.start.assign(n_jobs, {});
    for (std::size_t j = 0; j < n_jobs; ++j) out.start[j].assign(inst.route[j].size(), 0);

    std::size_t total = inst.total_operations();
    std::size_t done = 0;
    bool progress = true;
    while (done < total && progress) {
        progress = false;
        for (std::size_t j = 0; j < n_jobs; ++j) {
            std::size_t pos = next_pos[j];
            if (pos >= inst.route[j].size()) continue;
            std::size_t m = inst.route[j][pos];
            std::size_t slot = mach_next[m];
            if (slot >= machine_order[m].size()) return false;
            const OpRef& head = machine_order[m][slot];
            if (head.job != j || head.pos != pos) continue;  // not this op's turn
            std::int64_t est = std::max(job_ready[j], mach_avail[m]);
            out.start[j][pos] = est;
            job_ready[j] = est + inst.duration[j][pos];
            mach_avail[m] = job_ready[j];
            ++next_pos[j];
            ++mach_next[m];
            ++done;
            progress = true;
        }
    }
    if (done < total) return false;  // deadlock: orders incompatible with precedence
    out.makespan = 0;
    for (std::int64_t t : job_ready) out.makespan = std::max(out.makespan, t);
    return true;
}

void permute_machines(const ProblemInstance& inst,
                      std::vector<std::vector<OpRef>>& machine_order, std::size_t machine,
                      Schedule& best, bool& found) {
    if (machine == inst.n_machines) {
        Schedule candidate;
        if (earliest_start_schedule(inst, machine_order, candidate) &&
            (!found || candidate.makespan < best.makespan)) {
            best = std::move(candidate);
            found = true;
        }
        return;
    }
    std::vector<OpRef>& order = machine_order[machine];
    std::sort(order.begin(), order.end(), [](const OpRef& a, const OpRef& b) {
        if (a.job != b.job) return a.job < b.job;
        return a.pos < b.pos;
    });
    do {
        permute_machines(inst, machine_order, machine + 1, best, found);
    } while (std::next_permutation(order.begin(), order.end(), [](const OpRef& a, const OpRef& b) {
        if (a.job != b.job) return a.job < b.job;
        return a.pos < b.pos;
    }));
}

}  // namespace

Schedule brute_force_oracle(const ProblemInstance& inst) {
    if (inst.total_operations() > kOracleOperationLimit)
        throw TooLarge("oracle: instance has " + std::to_string(inst.total_operations()) +
                       " operations, limit is " + std::to_string(kOracleOperationLimit));
    std::vector<std::string> issues = inst.consistency_issues();
    if (!issues.empty()) throw PreconditionViolated("oracle: inconsistent instance: " + issues.front());

    std::vector<std::vector<OpRef>> machine_order(inst.n_machines);
    for (std::size_t j = 0; j < inst.n_jobs; ++j)
        for (std::size_t k = 0; k < inst.route[j].size(); ++k)
            machine_order[inst.route[j][k]].push_back({j, k});

    Schedule best;
    bool found = false;
    permute_machines(inst, machine_order, 0, best, found);
    if (!found) throw Error("oracle: no feasible machine ordering found");
    return best;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

std::string job_label(const ProblemInstance& inst, std::size_t j) {
    return j < inst.job_labels.size() ? inst.job_labels[j] : "j" + std::to_string(j);
}

std::string machine_label(const ProblemInstance& inst, std::size_t m) {
    return m < inst.machine_labels.size() ? inst.machine_labels[m] : "m" + std::to_string(m);
}

}  // namespace

std::vector<ScheduleViolation> validate_schedule(const ProblemInstance& inst, const Schedule& s) {
    std::vector<ScheduleViolation> out;
    if (s.start.size() != inst.n_jobs) {
        out.push_back({ScheduleViolation::Kind::Shape, "", {s.start.size(), inst.n_jobs}, 0,
                       "schedule rows != n_jobs"});
        return out;
    }
    for (std::size_t j = 0; j < inst.n_jobs; ++j) {
        if (s.start[j].size() != inst.route[j].size()) {
            out.push_back({ScheduleViolation::Kind::Shape, job_label(inst, j),
                           {s.start[j].size(), inst.route[j].size()}, 0,
                           "schedule row length != route length"});
            return out;
        }
    }

    std::int64_t max_end = 0;
    for (std::size_t j = 0; j < inst.n_jobs; ++j) {
        for (std::size_t k = 0; k < s.start[j].size(); ++k) {
            if (s.start[j][k] < 0)
                out.push_back({ScheduleViolation::Kind::NegativeStart, job_label(inst, j), {k, k},
                               -s.start[j][k], "operation starts before time zero"});
            max_end = std::max(max_end, s.start[j][k] + inst.duration[j][k]);
        }
        for (std::size_t k = 0; k + 1 < s.start[j].size(); ++k) {
            std::int64_t end = s.start[j][k] + inst.duration[j][k];
            if (s.start[j][k + 1] < end)
                out.push_back({ScheduleViolation::Kind::Precedence, job_label(inst, j),
                               {k, k + 1}, end - s.start[j][k + 1],
                               "operation starts before its predecessor finishes"});
        }
    }

    struct Span {
        std::int64_t start, end;
        std::size_t job, pos;
    };
    std::vector<std::vector<Span>> per_machine(inst.n_machines);
    for (std::size_t j = 0; j < inst.n_jobs; ++j)
        for (std::size_t k = 0; k < s.start[j].size(); ++k)
            per_machine[inst.route[j][k]].push_back(
                {s.start[j][k], s.start[j][k] + inst.duration[j][k], j, k});
    for (std::size_t m = 0; m < inst.n_machines; ++m) {
        auto& spans = per_machine[m];
        std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) {
            if (a.start != b.start) return a.start < b.start;
            return a.end < b.end;
        });
        for (std::size_t i = 0; i + 1 < spans.size(); ++i) {
            if (spans[i].end > spans[i + 1].start)
                out.push_back({ScheduleViolation::Kind::Overlap, machine_label(inst, m),
                               {spans[i].pos, spans[i + 1].pos},
                               spans[i].end - spans[i + 1].start,
                               "jobs " + job_label(inst, spans[i].job) + " and " +
                                   job_label(inst, spans[i + 1].job) + " overlap"});
        }
    }

    if (inst.total_operations() > 0 && s.makespan != max_end)
        out.push_back({ScheduleViolation::Kind::MakespanMismatch, "", {0, 0},
                       s.makespan - max_end, "stored makespan != max completion time"});
    return out;
}

// ---------------------------------------------------------------------------
// Serialization and rendering
// ---------------------------------------------------------------------------

std::string schedule_to_json(const ProblemInstance& inst, const SolveResult& result, bool pretty) {
    nlohmann::json j;
    j["unit"] = inst.unit == TimeUnit::Milliseconds ? "ms" : "abstract";
    j["start"] = result.schedule.start;
    j["makespan"] = result.schedule.makespan;
    switch (result.status) {
        case SolveStatus::Optimal: j["status"] = "optimal"; break;
        case SolveStatus::Feasible: j["status"] = "feasible"; break;
        case SolveStatus::TimedOut: j["status"] = "timed_out"; break;
    }
    j["bound_gap"] = result.bound_gap;
    j["nodes_explored"] = result.nodes_explored;
    j["wall_time_ms"] = result.wall_time_ms;
    j["instance_digest"] = instance_digest(inst);
    return pretty ? j.dump(2) : j.dump();
}

Schedule schedule_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw ParseError(ParseError::Kind::BadJson, 0, "schedule: not valid JSON");
    Schedule s;
    try {
        s.start = j.at("start").get<std::vector<std::vector<std::int64_t>>>();
        s.makespan = j.at("makespan").get<std::int64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(ParseError::Kind::BadJson, 0,
                         std::string("schedule: malformed field: ") + e.what());
    }
    return s;
}

std::string render_gantt(const ProblemInstance& inst, const Schedule& s, std::size_t width) {
    std::ostringstream out;
    if (inst.n_jobs == 0 || s.makespan <= 0) return "(empty schedule)\n";
    width = std::max<std::size_t>(width, 8);
    const double scale = static_cast<double>(s.makespan) / static_cast<double>(width);
    auto digit = [](std::size_t m) -> char {
        return m < 10 ? static_cast<char>('0' + m)
               : m < 36 ? static_cast<char>('a' + (m - 10))
                        : '*';
    };
    for (std::size_t j = 0; j < inst.n_jobs; ++j) {
        std::string row(width, '.');
        for (std::size_t k = 0; k < s.start[j].size(); ++k) {
            if (inst.duration[j][k] == 0) continue;
            auto cell = [&](std::int64_t t) {
                auto c = static_cast<std::size_t>(static_cast<double>(t) / scale);
                return std::min(c, width - 1);
            };
            std::size_t from = cell(s.start[j][k]);
            std::size_t to = cell(s.start[j][k] + inst.duration[j][k] - 1);
            for (std::size_t c = from; c <= to; ++c) row[c] = digit(inst.route[j][k]);
        }
        out << (j < inst.job_labels.size() ? inst.job_labels[j] : "j" + std::to_string(j)) << " |"
            << row << "|\n";
    }
    out << "makespan: " << s.makespan << " (" << (inst.unit == TimeUnit::Milliseconds ? "ms" : "units")
        << ", one column ~ " << scale << ")\n";
    return out.str();
}

}  // namespace cpat
