// Makespan minimization for ProblemInstances.
//
// solve() runs depth-first branch and bound over machine orderings: at each
// node the ready operation with the minimal earliest feasible start is
// scheduled first (ties: lowest job index, then route position), candidates
// are restricted to those that could start before the earliest possible
// completion among ready operations (scheduling anything later cannot help a
// regular objective), and subtrees are cut with per-job / per-machine
// remaining-work bounds. The first leaf is therefore exactly the greedy
// earliest-start-time schedule, refined as the search proceeds.
//
// brute_force_oracle() independently enumerates all per-machine operation
// orders for tiny instances and is used to cross-check optimality.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cpat/instance.hpp"

namespace cpat {

struct Schedule {
    std::vector<std::vector<std::int64_t>> start;  // [job][position]
    std::int64_t makespan = 0;
};

enum class SolveStatus { Optimal, Feasible, TimedOut };

struct SolveResult {
    Schedule schedule;
    SolveStatus status = SolveStatus::TimedOut;
    /// Incumbent makespan minus the best proven lower bound (0 when Optimal).
    std::int64_t bound_gap = 0;
    std::uint64_t nodes_explored = 0;
    std::int64_t wall_time_ms = 0;
    /// Incumbent makespans in the order they were found (non-increasing).
    std::vector<std::int64_t> incumbents;
};

/// Branch-and-bound search for a minimum-makespan schedule.
/// Returns the best schedule found within the time limit; status Optimal
/// when the tree was exhausted or the incumbent matches the lower bound.
SolveResult solve(const ProblemInstance& inst, std::int64_t time_limit_ms);

/// Exhaustively enumerates per-machine operation permutations and returns a
/// minimum-makespan schedule. Only instances with at most
/// kOracleOperationLimit operations are accepted (throws TooLarge).
Schedule brute_force_oracle(const ProblemInstance& inst);

inline constexpr std::size_t kOracleOperationLimit = 12;

struct ScheduleViolation {
    enum class Kind { Shape, NegativeStart, Precedence, Overlap, MakespanMismatch };
    Kind kind;
    std::string subject;  // job or machine label
    std::pair<std::size_t, std::size_t> positions{0, 0};
    std::int64_t slack = 0;  // by how much the constraint fails
    std::string detail;
};

/// Empty iff the schedule satisfies job precedence, machine exclusivity and
/// the makespan definition for this instance.
std::vector<ScheduleViolation> validate_schedule(const ProblemInstance& inst, const Schedule& s);

std::string schedule_to_json(const ProblemInstance& inst, const SolveResult& result,
                             bool pretty = true);
/// Reads back the schedule part of schedule_to_json output.
Schedule schedule_from_json(const std::string& text);

/// Fixed-width Gantt rendering (one row per job, machine index per time
/// slot, base-36 machine digits).
std::string render_gantt(const ProblemInstance& inst, const Schedule& s, std::size_t width = 72);

}  // namespace cpat
