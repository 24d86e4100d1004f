// Turning schedules back into event logs, with optional timestamp noise.

#pragma once

#include <cstdint>
#include <string>

#include "cpat/event_log.hpp"
#include "cpat/instance.hpp"
#include "cpat/solver.hpp"

namespace cpat {

struct NoiseSpec {
    TimeMs magnitude = 0;  // each timestamp shifts by a uniform offset in [-magnitude, magnitude]
    std::uint64_t seed = 0;
};

/// Emits a start/complete processing event pair per operation, with the job
/// as case (or the machine, under Perspective::Machine), machine/job and
/// activity-instance attributes set, and timestamps epoch + start and
/// epoch + start + duration (schedule time units map 1:1 onto milliseconds).
/// Activity names come from the instance when it carries them and are
/// otherwise synthesized per machine ("op_<machine label>"), so an activity
/// stays bound to one machine. The schedule must validate
/// (throws InfeasibleSchedule otherwise).
EventLog execute_schedule(const ProblemInstance& inst, const Schedule& s, TimeMs epoch = 0,
                          Perspective perspective = Perspective::Job);

/// Returns a copy of the log with every timestamp independently perturbed by
/// a uniform integer offset in [-magnitude, +magnitude]; traces are re-sorted
/// by the new timestamps. Deterministic for a given seed.
EventLog inject_noise(const EventLog& log, const NoiseSpec& spec);

/// CSV form readable by parse_csv_log with the default schema (the job/
/// machine column depends on the log's perspective).
std::string write_csv(const EventLog& log, const LogSchema& schema = {});

/// XES form readable by parse_xes_log; event ids are preserved through
/// "identity:id" attributes.
std::string write_xes(const EventLog& log);

}  // namespace cpat
