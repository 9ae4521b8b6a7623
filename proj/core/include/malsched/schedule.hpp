#pragma once

#include <optional>

#include "malsched/assignment.hpp"

namespace malsched {

/// Greedy list scheduling on top of a fixed assignment: jobs in nonincreasing
/// processing-time order (index tie-break), each starting as soon as every
/// machine of its set is idle. Feasible by construction; no ratio is claimed
/// beyond makespan >= load.
Schedule build_schedule(const Instance& inst, const Assignment& a);

struct ScheduleViolation {
  int job_a = -1;
  int job_b = -1;
  int machine = -1;
};

/// Exhaustive pairwise check that jobs sharing a machine occupy disjoint
/// half-open intervals [t_j, t_j + f_j(S_j)). Exact comparisons.
std::optional<ScheduleViolation> verify_schedule(const Instance& inst, const Schedule& s);

json emit_schedule(const Instance& inst, const Schedule& s);

}  // namespace malsched
