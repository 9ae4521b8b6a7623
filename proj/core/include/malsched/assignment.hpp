#pragma once

#include <json.hpp>
#include <vector>

#include "malsched/instance.hpp"

namespace malsched {

/// One nonempty machine set per job. Job order matches the instance.
struct Assignment {
  std::vector<Mask> sets;

  bool operator==(const Assignment& o) const { return sets == o.sets; }
};

/// Processing time of job j on its assigned set: 1/g_j(S_j).
/// Throws ValidationError when the set has nonpositive speed or is empty.
Rat processing_time(const Instance& inst, int job, Mask s);

/// Per-machine load: sum of processing times of the jobs using the machine.
std::vector<Rat> machine_loads(const Instance& inst, const Assignment& a);

/// Maximum machine load. Lower bound on the makespan of any schedule that
/// uses this assignment.
Rat load(const Instance& inst, const Assignment& a);

/// Starting times on top of an assignment. Jobs run non-preemptively and in
/// unison on every machine of their set, occupying [t_j, t_j + f_j(S_j)).
struct Schedule {
  Assignment assignment;
  std::vector<Rat> starts;
};

Rat makespan(const Instance& inst, const Schedule& s);

json emit_assignment(const Instance& inst, const Assignment& a);
Assignment parse_assignment(const Instance& inst, const json& doc);

}  // namespace malsched
