#pragma once

#include <string>

#include "malsched/mmfa.hpp"
#include "malsched/rounding.hpp"
#include "malsched/schedule.hpp"

namespace malsched {

std::string instance_digest(const Instance& inst);

struct ReportMeta {
  bool searched = false;
  Rat eps;
  Rat lower;
  bool lower_infeasible = false;
  int probes = 0;
  LpEngine engine = LpEngine::explicit_enumeration;
  bool trace = false;
  double wall_ms = 0;
};

/// Full run report: target, per-stage certificates, assignment, loads,
/// schedule makespan. Every load, multiplicity and bound check in it can be
/// recomputed from (instance, assignment, target C); `recheck_report` does
/// exactly that.
json build_report(const Instance& inst, const RoundResult& res, const Schedule& sched,
                  const ReportMeta& meta);

/// Recomputes every assignment-derivable number of a report and compares
/// exactly. Returns a list of mismatches; empty means the report is
/// self-consistent.
std::vector<std::string> recheck_report(const Instance& inst, const json& report);

json lp_solution_json(const Instance& inst, const ConfigLpSolution& sol);

}  // namespace malsched
