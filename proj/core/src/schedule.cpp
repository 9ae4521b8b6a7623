#include "malsched/schedule.hpp"

#include <algorithm>
#include <numeric>

namespace malsched {

Schedule build_schedule(const Instance& inst, const Assignment& a) {
  const int n = inst.job_count();
  std::vector<Rat> times(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j)
    times[static_cast<size_t>(j)] = processing_time(inst, j, a.sets[static_cast<size_t>(j)]);

  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return times[static_cast<size_t>(x)] > times[static_cast<size_t>(y)];
  });

  Schedule s;
  s.assignment = a;
  s.starts.assign(static_cast<size_t>(n), Rat(0));
  std::vector<Rat> machine_free(static_cast<size_t>(inst.machine_count()));
  for (int j : order) {
    Rat start;
    for (int i : elements(a.sets[static_cast<size_t>(j)]))
      if (machine_free[static_cast<size_t>(i)] > start) start = machine_free[static_cast<size_t>(i)];
    Rat end = start + times[static_cast<size_t>(j)];
    for (int i : elements(a.sets[static_cast<size_t>(j)])) machine_free[static_cast<size_t>(i)] = end;
    s.starts[static_cast<size_t>(j)] = start;
  }
  return s;
}

std::optional<ScheduleViolation> verify_schedule(const Instance& inst, const Schedule& s) {
  const int n = inst.job_count();
  std::vector<Rat> end(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j)
    end[static_cast<size_t>(j)] = s.starts[static_cast<size_t>(j)] +
                                  processing_time(inst, j, s.assignment.sets[static_cast<size_t>(j)]);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      Mask shared = s.assignment.sets[static_cast<size_t>(a)] & s.assignment.sets[static_cast<size_t>(b)];
      if (shared == 0) continue;
      // Half-open intervals: back-to-back at t + f is fine.
      bool overlap = s.starts[static_cast<size_t>(a)] < end[static_cast<size_t>(b)] &&
                     s.starts[static_cast<size_t>(b)] < end[static_cast<size_t>(a)];
      if (overlap) return ScheduleViolation{a, b, elements(shared).front()};
    }
  return std::nullopt;
}

json emit_schedule(const Instance& inst, const Schedule& s) {
  json starts = json::object();
  for (int j = 0; j < inst.job_count(); ++j) {
    json entry;
    entry["start"] = rat_to_json(s.starts[static_cast<size_t>(j)]);
    entry["processing_time"] =
        rat_to_json(processing_time(inst, j, s.assignment.sets[static_cast<size_t>(j)]));
    json arr = json::array();
    for (int i : elements(s.assignment.sets[static_cast<size_t>(j)]))
      arr.push_back(inst.machines[static_cast<size_t>(i)]);
    entry["machines"] = std::move(arr);
    starts[inst.jobs[static_cast<size_t>(j)].id] = std::move(entry);
  }
  json out;
  out["schedule"] = std::move(starts);
  out["makespan"] = rat_to_json(makespan(inst, s));
  out["load"] = rat_to_json(load(inst, s.assignment));
  return out;
}

}  // namespace malsched
