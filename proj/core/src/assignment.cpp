#include "malsched/assignment.hpp"

#include "malsched/errors.hpp"

namespace malsched {

Rat processing_time(const Instance& inst, int job, Mask s) {
  if (s == 0) throw ValidationError("job '" + inst.jobs[static_cast<size_t>(job)].id +
                                    "' assigned the empty machine set");
  Rat g = inst.jobs[static_cast<size_t>(job)].speed.evaluate(s);
  if (g.sign() <= 0)
    throw ValidationError("job '" + inst.jobs[static_cast<size_t>(job)].id +
                          "' assigned a set with nonpositive speed");
  return Rat(1) / g;
}

std::vector<Rat> machine_loads(const Instance& inst, const Assignment& a) {
  if (a.sets.size() != inst.jobs.size())
    throw ValidationError("assignment does not cover every job exactly once");
  std::vector<Rat> loads(static_cast<size_t>(inst.machine_count()));
  for (int j = 0; j < inst.job_count(); ++j) {
    Rat f = processing_time(inst, j, a.sets[static_cast<size_t>(j)]);
    for (int i : elements(a.sets[static_cast<size_t>(j)])) loads[static_cast<size_t>(i)] += f;
  }
  return loads;
}

Rat load(const Instance& inst, const Assignment& a) {
  Rat best;
  for (const Rat& l : machine_loads(inst, a))
    if (l > best) best = l;
  return best;
}

Rat makespan(const Instance& inst, const Schedule& s) {
  Rat best;
  for (int j = 0; j < inst.job_count(); ++j) {
    Rat end = s.starts[static_cast<size_t>(j)] +
              processing_time(inst, j, s.assignment.sets[static_cast<size_t>(j)]);
    if (end > best) best = end;
  }
  return best;
}

json emit_assignment(const Instance& inst, const Assignment& a) {
  json sets = json::object();
  for (int j = 0; j < inst.job_count(); ++j) {
    json arr = json::array();
    for (int i : elements(a.sets[static_cast<size_t>(j)]))
      arr.push_back(inst.machines[static_cast<size_t>(i)]);
    sets[inst.jobs[static_cast<size_t>(j)].id] = std::move(arr);
  }
  json out;
  out["assignment"] = std::move(sets);
  return out;
}

Assignment parse_assignment(const Instance& inst, const json& doc) {
  if (!doc.is_object() || !doc.contains("assignment"))
    throw ValidationError("expected an object with an 'assignment' key");
  const json& sets = doc["assignment"];
  Assignment a;
  a.sets.assign(inst.jobs.size(), 0);
  std::vector<bool> seen(inst.jobs.size(), false);
  for (auto it = sets.begin(); it != sets.end(); ++it) {
    int j = -1;
    for (int k = 0; k < inst.job_count(); ++k)
      if (inst.jobs[static_cast<size_t>(k)].id == it.key()) j = k;
    if (j < 0) throw ValidationError("assignment names unknown job '" + it.key() + "'");
    Mask s = 0;
    for (const auto& name : *it) {
      int i = inst.machine_index(name.get<std::string>());
      if (i < 0) throw ValidationError("assignment names unknown machine");
      s = with(s, i);
    }
    a.sets[static_cast<size_t>(j)] = s;
    seen[static_cast<size_t>(j)] = true;
  }
  for (size_t j = 0; j < seen.size(); ++j)
    if (!seen[j]) throw ValidationError("assignment misses job '" + inst.jobs[j].id + "'");
  return a;
}

}  // namespace malsched
