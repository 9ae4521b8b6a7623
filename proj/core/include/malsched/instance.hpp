#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "malsched/speed.hpp"

namespace malsched {

using json = nlohmann::ordered_json;

struct Job {
  std::string id;
  SpeedFn speed;
  bool operator==(const Job& o) const { return id == o.id && speed == o.speed; }
};

/// A scheduling instance: ordered machine identifiers and jobs, each job with
/// one speed function over the machine set. Immutable after construction.
struct Instance {
  std::vector<std::string> machines;
  std::vector<Job> jobs;

  int machine_count() const { return static_cast<int>(machines.size()); }
  int job_count() const { return static_cast<int>(jobs.size()); }
  Mask all_machines() const { return full_mask(machine_count()); }
  int machine_index(const std::string& name) const;  // -1 when absent

  bool operator==(const Instance& o) const { return machines == o.machines && jobs == o.jobs; }
};

struct InstanceCheckOptions {
  SpeedCheckOptions speed;
};

/// Strict schema parse: unknown keys, malformed rationals, or unknown machine
/// names are rejected. Performs no semantic validation beyond the schema.
Instance parse_instance(const json& doc);
json emit_instance(const Instance& inst);

/// Semantic load-time checks: identifier uniqueness, size bounds, weight
/// signs, matroid axioms, g(∅)=0, monotonicity for small grounds, and a
/// positive best speed for every job. Errors throw ValidationError;
/// warnings (skipped checks) are appended to `warnings` when given.
void validate_instance(const Instance& inst, const InstanceCheckOptions& opt,
                       std::vector<std::string>* warnings = nullptr);

/// parse + validate in one step.
Instance load_instance(const json& doc, const InstanceCheckOptions& opt = {},
                       std::vector<std::string>* warnings = nullptr);

Rat rat_from_json(const json& v);
json rat_to_json(const Rat& r);

}  // namespace malsched
