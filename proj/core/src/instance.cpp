#include "malsched/instance.hpp"

#include <set>

#include "malsched/errors.hpp"

namespace malsched {

namespace {

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok) throw ValidationError("unknown key '" + it.key() + "' in " + where);
  }
}

const json& need(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError("missing key '" + std::string(key) + "' in " + where);
  return *it;
}

int index_of(const std::vector<std::string>& names, const json& v, const std::string& where) {
  if (!v.is_string()) throw ValidationError(where + ": element names must be strings");
  const std::string s = v.get<std::string>();
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == s) return static_cast<int>(i);
  throw ValidationError(where + ": unknown element '" + s + "'");
}

Mask parse_name_set(const std::vector<std::string>& names, const json& arr,
                    const std::string& where) {
  if (!arr.is_array()) throw ValidationError(where + ": expected an array of names");
  Mask s = 0;
  for (const auto& v : arr) {
    int i = index_of(names, v, where);
    if (contains(s, i)) throw ValidationError(where + ": duplicate element");
    s = with(s, i);
  }
  return s;
}

std::vector<Rat> parse_weight_map(const std::vector<std::string>& names, const json& obj,
                                  const std::string& where) {
  if (!obj.is_object()) throw ValidationError(where + ": expected a name -> rational object");
  std::vector<Rat> out(names.size());
  std::vector<bool> seen(names.size(), false);
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    int i = -1;
    for (size_t k = 0; k < names.size(); ++k)
      if (names[k] == it.key()) i = static_cast<int>(k);
    if (i < 0) throw ValidationError(where + ": unknown element '" + it.key() + "'");
    out[static_cast<size_t>(i)] = rat_from_json(*it);
    seen[static_cast<size_t>(i)] = true;
  }
  for (size_t k = 0; k < names.size(); ++k)
    if (!seen[k]) throw ValidationError(where + ": missing weight for '" + names[k] + "'");
  return out;
}

Matroid parse_matroid(const std::vector<std::string>& names, const json& obj,
                      const std::string& where) {
  if (!obj.is_object()) throw ValidationError(where + ": matroid must be an object");
  const std::string type = need(obj, "type", where).get<std::string>();
  const int n = static_cast<int>(names.size());
  if (type == "free") {
    reject_unknown_keys(obj, {"type"}, where);
    return Matroid::free(n);
  }
  if (type == "uniform") {
    reject_unknown_keys(obj, {"type", "rank"}, where);
    const json& r = need(obj, "rank", where);
    if (!r.is_number_integer()) throw ValidationError(where + ": rank must be an integer");
    return Matroid::uniform(n, r.get<int>());
  }
  if (type == "partition") {
    reject_unknown_keys(obj, {"type", "blocks", "capacities"}, where);
    std::vector<Mask> blocks;
    for (const auto& b : need(obj, "blocks", where))
      blocks.push_back(parse_name_set(names, b, where + ".blocks"));
    std::vector<int> caps;
    for (const auto& c : need(obj, "capacities", where)) {
      if (!c.is_number_integer()) throw ValidationError(where + ": capacities must be integers");
      caps.push_back(c.get<int>());
    }
    return Matroid::partition(n, std::move(blocks), std::move(caps));
  }
  if (type == "explicit") {
    reject_unknown_keys(obj, {"type", "bases"}, where);
    std::vector<Mask> bases;
    for (const auto& b : need(obj, "bases", where))
      bases.push_back(parse_name_set(names, b, where + ".bases"));
    return Matroid::from_bases(n, std::move(bases));
  }
  throw ValidationError(where + ": unknown matroid type '" + type + "'");
}

json emit_name_set(const std::vector<std::string>& names, Mask s) {
  json arr = json::array();
  for (int i : elements(s)) arr.push_back(names[static_cast<size_t>(i)]);
  return arr;
}

json emit_matroid(const std::vector<std::string>& names, const Matroid& m) {
  json out;
  if (std::holds_alternative<Matroid::Free>(m.spec())) {
    out["type"] = "free";
  } else if (const auto* u = std::get_if<Matroid::Uniform>(&m.spec())) {
    out["type"] = "uniform";
    out["rank"] = u->rank;
  } else if (const auto* p = std::get_if<Matroid::Partition>(&m.spec())) {
    out["type"] = "partition";
    json blocks = json::array();
    for (Mask b : p->blocks) blocks.push_back(emit_name_set(names, b));
    out["blocks"] = std::move(blocks);
    out["capacities"] = p->capacities;
  } else if (const auto* e = std::get_if<Matroid::Explicit>(&m.spec())) {
    out["type"] = "explicit";
    json bases = json::array();
    for (Mask b : e->bases) bases.push_back(emit_name_set(names, b));
    out["bases"] = std::move(bases);
  }
  return out;
}

json emit_weight_map(const std::vector<std::string>& names, const std::vector<Rat>& w) {
  json out = json::object();
  for (size_t i = 0; i < names.size(); ++i) out[names[i]] = rat_to_json(w[i]);
  return out;
}

SpeedFn parse_speed(const std::vector<std::string>& machines, const json& obj,
                    const std::string& where) {
  if (!obj.is_object()) throw ValidationError(where + ": speed must be an object");
  const std::string type = need(obj, "type", where).get<std::string>();
  const int m = static_cast<int>(machines.size());
  if (type == "linear") {
    reject_unknown_keys(obj, {"type", "weights"}, where);
    return SpeedFn(m, SpeedFn::Linear{parse_weight_map(machines, need(obj, "weights", where), where)});
  }
  if (type == "weighted_matroid_rank") {
    reject_unknown_keys(obj, {"type", "matroid", "weights"}, where);
    return SpeedFn(m, SpeedFn::WeightedMatroidRank{
                          parse_matroid(machines, need(obj, "matroid", where), where + ".matroid"),
                          parse_weight_map(machines, need(obj, "weights", where), where)});
  }
  if (type == "matroid_based_valuation") {
    reject_unknown_keys(obj, {"type", "slots", "matroid", "weights"}, where);
    std::vector<std::string> slots;
    for (const auto& s : need(obj, "slots", where)) {
      if (!s.is_string()) throw ValidationError(where + ": slot names must be strings");
      slots.push_back(s.get<std::string>());
    }
    std::set<std::string> uniq(slots.begin(), slots.end());
    if (uniq.size() != slots.size()) throw ValidationError(where + ": duplicate slot name");
    Matroid sm = parse_matroid(slots, need(obj, "matroid", where), where + ".matroid");
    const json& wobj = need(obj, "weights", where);
    std::vector<std::vector<Rat>> table(static_cast<size_t>(m));
    std::vector<bool> seen(static_cast<size_t>(m), false);
    for (auto it = wobj.begin(); it != wobj.end(); ++it) {
      int i = -1;
      for (size_t k = 0; k < machines.size(); ++k)
        if (machines[k] == it.key()) i = static_cast<int>(k);
      if (i < 0) throw ValidationError(where + ": unknown machine '" + it.key() + "'");
      table[static_cast<size_t>(i)] = parse_weight_map(slots, *it, where + ".weights." + it.key());
      seen[static_cast<size_t>(i)] = true;
    }
    for (size_t k = 0; k < machines.size(); ++k)
      if (!seen[k]) throw ValidationError(where + ": missing weight row for '" + machines[k] + "'");
    return SpeedFn(m, SpeedFn::MatroidBasedValuation{std::move(slots), std::move(sm), std::move(table)});
  }
  if (type == "explicit_table") {
    reject_unknown_keys(obj, {"type", "values"}, where);
    if (m > kMaxGroundSize || m > 16)
      throw ValidationError(where + ": explicit_table only supported for up to 16 machines");
    std::vector<Rat> values(size_t{1} << m);
    std::vector<bool> seen(size_t{1} << m, false);
    seen[0] = true;  // empty set defaults to 0 and may be omitted
    for (const auto& entry : need(obj, "values", where)) {
      reject_unknown_keys(entry, {"set", "value"}, where + ".values");
      Mask s = parse_name_set(machines, need(entry, "set", where + ".values"), where + ".values");
      if (s != 0 && seen[s]) throw ValidationError(where + ": duplicate table entry");
      values[s] = rat_from_json(need(entry, "value", where + ".values"));
      seen[s] = true;
    }
    for (size_t s = 0; s < seen.size(); ++s)
      if (!seen[s]) throw ValidationError(where + ": table misses a subset entry");
    return SpeedFn(m, SpeedFn::ExplicitTable{std::move(values)});
  }
  if (type == "linear_shift") {
    reject_unknown_keys(obj, {"type", "base", "shift"}, where);
    SpeedFn base = parse_speed(machines, need(obj, "base", where), where + ".base");
    return SpeedFn(m, SpeedFn::LinearShift{
                          std::make_shared<const SpeedFn>(std::move(base)),
                          parse_weight_map(machines, need(obj, "shift", where), where)});
  }
  throw ValidationError(where + ": unknown speed type '" + type + "'");
}

json emit_speed(const std::vector<std::string>& machines, const SpeedFn& fn) {
  json out;
  if (const auto* f = std::get_if<SpeedFn::Linear>(&fn.spec())) {
    out["type"] = "linear";
    out["weights"] = emit_weight_map(machines, f->weights);
  } else if (const auto* f = std::get_if<SpeedFn::WeightedMatroidRank>(&fn.spec())) {
    out["type"] = "weighted_matroid_rank";
    out["matroid"] = emit_matroid(machines, f->matroid);
    out["weights"] = emit_weight_map(machines, f->weights);
  } else if (const auto* f = std::get_if<SpeedFn::MatroidBasedValuation>(&fn.spec())) {
    out["type"] = "matroid_based_valuation";
    out["slots"] = f->slot_names;
    out["matroid"] = emit_matroid(f->slot_names, f->slot_matroid);
    json w = json::object();
    for (size_t i = 0; i < machines.size(); ++i)
      w[machines[i]] = emit_weight_map(f->slot_names, f->slot_weights[i]);
    out["weights"] = std::move(w);
  } else if (const auto* f = std::get_if<SpeedFn::ExplicitTable>(&fn.spec())) {
    out["type"] = "explicit_table";
    json values = json::array();
    for (size_t s = 1; s < f->values.size(); ++s) {
      json e;
      e["set"] = emit_name_set(machines, static_cast<Mask>(s));
      e["value"] = rat_to_json(f->values[s]);
      values.push_back(std::move(e));
    }
    out["values"] = std::move(values);
  } else if (const auto* f = std::get_if<SpeedFn::LinearShift>(&fn.spec())) {
    out["type"] = "linear_shift";
    out["base"] = emit_speed(machines, *f->base);
    out["shift"] = emit_weight_map(machines, f->shifts);
  } else {
    throw ValidationError("oracle speeds cannot be serialized");
  }
  return out;
}

}  // namespace

Rat rat_from_json(const json& v) {
  if (v.is_number_integer()) return Rat(static_cast<long>(v.get<std::int64_t>()));
  if (v.is_string()) return Rat::parse(v.get<std::string>());
  if (v.is_number_float())
    throw ValidationError("floating-point numbers are not accepted; use \"p/q\" strings");
  throw ValidationError("expected a rational (integer or \"p/q\" string)");
}

json rat_to_json(const Rat& r) {
  if (r.is_integer()) {
    if (r >= Rat(-1000000000L) && r <= Rat(1000000000L))
      return json(static_cast<std::int64_t>(r.floor_long()));
    return json(r.str());
  }
  return json(r.str());
}

int Instance::machine_index(const std::string& name) const {
  for (size_t i = 0; i < machines.size(); ++i)
    if (machines[i] == name) return static_cast<int>(i);
  return -1;
}

Instance parse_instance(const json& doc) {
  if (!doc.is_object()) throw ValidationError("instance document must be a JSON object");
  reject_unknown_keys(doc, {"machines", "jobs"}, "instance");
  Instance inst;
  for (const auto& mjson : need(doc, "machines", "instance")) {
    if (!mjson.is_string()) throw ValidationError("machine names must be strings");
    inst.machines.push_back(mjson.get<std::string>());
  }
  for (const auto& jjson : need(doc, "jobs", "instance")) {
    reject_unknown_keys(jjson, {"id", "speed"}, "job");
    Job job;
    job.id = need(jjson, "id", "job").get<std::string>();
    job.speed = parse_speed(inst.machines, need(jjson, "speed", "job"), "job '" + job.id + "'");
    inst.jobs.push_back(std::move(job));
  }
  return inst;
}

json emit_instance(const Instance& inst) {
  json out;
  out["machines"] = inst.machines;
  json jobs = json::array();
  for (const Job& j : inst.jobs) {
    json jj;
    jj["id"] = j.id;
    jj["speed"] = emit_speed(inst.machines, j.speed);
    jobs.push_back(std::move(jj));
  }
  out["jobs"] = std::move(jobs);
  return out;
}

void validate_instance(const Instance& inst, const InstanceCheckOptions& opt,
                       std::vector<std::string>* warnings) {
  std::vector<std::string> errors, warns;
  if (inst.machines.empty()) errors.push_back("instance needs at least one machine");
  if (inst.jobs.empty()) errors.push_back("instance needs at least one job");
  if (inst.machine_count() > kMaxGroundSize)
    errors.push_back("instance exceeds the machine-count cap of " + std::to_string(kMaxGroundSize));
  std::set<std::string> mseen(inst.machines.begin(), inst.machines.end());
  if (mseen.size() != inst.machines.size()) errors.push_back("duplicate machine identifier");
  std::set<std::string> jseen;
  for (const Job& j : inst.jobs)
    if (!jseen.insert(j.id).second) errors.push_back("duplicate job identifier '" + j.id + "'");

  for (const Job& j : inst.jobs) {
    if (j.speed.ground_size() != inst.machine_count()) {
      errors.push_back("job '" + j.id + "': speed ground set differs from the machine set");
      continue;
    }
    std::vector<std::string> es, ws;
    validate_speed(j.speed, opt.speed, es, ws);
    for (auto& e : es) errors.push_back("job '" + j.id + "': " + e);
    for (auto& w : ws) warns.push_back("job '" + j.id + "': " + w);
    if (es.empty() && j.speed.max_speed().first.sign() <= 0)
      errors.push_back("job '" + j.id + "' has no machine set with positive speed");
  }

  if (!errors.empty()) {
    std::string msg = "instance validation failed:";
    for (auto& e : errors) msg += "\n  - " + e;
    throw ValidationError(msg);
  }
  if (warnings) warnings->insert(warnings->end(), warns.begin(), warns.end());
}

Instance load_instance(const json& doc, const InstanceCheckOptions& opt,
                       std::vector<std::string>* warnings) {
  Instance inst = parse_instance(doc);
  validate_instance(inst, opt, warnings);
  return inst;
}

}  // namespace malsched
