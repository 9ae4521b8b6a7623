#include "malsched/mmfa.hpp"

#include <set>

#include "malsched/errors.hpp"

namespace malsched {

namespace {

json agents_to_jobs(const json& doc) {
  // The agent/utility schema mirrors the job/speed schema.
  json inst;
  inst["machines"] = doc.contains("items") ? doc["items"] : json::array();
  json jobs = json::array();
  if (doc.contains("agents"))
    for (const auto& a : doc["agents"]) {
      json j;
      if (a.contains("id")) j["id"] = a["id"];
      if (a.contains("utility")) j["speed"] = a["utility"];
      for (auto it = a.begin(); it != a.end(); ++it)
        if (it.key() != "id" && it.key() != "utility")
          throw ValidationError("unknown key '" + it.key() + "' in agent");
      jobs.push_back(std::move(j));
    }
  inst["jobs"] = std::move(jobs);
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (it.key() != "items" && it.key() != "agents")
      throw ValidationError("unknown key '" + it.key() + "' in allocation instance");
  return inst;
}

MmfaInstance from_instance(Instance inst) {
  MmfaInstance out;
  out.items = std::move(inst.machines);
  for (Job& j : inst.jobs) out.agents.push_back(MmfaAgent{std::move(j.id), std::move(j.speed)});
  return out;
}

Instance to_instance(const MmfaInstance& mmfa) {
  Instance inst;
  inst.machines = mmfa.items;
  for (const MmfaAgent& a : mmfa.agents) inst.jobs.push_back(Job{a.id, a.utility});
  return inst;
}

}  // namespace

MmfaInstance parse_mmfa(const json& doc) { return from_instance(parse_instance(agents_to_jobs(doc))); }

json emit_mmfa(const MmfaInstance& mmfa) {
  json as_inst = emit_instance(to_instance(mmfa));
  json out;
  out["items"] = as_inst["machines"];
  json agents = json::array();
  for (auto& j : as_inst["jobs"]) {
    json a;
    a["id"] = j["id"];
    a["utility"] = j["speed"];
    agents.push_back(std::move(a));
  }
  out["agents"] = std::move(agents);
  return out;
}

MmfaInstance load_mmfa(const json& doc, std::vector<std::string>* warnings) {
  Instance inst = load_instance(agents_to_jobs(doc), {}, warnings);
  // Explicit-table utilities additionally get the exchange certification when
  // small enough; the pipeline's guarantees assume the M♮ class.
  for (const Job& j : inst.jobs) {
    if (!std::holds_alternative<SpeedFn::ExplicitTable>(j.speed.spec())) continue;
    if (j.speed.ground_size() > 10) {
      if (warnings)
        warnings->push_back("agent '" + j.id + "': table too large for exchange certification");
      continue;
    }
    if (auto witness = check_mnat(j.speed))
      throw ValidationError("agent '" + j.id + "': utility violates the exchange condition at S=" +
                            std::to_string(witness->s) + " T=" + std::to_string(witness->t));
  }
  return from_instance(std::move(inst));
}

Instance reduce_to_scheduling(const MmfaInstance& mmfa, const Rat& V) {
  if (V.sign() <= 0) throw ValidationError("reduction level must be positive");
  Instance inst;
  inst.machines = mmfa.items;
  for (const MmfaAgent& a : mmfa.agents) {
    std::vector<Rat> shift;
    for (int i = 0; i < mmfa.item_count(); ++i) {
      Rat u1 = a.utility.evaluate(with(0, i));
      shift.push_back(u1 > V ? u1 - V : Rat(0));
    }
    SpeedFn speed(mmfa.item_count(),
                  SpeedFn::LinearShift{std::make_shared<const SpeedFn>(a.utility), std::move(shift)});
    inst.jobs.push_back(Job{a.id, std::move(speed)});
  }
  return inst;
}

namespace {

Instance reduce_by_truncation(const MmfaInstance& mmfa, const Rat& V) {
  Instance inst;
  inst.machines = mmfa.items;
  for (const MmfaAgent& a : mmfa.agents) {
    const auto* table = std::get_if<SpeedFn::ExplicitTable>(&a.utility.spec());
    if (!table)
      throw ValidationError("the truncation driver accepts explicit-table utilities only");
    std::vector<Rat> vals = table->values;
    for (Rat& v : vals)
      if (v > V) v = V;
    SpeedFn speed(mmfa.item_count(), SpeedFn::ExplicitTable{std::move(vals)});
    if (auto witness = check_mnat(speed))
      throw ValidationError("truncating agent '" + a.id +
                            "' at V=" + V.str() + " leaves the M♮ class (exchange fails at S=" +
                            std::to_string(witness->s) + ", T=" + std::to_string(witness->t) + ")");
    inst.jobs.push_back(Job{a.id, std::move(speed)});
  }
  return inst;
}

struct ProbeSuccess {
  RoundResult round;
  Rat V;
};

Allocation finish(const MmfaInstance& mmfa, const ProbeSuccess& ok, int probes, bool has_upper,
                  const Rat& upper) {
  const auto& k = algo_constants();
  Allocation alloc;
  alloc.V = ok.V;
  alloc.has_upper = has_upper;
  alloc.upper = upper;
  alloc.probes = probes;
  alloc.bundles = ok.round.assignment.sets;
  alloc.multiplicity.assign(static_cast<size_t>(mmfa.item_count()), 0);
  alloc.step_count.assign(static_cast<size_t>(mmfa.item_count()), {0, 0, 0});
  for (int a = 0; a < mmfa.agent_count(); ++a) {
    int step = ok.round.partition.step_of[static_cast<size_t>(a)];
    for (int i : elements(alloc.bundles[static_cast<size_t>(a)])) {
      alloc.multiplicity[static_cast<size_t>(i)]++;
      alloc.step_count[static_cast<size_t>(i)][static_cast<size_t>(step - 1)]++;
    }
  }
  // Certified augmentation: 32/20/26 per stage, 78 in total.
  for (int i = 0; i < mmfa.item_count(); ++i) {
    const auto& sc = alloc.step_count[static_cast<size_t>(i)];
    MALSCHED_REQUIRE(sc[0] <= k.step1_load_factor, "stage-1 item multiplicity above 32");
    MALSCHED_REQUIRE(sc[1] <= k.step2_capacity, "stage-2 item multiplicity above 20");
    MALSCHED_REQUIRE(sc[2] <= k.step3_capacity, "stage-3 item multiplicity above 26");
    MALSCHED_REQUIRE(alloc.multiplicity[static_cast<size_t>(i)] <=
                         k.step1_load_factor + k.step2_capacity + k.step3_capacity,
                     "item multiplicity above 78");
  }
  bool first = true;
  for (int a = 0; a < mmfa.agent_count(); ++a) {
    Rat u = mmfa.agents[static_cast<size_t>(a)].utility.evaluate(alloc.bundles[static_cast<size_t>(a)]);
    if (first || u < alloc.min_utility) alloc.min_utility = u;
    first = false;
  }
  MALSCHED_REQUIRE(alloc.min_utility * Rat(k.total_factor) >= alloc.V,
                   "allocation misses the V/193 utility floor");
  return alloc;
}

using Reducer = Instance (*)(const MmfaInstance&, const Rat&);

Allocation search_levels(const MmfaInstance& mmfa, const Rat& rel_eps, LpEngine engine,
                         Reducer reducer) {
  if (rel_eps.sign() <= 0) throw ValidationError("search tolerance must be positive");
  if (mmfa.item_count() > 20)
    throw ValidationError("allocation solver is desk-scale: at most 20 items");

  Allocation degenerate;
  degenerate.degenerate = true;
  degenerate.V = Rat(0);

  // An agent that values nothing pins the optimum at zero.
  Rat v_hi;
  for (const MmfaAgent& a : mmfa.agents) {
    Rat best = a.utility.max_speed().first;
    if (best.sign() <= 0) {
      degenerate.note = "agent '" + a.id + "' has zero utility everywhere; the optimum is 0";
      return degenerate;
    }
    if (best > v_hi) v_hi = best;
  }

  int probes = 0;
  auto probe = [&](const Rat& V) -> std::optional<ProbeSuccess> {
    ++probes;
    Instance reduced = reducer(mmfa, V);
    auto round = round_at(reduced, Rat(1) / V, engine);
    if (!round) return std::nullopt;
    return ProbeSuccess{std::move(*round), V};
  };

  if (auto ok = probe(v_hi)) return finish(mmfa, *ok, probes, false, Rat(0));

  Rat v_lo = v_hi / (Rat(mmfa.agent_count()) * Rat::pow2(mmfa.item_count()));
  // Positive singletons everywhere give a guaranteed-feasible floor: hand
  // every agent one distinct item.
  if (mmfa.item_count() >= mmfa.agent_count()) {
    Rat floor;
    bool first = true;
    for (const MmfaAgent& a : mmfa.agents)
      for (int i = 0; i < mmfa.item_count(); ++i) {
        Rat u = a.utility.evaluate(with(0, i));
        if (first || u < floor) floor = u;
        first = false;
      }
    if (floor.sign() > 0 && floor < v_lo) v_lo = floor;
  }

  auto lo_ok = probe(v_lo);
  if (!lo_ok) {
    degenerate.note = "no probed level admits an allocation; the optimum is below " + v_lo.str();
    degenerate.has_upper = true;
    degenerate.upper = v_lo;
    degenerate.probes = probes;
    return degenerate;
  }

  Rat lo = v_lo, hi = v_hi;
  const Rat one_plus = Rat(1) + rel_eps;
  while (hi > lo * one_plus) {
    Rat mid = (lo + hi) / Rat(2);
    if (auto ok = probe(mid)) {
      lo = mid;
      lo_ok = std::move(ok);
    } else {
      hi = mid;
    }
  }
  return finish(mmfa, *lo_ok, probes, true, hi);
}

}  // namespace

Allocation solve_mmfa(const MmfaInstance& mmfa, const Rat& rel_eps, LpEngine engine,
                      bool santa_mode) {
  if (santa_mode)
    for (const MmfaAgent& a : mmfa.agents)
      if (!std::holds_alternative<SpeedFn::Linear>(a.utility.spec()))
        throw ValidationError("santa mode expects additive (linear) utilities");
  Allocation alloc = search_levels(mmfa, rel_eps, engine, &reduce_to_scheduling);
  if (santa_mode && alloc.note.empty())
    alloc.note = "additive utilities routed through the 78-augmented 193-approximation";
  return alloc;
}

Allocation solve_mmfa_truncated(const MmfaInstance& mmfa, const Rat& rel_eps, LpEngine engine) {
  Allocation alloc = search_levels(mmfa, rel_eps, engine, &reduce_by_truncation);
  if (alloc.note.empty()) alloc.note = "min-truncation driver over explicit-table utilities";
  return alloc;
}

json emit_allocation(const MmfaInstance& mmfa, const Allocation& alloc) {
  json out;
  out["degenerate"] = alloc.degenerate;
  if (!alloc.note.empty()) out["note"] = alloc.note;
  out["level"] = rat_to_json(alloc.V);
  if (alloc.has_upper) out["optimum_upper_bound"] = rat_to_json(alloc.upper);
  out["probes"] = alloc.probes;
  if (alloc.degenerate) return out;
  out["min_utility"] = rat_to_json(alloc.min_utility);
  json bundles = json::object();
  for (int a = 0; a < mmfa.agent_count(); ++a) {
    json arr = json::array();
    for (int i : elements(alloc.bundles[static_cast<size_t>(a)]))
      arr.push_back(mmfa.items[static_cast<size_t>(i)]);
    bundles[mmfa.agents[static_cast<size_t>(a)].id] = std::move(arr);
  }
  out["bundles"] = std::move(bundles);
  json mult = json::object();
  json steps = json::object();
  for (int i = 0; i < mmfa.item_count(); ++i) {
    mult[mmfa.items[static_cast<size_t>(i)]] = alloc.multiplicity[static_cast<size_t>(i)];
    steps[mmfa.items[static_cast<size_t>(i)]] = alloc.step_count[static_cast<size_t>(i)];
  }
  out["item_multiplicity"] = std::move(mult);
  out["item_multiplicity_by_stage"] = std::move(steps);
  json agent_utils = json::object();
  for (int a = 0; a < mmfa.agent_count(); ++a)
    agent_utils[mmfa.agents[static_cast<size_t>(a)].id] = rat_to_json(
        mmfa.agents[static_cast<size_t>(a)].utility.evaluate(alloc.bundles[static_cast<size_t>(a)]));
  out["agent_utilities"] = std::move(agent_utils);
  out["certificates"] = {
      {"min_utility_at_least_level_over_193", true},
      {"item_multiplicity_bounds", {{"stage1", 32}, {"stage2", 20}, {"stage3", 26}, {"total", 78}}},
      {"rebate_interpretation",
       "per-item rebate p_ij reads the raw singleton utility u_j({i}) (the printed construction "
       "is circular otherwise)"},
  };
  return out;
}

}  // namespace malsched
