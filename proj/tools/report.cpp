#include "report.hpp"

#include <sstream>

#include "malsched/constants.hpp"

namespace malsched {

std::string instance_digest(const Instance& inst) {
  const std::string text = emit_instance(inst).dump();
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a 64
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  std::ostringstream os;
  os << "fnv1a64:" << std::hex << h;
  return os.str();
}

namespace {

json rat_str(const Rat& r) { return json(r.str()); }

json stage_json(const Instance& inst, const PartialAssignment& pa) {
  json out;
  json jobs = json::array();
  for (const auto& [j, s] : pa.sets) {
    (void)s;
    jobs.push_back(inst.jobs[static_cast<size_t>(j)].id);
  }
  out["jobs"] = std::move(jobs);
  Rat mx;
  for (const Rat& l : pa.machine_load)
    if (l > mx) mx = l;
  out["max_machine_load"] = rat_str(mx);
  out["certified_bound"] = rat_str(pa.certified_bound);
  int mult = 0;
  std::vector<int> counts(static_cast<size_t>(inst.machine_count()), 0);
  for (const auto& [j, s] : pa.sets) {
    (void)j;
    for (int i : elements(s)) mult = std::max(mult, ++counts[static_cast<size_t>(i)]);
  }
  out["max_machine_multiplicity"] = mult;
  return out;
}

}  // namespace

json lp_solution_json(const Instance& inst, const ConfigLpSolution& sol) {
  json out;
  out["target_load"] = rat_str(sol.C);
  out["engine"] = sol.engine == LpEngine::explicit_enumeration ? "explicit" : "colgen";
  json support = json::object();
  for (int j = 0; j < inst.job_count(); ++j) {
    json rows = json::array();
    for (const auto& [s, v] : sol.support[static_cast<size_t>(j)]) {
      json e;
      json set = json::array();
      for (int i : elements(s)) set.push_back(inst.machines[static_cast<size_t>(i)]);
      e["set"] = std::move(set);
      e["value"] = rat_str(v);
      rows.push_back(std::move(e));
    }
    support[inst.jobs[static_cast<size_t>(j)].id] = std::move(rows);
  }
  out["support"] = std::move(support);
  json slack = json::object();
  for (int i = 0; i < inst.machine_count(); ++i)
    slack[inst.machines[static_cast<size_t>(i)]] = rat_str(sol.machine_slack[static_cast<size_t>(i)]);
  out["machine_slack"] = std::move(slack);
  json lambda = json::object();
  for (int j = 0; j < inst.job_count(); ++j)
    lambda[inst.jobs[static_cast<size_t>(j)].id] = rat_str(sol.lambda[static_cast<size_t>(j)]);
  out["lambda"] = std::move(lambda);
  json mu = json::object();
  for (int i = 0; i < inst.machine_count(); ++i)
    mu[inst.machines[static_cast<size_t>(i)]] = rat_str(sol.mu[static_cast<size_t>(i)]);
  out["mu"] = std::move(mu);
  return out;
}

json build_report(const Instance& inst, const RoundResult& res, const Schedule& sched,
                  const ReportMeta& meta) {
  const auto& k = algo_constants();
  json out;
  out["instance_digest"] = instance_digest(inst);
  out["engine"] = meta.engine == LpEngine::explicit_enumeration ? "explicit" : "colgen";
  out["target_load"] = rat_str(res.sol.C);
  if (meta.searched) {
    json s;
    s["eps"] = rat_str(meta.eps);
    s["bracket_lower"] = rat_str(meta.lower);
    s["bracket_lower_infeasible"] = meta.lower_infeasible;
    s["probes"] = meta.probes;
    out["search"] = std::move(s);
    out["load_bound_vs_optimum"] = rat_str(Rat(k.total_factor) * (Rat(1) + meta.eps));
  }
  out["load_bound_vs_target"] = k.total_factor;

  json stages;
  stages["stage1"] = stage_json(inst, res.step1);
  stages["stage2"] = stage_json(inst, res.step2);
  if (res.welfare.lp_checked) {
    stages["stage2"]["welfare_integral_value"] = rat_str(res.welfare.integral_value);
    stages["stage2"]["welfare_lp_optimum"] = rat_str(res.welfare.lp_optimum);
    stages["stage2"]["welfare_value_equals_lp"] = true;
  } else if (!res.partition.step2_jobs.empty()) {
    stages["stage2"]["welfare_integral_value"] = rat_str(res.welfare.integral_value);
    stages["stage2"]["welfare_lp_skipped"] = "machine count above the explicit welfare LP limit";
  }
  stages["stage3"] = stage_json(inst, res.step3);
  if (!res.split.jobs.empty()) {
    json split = json::object();
    for (const SplitJob& sj : res.split.jobs) {
      json e;
      e["kept_mass"] = rat_str(sj.gamma);
      e["price_mass"] = rat_str(sj.price_mass);
      split[inst.jobs[static_cast<size_t>(sj.job)].id] = std::move(e);
    }
    stages["stage3"]["split"] = std::move(split);
    json classes = json::object();
    for (const JobClasses& jc : res.classes.jobs) {
      json e;
      e["demand_weight"] = rat_str(jc.demand_weight);
      json bands = json::array();
      for (const DyadicClassInfo& info : jc.classes) {
        json b;
        b["k"] = info.k;
        b["mass"] = rat_str(info.mass);
        b["demand"] = info.demand;
        bands.push_back(std::move(b));
      }
      e["bands"] = std::move(bands);
      classes[inst.jobs[static_cast<size_t>(jc.job)].id] = std::move(e);
    }
    stages["stage3"]["dyadic_classes"] = std::move(classes);
  }
  out["stages"] = std::move(stages);

  out["assignment"] = emit_assignment(inst, res.assignment)["assignment"];
  json loads = json::object();
  for (int i = 0; i < inst.machine_count(); ++i)
    loads[inst.machines[static_cast<size_t>(i)]] = rat_str(res.loads[static_cast<size_t>(i)]);
  out["machine_loads"] = std::move(loads);
  out["final_load"] = rat_str(res.final_load);
  out["makespan"] = rat_str(makespan(inst, sched));
  out["wall_time_ms"] = meta.wall_ms;

  if (meta.trace) {
    json trace;
    trace["lp"] = lp_solution_json(inst, res.sol);
    if (!res.split.jobs.empty()) {
      json xprime = json::object();
      for (const SplitJob& sj : res.split.jobs) {
        json rows = json::array();
        for (const auto& [s, v] : sj.x_prime) {
          json e;
          json set = json::array();
          for (int i : elements(s)) set.push_back(inst.machines[static_cast<size_t>(i)]);
          e["set"] = std::move(set);
          e["mass"] = rat_str(v);
          rows.push_back(std::move(e));
        }
        xprime[inst.jobs[static_cast<size_t>(sj.job)].id] = std::move(rows);
      }
      trace["split_solution"] = std::move(xprime);
    }
    out["trace"] = std::move(trace);
  }
  return out;
}

std::vector<std::string> recheck_report(const Instance& inst, const json& report) {
  std::vector<std::string> problems;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  };
  try {
    expect(report.at("instance_digest").get<std::string>() == instance_digest(inst),
           "instance digest differs");
    const Rat C = Rat::parse(report.at("target_load").get<std::string>());
    json adoc;
    adoc["assignment"] = report.at("assignment");
    Assignment a = parse_assignment(inst, adoc);
    std::vector<Rat> loads = machine_loads(inst, a);
    Rat final_load;
    for (const Rat& l : loads)
      if (l > final_load) final_load = l;
    expect(Rat::parse(report.at("final_load").get<std::string>()) == final_load,
           "final_load differs from the recomputed assignment load");
    for (int i = 0; i < inst.machine_count(); ++i) {
      const std::string claimed =
          report.at("machine_loads").at(inst.machines[static_cast<size_t>(i)]).get<std::string>();
      expect(Rat::parse(claimed) == loads[static_cast<size_t>(i)],
             "machine load differs for " + inst.machines[static_cast<size_t>(i)]);
    }
    const auto& k = algo_constants();
    expect(final_load <= Rat(k.total_factor) * C, "final load exceeds 193 C");

    // Per-stage loads and multiplicities, recomputed from the job lists.
    const long bounds[3] = {k.step1_load_factor, k.step2_load_factor, k.step3_load_factor};
    const long caps[3] = {0, k.step2_capacity, k.step3_capacity};
    for (int stage = 1; stage <= 3; ++stage) {
      const json& sj = report.at("stages").at("stage" + std::to_string(stage));
      std::vector<Rat> sload(static_cast<size_t>(inst.machine_count()));
      std::vector<int> scount(static_cast<size_t>(inst.machine_count()), 0);
      for (const auto& jid : sj.at("jobs")) {
        int j = -1;
        for (int t = 0; t < inst.job_count(); ++t)
          if (inst.jobs[static_cast<size_t>(t)].id == jid.get<std::string>()) j = t;
        expect(j >= 0, "stage job list names an unknown job");
        if (j < 0) continue;
        Mask s = a.sets[static_cast<size_t>(j)];
        Rat f = processing_time(inst, j, s);
        for (int i : elements(s)) {
          sload[static_cast<size_t>(i)] += f;
          scount[static_cast<size_t>(i)]++;
        }
        if (stage == 1) expect(popcount(s) == 1, "stage-1 job not on a single machine");
      }
      Rat mx;
      int mult = 0;
      for (int i = 0; i < inst.machine_count(); ++i) {
        if (sload[static_cast<size_t>(i)] > mx) mx = sload[static_cast<size_t>(i)];
        mult = std::max(mult, scount[static_cast<size_t>(i)]);
      }
      expect(Rat::parse(sj.at("max_machine_load").get<std::string>()) == mx,
             "stage max load differs");
      expect(sj.at("max_machine_multiplicity").get<int>() == mult,
             "stage multiplicity differs");
      expect(mx <= Rat(bounds[stage - 1]) * C, "stage load exceeds its certified bound");
      if (stage > 1) expect(mult <= caps[stage - 1], "stage multiplicity exceeds its cap");
    }

    Schedule sched = build_schedule(inst, a);
    expect(!verify_schedule(inst, sched).has_value(), "rebuilt schedule infeasible");
    expect(Rat::parse(report.at("makespan").get<std::string>()) == makespan(inst, sched),
           "makespan differs from the deterministic rebuild");
    expect(makespan(inst, sched) >= final_load, "makespan below load");
  } catch (const std::exception& e) {
    problems.push_back(std::string("report unreadable: ") + e.what());
  }
  return problems;
}

}  // namespace malsched
