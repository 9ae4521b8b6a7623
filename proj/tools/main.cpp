#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>

#include "malsched/errors.hpp"
#include "malsched/gen.hpp"
#include "malsched/oracle.hpp"
#include "report.hpp"

namespace {

using namespace malsched;

constexpr int kExitLpInfeasible = 2;
constexpr int kExitValidation = 3;
constexpr int kExitInvariant = 4;

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("JSON parse error in '" + path + "': " + e.what());
  }
  return doc;
}

void write_output(const json& doc, const std::string& report_path) {
  const std::string text = doc.dump(2);
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) throw ValidationError("cannot write '" + report_path + "'");
    out << text << "\n";
  }
  std::cout << text << "\n";
}

struct CommonArgs {
  std::string instance_path;
  std::string makespan;
  bool search = false;
  std::string eps = "1/100";
  std::string mode = "explicit";
  std::string report_path;
  bool trace = false;
};

LpEngine engine_of(const std::string& mode) {
  if (mode == "explicit") return LpEngine::explicit_enumeration;
  if (mode == "colgen") return LpEngine::column_generation;
  throw ValidationError("unknown --mode '" + mode + "' (expected explicit|colgen)");
}

Instance load_with_warnings(const std::string& path) {
  std::vector<std::string> warnings;
  Instance inst = load_instance(read_json_file(path), {}, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  return inst;
}

int run_solve(const CommonArgs& args) {
  Instance inst = load_with_warnings(args.instance_path);
  const LpEngine engine = engine_of(args.mode);
  const auto t0 = std::chrono::steady_clock::now();
  ReportMeta meta;
  meta.engine = engine;
  meta.trace = args.trace;

  std::optional<RoundResult> result;
  if (!args.makespan.empty()) {
    Rat C = Rat::parse(args.makespan);
    result = round_at(inst, C, engine);
    if (!result) {
      json out;
      out["status"] = "lp_infeasible";
      out["target_load"] = C.str();
      out["meaning"] =
          "the configuration LP is infeasible at this target, hence no assignment of load at "
          "most the target exists; feasibility of the LP would not conversely guarantee one";
      write_output(out, args.report_path);
      return kExitLpInfeasible;
    }
  } else {
    Rat eps = Rat::parse(args.eps);
    RoundSearchResult sr = round_search(inst, eps, engine);
    meta.searched = true;
    meta.eps = eps;
    meta.lower = sr.lower;
    meta.lower_infeasible = sr.lower_infeasible;
    meta.probes = sr.probes;
    result = std::move(sr.round);
  }
  Schedule sched = build_schedule(inst, result->assignment);
  MALSCHED_REQUIRE(!verify_schedule(inst, sched).has_value(),
                   "built schedule failed its feasibility check");
  meta.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                     .count();
  write_output(build_report(inst, *result, sched, meta), args.report_path);
  return 0;
}

int run_lp(const CommonArgs& args) {
  Instance inst = load_with_warnings(args.instance_path);
  const LpEngine engine = engine_of(args.mode);
  if (!args.makespan.empty()) {
    Rat C = Rat::parse(args.makespan);
    auto sol = solve_config_lp(inst, C, engine);
    if (!sol) {
      json out;
      out["status"] = "lp_infeasible";
      out["target_load"] = C.str();
      write_output(out, args.report_path);
      return kExitLpInfeasible;
    }
    write_output(lp_solution_json(inst, *sol), args.report_path);
    return 0;
  }
  Rat eps = Rat::parse(args.eps);
  CSearchResult res = binary_search_C(inst, eps, engine);
  json out = lp_solution_json(inst, res.sol);
  out["search"] = {{"eps", eps.str()},
                   {"bracket_lower", res.lower.str()},
                   {"bracket_lower_infeasible", res.lower_infeasible},
                   {"probes", res.probes}};
  write_output(out, args.report_path);
  return 0;
}

int run_schedule(const std::string& instance_path, const std::string& assignment_path,
                 const std::string& report_path) {
  Instance inst = load_with_warnings(instance_path);
  Assignment a = parse_assignment(inst, read_json_file(assignment_path));
  Schedule sched = build_schedule(inst, a);
  MALSCHED_REQUIRE(!verify_schedule(inst, sched).has_value(),
                   "built schedule failed its feasibility check");
  write_output(emit_schedule(inst, sched), report_path);
  return 0;
}

int run_mmfa(const std::string& instance_path, const std::string& eps_text,
             const std::string& mode, bool santa, bool min_truncation,
             const std::string& report_path) {
  std::vector<std::string> warnings;
  MmfaInstance mmfa = load_mmfa(read_json_file(instance_path), &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  Rat eps = Rat::parse(eps_text);
  Allocation alloc = min_truncation
                         ? solve_mmfa_truncated(mmfa, eps, engine_of(mode))
                         : solve_mmfa(mmfa, eps, engine_of(mode), santa);
  write_output(emit_allocation(mmfa, alloc), report_path);
  return 0;
}

int run_verify(const CommonArgs& args) {
  Instance inst = load_with_warnings(args.instance_path);
  Rat eps = Rat::parse(args.eps);
  RoundSearchResult sr = round_search(inst, eps, engine_of(args.mode));
  auto [c_star, opt] = exact_assignment(inst);
  json out;
  out["searched_target"] = sr.C.str();
  out["optimal_load"] = c_star.str();
  out["achieved_load"] = sr.round.final_load.str();
  out["ratio_achieved_over_optimal"] = (sr.round.final_load / c_star).str();
  out["ratio_decimal"] = (sr.round.final_load / c_star).approx();
  Rat bound = Rat(algo_constants().total_factor) * (Rat(1) + eps);
  out["certified_bound"] = bound.str();
  bool ok = sr.round.final_load <= bound * c_star;
  out["within_bound"] = ok;
  out["optimal_assignment"] = emit_assignment(inst, opt)["assignment"];
  write_output(out, args.report_path);
  MALSCHED_REQUIRE(ok, "achieved load exceeded 193 (1+eps) times the optimal load");
  return 0;
}

int run_check(const std::string& instance_path, int mnat_limit) {
  json doc = read_json_file(instance_path);
  json out;
  std::vector<std::string> warnings;
  Instance inst;
  try {
    inst = load_instance(doc, {}, &warnings);
  } catch (const ValidationError& e) {
    out["ok"] = false;
    out["errors"] = json::array({e.what()});
    write_output(out, "");
    return kExitValidation;
  }
  out["ok"] = true;
  out["warnings"] = warnings;
  json mnat = json::object();
  bool all_ok = true;
  for (const Job& job : inst.jobs) {
    if (inst.machine_count() > mnat_limit) {
      mnat[job.id] = "skipped (ground set above the exchange-check limit)";
      continue;
    }
    if (auto witness = check_mnat(job.speed)) {
      all_ok = false;
      json w;
      json sset = json::array(), tset = json::array();
      for (int i : elements(witness->s)) sset.push_back(inst.machines[static_cast<size_t>(i)]);
      for (int i : elements(witness->t)) tset.push_back(inst.machines[static_cast<size_t>(i)]);
      w["violation"] = {{"S", sset},
                        {"T", tset},
                        {"element", inst.machines[static_cast<size_t>(witness->element)]}};
      mnat[job.id] = std::move(w);
    } else {
      mnat[job.id] = "ok";
    }
  }
  out["exchange_certification"] = std::move(mnat);
  out["ok"] = all_ok;
  write_output(out, "");
  return all_ok ? 0 : kExitValidation;
}

int run_gen(std::uint64_t seed, const std::string& profile, int machines, int jobs, bool mmfa_mode,
            int items, int agents, const std::string& out_path) {
  GenProfile p = parse_profile(profile);
  json doc;
  if (mmfa_mode) {
    doc = emit_mmfa(gen_mmfa(seed, p, items, agents));
  } else {
    Instance inst = gen_instance(seed, p, machines, jobs);
    validate_instance(inst, {});
    doc = emit_instance(inst);
  }
  write_output(doc, out_path);
  return 0;
}

int run_lp_dump(const std::string& instance_path, const std::string& makespan) {
  Instance inst = load_with_warnings(instance_path);
  std::cout << config_lp_text(inst, Rat::parse(makespan));
  return 0;
}

int run_recheck(const std::string& instance_path, const std::string& report_path) {
  Instance inst = load_with_warnings(instance_path);
  json report = read_json_file(report_path);
  std::vector<std::string> problems = recheck_report(inst, report);
  json out;
  out["ok"] = problems.empty();
  out["problems"] = problems;
  write_output(out, "");
  return problems.empty() ? 0 : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"malsched: generalized malleable scheduling with M-natural-concave speeds"};
  app.require_subcommand(1);

  CommonArgs solve_args, lp_args, verify_args;
  std::string sched_instance, sched_assignment, sched_report;
  std::string mmfa_instance, mmfa_eps = "1/100", mmfa_mode = "explicit", mmfa_report;
  bool mmfa_santa = false, mmfa_trunc = false;
  std::string check_instance;
  int check_mnat_limit = 10;
  std::uint64_t gen_seed = 1;
  std::string gen_profile = "mixed", gen_out;
  int gen_machines = 4, gen_jobs = 3, gen_items = 4, gen_agents = 2;
  bool gen_mmfa_mode = false;
  std::string dump_instance, dump_makespan;
  std::string recheck_instance, recheck_report_path;

  auto add_common = [](CLI::App* cmd, CommonArgs& a, bool with_trace) {
    cmd->add_option("instance", a.instance_path, "instance JSON file")->required();
    cmd->add_option("--makespan", a.makespan, "target load C as p/q");
    cmd->add_flag("--search", a.search, "binary search for the smallest feasible C (default)");
    cmd->add_option("--eps", a.eps, "relative search tolerance (default 1/100)");
    cmd->add_option("--mode", a.mode, "LP engine: explicit|colgen");
    cmd->add_option("--report", a.report_path, "also write the output JSON here");
    if (with_trace) cmd->add_flag("--trace", a.trace, "embed LP and split traces in the report");
  };

  add_common(app.add_subcommand("solve", "run the full 193-approximation pipeline"), solve_args,
             true);
  add_common(app.add_subcommand("lp", "solve the configuration LP only"), lp_args, false);

  auto* sched = app.add_subcommand("schedule", "turn an assignment into a feasible schedule");
  sched->add_option("instance", sched_instance, "instance JSON file")->required();
  sched->add_option("--assignment", sched_assignment, "assignment JSON file")->required();
  sched->add_option("--report", sched_report, "also write the schedule JSON here");

  auto* mm = app.add_subcommand("mmfa", "max-min fair allocation via the scheduling reduction");
  mm->add_option("instance", mmfa_instance, "allocation instance JSON file")->required();
  mm->add_option("--eps", mmfa_eps, "relative level-search tolerance (default 1/100)");
  mm->add_option("--mode", mmfa_mode, "LP engine: explicit|colgen");
  mm->add_flag("--santa", mmfa_santa, "require additive utilities (reports 78/193 certificates)");
  mm->add_flag("--min-truncation", mmfa_trunc,
               "generic truncation driver (explicit-table utilities only)");
  mm->add_option("--report", mmfa_report, "also write the allocation JSON here");

  add_common(app.add_subcommand("verify", "pipeline against the brute-force optimum"),
             verify_args, false);

  auto* check = app.add_subcommand("check", "validate an instance file");
  check->add_option("instance", check_instance, "instance JSON file")->required();
  check->add_option("--mnat-limit", check_mnat_limit,
                    "exchange-check ground-set limit (default 10)");

  auto* gen = app.add_subcommand("gen", "emit a deterministic random instance");
  gen->add_option("--seed", gen_seed, "random seed")->required();
  gen->add_option("--profile", gen_profile, "linear|wmr-uniform|wmr-partition|mbv|mixed");
  gen->add_option("--machines", gen_machines, "machine count");
  gen->add_option("--jobs", gen_jobs, "job count");
  gen->add_flag("--mmfa", gen_mmfa_mode, "emit an allocation instance instead");
  gen->add_option("--items", gen_items, "item count (with --mmfa)");
  gen->add_option("--agents", gen_agents, "agent count (with --mmfa)");
  gen->add_option("--out", gen_out, "also write the instance here");

  auto* dump = app.add_subcommand("lp-dump", "configuration LP in CPLEX-LP text form");
  dump->add_option("instance", dump_instance, "instance JSON file")->required();
  dump->add_option("--makespan", dump_makespan, "target load C as p/q")->required();

  auto* recheck = app.add_subcommand("recheck", "recompute every report number independently");
  recheck->add_option("instance", recheck_instance, "instance JSON file")->required();
  recheck->add_option("--report", recheck_report_path, "report JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("solve")) return run_solve(solve_args);
    if (app.got_subcommand("lp")) return run_lp(lp_args);
    if (app.got_subcommand("schedule"))
      return run_schedule(sched_instance, sched_assignment, sched_report);
    if (app.got_subcommand("mmfa"))
      return run_mmfa(mmfa_instance, mmfa_eps, mmfa_mode, mmfa_santa, mmfa_trunc, mmfa_report);
    if (app.got_subcommand("verify")) return run_verify(verify_args);
    if (app.got_subcommand("check")) return run_check(check_instance, check_mnat_limit);
    if (app.got_subcommand("gen"))
      return run_gen(gen_seed, gen_profile, gen_machines, gen_jobs, gen_mmfa_mode, gen_items,
                     gen_agents, gen_out);
    if (app.got_subcommand("lp-dump")) return run_lp_dump(dump_instance, dump_makespan);
    if (app.got_subcommand("recheck")) return run_recheck(recheck_instance, recheck_report_path);
  } catch (const InvariantViolation& e) {
    std::cerr << "internal invariant violation (this is a solver bug): " << e.what() << "\n";
    return kExitInvariant;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
