#include "malsched/rounding.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "malsched/errors.hpp"
#include "malsched/lp.hpp"

namespace malsched {

namespace {

const Rat& C_of(const ConfigLpSolution& sol) { return sol.C; }

Rat inv(const Rat& x) { return Rat(1) / x; }

}  // namespace

JobPartition partition_jobs(const Instance& inst, const ConfigLpSolution& sol) {
  const auto& k = algo_constants();
  const Rat C = C_of(sol);
  const Rat fast_threshold = k.fast_singleton_over_C / C;
  const Rat cheap_cap = k.cheap_set_over_C / C;
  JobPartition part;
  part.step_of.assign(static_cast<size_t>(inst.job_count()), 0);
  for (int j = 0; j < inst.job_count(); ++j) {
    const SpeedFn& g = inst.jobs[static_cast<size_t>(j)].speed;
    Mask fast = 0;
    for (int i = 0; i < inst.machine_count(); ++i)
      if (g.evaluate(with(0, i)) >= fast_threshold) fast = with(fast, i);
    part.fast_machines.push_back(fast);

    Rat fast_mass, cheap_mass;
    for (const auto& [s, x] : sol.support[static_cast<size_t>(j)]) {
      Rat gs = g.evaluate(s);
      for (int i : elements(s & fast)) fast_mass += g.evaluate(with(0, i)) / gs * x;
      if (sol.price_sum(j, s) <= cheap_cap) cheap_mass += x;
    }
    part.fast_mass.push_back(fast_mass);
    part.cheap_mass.push_back(cheap_mass);

    int step;
    if (fast_mass >= k.step1_mass)
      step = 1;
    else if (cheap_mass >= k.step2_mass)
      step = 2;
    else
      step = 3;
    part.step_of[static_cast<size_t>(j)] = step;
    (step == 1 ? part.step1_jobs : step == 2 ? part.step2_jobs : part.step3_jobs).push_back(j);
  }
  return part;
}

// ---------------------------------------------------------------------------
// Step 1: single-machine assignments.

/// Nodes are fractional jobs and their machines; at a vertex every component
/// has at most as many edges as nodes, hence at most one cycle.
std::map<int, int> round_fractional_support(const std::vector<std::map<int, Rat>>& y,
                                            const std::vector<int>& frac_jobs) {
  struct Edge {
    int job, machine;
  };
  std::vector<Edge> edges;
  std::set<int> machine_nodes;
  for (int j : frac_jobs)
    for (const auto& [i, v] : y[static_cast<size_t>(j)]) {
      (void)v;
      edges.push_back(Edge{j, i});
      machine_nodes.insert(i);
    }

  // Node encoding: job j -> 2j, machine i -> 2i+1.
  auto jnode = [](int j) { return 2 * j; };
  auto mnode = [](int i) { return 2 * i + 1; };
  std::map<int, std::vector<int>> adj;  // node -> edge ids
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    adj[jnode(edges[static_cast<size_t>(e)].job)].push_back(e);
    adj[mnode(edges[static_cast<size_t>(e)].machine)].push_back(e);
  }

  std::map<int, int> matched;          // job -> machine
  std::set<int> machine_taken;         // machines holding one extra job
  std::set<int> visited_nodes;
  std::vector<bool> edge_on_cycle(edges.size(), false);
  std::vector<bool> job_matched_flag;  // sized lazily via `matched`

  auto other = [&](int e, int node) {
    const Edge& ed = edges[static_cast<size_t>(e)];
    return node == jnode(ed.job) ? mnode(ed.machine) : jnode(ed.job);
  };

  for (const auto& [start, unused] : adj) {
    (void)unused;
    if (visited_nodes.count(start)) continue;
    // Collect the component.
    std::vector<int> comp_nodes;
    std::vector<int> comp_edges;
    std::set<int> comp_edge_set;
    std::vector<int> stack{start};
    visited_nodes.insert(start);
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      comp_nodes.push_back(v);
      for (int e : adj[v]) {
        if (!comp_edge_set.count(e)) {
          comp_edge_set.insert(e);
          comp_edges.push_back(e);
        }
        int w = other(e, v);
        if (!visited_nodes.count(w)) {
          visited_nodes.insert(w);
          stack.push_back(w);
        }
      }
    }
    MALSCHED_REQUIRE(comp_edges.size() <= comp_nodes.size(),
                     "assignment vertex support has more edges than nodes in a component");

    // Peel leaves; whatever survives is the unique cycle (possibly empty).
    std::map<int, int> degree;
    std::set<int> removed_edges;
    for (int e : comp_edges) {
      degree[jnode(edges[static_cast<size_t>(e)].job)]++;
      degree[mnode(edges[static_cast<size_t>(e)].machine)]++;
    }
    std::vector<int> peel;
    for (int v : comp_nodes)
      if (degree[v] <= 1) peel.push_back(v);
    std::set<int> gone(peel.begin(), peel.end());
    while (!peel.empty()) {
      int v = peel.back();
      peel.pop_back();
      for (int e : adj[v]) {
        if (removed_edges.count(e) || !comp_edge_set.count(e)) continue;
        removed_edges.insert(e);
        int w = other(e, v);
        if (--degree[w] <= 1 && !gone.count(w)) {
          gone.insert(w);
          peel.push_back(w);
        }
      }
    }
    std::vector<int> cycle_edges;
    for (int e : comp_edges)
      if (!removed_edges.count(e)) cycle_edges.push_back(e);

    std::set<int> cycle_nodes;
    if (!cycle_edges.empty()) {
      // Walk the cycle and match each job to the next machine along the walk.
      for (int e : cycle_edges) {
        edge_on_cycle[static_cast<size_t>(e)] = true;
        cycle_nodes.insert(jnode(edges[static_cast<size_t>(e)].job));
        cycle_nodes.insert(mnode(edges[static_cast<size_t>(e)].machine));
      }
      int v = *cycle_nodes.begin();
      int prev_edge = -1;
      const int first = v;
      do {
        int next_edge = -1;
        for (int e : adj[v])
          if (edge_on_cycle[static_cast<size_t>(e)] && e != prev_edge) {
            next_edge = e;
            break;
          }
        MALSCHED_REQUIRE(next_edge >= 0, "cycle walk broke");
        int w = other(next_edge, v);
        if (v % 2 == 0) {  // job node: match it to the machine it walks into
          int job = v / 2, machine = (w - 1) / 2;
          matched[job] = machine;
          MALSCHED_REQUIRE(!machine_taken.count(machine),
                           "cycle matching reused a machine");
          machine_taken.insert(machine);
        }
        prev_edge = next_edge;
        v = w;
      } while (v != first);
    }

    // Orient the remaining forest away from the cycle (or from the
    // lowest-index machine node) and match every free job to a child machine.
    std::vector<int> roots;
    if (!cycle_nodes.empty()) {
      roots.assign(cycle_nodes.begin(), cycle_nodes.end());
    } else {
      int root = -1;
      for (int v : comp_nodes)
        if (v % 2 == 1 && (root < 0 || v < root)) root = v;
      MALSCHED_REQUIRE(root >= 0, "fractional component without a machine node");
      roots.push_back(root);
    }
    std::map<int, int> parent;
    std::vector<int> bfs = roots;
    std::set<int> seen(roots.begin(), roots.end());
    size_t head = 0;
    while (head < bfs.size()) {
      int v = bfs[head++];
      for (int e : adj[v]) {
        if (edge_on_cycle[static_cast<size_t>(e)] || !comp_edge_set.count(e)) continue;
        int w = other(e, v);
        if (seen.count(w)) continue;
        seen.insert(w);
        parent[w] = v;
        bfs.push_back(w);
      }
    }
    for (int v : comp_nodes) {
      if (v % 2 == 1) continue;  // machines receive, jobs choose
      int job = v / 2;
      if (matched.count(job)) continue;  // cycle jobs are done
      int pick = -1;
      for (int e : adj[v]) {
        if (edge_on_cycle[static_cast<size_t>(e)]) continue;
        int w = other(e, v);
        if (parent.count(v) && parent[v] == w) continue;  // skip the parent machine
        int machine = (w - 1) / 2;
        if (pick < 0 || machine < pick) pick = machine;
      }
      MALSCHED_REQUIRE(pick >= 0, "fractional job without a child machine");
      matched[job] = pick;
      MALSCHED_REQUIRE(!machine_taken.count(pick), "tree matching reused a machine");
      machine_taken.insert(pick);
    }
  }
  (void)job_matched_flag;
  return matched;
}

PartialAssignment assign_single_machines(const Instance& inst, const ConfigLpSolution& sol,
                                         const JobPartition& part) {
  const auto& k = algo_constants();
  const Rat C = C_of(sol);
  PartialAssignment out;
  out.step = 1;
  out.certified_bound = Rat(k.step1_load_factor) * C;
  out.machine_load.assign(static_cast<size_t>(inst.machine_count()), Rat(0));
  if (part.step1_jobs.empty()) return out;

  // Assignment LP: one unit per job over its fast machines, machine budget 16C.
  LinearProgram lp{Sense::maximize};
  std::map<std::pair<int, int>, int> var;  // (job, machine) -> column
  for (int j : part.step1_jobs)
    for (int i : elements(part.fast_machines[static_cast<size_t>(j)]))
      var[{j, i}] = lp.add_column(
          "y_" + inst.jobs[static_cast<size_t>(j)].id + "_" + inst.machines[static_cast<size_t>(i)],
          Rat(0));
  for (int j : part.step1_jobs) {
    std::vector<std::pair<int, Rat>> coeffs;
    for (int i : elements(part.fast_machines[static_cast<size_t>(j)]))
      coeffs.emplace_back(var[{j, i}], Rat(1));
    lp.add_row("unit_" + inst.jobs[static_cast<size_t>(j)].id, std::move(coeffs), Rel::ge, Rat(1));
  }
  const Rat budget = Rat(k.step1_budget_factor) * C;
  for (int i = 0; i < inst.machine_count(); ++i) {
    std::vector<std::pair<int, Rat>> coeffs;
    for (int j : part.step1_jobs)
      if (contains(part.fast_machines[static_cast<size_t>(j)], i))
        coeffs.emplace_back(var[{j, i}],
                            inv(inst.jobs[static_cast<size_t>(j)].speed.evaluate(with(0, i))));
    if (coeffs.empty()) continue;
    lp.add_row("budget_" + inst.machines[static_cast<size_t>(i)], std::move(coeffs), Rel::le, budget);
  }
  LpOutcome lpout = solve(lp);
  MALSCHED_REQUIRE(lpout.status == LpStatus::optimal,
                   "single-machine assignment LP must be feasible at a feasible C");

  // Jobs holding a full unit keep it; fractional jobs are matched over the
  // pseudoforest support, one extra job per machine.
  std::vector<std::map<int, Rat>> y(static_cast<size_t>(inst.job_count()));
  std::vector<std::pair<int, Mask>> sets;
  std::vector<int> frac_jobs;
  for (int j : part.step1_jobs) {
    int whole = -1;
    for (int i : elements(part.fast_machines[static_cast<size_t>(j)])) {
      const Rat& v = lpout.primal[static_cast<size_t>(var[{j, i}])];
      if (v.sign() > 0) y[static_cast<size_t>(j)][i] = v;
      if (v >= Rat(1) && whole < 0) whole = i;
    }
    if (whole >= 0) {
      sets.emplace_back(j, with(0, whole));
      y[static_cast<size_t>(j)].clear();
    } else {
      frac_jobs.push_back(j);
      MALSCHED_REQUIRE(y[static_cast<size_t>(j)].size() >= 2,
                       "a fractional job must split across at least two machines");
    }
  }
  std::map<int, int> matched = round_fractional_support(y, frac_jobs);
  for (int j : frac_jobs) {
    MALSCHED_REQUIRE(matched.count(j), "a fractional job was left unmatched");
    sets.emplace_back(j, with(0, matched[j]));
  }
  std::sort(sets.begin(), sets.end());
  out.sets = sets;

  for (const auto& [j, s] : sets)
    out.machine_load[static_cast<size_t>(elements(s).front())] += processing_time(inst, j, s);
  for (const Rat& l : out.machine_load)
    MALSCHED_REQUIRE(l <= out.certified_bound, "single-machine stage exceeded its load bound");
  return out;
}

// ---------------------------------------------------------------------------
// Step 2: cheap sets via the welfare target.

namespace {

std::vector<Mask> demand_sets(const Instance& inst, const ConfigLpSolution& sol, int j) {
  const Rat target = inv(sol.C);
  std::vector<Mask> out;
  const SpeedFn& speed = inst.jobs[static_cast<size_t>(j)].speed;
  if (const auto* lin = std::get_if<SpeedFn::Linear>(&speed.spec())) {
    // Reduced speed is linear too: maximizers are the positive-margin
    // machines plus any subset of the zero-margin ones.
    Mask positive = 0, zero = 0;
    for (int i = 0; i < inst.machine_count(); ++i) {
      Rat margin = lin->weights[static_cast<size_t>(i)] * Rat(2) - sol.price(j, i);
      if (margin.sign() > 0) positive = with(positive, i);
      else if (margin.is_zero()) zero = with(zero, i);
    }
    MALSCHED_REQUIRE(popcount(zero) <= 12, "too many zero-margin machines to enumerate");
    for_each_subset(zero, [&](Mask z) {
      Mask s = positive | z;
      if (s != 0 && sol.reduced_speed(inst, j, s) == target) out.push_back(s);
    });
    MALSCHED_REQUIRE(!out.empty(), "a job's maximizer family came out empty");
  } else {
    MALSCHED_REQUIRE(inst.machine_count() <= 16,
                     "demand-set enumeration for the welfare stage needs <= 16 machines "
                     "(linear speeds excepted)");
    for (Mask s = 1; s <= inst.all_machines(); ++s)
      if (sol.reduced_speed(inst, j, s) == target) out.push_back(s);
  }
  // Small sets first keeps the capacity search shallow.
  std::stable_sort(out.begin(), out.end(),
                   [](Mask a, Mask b) { return popcount(a) < popcount(b); });
  return out;
}

bool welfare_dfs(const std::vector<std::vector<Mask>>& candidates, size_t at, long capacity,
                 std::vector<int>& usage, std::vector<Mask>& chosen) {
  if (at == candidates.size()) return true;
  for (Mask s : candidates[at]) {
    bool fits = true;
    for (int i : elements(s))
      if (usage[static_cast<size_t>(i)] + 1 > capacity) {
        fits = false;
        break;
      }
    if (!fits) continue;
    for (int i : elements(s)) usage[static_cast<size_t>(i)]++;
    chosen.push_back(s);
    if (welfare_dfs(candidates, at + 1, capacity, usage, chosen)) return true;
    chosen.pop_back();
    for (int i : elements(s)) usage[static_cast<size_t>(i)]--;
  }
  return false;
}

}  // namespace

std::optional<std::vector<Mask>> select_sets_under_capacity(
    const std::vector<std::vector<Mask>>& candidates, long capacity, int machine_count) {
  std::vector<int> usage(static_cast<size_t>(machine_count), 0);
  std::vector<Mask> chosen;
  if (!welfare_dfs(candidates, 0, capacity, usage, chosen)) return std::nullopt;
  return chosen;
}

PartialAssignment assign_cheap_sets(const Instance& inst, const ConfigLpSolution& sol,
                                    const JobPartition& part, WelfareCertificate* cert) {
  const auto& k = algo_constants();
  const Rat C = C_of(sol);
  PartialAssignment out;
  out.step = 2;
  out.certified_bound = Rat(k.step2_load_factor) * C;
  out.machine_load.assign(static_cast<size_t>(inst.machine_count()), Rat(0));
  if (part.step2_jobs.empty()) return out;

  std::vector<std::vector<Mask>> candidates;
  for (int j : part.step2_jobs) candidates.push_back(demand_sets(inst, sol, j));

  auto selected = select_sets_under_capacity(candidates, k.step2_capacity, inst.machine_count());
  MALSCHED_REQUIRE(selected.has_value(),
                   "the welfare search must succeed: an integral optimum of the capacity-20 "
                   "welfare relaxation always exists");
  std::vector<Mask>& chosen = *selected;

  const Rat inv_C = inv(C);
  const Rat half_inv_C = inv_C / Rat(2);
  Rat value;
  for (size_t t = 0; t < chosen.size(); ++t) {
    int j = part.step2_jobs[t];
    Mask s = chosen[t];
    MALSCHED_REQUIRE(inst.jobs[static_cast<size_t>(j)].speed.evaluate(s) >= half_inv_C,
                     "welfare stage picked a set slower than 1/(2C)");
    value += sol.reduced_speed(inst, j, s);
    out.sets.emplace_back(j, s);
  }
  MALSCHED_REQUIRE(value == Rat(static_cast<long>(part.step2_jobs.size())) * inv_C,
                   "welfare stage value must be |J2|/C");

  if (cert) {
    cert->integral_value = value;
    cert->lp_checked = true;
    cert->full_enumeration = inst.machine_count() <= 10;
    // Full column enumeration at ten machines or fewer; beyond that the
    // column set is restricted to the maximizer families plus the LP support,
    // which preserves the exact equality certificate: every column has
    // reduced speed at most 1/C (so the optimum is at most |J2|/C with the
    // unit job rows), and the scaled support witness lives on these columns.
    std::vector<std::vector<Mask>> column_sets(part.step2_jobs.size());
    if (cert->full_enumeration) {
      for (size_t t = 0; t < part.step2_jobs.size(); ++t)
        for (Mask s = 1; s <= inst.all_machines(); ++s)
          column_sets[t].push_back(s);
    } else {
      for (size_t t = 0; t < part.step2_jobs.size(); ++t) {
        std::set<Mask> cols(candidates[t].begin(), candidates[t].end());
        for (const auto& [s, v] : sol.support[static_cast<size_t>(part.step2_jobs[t])]) {
          (void)v;
          cols.insert(s);
        }
        cols.insert(chosen[t]);
        column_sets[t].assign(cols.begin(), cols.end());
      }
    }
    LinearProgram lp{Sense::maximize};
    std::vector<std::vector<std::pair<int, Rat>>> job_rows(part.step2_jobs.size());
    std::vector<std::vector<std::pair<int, Rat>>> cap_rows(
        static_cast<size_t>(inst.machine_count()));
    for (size_t t = 0; t < part.step2_jobs.size(); ++t) {
      int j = part.step2_jobs[t];
      for (Mask s : column_sets[t]) {
        int c = lp.add_column("z_" + std::to_string(j) + "_" + std::to_string(s),
                              sol.reduced_speed(inst, j, s));
        job_rows[t].emplace_back(c, Rat(1));
        for (int i : elements(s)) cap_rows[static_cast<size_t>(i)].emplace_back(c, Rat(1));
      }
    }
    for (size_t t = 0; t < part.step2_jobs.size(); ++t)
      lp.add_row("one_" + std::to_string(part.step2_jobs[t]), std::move(job_rows[t]), Rel::le,
                 Rat(1));
    for (int i = 0; i < inst.machine_count(); ++i)
      lp.add_row("cap_" + inst.machines[static_cast<size_t>(i)],
                 std::move(cap_rows[static_cast<size_t>(i)]), Rel::le, Rat(k.step2_capacity));
    LpOutcome wf = solve(lp);
    MALSCHED_REQUIRE(wf.status == LpStatus::optimal, "welfare LP is always feasible");
    cert->lp_optimum = wf.objective;
    MALSCHED_REQUIRE(cert->lp_optimum == value,
                     "welfare LP optimum must equal the integral stage value");
  }

  for (const auto& [j, s] : out.sets) {
    Rat f = processing_time(inst, j, s);
    for (int i : elements(s)) out.machine_load[static_cast<size_t>(i)] += f;
  }
  for (const Rat& l : out.machine_load)
    MALSCHED_REQUIRE(l <= out.certified_bound, "welfare stage exceeded its load bound");
  return out;
}

// ---------------------------------------------------------------------------
// Step 3A: splitting the heavy support.

std::vector<Mask> greedy_cap_partition(const std::vector<std::pair<int, Rat>>& weighted,
                                       const Rat& cap) {
  std::vector<std::pair<int, Rat>> order = weighted;
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<Mask> parts;
  std::vector<Rat> sums;
  for (const auto& [i, w] : order) {
    MALSCHED_REQUIRE(w <= cap, "partition element alone exceeds the cap");
    bool placed = false;
    for (size_t p = 0; p < parts.size() && !placed; ++p) {
      if (sums[p] + w <= cap) {
        parts[p] = with(parts[p], i);
        sums[p] += w;
        placed = true;
      }
    }
    if (!placed) {
      parts.push_back(with(0, i));
      sums.push_back(w);
    }
  }
  // Merge pass: any two parts that jointly fit under the cap collapse into
  // one, which enforces the pairwise-exceeds-cap condition.
  bool merged = true;
  while (merged) {
    merged = false;
    for (size_t a = 0; a < parts.size() && !merged; ++a)
      for (size_t b = a + 1; b < parts.size() && !merged; ++b)
        if (sums[a] + sums[b] <= cap) {
          parts[a] |= parts[b];
          sums[a] += sums[b];
          parts.erase(parts.begin() + static_cast<long>(b));
          sums.erase(sums.begin() + static_cast<long>(b));
          merged = true;
        }
  }
  for (size_t a = 0; a < parts.size(); ++a) {
    MALSCHED_REQUIRE(sums[a] <= cap, "partition part exceeds the cap");
    for (size_t b = a + 1; b < parts.size(); ++b)
      MALSCHED_REQUIRE(sums[a] + sums[b] > cap, "two partition parts jointly fit under the cap");
  }
  return parts;
}

SplitSolution split_heavy_support(const Instance& inst, const ConfigLpSolution& sol,
                                  const JobPartition& part,
                                  const std::vector<std::optional<RankOracle>>& oracles) {
  const auto& k = algo_constants();
  const Rat C = C_of(sol);
  const Rat cheap_cap = k.cheap_set_over_C / C;
  SplitSolution out;
  out.machine_mass.assign(static_cast<size_t>(inst.machine_count()), Rat(0));

  for (int j : part.step3_jobs) {
    const SpeedFn& g = inst.jobs[static_cast<size_t>(j)].speed;
    const Mask fast = part.fast_machines[static_cast<size_t>(j)];
    SplitJob sj;
    sj.job = j;
    std::map<Mask, Rat> xbar;
    Rat gamma;
    for (const auto& [T, xval] : sol.support[static_cast<size_t>(j)]) {
      if (sol.price_sum(j, T) <= cheap_cap) continue;  // cheap set
      const Mask slow = T & ~fast;
      if (!(sol.price_sum(j, slow) > sol.price_sum(j, T & fast))) continue;  // fast-dominated
      std::vector<std::pair<int, Rat>> weighted;
      for (int i : elements(slow)) weighted.emplace_back(i, sol.price(j, i));
      std::vector<Mask> parts = greedy_cap_partition(weighted, cheap_cap);
      MALSCHED_REQUIRE(!parts.empty(), "a heavy set must have a nonempty slow side");

      Rat parts_speed;
      for (Mask a : parts) parts_speed += g.evaluate(a);
      MALSCHED_REQUIRE(parts_speed * Rat(5) >= g.evaluate(T) * Rat(2),
                       "split parts must retain at least 2/5 of the set speed");

      for (Mask a : parts) xbar[a] += g.evaluate(a) / parts_speed * xval;
      gamma += xval;
      sj.split_parts.emplace_back(T, std::move(parts));
    }
    MALSCHED_REQUIRE(!sj.split_parts.empty(), "a step-3 job must own at least one heavy set");
    Rat xbar_total;
    for (const auto& [s, v] : xbar) xbar_total += v;
    MALSCHED_REQUIRE(xbar_total == gamma, "split mass must match the kept support mass");
    MALSCHED_REQUIRE(gamma >= k.split_mass_floor, "kept support mass fell below 39/160");
    sj.gamma = gamma;

    sj.x_prime_machine.assign(static_cast<size_t>(inst.machine_count()), Rat(0));
    Rat total;
    const RankOracle& oracle = *oracles[static_cast<size_t>(j)];
    for (const auto& [s, v] : xbar) {
      Rat norm = v / gamma;
      MALSCHED_REQUIRE((s & fast) == 0, "split support must avoid fast machines");
      MALSCHED_REQUIRE(oracle.is_independent(s), "split support must be demand-independent");
      sj.x_prime.emplace_back(s, norm);
      total += norm;
      for (int i : elements(s)) {
        sj.x_prime_machine[static_cast<size_t>(i)] += norm;
        out.machine_mass[static_cast<size_t>(i)] += norm;
      }
    }
    MALSCHED_REQUIRE(total == Rat(1), "split masses must sum to one");
    for (int i = 0; i < inst.machine_count(); ++i)
      sj.price_mass += sol.price(j, i) * sj.x_prime_machine[static_cast<size_t>(i)];
    MALSCHED_REQUIRE(sj.price_mass >= k.price_mass_over_C / C,
                     "split price mass fell below (79/40)/C");
    out.jobs.push_back(std::move(sj));
  }
  for (const Rat& mass : out.machine_mass)
    MALSCHED_REQUIRE(mass <= Rat(k.step3_capacity), "split machine mass above 26");
  return out;
}

// ---------------------------------------------------------------------------
// Step 3B: dyadic classes and the polymatroid matching.

int dyadic_class_index(const Rat& price, const Rat& C) {
  MALSCHED_REQUIRE(price.sign() > 0, "dyadic class of a nonpositive price");
  const Rat t = inv(price * C);
  int kk = 0;
  if (t >= Rat(1)) {
    while (Rat::pow2(kk + 1) <= t) ++kk;
  } else {
    while (Rat::pow2(kk) > t) --kk;
  }
  return kk;
}

DyadicClasses build_weight_classes(const Instance& inst, const ConfigLpSolution& sol,
                                   const SplitSolution& split) {
  const auto& k = algo_constants();
  const Rat C = C_of(sol);
  DyadicClasses out;
  for (const SplitJob& sj : split.jobs) {
    JobClasses jc;
    jc.job = sj.job;
    std::map<int, DyadicClassInfo> classes;
    for (int i = 0; i < inst.machine_count(); ++i) {
      if (sj.x_prime_machine[static_cast<size_t>(i)].is_zero()) continue;
      int band = dyadic_class_index(sol.price(sj.job, i), C);
      MALSCHED_REQUIRE(band >= k.min_dyadic_class,
                       "split-support machine in a dyadic class below 3");
      auto& info = classes[band];
      info.k = band;
      info.machines = with(info.machines, i);
      info.mass += sj.x_prime_machine[static_cast<size_t>(i)];
    }
    for (auto& [band, info] : classes) {
      info.demand = info.mass.floor_long();
      jc.demand_weight += Rat(info.demand) / Rat::pow2(band);
      jc.classes.push_back(info);
    }
    MALSCHED_REQUIRE(jc.demand_weight >= k.dyadic_floor_over_C,
                     "dyadic demand weight fell below 69/40");
    out.jobs.push_back(std::move(jc));
  }
  return out;
}

namespace {

/// Truncated rank: Σ_k min(r_j(U ∩ M_jk), d_jk) over the classes with
/// positive demand.
Rat truncated_rank(const RankOracle& oracle, const JobClasses& jc, Mask u) {
  long total = 0;
  for (const DyadicClassInfo& info : jc.classes) {
    if (info.demand == 0) continue;
    total += std::min(static_cast<long>(oracle.rank(u & info.machines)), info.demand);
  }
  return Rat(total);
}

/// Most violated subset of one dyadic class against y(U) <= min(r(U), d).
/// The truncated rank separates across classes, so per-class minimizers
/// compose the global one. Classes whose machine set is independent have
/// r(U) = |U| on every subset (downward closure), which admits a closed form
/// over descending-y prefixes; other classes are enumerated (guarded).
std::optional<std::pair<Mask, Rat>> class_violation(const RankOracle& oracle,
                                                    const DyadicClassInfo& info,
                                                    const std::vector<Rat>& y) {
  std::optional<std::pair<Mask, Rat>> best;
  auto consider = [&](Mask u, const Rat& gap) {
    if (gap.sign() > 0 && (!best || gap > best->second)) best = {u, gap};
  };
  const long size = popcount(info.machines);
  if (oracle.rank(info.machines) == size) {
    std::vector<int> order = elements(info.machines);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return y[static_cast<size_t>(a)] > y[static_cast<size_t>(b)];
    });
    Rat prefix;
    Mask u = 0;
    for (long s = 1; s <= size; ++s) {
      int i = order[static_cast<size_t>(s - 1)];
      prefix += y[static_cast<size_t>(i)];
      u = with(u, i);
      consider(u, prefix - Rat(std::min(s, info.demand)));
    }
  } else {
    MALSCHED_REQUIRE(size <= 20,
                     "dependent dyadic class too large for exhaustive rank separation");
    for_each_subset(info.machines, [&](Mask u) {
      if (u == 0) return;
      Rat lhs;
      for (int i : elements(u)) lhs += y[static_cast<size_t>(i)];
      consider(u, lhs - Rat(std::min(static_cast<long>(oracle.rank(u)), info.demand)));
    });
  }
  return best;
}

}  // namespace

PartialAssignment assign_polymatroid(const Instance& inst, const ConfigLpSolution& sol,
                                     const SplitSolution& split, const DyadicClasses& classes,
                                     const std::vector<std::optional<RankOracle>>& oracles) {
  const auto& k = algo_constants();
  const Rat C = C_of(sol);
  PartialAssignment out;
  out.step = 3;
  out.certified_bound = Rat(k.step3_load_factor) * C;
  out.machine_load.assign(static_cast<size_t>(inst.machine_count()), Rat(0));
  if (split.jobs.empty()) return out;

  const size_t njobs = split.jobs.size();
  std::vector<Mask> supp(njobs, 0);
  for (size_t t = 0; t < njobs; ++t) {
    for (int i = 0; i < inst.machine_count(); ++i)
      if (split.jobs[t].x_prime_machine[static_cast<size_t>(i)].sign() > 0)
        supp[t] = with(supp[t], i);
    Mask class_union = 0;
    for (const DyadicClassInfo& info : classes.jobs[t].classes) class_union |= info.machines;
    MALSCHED_REQUIRE(class_union == supp[t],
                     "dyadic classes must partition the split support");
  }

  long demand_total = 0;
  for (const JobClasses& jc : classes.jobs)
    for (const DyadicClassInfo& info : jc.classes) demand_total += info.demand;

  // Rank rows are generated lazily: seed with the class rows and singletons,
  // then separate by scanning all support subsets of each job.
  std::vector<std::set<Mask>> rank_rows(njobs);
  for (size_t t = 0; t < njobs; ++t) {
    for (const DyadicClassInfo& info : classes.jobs[t].classes)
      rank_rows[t].insert(info.machines);
    for (int i : elements(supp[t])) rank_rows[t].insert(with(0, i));
  }

  std::vector<std::vector<Rat>> y(njobs,
                                  std::vector<Rat>(static_cast<size_t>(inst.machine_count())));
  Rat objective;
  while (true) {
    LinearProgram lp{Sense::maximize};
    std::map<std::pair<size_t, int>, int> var;
    for (size_t t = 0; t < njobs; ++t)
      for (int i : elements(supp[t]))
        var[{t, i}] = lp.add_column("y_" + std::to_string(t) + "_" + std::to_string(i), Rat(1));
    for (int i = 0; i < inst.machine_count(); ++i) {
      std::vector<std::pair<int, Rat>> coeffs;
      for (size_t t = 0; t < njobs; ++t)
        if (contains(supp[t], i)) coeffs.emplace_back(var[{t, i}], Rat(1));
      if (!coeffs.empty())
        lp.add_row("cap_" + std::to_string(i), std::move(coeffs), Rel::le,
                   Rat(k.step3_capacity));
    }
    for (size_t t = 0; t < njobs; ++t)
      for (Mask u : rank_rows[t]) {
        std::vector<std::pair<int, Rat>> coeffs;
        for (int i : elements(u)) coeffs.emplace_back(var[{t, i}], Rat(1));
        lp.add_row("rank_" + std::to_string(t) + "_" + std::to_string(u), std::move(coeffs),
                   Rel::le, truncated_rank(*oracles[static_cast<size_t>(split.jobs[t].job)],
                                           classes.jobs[t], u));
      }
    LpOutcome lpout = solve(lp);
    MALSCHED_REQUIRE(lpout.status == LpStatus::optimal, "polymatroid master must be solvable");
    for (size_t t = 0; t < njobs; ++t)
      for (int i : elements(supp[t]))
        y[t][static_cast<size_t>(i)] = lpout.primal[static_cast<size_t>(var[{t, i}])];
    objective = lpout.objective;

    // Separation class by class; every violated class contributes its most
    // violated subset as a new row.
    bool added = false;
    for (size_t t = 0; t < njobs; ++t) {
      const RankOracle& oracle = *oracles[static_cast<size_t>(split.jobs[t].job)];
      for (const DyadicClassInfo& info : classes.jobs[t].classes) {
        if (info.demand == 0) continue;  // singleton seed rows already force 0
        auto viol = class_violation(oracle, info, y[t]);
        if (viol && !rank_rows[t].count(viol->first)) {
          rank_rows[t].insert(viol->first);
          added = true;
        }
      }
    }
    if (!added) break;
  }

  MALSCHED_REQUIRE(objective == Rat(demand_total),
                   "polymatroid optimum must equal the total dyadic demand");

  // The witness obtained by scaling x' to the class demands must itself be
  // feasible with the same value; checked independently of the solver.
  for (size_t t = 0; t < njobs; ++t) {
    const SplitJob& sj = split.jobs[t];
    const RankOracle& oracle = *oracles[static_cast<size_t>(sj.job)];
    std::vector<Rat> witness(static_cast<size_t>(inst.machine_count()));
    Rat value;
    for (const DyadicClassInfo& info : classes.jobs[t].classes) {
      if (info.demand == 0) continue;
      for (int i : elements(info.machines)) {
        witness[static_cast<size_t>(i)] =
            Rat(info.demand) * sj.x_prime_machine[static_cast<size_t>(i)] / info.mass;
        value += witness[static_cast<size_t>(i)];
      }
    }
    MALSCHED_REQUIRE(value == Rat([&] {
                       long d = 0;
                       for (const auto& info : classes.jobs[t].classes) d += info.demand;
                       return d;
                     }()),
                     "witness value must match the job demand");
    // Truncated-rank feasibility decomposes over the classes.
    for (const DyadicClassInfo& info : classes.jobs[t].classes) {
      if (auto viol = class_violation(oracle, info, witness)) {
        (void)viol;
        throw InvariantViolation("witness violates a truncated-rank row");
      }
    }
  }
  {
    std::vector<Rat> col(static_cast<size_t>(inst.machine_count()));
    for (size_t t = 0; t < njobs; ++t) {
      const SplitJob& sj = split.jobs[t];
      for (const DyadicClassInfo& info : classes.jobs[t].classes) {
        if (info.demand == 0) continue;
        for (int i : elements(info.machines))
          col[static_cast<size_t>(i)] +=
              Rat(info.demand) * sj.x_prime_machine[static_cast<size_t>(i)] / info.mass;
      }
    }
    for (const Rat& v : col)
      MALSCHED_REQUIRE(v <= Rat(k.step3_capacity), "witness violates a machine capacity");
  }

  const Rat speed_floor = k.speed_floor_over_C / C;
  const Rat price_floor = k.speed_floor_over_C * Rat(2) / C;  // (69/160)/C
  for (size_t t = 0; t < njobs; ++t) {
    const SplitJob& sj = split.jobs[t];
    const RankOracle& oracle = *oracles[static_cast<size_t>(sj.job)];
    Mask s = 0;
    long filled = 0;
    for (int i : elements(supp[t])) {
      const Rat& v = y[t][static_cast<size_t>(i)];
      MALSCHED_REQUIRE(v.is_integer() && v >= Rat(0) && v <= Rat(1),
                       "polymatroid vertex must be 0/1 integral");
      if (v.sign() > 0) {
        s = with(s, i);
        ++filled;
      }
    }
    for (const DyadicClassInfo& info : classes.jobs[t].classes) {
      Rat class_fill;
      for (int i : elements(info.machines)) class_fill += y[t][static_cast<size_t>(i)];
      MALSCHED_REQUIRE(class_fill == Rat(info.demand),
                       "every dyadic class demand must be filled exactly");
    }
    // The greedy max-price independent subset certifies the speed bound.
    std::vector<Rat> prices;
    for (int i = 0; i < inst.machine_count(); ++i) prices.push_back(sol.price(sj.job, i));
    Mask top = matroid_greedy_top(oracle, s, prices);
    Rat top_price;
    for (int i : elements(top)) top_price += prices[static_cast<size_t>(i)];
    MALSCHED_REQUIRE(top_price >= price_floor,
                     "greedy independent subset price below (69/160)/C");
    MALSCHED_REQUIRE(inst.jobs[static_cast<size_t>(sj.job)].speed.evaluate(s) >= speed_floor,
                     "matched set speed below (69/320)/C");
    out.sets.emplace_back(sj.job, s);
  }
  std::sort(out.sets.begin(), out.sets.end());

  std::vector<int> multiplicity(static_cast<size_t>(inst.machine_count()), 0);
  for (const auto& [j, s] : out.sets) {
    Rat f = processing_time(inst, j, s);
    for (int i : elements(s)) {
      out.machine_load[static_cast<size_t>(i)] += f;
      multiplicity[static_cast<size_t>(i)]++;
    }
  }
  const Rat tight_bound = k.step3_load_bound_over_C * C;
  for (int i = 0; i < inst.machine_count(); ++i) {
    MALSCHED_REQUIRE(multiplicity[static_cast<size_t>(i)] <= k.step3_capacity,
                     "polymatroid stage machine multiplicity above 26");
    MALSCHED_REQUIRE(out.machine_load[static_cast<size_t>(i)] <= tight_bound,
                     "polymatroid stage exceeded 26 * (320/69) C");
    MALSCHED_REQUIRE(out.machine_load[static_cast<size_t>(i)] <= out.certified_bound,
                     "polymatroid stage exceeded its load bound");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Orchestration.

std::optional<RoundResult> round_at(const Instance& inst, const Rat& C, LpEngine engine) {
  auto sol = solve_config_lp(inst, C, engine);
  if (!sol) return std::nullopt;

  RoundResult res;
  res.sol = std::move(*sol);
  res.partition = partition_jobs(inst, res.sol);

  std::vector<std::optional<RankOracle>> oracles(static_cast<size_t>(inst.job_count()));
  for (int j : res.partition.step3_jobs)
    oracles[static_cast<size_t>(j)].emplace(
        ReducedSpeed(inst.jobs[static_cast<size_t>(j)].speed,
                     res.sol.lambda[static_cast<size_t>(j)], res.sol.mu));

  res.step1 = assign_single_machines(inst, res.sol, res.partition);
  res.step2 = assign_cheap_sets(inst, res.sol, res.partition, &res.welfare);
  if (!res.partition.step3_jobs.empty()) {
    res.split = split_heavy_support(inst, res.sol, res.partition, oracles);
    res.classes = build_weight_classes(inst, res.sol, res.split);
    res.step3 = assign_polymatroid(inst, res.sol, res.split, res.classes, oracles);
  } else {
    res.step3.step = 3;
    res.step3.certified_bound = Rat(algo_constants().step3_load_factor) * C;
    res.step3.machine_load.assign(static_cast<size_t>(inst.machine_count()), Rat(0));
  }

  res.assignment.sets.assign(static_cast<size_t>(inst.job_count()), 0);
  std::vector<bool> covered(static_cast<size_t>(inst.job_count()), false);
  for (const PartialAssignment* pa : {&res.step1, &res.step2, &res.step3})
    for (const auto& [j, s] : pa->sets) {
      MALSCHED_REQUIRE(!covered[static_cast<size_t>(j)], "a job was assigned by two stages");
      covered[static_cast<size_t>(j)] = true;
      res.assignment.sets[static_cast<size_t>(j)] = s;
    }
  for (bool c : covered) MALSCHED_REQUIRE(c, "a job was assigned by no stage");

  res.loads = machine_loads(inst, res.assignment);
  const Rat total_bound = Rat(algo_constants().total_factor) * C;
  res.final_load = Rat(0);
  for (const Rat& l : res.loads) {
    MALSCHED_REQUIRE(l <= total_bound, "combined load exceeded 193 C");
    if (l > res.final_load) res.final_load = l;
  }
  return res;
}

RoundSearchResult round_search(const Instance& inst, const Rat& rel_eps, LpEngine engine) {
  CSearchResult found = binary_search_C(inst, rel_eps, engine);
  auto rounded = round_at(inst, found.C, engine);
  MALSCHED_REQUIRE(rounded.has_value(), "search returned a C that later proved infeasible");
  RoundSearchResult out;
  out.round = std::move(*rounded);
  out.C = found.C;
  out.lower = found.lower;
  out.lower_infeasible = found.lower_infeasible;
  out.probes = found.probes;
  return out;
}

}  // namespace malsched
