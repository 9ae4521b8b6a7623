#include "malsched/configlp.hpp"

#include <set>

#include "malsched/errors.hpp"
#include "malsched/lp.hpp"

namespace malsched {

Rat ConfigLpSolution::price_sum(int job, Mask s) const {
  Rat total;
  for (int i : elements(s)) total += price(job, i);
  return total;
}

Rat ConfigLpSolution::reduced_speed(const Instance& inst, int job, Mask s) const {
  return inst.jobs[static_cast<size_t>(job)].speed.evaluate(s) * Rat(2) - price_sum(job, s);
}

namespace {

constexpr int kExplicitMachineLimit = 14;

struct GsBuild {
  std::vector<int> job_row;      // row index per job
  std::vector<int> machine_row;  // row index per machine
  std::vector<int> slack_col;    // s_i column per machine (-1 when absent)
  int t_col = -1;                // shared relaxation column (phase A only)
  std::vector<std::vector<std::pair<Mask, int>>> x_cols;  // per job: (set, column)
};

/// The configuration LP over a given column list. `relaxed` swaps the slack
/// objective max Σ s_i for min t with t added to every job row; that master
/// is feasible for any column list, so pricing can certify infeasibility.
LinearProgram build_gs(const Instance& inst, const Rat& C,
                       const std::vector<std::vector<Mask>>& cols, bool relaxed, GsBuild& b) {
  LinearProgram lp{relaxed ? Sense::minimize : Sense::maximize};
  const int m = inst.machine_count();
  const int n = inst.job_count();
  b = GsBuild{};
  b.slack_col.assign(static_cast<size_t>(m), -1);
  b.x_cols.resize(static_cast<size_t>(n));
  if (relaxed) {
    b.t_col = lp.add_column("t", Rat(1));
  } else {
    for (int i = 0; i < m; ++i)
      b.slack_col[static_cast<size_t>(i)] =
          lp.add_column("s_" + inst.machines[static_cast<size_t>(i)], Rat(1));
  }
  std::vector<std::vector<std::pair<int, Rat>>> job_coeffs(static_cast<size_t>(n));
  std::vector<std::vector<std::pair<int, Rat>>> cap_coeffs(static_cast<size_t>(m));
  for (int j = 0; j < n; ++j) {
    for (Mask s : cols[static_cast<size_t>(j)]) {
      Rat g = inst.jobs[static_cast<size_t>(j)].speed.evaluate(s);
      MALSCHED_REQUIRE(s != 0 && g.sign() > 0, "configuration LP column must have positive speed");
      Rat f = Rat(1) / g;
      int c = lp.add_column(
          "x_" + inst.jobs[static_cast<size_t>(j)].id + "_" + std::to_string(s), Rat(0));
      b.x_cols[static_cast<size_t>(j)].emplace_back(s, c);
      job_coeffs[static_cast<size_t>(j)].emplace_back(c, Rat(2) - f / C);
      for (int i : elements(s)) cap_coeffs[static_cast<size_t>(i)].emplace_back(c, f);
    }
  }
  for (int j = 0; j < n; ++j) {
    auto coeffs = std::move(job_coeffs[static_cast<size_t>(j)]);
    if (b.t_col >= 0) coeffs.emplace_back(b.t_col, Rat(1));
    b.job_row.push_back(lp.row_count());
    lp.add_row("job_" + inst.jobs[static_cast<size_t>(j)].id, std::move(coeffs), Rel::ge, Rat(1));
  }
  for (int i = 0; i < m; ++i) {
    auto coeffs = std::move(cap_coeffs[static_cast<size_t>(i)]);
    if (b.slack_col[static_cast<size_t>(i)] >= 0)
      coeffs.emplace_back(b.slack_col[static_cast<size_t>(i)], Rat(1));
    b.machine_row.push_back(lp.row_count());
    lp.add_row("cap_" + inst.machines[static_cast<size_t>(i)], std::move(coeffs), Rel::le, C);
  }
  return lp;
}

std::vector<Mask> usable_sets(const Job& job, int m) {
  std::vector<Mask> out;
  const Mask ground = full_mask(m);
  for (Mask s = 1; s <= ground; ++s)
    if (job.speed.evaluate(s).sign() > 0) out.push_back(s);
  return out;
}

ConfigLpSolution extract_solution(const Instance& inst, const Rat& C, const GsBuild& b,
                                  const LpOutcome& out, std::vector<std::vector<Mask>> columns,
                                  LpEngine engine) {
  ConfigLpSolution sol;
  sol.C = C;
  sol.engine = engine;
  sol.columns = std::move(columns);
  const int m = inst.machine_count();
  const int n = inst.job_count();
  for (int i = 0; i < m; ++i)
    sol.machine_slack.push_back(
        out.primal[static_cast<size_t>(b.slack_col[static_cast<size_t>(i)])]);
  sol.support.resize(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j)
    for (const auto& [s, c] : b.x_cols[static_cast<size_t>(j)])
      if (out.primal[static_cast<size_t>(c)].sign() > 0)
        sol.support[static_cast<size_t>(j)].emplace_back(s, out.primal[static_cast<size_t>(c)]);
  // Maximization with >= job rows puts the job duals at <= 0; λ is their
  // negation. Machine rows are <= with duals >= 0, read off as μ.
  for (int j = 0; j < n; ++j)
    sol.lambda.push_back(-out.dual[static_cast<size_t>(b.job_row[static_cast<size_t>(j)])]);
  for (int i = 0; i < m; ++i)
    sol.mu.push_back(out.dual[static_cast<size_t>(b.machine_row[static_cast<size_t>(i)])]);

  // Structure certified for any optimal primal-dual pair of this LP.
  const Rat inv_C = Rat(1) / C;
  const Rat half_inv_C = inv_C / Rat(2);
  for (int j = 0; j < n; ++j) {
    MALSCHED_REQUIRE(sol.lambda[static_cast<size_t>(j)].sign() > 0,
                     "configuration LP: a job dual came out zero");
    MALSCHED_REQUIRE(!sol.support[static_cast<size_t>(j)].empty(),
                     "configuration LP: a job has empty support");
  }
  for (int i = 0; i < m; ++i)
    MALSCHED_REQUIRE(sol.mu[static_cast<size_t>(i)] >= Rat(1),
                     "configuration LP: machine dual below one");
  for (int j = 0; j < n; ++j) {
    for (const auto& [s, v] : sol.support[static_cast<size_t>(j)]) {
      (void)v;
      MALSCHED_REQUIRE(inst.jobs[static_cast<size_t>(j)].speed.evaluate(s) >= half_inv_C,
                       "configuration LP: support set slower than 1/(2C)");
      MALSCHED_REQUIRE(sol.reduced_speed(inst, j, s) == inv_C,
                       "configuration LP: support set is not a reduced-speed maximizer");
    }
    for (Mask s : sol.columns[static_cast<size_t>(j)])
      MALSCHED_REQUIRE(sol.reduced_speed(inst, j, s) <= inv_C,
                       "configuration LP: dual constraint violated on a column");
  }
  return sol;
}

std::optional<ConfigLpSolution> solve_explicit(const Instance& inst, const Rat& C) {
  if (inst.machine_count() > kExplicitMachineLimit)
    throw ValidationError("explicit configuration LP limited to " +
                          std::to_string(kExplicitMachineLimit) +
                          " machines; use column generation");
  std::vector<std::vector<Mask>> cols(static_cast<size_t>(inst.job_count()));
  for (int j = 0; j < inst.job_count(); ++j)
    cols[static_cast<size_t>(j)] =
        usable_sets(inst.jobs[static_cast<size_t>(j)], inst.machine_count());
  GsBuild b;
  LinearProgram lp = build_gs(inst, C, cols, false, b);
  LpOutcome out = solve(lp);
  if (out.status == LpStatus::infeasible) return std::nullopt;
  MALSCHED_REQUIRE(out.status == LpStatus::optimal, "configuration LP cannot be unbounded");
  return extract_solution(inst, C, b, out, std::move(cols), LpEngine::explicit_enumeration);
}

std::optional<ConfigLpSolution> solve_colgen(const Instance& inst, const Rat& C) {
  const int n = inst.job_count();
  const int m = inst.machine_count();
  std::vector<std::vector<Mask>> cols(static_cast<size_t>(n));
  std::vector<std::set<Mask>> present(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    Mask best = inst.jobs[static_cast<size_t>(j)].speed.max_speed().second;
    cols[static_cast<size_t>(j)].push_back(best);
    present[static_cast<size_t>(j)].insert(best);
  }
  auto try_add = [&](int j, const std::optional<std::pair<Mask, Rat>>& priced) {
    if (!priced) return false;
    // A column of the solved master cannot price out violated again.
    MALSCHED_REQUIRE(!present[static_cast<size_t>(j)].count(priced->first),
                     "pricing returned a column already in the optimal master");
    cols[static_cast<size_t>(j)].push_back(priced->first);
    present[static_cast<size_t>(j)].insert(priced->first);
    return true;
  };

  // Phase A: minimize a shared job-row relaxation t. t* = 0 exactly when the
  // configuration LP is feasible; a final non-violated pricing round makes
  // the restricted optimum a certificate for the full LP.
  while (true) {
    GsBuild b;
    LinearProgram lp = build_gs(inst, C, cols, true, b);
    LpOutcome out = solve(lp);
    MALSCHED_REQUIRE(out.status == LpStatus::optimal, "relaxed master is always solvable");
    bool added = false;
    for (int j = 0; j < n; ++j) {
      // Minimization with >= rows keeps job duals >= 0; machine duals <= 0.
      Rat lam = out.dual[static_cast<size_t>(b.job_row[static_cast<size_t>(j)])];
      if (lam.sign() <= 0) continue;
      std::vector<Rat> mu;
      for (int i = 0; i < m; ++i)
        mu.push_back(-out.dual[static_cast<size_t>(b.machine_row[static_cast<size_t>(i)])]);
      added |= try_add(j, price_column(inst.jobs[static_cast<size_t>(j)].speed, lam, mu, C));
    }
    if (!added) {
      if (out.objective.sign() > 0) return std::nullopt;  // certified infeasible
      break;
    }
  }

  // Phase B: the real objective over the generated columns, priced until the
  // duals are feasible for every machine set.
  while (true) {
    GsBuild b;
    LinearProgram lp = build_gs(inst, C, cols, false, b);
    LpOutcome out = solve(lp);
    MALSCHED_REQUIRE(out.status == LpStatus::optimal,
                     "restricted master stays feasible after the relaxed phase");
    bool added = false;
    for (int j = 0; j < n; ++j) {
      Rat lam = -out.dual[static_cast<size_t>(b.job_row[static_cast<size_t>(j)])];
      if (lam.sign() <= 0) continue;
      std::vector<Rat> mu;
      for (int i = 0; i < m; ++i)
        mu.push_back(out.dual[static_cast<size_t>(b.machine_row[static_cast<size_t>(i)])]);
      added |= try_add(j, price_column(inst.jobs[static_cast<size_t>(j)].speed, lam, mu, C));
    }
    if (!added) return extract_solution(inst, C, b, out, cols, LpEngine::column_generation);
  }
}

}  // namespace

std::optional<std::pair<Mask, Rat>> price_column(const SpeedFn& speed, const Rat& lambda_j,
                                                 const std::vector<Rat>& mu, const Rat& C) {
  MALSCHED_REQUIRE(lambda_j.sign() > 0, "pricing requires a positive job dual");
  std::vector<Rat> prices;
  prices.reserve(mu.size());
  const Rat two_lambda = lambda_j * Rat(2);
  for (const Rat& v : mu) prices.push_back(v / two_lambda);
  Mask s = demand(speed, prices);
  if (s == 0) return std::nullopt;
  Rat value = speed.evaluate(s);
  for (int i : elements(s)) value -= prices[static_cast<size_t>(i)];
  Rat threshold = Rat(1) / (C * Rat(2));
  if (value > threshold) return std::make_pair(s, value - threshold);
  return std::nullopt;
}

std::optional<ConfigLpSolution> solve_config_lp(const Instance& inst, const Rat& C,
                                                LpEngine engine) {
  if (C.sign() <= 0) throw ValidationError("target load must be positive");
  if (engine == LpEngine::explicit_enumeration) return solve_explicit(inst, C);
  return solve_colgen(inst, C);
}

CSearchResult binary_search_C(const Instance& inst, const Rat& rel_eps, LpEngine engine) {
  if (rel_eps.sign() <= 0) throw ValidationError("search tolerance must be positive");
  Rat lo, hi;
  for (const Job& job : inst.jobs) {
    Rat f = Rat(1) / job.speed.max_speed().first;
    if (f > lo) lo = f;
    hi += f;
  }
  CSearchResult res;
  res.probes = 1;
  if (auto sol = solve_config_lp(inst, lo, engine)) {
    res.C = lo;
    res.sol = std::move(*sol);
    res.lower = lo;
    res.lower_infeasible = false;
    return res;
  }
  res.probes++;
  auto hi_sol = solve_config_lp(inst, hi, engine);
  MALSCHED_REQUIRE(hi_sol.has_value(),
                   "sum of best processing times is always a feasible load");
  const Rat one_plus = Rat(1) + rel_eps;
  while (hi > lo * one_plus) {
    Rat mid = (lo + hi) / Rat(2);
    res.probes++;
    if (auto sol = solve_config_lp(inst, mid, engine)) {
      hi = mid;
      hi_sol = std::move(sol);
    } else {
      lo = mid;
    }
  }
  res.C = hi;
  res.sol = std::move(*hi_sol);
  res.lower = lo;
  res.lower_infeasible = true;
  return res;
}

std::string config_lp_text(const Instance& inst, const Rat& C) {
  if (inst.machine_count() > kExplicitMachineLimit)
    throw ValidationError("LP text dump needs the explicit column enumeration (<= 14 machines)");
  std::vector<std::vector<Mask>> cols(static_cast<size_t>(inst.job_count()));
  for (int j = 0; j < inst.job_count(); ++j)
    cols[static_cast<size_t>(j)] =
        usable_sets(inst.jobs[static_cast<size_t>(j)], inst.machine_count());
  GsBuild b;
  LinearProgram lp = build_gs(inst, C, cols, false, b);
  return to_cplex_lp(lp);
}

}  // namespace malsched
