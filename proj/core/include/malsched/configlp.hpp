#pragma once

#include <optional>
#include <vector>

#include "malsched/instance.hpp"
#include "malsched/mnat.hpp"

namespace malsched {

enum class LpEngine { explicit_enumeration, column_generation };

/// Optimal primal-dual pair of the configuration LP at a target load C.
///
/// Primal: maximize Σ_i s_i subject to, per job, Σ_S (2 - 1/(C g_j(S))) x(S,j) >= 1
/// and, per machine, Σ_{j,S∋i} x(S,j)/g_j(S) + s_i <= C over x, s >= 0 (columns
/// range over nonempty machine sets of positive speed). The dual prices are
/// λ_j (job rows) and μ_i (machine rows) with μ_i >= 1.
///
/// Certified on every solve, exactly: λ_j > 0 for all jobs; for every support
/// pair x(S,j) > 0, the reduced speed satisfies 2 g_j(S) - Σ_{i∈S} μ_i/λ_j = 1/C
/// and g_j(S) >= 1/(2C); and no enumerated or generated column violates the
/// dual constraint 2 g_j(S) - Σ_{i∈S} μ_i/λ_j <= 1/C.
struct ConfigLpSolution {
  Rat C;
  std::vector<std::vector<std::pair<Mask, Rat>>> support;  // per job: x(S,j) > 0
  std::vector<Rat> machine_slack;                          // s_i
  std::vector<Rat> lambda;                                 // per job
  std::vector<Rat> mu;                                     // per machine
  std::vector<std::vector<Mask>> columns;  // columns the certificate was checked on
  LpEngine engine = LpEngine::explicit_enumeration;

  Rat price(int job, int machine) const {
    return mu[static_cast<size_t>(machine)] / lambda[static_cast<size_t>(job)];
  }
  Rat price_sum(int job, Mask s) const;
  /// 2 g_j(S) - Σ_{i∈S} μ_i/λ_j.
  Rat reduced_speed(const Instance& inst, int job, Mask s) const;
};

/// Builds and solves the configuration LP. Returns nullopt when infeasible,
/// which certifies that no assignment of load <= C exists. Explicit
/// enumeration needs machine_count <= 14; column generation prices entering
/// columns with the demand greedy and certifies optimality or infeasibility
/// by a final pricing round over all jobs.
std::optional<ConfigLpSolution> solve_config_lp(const Instance& inst, const Rat& C,
                                                LpEngine engine = LpEngine::explicit_enumeration);

/// Demand-greedy pricing for the dual at prices μ_i/(2 λ_j): returns a
/// violated column (set, violation amount) with g_j(S) - Σ_{i∈S} μ_i/(2λ_j)
/// exceeding 1/(2C), or nullopt when job j prices out.
std::optional<std::pair<Mask, Rat>> price_column(const SpeedFn& speed, const Rat& lambda_j,
                                                 const std::vector<Rat>& mu, const Rat& C);

struct CSearchResult {
  Rat C;                  // feasible target the solution certifies
  ConfigLpSolution sol;   // solution at C
  Rat lower;              // max_j min_S f_j(S), or the largest probed infeasible C
  bool lower_infeasible;  // true when `lower` was certified infeasible
  int probes = 0;
};

/// Smallest feasible C up to a multiplicative factor: brackets with
/// C_lo = max_j min_S f_j(S) and C_hi = Σ_j min_S f_j(S), then bisects until
/// C_hi <= (1 + rel_eps) C_lo. The returned C satisfies C <= (1+rel_eps) C*
/// for the optimal assignment load C*.
CSearchResult binary_search_C(const Instance& inst, const Rat& rel_eps,
                              LpEngine engine = LpEngine::explicit_enumeration);

/// The configuration LP in CPLEX-LP text form (for external cross-checks).
std::string config_lp_text(const Instance& inst, const Rat& C);

}  // namespace malsched
