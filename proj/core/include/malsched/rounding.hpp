#pragma once

#include <map>
#include <optional>

#include "malsched/assignment.hpp"
#include "malsched/configlp.hpp"
#include "malsched/constants.hpp"

namespace malsched {

/// Three disjoint job groups, by how the pipeline assigns them.
///
/// Step 1 takes jobs whose LP mass leans on fast single machines
/// (g_j({i}) >= (1/16)/C); step 2 takes remaining jobs with mass >= 1/8 on
/// cheap sets (price sum <= 4/C); step 3 takes the rest.
struct JobPartition {
  std::vector<int> step1_jobs, step2_jobs, step3_jobs;
  std::vector<int> step_of;        // per job: 1, 2 or 3
  std::vector<Mask> fast_machines; // per job: the fast singleton set
  std::vector<Rat> fast_mass;      // per job: step-1 membership value
  std::vector<Rat> cheap_mass;     // per job: LP mass on cheap support sets
};

JobPartition partition_jobs(const Instance& inst, const ConfigLpSolution& sol);

/// Assignment of one job group, with the per-machine load bound it certifies
/// (32C, 40C or 121C). The bound is asserted exactly on construction.
struct PartialAssignment {
  int step = 0;
  std::vector<std::pair<int, Mask>> sets;  // (job, machines)
  std::vector<Rat> machine_load;           // this step's load alone
  Rat certified_bound;
};

/// Step 1: single-machine assignment LP (machine budget 16C) solved to a
/// vertex, then rounded over the fractional support. At a vertex that support
/// is a pseudoforest (per component at most one cycle); cycle jobs are
/// matched around their cycle and tree jobs to a child machine, so each
/// machine gains at most one extra job of processing time <= 16C.
PartialAssignment assign_single_machines(const Instance& inst, const ConfigLpSolution& sol,
                                         const JobPartition& part);

struct WelfareCertificate {
  Rat integral_value;       // Σ_j reduced speed of the chosen sets
  Rat lp_optimum;           // welfare LP optimum (machine cap 20)
  bool lp_checked = false;  // equality asserted whenever stage 2 ran
  bool full_enumeration = false;  // columns were all nonempty sets (<= 10 machines)
};

/// Step 2: pick one reduced-speed maximizer per job with no machine used more
/// than 20 times, by depth-first search with backtracking. Total dual
/// integrality of the welfare LP guarantees the target exists; the explicit
/// LP optimum is recomputed as an equality certificate at desk scale.
PartialAssignment assign_cheap_sets(const Instance& inst, const ConfigLpSolution& sol,
                                    const JobPartition& part, WelfareCertificate* cert);

/// Step 3A output: per job a normalized fractional assignment x' supported on
/// price-bounded parts of the heavy support sets. Certified on construction:
/// masses sum to one, the support avoids fast machines and is independent in
/// the job's demand matroid, machines carry at most 26 units across jobs, and
/// each job keeps price mass at least (79/40)/C. The kept fraction gamma is
/// at least 39/160.
struct SplitJob {
  int job = -1;
  Rat gamma;
  std::vector<std::pair<Mask, Rat>> x_prime;            // set -> mass
  std::vector<Rat> x_prime_machine;                     // per machine marginals
  std::vector<std::pair<Mask, std::vector<Mask>>> split_parts;  // heavy set -> parts
  Rat price_mass;
};
struct SplitSolution {
  std::vector<SplitJob> jobs;
  std::vector<Rat> machine_mass;  // Σ_j x'_ij
};

SplitSolution split_heavy_support(const Instance& inst, const ConfigLpSolution& sol,
                                  const JobPartition& part,
                                  const std::vector<std::optional<RankOracle>>& oracles);

/// Step 3B classes: machines bucketed by price μ_i/λ_j into dyadic bands
/// (1/(2^{k+1}C), 1/(2^kC)], with integer demands d_jk = floor(class mass).
/// Certified: support machines only appear in classes k >= 3 and
/// Σ_k d_jk/2^k >= 69/40.
struct DyadicClassInfo {
  int k = 0;
  Mask machines = 0;  // support machines in the band
  Rat mass;
  long demand = 0;
};
struct JobClasses {
  int job = -1;
  std::vector<DyadicClassInfo> classes;  // ascending k
  Rat demand_weight;                     // Σ_k d_jk / 2^k
};
struct DyadicClasses {
  std::vector<JobClasses> jobs;
};

DyadicClasses build_weight_classes(const Instance& inst, const ConfigLpSolution& sol,
                                   const SplitSolution& split);

/// Step 3B: max Σ y_ij subject to machine capacity 26 and, per job, the
/// truncated-rank polymatroid Σ_{i∈U} y_ij <= Σ_k min(r_j(U ∩ M_jk), d_jk).
/// Rank rows are generated by exhaustive separation over support subsets.
/// Certified: the vertex is integral with value Σ d_jk and fills every class
/// demand exactly; every assigned set reaches speed (69/320)/C via its
/// greedy max-price independent subset.
PartialAssignment assign_polymatroid(const Instance& inst, const ConfigLpSolution& sol,
                                     const SplitSolution& split, const DyadicClasses& classes,
                                     const std::vector<std::optional<RankOracle>>& oracles);

struct RoundResult {
  ConfigLpSolution sol;
  JobPartition partition;
  PartialAssignment step1, step2, step3;
  WelfareCertificate welfare;
  SplitSolution split;
  DyadicClasses classes;
  Assignment assignment;
  std::vector<Rat> loads;  // final per-machine loads
  Rat final_load;
};

/// Full pipeline at a fixed target C. Returns nullopt when the configuration
/// LP is infeasible, which certifies that no assignment of load <= C exists.
/// On success the combined assignment satisfies load <= 193 C, asserted
/// exactly together with every intermediate certificate.
std::optional<RoundResult> round_at(const Instance& inst, const Rat& C,
                                    LpEngine engine = LpEngine::explicit_enumeration);

struct RoundSearchResult {
  RoundResult round;
  Rat C;
  Rat lower;  // infeasible (or trivially optimal) bracket endpoint
  bool lower_infeasible = false;
  int probes = 0;
};

/// Binary search for the smallest feasible C (multiplicative tolerance
/// rel_eps), then rounding at the found C. The end-to-end guarantee is
/// load <= 193 (1 + rel_eps) C* against the optimal assignment load C*.
RoundSearchResult round_search(const Instance& inst, const Rat& rel_eps,
                               LpEngine engine = LpEngine::explicit_enumeration);

/// Index of the dyadic price band: the k with 2^k <= 1/(price·C) < 2^{k+1}.
int dyadic_class_index(const Rat& price, const Rat& C);

/// First-fit-decreasing partition of weighted elements under `cap`, followed
/// by a verification that distinct parts pairwise exceed the cap. Exposed for
/// tests; weights must individually fit under the cap.
std::vector<Mask> greedy_cap_partition(const std::vector<std::pair<int, Rat>>& weighted,
                                       const Rat& cap);

/// Depth-first selection of one candidate set per position such that no
/// machine is used more than `capacity` times, backtracking on conflicts.
/// Returns the chosen sets in order, or nullopt when no selection exists.
/// This is the stage-2 search; exposed for tests (the stage-2 capacity of 20
/// cannot bind at desk scale, so conflicts are exercised synthetically).
std::optional<std::vector<Mask>> select_sets_under_capacity(
    const std::vector<std::vector<Mask>>& candidates, long capacity, int machine_count);

/// Matching over the fractional support of a vertex of the stage-1
/// assignment LP: fractional jobs (indexed by position in `y`) each receive
/// one machine, no machine more than one job. The support must be a
/// per-component pseudoforest, which vertices of the LP guarantee.
/// Exposed for tests.
std::map<int, int> round_fractional_support(const std::vector<std::map<int, Rat>>& y,
                                            const std::vector<int>& fractional_jobs);

}  // namespace malsched
