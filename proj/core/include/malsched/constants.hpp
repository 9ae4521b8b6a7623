#pragma once

#include "malsched/rat.hpp"

namespace malsched {

/// The fixed constants of the rounding pipeline. Thresholds written as
/// "x_over_C" are used as x/C at a concrete target load C. These values are
/// load-bearing for the certified per-step guarantees and are never tuned.
struct AlgoConstants {
  // Step 1: fast single machines. i counts as fast for j if g_j({i}) >= (1/16)/C,
  // and j is assigned a single machine when its fast-support mass is >= 1/16.
  Rat fast_singleton_over_C{1, 16};
  Rat step1_mass{1, 16};
  long step1_budget_factor = 16;   // assignment LP machine budget 16*C
  long step1_load_factor = 32;     // certified per-machine load 32*C

  // Step 2: cheap sets. S is cheap for j if Σ_{i∈S} μ_i/λ_j <= 4/C, and j is
  // handled by the welfare stage when its cheap-support mass is >= 1/8.
  Rat cheap_set_over_C{4};
  Rat step2_mass{1, 8};
  long step2_capacity = 20;        // machine multiplicity in the welfare stage
  long step2_load_factor = 40;     // 20 sets, each of processing time <= 2C

  // Step 3: split-and-match. The split solution keeps total mass 1 per job,
  // stays on demand-independent sets, loads each machine with at most 26
  // fractional units, and retains price mass at least (79/40)/C per job;
  // its kept fraction is at least 39/160.
  long step3_capacity = 26;
  Rat split_mass_floor{39, 160};
  Rat price_mass_over_C{79, 40};
  Rat part_gain_fraction{2, 5};    // Σ_parts g(A) >= (2/5) g(T) per split set
  Rat dyadic_floor_over_C{69, 40};   // Σ_k d_k / 2^k >= 69/40 (per C)
  Rat speed_floor_over_C{69, 320};   // every step-3 set has g >= (69/320)/C
  int min_dyadic_class = 3;          // split-support machines sit in classes k >= 3
  Rat step3_load_bound_over_C{8320, 69};  // 26 * 320/69, strictly below 121
  long step3_load_factor = 121;

  long total_factor = 193;  // 32 + 40 + 121
};

inline const AlgoConstants& algo_constants() {
  static const AlgoConstants k;
  return k;
}

}  // namespace malsched
