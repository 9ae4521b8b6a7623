#pragma once

#include <array>
#include <optional>

#include "malsched/rounding.hpp"

namespace malsched {

struct MmfaAgent {
  std::string id;
  SpeedFn utility;  // over the item set
};

/// Max-min fair allocation: assign items to agents to maximize the minimum
/// utility. The solver here is resource-augmented: an item may be shared by
/// up to 78 agents (at most 32 from stage 1, 20 from stage 2, 26 from
/// stage 3), and every agent is guaranteed a 1/193 fraction of the certified
/// level V.
struct MmfaInstance {
  std::vector<std::string> items;
  std::vector<MmfaAgent> agents;

  int item_count() const { return static_cast<int>(items.size()); }
  int agent_count() const { return static_cast<int>(agents.size()); }
};

MmfaInstance parse_mmfa(const json& doc);
json emit_mmfa(const MmfaInstance& inst);
MmfaInstance load_mmfa(const json& doc, std::vector<std::string>* warnings = nullptr);

/// Scheduling instance of the level-V reduction: one machine per item, one
/// job per agent, and speeds g_j(S) = u_j(S) - Σ_{i∈S} p_ij with the
/// per-item rebate p_ij = max(u_j({i}) - V, 0). The rebate reads the raw
/// singleton utility (the construction is circular otherwise; the report
/// names this interpretation). Subtracting a nonnegative linear function
/// keeps M♮-concavity, and every singleton speed is capped at V, which is
/// what bounds the stage-1 multiplicity by 32.
Instance reduce_to_scheduling(const MmfaInstance& mmfa, const Rat& V);

struct Allocation {
  bool degenerate = false;
  std::string note;
  Rat V;                     // certified level; min utility >= V/193
  Rat min_utility;
  bool has_upper = false;
  Rat upper;                 // some probed level that failed: optimum < upper
  std::vector<Mask> bundles; // per agent
  std::vector<int> multiplicity;              // per item
  std::vector<std::array<int, 3>> step_count; // per item: stage 1/2/3 shares
  int probes = 0;
};

/// Level search: probes candidate levels V by running the full scheduling
/// pipeline at C = 1/V on the reduced instance. A feasible configuration LP
/// certifies an allocation at level V; infeasibility certifies that the true
/// optimum lies below V. Multiplicative bisection until the failing and
/// succeeding levels are within (1 + rel_eps).
Allocation solve_mmfa(const MmfaInstance& mmfa, const Rat& rel_eps,
                      LpEngine engine = LpEngine::explicit_enumeration,
                      bool santa_mode = false);

/// Generic truncation driver: probes with g_j = min(u_j, V) instead of the
/// rebate construction. Only explicit-table utilities are accepted, and every
/// probe certifies the truncated tables by the exchange check, rejecting the
/// instance when truncation leaves the M♮ class.
Allocation solve_mmfa_truncated(const MmfaInstance& mmfa, const Rat& rel_eps,
                                LpEngine engine = LpEngine::explicit_enumeration);

json emit_allocation(const MmfaInstance& mmfa, const Allocation& alloc);

}  // namespace malsched
