#pragma once

#include <vector>

#include "malsched/assignment.hpp"
#include "malsched/mmfa.hpp"

namespace malsched {

/// Brute-force ground truth for desk-scale certification. Loud size guards,
/// never used inside the approximation pipeline itself.

/// Exact minimum-load assignment by exhaustive search over all job-to-set
/// maps, lexicographically first among minimizers. Guard:
/// (2^machines - 1)^jobs <= 10^7.
std::pair<Rat, Assignment> exact_assignment(const Instance& inst);

/// Exhaustive argmax of fn(S) - Σ_{i∈S} p_i over all subsets; first
/// maximizer in ascending mask order.
std::pair<Rat, Mask> exact_demand(const SpeedFn& fn, const std::vector<Rat>& prices);

/// Exact max-min fair allocation value with item multiplicity 1 (items may
/// also stay unassigned). Guard: (agents + 1)^items <= 10^7.
Rat exact_mmfa(const MmfaInstance& inst);

}  // namespace malsched
