#pragma once

#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include "malsched/speed.hpp"

namespace malsched {

/// Demand set for a value function at given per-element prices: a set
/// attaining max_S fn(S) - Σ_{i∈S} p_i, found by the incremental greedy
/// (add the element of largest strictly positive marginal gain minus price,
/// lowest index on ties). Exact for M♮-concave functions; cross-checked
/// against exhaustive search in the test suite.
Mask demand(const std::function<Rat(Mask)>& fn, int ground_size, const std::vector<Rat>& prices);
Mask demand(const SpeedFn& fn, const std::vector<Rat>& prices);

struct MnatViolation {
  Mask s = 0;
  Mask t = 0;
  int element = -1;  // in s \ t
};

/// Exhaustive local-exchange certification of M♮-concavity:
/// for all S, T and i ∈ S∖T,
///   fn(S)+fn(T) <= max( fn(S-i)+fn(T+i), max_{i'∈T∖S} fn(S-i+i')+fn(T-i'+i) ).
/// Returns the first violating triple, or nullopt when the function passes.
/// Ground sets above 10 elements are rejected.
std::optional<MnatViolation> check_mnat(const std::function<Rat(Mask)>& fn, int ground_size);
std::optional<MnatViolation> check_mnat(const SpeedFn& fn);

/// Price-reduced speed: value(S) = 2 g(S) - Σ_{i∈S} μ_i/λ. Built from an
/// optimal dual; λ must be strictly positive. The maximizers of this function
/// are the demand sets that generate the job's matroid.
class ReducedSpeed {
public:
  ReducedSpeed(const SpeedFn& base, Rat lambda, std::vector<Rat> mu);

  Rat evaluate(Mask s) const;
  const std::vector<Rat>& prices() const { return prices_; }  // μ_i/λ per machine
  int ground_size() const { return base_->ground_size(); }
  const SpeedFn& base() const { return *base_; }
  const Rat& lambda() const { return lambda_; }

private:
  const SpeedFn* base_;
  Rat lambda_;
  std::vector<Rat> prices_;
};

/// Rank oracle of the matroid induced by the maximizers of a reduced speed:
/// rank(U) = max |U ∩ T| over maximizer sets T. Computed by the perturbed
/// greedy: run the demand greedy on the reduced speed with a two-level
/// marginal key (exact marginal first, membership in U second), which
/// emulates maximizing value(T) + ε|T ∩ U| for infinitesimal ε > 0.
class RankOracle {
public:
  explicit RankOracle(ReducedSpeed reduced);

  int rank(Mask u) const;
  bool is_independent(Mask s) const { return rank(s) == popcount(s); }
  const ReducedSpeed& reduced() const { return reduced_; }

private:
  ReducedSpeed reduced_;
  mutable std::unordered_map<Mask, int> memo_;  // single-thread use
};

/// Max-weight subset of `s` independent in the oracle's matroid, built by the
/// matroid greedy: scan s by nonincreasing weight (index tie-break), keep
/// elements that preserve independence.
Mask matroid_greedy_top(const RankOracle& oracle, Mask s, const std::vector<Rat>& weights);

}  // namespace malsched
