#pragma once

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "malsched/matroid.hpp"
#include "malsched/rat.hpp"
#include "malsched/subset.hpp"

namespace malsched {

/// Processing-speed function g over machine subsets. g(∅) = 0 for every
/// variant. All variants except LinearShift (and arbitrary oracles) are
/// monotone nondecreasing by construction.
///
/// LinearShift is g(S) = base(S) - Σ_{i∈S} shift_i. It can take negative
/// values; a set with g(S) <= 0 cannot process the job (infinite time) and is
/// excluded wherever sets are enumerated.
class SpeedFn {
public:
  struct Linear {
    std::vector<Rat> weights;  // per machine
  };
  struct WeightedMatroidRank {
    Matroid matroid;  // over machines
    std::vector<Rat> weights;
  };
  /// Speed of S = best total weight of a matching of machines in S to slots,
  /// where the used slot set must be independent in the slot matroid.
  struct MatroidBasedValuation {
    std::vector<std::string> slot_names;
    Matroid slot_matroid;
    std::vector<std::vector<Rat>> slot_weights;  // [machine][slot]
  };
  struct ExplicitTable {
    std::vector<Rat> values;  // indexed by subset mask, size 2^ground
  };
  struct LinearShift {
    std::shared_ptr<const SpeedFn> base;
    std::vector<Rat> shifts;  // per machine
  };
  /// Extension point: arbitrary value oracle, constructed programmatically.
  /// Not serializable and skipped by load-time validation.
  struct Oracle {
    std::shared_ptr<const std::function<Rat(Mask)>> eval;
    std::string name;
  };
  using Spec =
      std::variant<Linear, WeightedMatroidRank, MatroidBasedValuation, ExplicitTable, LinearShift, Oracle>;

  SpeedFn() : ground_size_(0), spec_(Linear{}) {}
  SpeedFn(int ground_size, Spec spec) : ground_size_(ground_size), spec_(std::move(spec)) {}

  int ground_size() const { return ground_size_; }
  const Spec& spec() const { return spec_; }
  const char* kind() const;

  /// g(S). Exact; may be negative only for LinearShift/Oracle.
  Rat evaluate(Mask s) const;

  /// Best speed over all subsets and one attaining set (demand at price 0).
  /// For monotone variants this is g(full ground set).
  std::pair<Rat, Mask> max_speed() const;

  bool operator==(const SpeedFn& o) const;

private:
  int ground_size_;
  Spec spec_;
};

struct SpeedCheckOptions {
  int monotone_ground_limit = 10;  // brute-force monotonicity up to this size
  int mbv_slot_limit = 10;         // exact matching evaluation is brute force
  int table_ground_limit = 16;
};

/// Load-time structural validation: weight signs, matroid axioms, table
/// completeness (g(∅)=0), slot-count threshold. Monotonicity is checked by
/// brute force for small grounds and skipped (with a warning) above the
/// threshold; LinearShift and Oracle are exempt from the monotonicity check.
void validate_speed(const SpeedFn& fn, const SpeedCheckOptions& opt,
                    std::vector<std::string>& errors, std::vector<std::string>& warnings);

}  // namespace malsched
