#pragma once

#include <string>
#include <variant>
#include <vector>

#include "malsched/subset.hpp"

namespace malsched {

/// Matroid over an indexed ground set. Four concrete families:
/// free, uniform(rank), partition(blocks with capacities), explicit bases.
class Matroid {
public:
  struct Free {};
  struct Uniform {
    int rank = 0;
  };
  struct Partition {
    std::vector<Mask> blocks;
    std::vector<int> capacities;
  };
  struct Explicit {
    std::vector<Mask> bases;
  };
  using Spec = std::variant<Free, Uniform, Partition, Explicit>;

  Matroid() : ground_size_(0), spec_(Free{}) {}
  Matroid(int ground_size, Spec spec) : ground_size_(ground_size), spec_(std::move(spec)) {}

  static Matroid free(int ground_size) { return {ground_size, Free{}}; }
  static Matroid uniform(int ground_size, int rank) { return {ground_size, Uniform{rank}}; }
  static Matroid partition(int ground_size, std::vector<Mask> blocks, std::vector<int> caps) {
    return {ground_size, Partition{std::move(blocks), std::move(caps)}};
  }
  static Matroid from_bases(int ground_size, std::vector<Mask> bases) {
    return {ground_size, Explicit{std::move(bases)}};
  }

  int ground_size() const { return ground_size_; }
  const Spec& spec() const { return spec_; }

  bool is_independent(Mask s) const;

  /// Structural checks: block cover/disjointness, rank bounds, and for the
  /// explicit family equal basis cardinality plus the basis exchange axiom.
  /// Returns human-readable problems; empty means valid.
  std::vector<std::string> validate() const;

  bool operator==(const Matroid& o) const;

private:
  int ground_size_;
  Spec spec_;
};

}  // namespace malsched
