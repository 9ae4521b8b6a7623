#pragma once

#include <cstdint>

#include "malsched/mmfa.hpp"

namespace malsched {

/// Deterministic instance generator. The same (seed, profile, sizes) always
/// yields byte-identical output; the random stream is a fixed splitmix64, so
/// results do not depend on the standard library.
enum class GenProfile { linear, wmr_uniform, wmr_partition, mbv, mixed };

GenProfile parse_profile(const std::string& name);
const char* profile_name(GenProfile p);

/// Generated speeds have strictly positive, small rational weights
/// (denominators at most 16); every generated function is in the M♮ class by
/// construction.
Instance gen_instance(std::uint64_t seed, GenProfile profile, int machines, int jobs);

MmfaInstance gen_mmfa(std::uint64_t seed, GenProfile profile, int items, int agents);

/// splitmix64, the project-wide deterministic stream.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform in [lo, hi], inclusive.
  long uniform(long lo, long hi);
  /// Positive rational with numerator in [1, max_num] and denominator in [1, 16].
  Rat small_rat(long max_num = 12);

private:
  std::uint64_t state_;
};

}  // namespace malsched
