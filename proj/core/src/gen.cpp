#include "malsched/gen.hpp"

#include "malsched/errors.hpp"

namespace malsched {

std::uint64_t Rng::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

long Rng::uniform(long lo, long hi) {
  return lo + static_cast<long>(next() % static_cast<std::uint64_t>(hi - lo + 1));
}

Rat Rng::small_rat(long max_num) { return Rat(uniform(1, max_num), uniform(1, 16)); }

GenProfile parse_profile(const std::string& name) {
  if (name == "linear") return GenProfile::linear;
  if (name == "wmr-uniform") return GenProfile::wmr_uniform;
  if (name == "wmr-partition") return GenProfile::wmr_partition;
  if (name == "mbv") return GenProfile::mbv;
  if (name == "mixed") return GenProfile::mixed;
  throw ValidationError("unknown profile '" + name +
                        "' (expected linear|wmr-uniform|wmr-partition|mbv|mixed)");
}

const char* profile_name(GenProfile p) {
  switch (p) {
    case GenProfile::linear: return "linear";
    case GenProfile::wmr_uniform: return "wmr-uniform";
    case GenProfile::wmr_partition: return "wmr-partition";
    case GenProfile::mbv: return "mbv";
    default: return "mixed";
  }
}

namespace {

std::vector<Rat> positive_weights(Rng& rng, int m) {
  std::vector<Rat> w;
  for (int i = 0; i < m; ++i) w.push_back(rng.small_rat());
  return w;
}

SpeedFn gen_speed(Rng& rng, GenProfile profile, int m) {
  GenProfile p = profile;
  if (p == GenProfile::mixed) {
    switch (rng.uniform(0, 3)) {
      case 0: p = GenProfile::linear; break;
      case 1: p = GenProfile::wmr_uniform; break;
      case 2: p = GenProfile::wmr_partition; break;
      default: p = GenProfile::mbv; break;
    }
  }
  switch (p) {
    case GenProfile::linear:
      return SpeedFn(m, SpeedFn::Linear{positive_weights(rng, m)});
    case GenProfile::wmr_uniform: {
      int rank = static_cast<int>(rng.uniform(1, m));
      return SpeedFn(m, SpeedFn::WeightedMatroidRank{Matroid::uniform(m, rank),
                                                     positive_weights(rng, m)});
    }
    case GenProfile::wmr_partition: {
      int nblocks = static_cast<int>(rng.uniform(1, std::min(3L, static_cast<long>(m))));
      std::vector<Mask> blocks(static_cast<size_t>(nblocks), 0);
      for (int i = 0; i < m; ++i)
        blocks[static_cast<size_t>(i % nblocks)] = with(blocks[static_cast<size_t>(i % nblocks)], i);
      std::vector<int> caps;
      for (Mask b : blocks) caps.push_back(static_cast<int>(rng.uniform(1, popcount(b))));
      return SpeedFn(m, SpeedFn::WeightedMatroidRank{
                            Matroid::partition(m, std::move(blocks), std::move(caps)),
                            positive_weights(rng, m)});
    }
    case GenProfile::mbv: {
      int nslots = static_cast<int>(rng.uniform(2, 3));
      std::vector<std::string> slots;
      for (int v = 0; v < nslots; ++v) slots.push_back("s" + std::to_string(v + 1));
      Matroid sm = Matroid::uniform(nslots, static_cast<int>(rng.uniform(1, nslots)));
      std::vector<std::vector<Rat>> table;
      for (int i = 0; i < m; ++i) table.push_back(positive_weights(rng, nslots));
      return SpeedFn(m, SpeedFn::MatroidBasedValuation{std::move(slots), std::move(sm),
                                                       std::move(table)});
    }
    default: throw ValidationError("unreachable profile");
  }
}

}  // namespace

Instance gen_instance(std::uint64_t seed, GenProfile profile, int machines, int jobs) {
  if (machines < 1 || machines > kMaxGroundSize || jobs < 1)
    throw ValidationError("generator sizes out of range");
  Rng rng(seed);
  Instance inst;
  for (int i = 0; i < machines; ++i) inst.machines.push_back("m" + std::to_string(i + 1));
  for (int j = 0; j < jobs; ++j)
    inst.jobs.push_back(Job{"j" + std::to_string(j + 1), gen_speed(rng, profile, machines)});
  return inst;
}

MmfaInstance gen_mmfa(std::uint64_t seed, GenProfile profile, int items, int agents) {
  if (items < 1 || items > kMaxGroundSize || agents < 1)
    throw ValidationError("generator sizes out of range");
  Rng rng(seed ^ 0xA11CA7E5ULL);
  MmfaInstance mmfa;
  for (int i = 0; i < items; ++i) mmfa.items.push_back("i" + std::to_string(i + 1));
  for (int a = 0; a < agents; ++a)
    mmfa.agents.push_back(MmfaAgent{"a" + std::to_string(a + 1), gen_speed(rng, profile, items)});
  return mmfa;
}

}  // namespace malsched
