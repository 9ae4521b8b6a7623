#include <doctest.h>

#include "malsched/gen.hpp"
#include "malsched/speed.hpp"

using namespace malsched;

namespace {

/// Test-side matcher for matroid-based valuations: enumerate every injective
/// machine-to-slot map whose used slots are independent. Independent of the
/// DP in the implementation.
Rat brute_force_matching(const SpeedFn::MatroidBasedValuation& f, Mask machines) {
  std::vector<int> ms = elements(machines);
  const int nslots = static_cast<int>(f.slot_names.size());
  Rat best;
  // Assignment vector: per machine, a slot index or -1.
  std::vector<int> pick(ms.size(), -1);
  std::function<void(size_t)> rec = [&](size_t at) {
    if (at == ms.size()) {
      Mask used = 0;
      Rat total;
      for (size_t t = 0; t < ms.size(); ++t) {
        if (pick[t] < 0) continue;
        if (contains(used, pick[t])) return;  // slot collision
        used = with(used, pick[t]);
        total += f.slot_weights[static_cast<size_t>(ms[t])][static_cast<size_t>(pick[t])];
      }
      if (f.slot_matroid.is_independent(used) && total > best) best = total;
      return;
    }
    for (int v = -1; v < nslots; ++v) {
      pick[at] = v;
      rec(at + 1);
    }
  };
  rec(0);
  return best;
}

}  // namespace

TEST_CASE("linear speeds are additive") {
  SpeedFn fn(2, SpeedFn::Linear{{Rat(1), Rat(2)}});
  CHECK(fn.evaluate(0b11) == Rat(3));
  CHECK(fn.evaluate(0b01) == Rat(1));
  CHECK(fn.evaluate(0) == Rat(0));
}

TEST_CASE("matroid-based valuation matches the exhaustive matcher") {
  // Two machines, two slots under a rank-1 slot matroid: only one slot may be
  // used, so the best single weight wins.
  SpeedFn::MatroidBasedValuation f{
      {"s1", "s2"}, Matroid::uniform(2, 1), {{Rat(4), Rat(7)}, {Rat(5), Rat(2)}}};
  SpeedFn fn(2, f);
  CHECK(brute_force_matching(f, 0b11) == Rat(7));
  CHECK(fn.evaluate(0b11) == Rat(7));
  CHECK(fn.evaluate(0b01) == Rat(7));  // machine 1 alone takes slot s2
  CHECK(fn.evaluate(0b10) == Rat(5));
  CHECK(fn.evaluate(0) == Rat(0));
}

TEST_CASE("matroid-based valuations agree with the matcher on random instances") {
  Rng rng(5150);
  for (int t = 0; t < 40; ++t) {
    int m = static_cast<int>(rng.uniform(1, 4));
    int nslots = static_cast<int>(rng.uniform(1, 3));
    std::vector<std::string> slots;
    for (int v = 0; v < nslots; ++v) slots.push_back("s" + std::to_string(v));
    Matroid sm = Matroid::uniform(nslots, static_cast<int>(rng.uniform(1, nslots)));
    std::vector<std::vector<Rat>> w;
    for (int i = 0; i < m; ++i) {
      std::vector<Rat> row;
      for (int v = 0; v < nslots; ++v) row.push_back(rng.small_rat());
      w.push_back(row);
    }
    SpeedFn::MatroidBasedValuation f{slots, sm, w};
    SpeedFn fn(m, f);
    for (Mask s = 0; s <= full_mask(m); ++s) CHECK(fn.evaluate(s) == brute_force_matching(f, s));
  }
}

TEST_CASE("weighted matroid rank equals the best independent subset, exhaustively") {
  Rng rng(777);
  for (int t = 0; t < 30; ++t) {
    int m = static_cast<int>(rng.uniform(2, 8));
    Matroid mat = (t % 3 == 0) ? Matroid::uniform(m, static_cast<int>(rng.uniform(0, m)))
                 : (t % 3 == 1)
                     ? Matroid::partition(m, {full_mask(m)}, {static_cast<int>(rng.uniform(1, m))})
                     : Matroid::free(m);
    std::vector<Rat> w;
    for (int i = 0; i < m; ++i) w.push_back(rng.small_rat());
    SpeedFn fn(m, SpeedFn::WeightedMatroidRank{mat, w});
    for (Mask s = 0; s <= full_mask(m); ++s) {
      Rat best;
      for_each_subset(s, [&](Mask sub) {
        if (!mat.is_independent(sub)) return;
        Rat total;
        for (int i : elements(sub)) total += w[static_cast<size_t>(i)];
        if (total > best) best = total;
      });
      CHECK(fn.evaluate(s) == best);
    }
  }
}

TEST_CASE("all serializable variants are monotone with empty-set value zero") {
  Rng rng(31337);
  for (int t = 0; t < 25; ++t) {
    for (GenProfile p : {GenProfile::linear, GenProfile::wmr_uniform, GenProfile::wmr_partition,
                         GenProfile::mbv}) {
      Instance inst = gen_instance(rng.next(), p, 5, 1);
      const SpeedFn& fn = inst.jobs[0].speed;
      CHECK(fn.evaluate(0) == Rat(0));
      for (Mask s = 0; s <= full_mask(5); ++s)
        for (int i = 0; i < 5; ++i)
          if (!contains(s, i)) CHECK(fn.evaluate(with(s, i)) >= fn.evaluate(s));
    }
  }
}

TEST_CASE("linear shift subtracts per-machine rebates and may go negative") {
  auto base = std::make_shared<const SpeedFn>(2, SpeedFn::Linear{{Rat(3), Rat(1)}});
  SpeedFn fn(2, SpeedFn::LinearShift{base, {Rat(2), Rat(2)}});
  CHECK(fn.evaluate(0b01) == Rat(1));
  CHECK(fn.evaluate(0b10) == Rat(-1));
  CHECK(fn.evaluate(0b11) == Rat(0));
  CHECK(fn.evaluate(0) == Rat(0));
  CHECK(fn.max_speed().first == Rat(1));
}

TEST_CASE("validation rejects negative weights and incomplete tables") {
  std::vector<std::string> errors, warnings;
  SpeedFn bad(2, SpeedFn::Linear{{Rat(-1), Rat(2)}});
  validate_speed(bad, {}, errors, warnings);
  CHECK(!errors.empty());

  errors.clear();
  SpeedFn table(2, SpeedFn::ExplicitTable{{Rat(1), Rat(1), Rat(1), Rat(2)}});
  validate_speed(table, {}, errors, warnings);
  CHECK(!errors.empty());  // empty set must be zero

  errors.clear();
  SpeedFn nonmono(2, SpeedFn::ExplicitTable{{Rat(0), Rat(2), Rat(2), Rat(1)}});
  validate_speed(nonmono, {}, errors, warnings);
  CHECK(!errors.empty());  // not monotone
}

TEST_CASE("oracle speeds evaluate through the callback") {
  auto eval = std::make_shared<const std::function<Rat(Mask)>>(
      [](Mask s) { return Rat(popcount(s)); });
  SpeedFn fn(3, SpeedFn::Oracle{eval, "cardinality"});
  CHECK(fn.evaluate(0b111) == Rat(3));
  CHECK(fn.evaluate(0) == Rat(0));
}
