#include <doctest.h>

#include "malsched/errors.hpp"
#include "malsched/gen.hpp"
#include "malsched/mmfa.hpp"
#include "malsched/mnat.hpp"
#include "malsched/oracle.hpp"

using namespace malsched;

TEST_CASE("the reduction leaves utilities untouched below the level") {
  MmfaInstance mmfa;
  mmfa.items = {"x", "y"};
  mmfa.agents.push_back(MmfaAgent{"a", SpeedFn(2, SpeedFn::Linear{{Rat(2), Rat(3)}})});
  Instance red = reduce_to_scheduling(mmfa, Rat(5));
  // All singletons are at most the level: every rebate vanishes.
  CHECK(red.jobs[0].speed.evaluate(0b11) == Rat(5));
  CHECK(red.jobs[0].speed.evaluate(0b01) == Rat(2));
}

TEST_CASE("the reduction caps singleton speeds exactly at the level") {
  MmfaInstance mmfa;
  mmfa.items = {"x"};
  mmfa.agents.push_back(MmfaAgent{"a", SpeedFn(1, SpeedFn::Linear{{Rat(6)}})});
  Instance red = reduce_to_scheduling(mmfa, Rat(5));
  // u({x}) = V + 1 rebates down to exactly V.
  CHECK(red.jobs[0].speed.evaluate(0b1) == Rat(5));
}

TEST_CASE("reduced speeds stay in the M-natural class on random instances") {
  Rng rng(611);
  for (int t = 0; t < 15; ++t) {
    MmfaInstance mmfa = gen_mmfa(rng.next(), static_cast<GenProfile>(rng.uniform(0, 4)),
                                 static_cast<int>(rng.uniform(2, 5)),
                                 static_cast<int>(rng.uniform(1, 3)));
    Rat v = rng.small_rat(6);
    Instance red = reduce_to_scheduling(mmfa, v);
    for (const Job& j : red.jobs) CHECK(!check_mnat(j.speed).has_value());
  }
}

TEST_CASE("one agent and one item allocate immediately at the top level") {
  MmfaInstance mmfa;
  mmfa.items = {"i"};
  mmfa.agents.push_back(MmfaAgent{"a", SpeedFn(1, SpeedFn::Linear{{Rat(5)}})});
  Allocation alloc = solve_mmfa(mmfa, Rat(1, 100));
  REQUIRE(!alloc.degenerate);
  CHECK(alloc.V == Rat(5));
  CHECK(alloc.min_utility == Rat(5));
  CHECK(alloc.bundles[0] == 0b1);
  CHECK(alloc.multiplicity[0] == 1);
}

TEST_CASE("symmetric additive agents reach the split optimum within tolerance") {
  MmfaInstance mmfa;
  mmfa.items = {"x", "y"};
  mmfa.agents.push_back(MmfaAgent{"a", SpeedFn(2, SpeedFn::Linear{{Rat(3), Rat(3)}})});
  mmfa.agents.push_back(MmfaAgent{"b", SpeedFn(2, SpeedFn::Linear{{Rat(3), Rat(3)}})});
  Allocation alloc = solve_mmfa(mmfa, Rat(1, 100));
  REQUIRE(!alloc.degenerate);
  Rat vstar = exact_mmfa(mmfa);
  CHECK(vstar == Rat(3));
  CHECK(alloc.V * Rat(101, 100) >= vstar);
  CHECK(alloc.min_utility * Rat(193) >= alloc.V);
}

TEST_CASE("allocations respect the 32/20/26 decomposition on random suites") {
  Rng rng(1999);
  for (int t = 0; t < 12; ++t) {
    int agents = static_cast<int>(rng.uniform(1, 3));
    int items = static_cast<int>(rng.uniform(std::max(2, agents), 5));
    MmfaInstance mmfa =
        gen_mmfa(rng.next(), static_cast<GenProfile>(rng.uniform(0, 4)), items, agents);
    Allocation alloc = solve_mmfa(mmfa, Rat(1, 100));
    REQUIRE(!alloc.degenerate);
    for (int i = 0; i < mmfa.item_count(); ++i) {
      CHECK(alloc.multiplicity[static_cast<size_t>(i)] <= 78);
      CHECK(alloc.step_count[static_cast<size_t>(i)][0] <= 32);
      CHECK(alloc.step_count[static_cast<size_t>(i)][1] <= 20);
      CHECK(alloc.step_count[static_cast<size_t>(i)][2] <= 26);
    }
    CHECK(alloc.min_utility * Rat(193) >= alloc.V);
    if (alloc.has_upper) {
      // A failed probe certifies the optimum lies below it.
      CHECK(exact_mmfa(mmfa) < alloc.upper);
    }
  }
}

TEST_CASE("an agent valuing nothing is reported as degenerate") {
  MmfaInstance mmfa;
  mmfa.items = {"x"};
  mmfa.agents.push_back(MmfaAgent{"a", SpeedFn(1, SpeedFn::Linear{{Rat(0)}})});
  Allocation alloc = solve_mmfa(mmfa, Rat(1, 100));
  CHECK(alloc.degenerate);
  CHECK(alloc.V == Rat(0));
}

TEST_CASE("santa mode insists on additive utilities") {
  MmfaInstance mmfa;
  mmfa.items = {"x", "y"};
  mmfa.agents.push_back(
      MmfaAgent{"a", SpeedFn(2, SpeedFn::WeightedMatroidRank{Matroid::uniform(2, 1),
                                                             {Rat(1), Rat(1)}})});
  CHECK_THROWS_AS(solve_mmfa(mmfa, Rat(1, 100), LpEngine::explicit_enumeration, true),
                  ValidationError);
  mmfa.agents[0].utility = SpeedFn(2, SpeedFn::Linear{{Rat(1), Rat(2)}});
  Allocation alloc = solve_mmfa(mmfa, Rat(1, 100), LpEngine::explicit_enumeration, true);
  CHECK(!alloc.degenerate);
}

TEST_CASE("the truncation driver accepts tables that stay M-natural") {
  // Unit-weight additive tables truncate to min(|S|, V): a uniform rank
  // function, still in the class.
  MmfaInstance mmfa;
  mmfa.items = {"x", "y", "z"};
  std::vector<Rat> table;
  for (Mask s = 0; s < 8; ++s) table.push_back(Rat(popcount(s)));
  mmfa.agents.push_back(MmfaAgent{"a", SpeedFn(3, SpeedFn::ExplicitTable{table})});
  mmfa.agents.push_back(MmfaAgent{"b", SpeedFn(3, SpeedFn::ExplicitTable{table})});
  Allocation alloc = solve_mmfa_truncated(mmfa, Rat(1, 100));
  REQUIRE(!alloc.degenerate);
  CHECK(alloc.min_utility * Rat(193) >= alloc.V);
}

TEST_CASE("the truncation driver rejects non-table utilities") {
  MmfaInstance mmfa;
  mmfa.items = {"x"};
  mmfa.agents.push_back(MmfaAgent{"a", SpeedFn(1, SpeedFn::Linear{{Rat(1)}})});
  CHECK_THROWS_AS(solve_mmfa_truncated(mmfa, Rat(1, 100)), ValidationError);
}

TEST_CASE("allocation instances parse, validate and round-trip") {
  json doc = json::parse(R"({
    "items": ["x", "y"],
    "agents": [{"id": "a", "utility": {"type": "linear", "weights": {"x": 1, "y": 2}}}]
  })");
  MmfaInstance mmfa = load_mmfa(doc);
  CHECK(mmfa.agent_count() == 1);
  CHECK(emit_mmfa(mmfa)["agents"][0]["id"] == json("a"));
  json bad = doc;
  bad["agents"][0]["hat"] = 1;
  CHECK_THROWS_AS(parse_mmfa(bad), ValidationError);
}
