#include <doctest.h>

#include "malsched/configlp.hpp"
#include "malsched/errors.hpp"
#include "malsched/gen.hpp"

using namespace malsched;

namespace {

Instance single_job_half_speed() {
  Instance inst;
  inst.machines = {"i"};
  inst.jobs.push_back(Job{"j", SpeedFn(1, SpeedFn::Linear{{Rat(1, 2)}})});
  return inst;
}

Rat objective_of(const ConfigLpSolution& sol) {
  Rat total;
  for (const Rat& s : sol.machine_slack) total += s;
  return total;
}

}  // namespace

TEST_CASE("the half-speed singleton is feasible exactly from C = 2") {
  // One job, one machine, g({i}) = 1/2: the two constraints read
  // (2 - 2/C) x >= 1 and 2x <= C, which admit a solution exactly when C >= 2.
  Instance inst = single_job_half_speed();
  CHECK(!solve_config_lp(inst, Rat(199, 100)).has_value());
  auto at2 = solve_config_lp(inst, Rat(2));
  REQUIRE(at2.has_value());
  REQUIRE(at2->support[0].size() == 1);
  CHECK(at2->support[0][0].first == 0b1);
  CHECK(at2->support[0][0].second == Rat(1));  // x pinned to 1 at the boundary
  CHECK(solve_config_lp(inst, Rat(201, 100)).has_value());
}

TEST_CASE("assigning every job all machines bounds the search from above") {
  Rng rng(7);
  for (int t = 0; t < 10; ++t) {
    Instance inst = gen_instance(rng.next(), GenProfile::mixed, 4, 3);
    Rat hi;
    for (const Job& job : inst.jobs) hi += Rat(1) / job.speed.max_speed().first;
    CHECK(solve_config_lp(inst, hi).has_value());
    // Below every job's best processing time no set is fast enough.
    Rat lo;
    for (const Job& job : inst.jobs) {
      Rat f = Rat(1) / job.speed.max_speed().first;
      if (f > lo) lo = f;
    }
    CHECK(!solve_config_lp(inst, lo / Rat(2)).has_value());
  }
}

TEST_CASE("feasibility is monotone in the target") {
  Rng rng(21);
  for (int t = 0; t < 8; ++t) {
    Instance inst = gen_instance(rng.next(), GenProfile::mixed, 3, 3);
    auto sr = binary_search_C(inst, Rat(1, 20));
    CHECK(solve_config_lp(inst, sr.C * Rat(3, 2)).has_value());
    CHECK(solve_config_lp(inst, sr.C * Rat(7)).has_value());
  }
}

TEST_CASE("binary search brackets the analytic threshold") {
  Instance inst = single_job_half_speed();
  auto sr = binary_search_C(inst, Rat(1, 100));
  CHECK(sr.C >= Rat(2));
  CHECK(sr.C <= Rat(202, 100));
  CHECK(sr.sol.C == sr.C);
}

TEST_CASE("identical unit jobs on one machine bracket the LP threshold") {
  // n unit jobs on one machine have optimal load n, but the configuration LP
  // is a relaxation: per job (2 - 1/C) x >= 1 with total mass at most C is
  // already satisfiable at C = (n+1)/2. The search brackets that threshold;
  // the integral optimum is only approached through the rounding guarantee.
  const int n = 4;
  Instance inst;
  inst.machines = {"i"};
  for (int j = 0; j < n; ++j)
    inst.jobs.push_back(Job{"j" + std::to_string(j), SpeedFn(1, SpeedFn::Linear{{Rat(1)}})});
  auto sr = binary_search_C(inst, Rat(1, 100));
  const Rat threshold(n + 1, 2);
  CHECK(sr.C >= threshold);
  CHECK(sr.C <= threshold * Rat(101, 100));
  CHECK(!solve_config_lp(inst, threshold - Rat(1, 1000)).has_value());
  CHECK(solve_config_lp(inst, threshold).has_value());
}

TEST_CASE("a single job is answered by the immediately feasible lower bound") {
  Instance inst = single_job_half_speed();
  auto sr = binary_search_C(inst, Rat(1, 100));
  CHECK(sr.C == Rat(2));
  CHECK(!sr.lower_infeasible);
  CHECK(sr.probes == 1);
}

TEST_CASE("pricing finds the singleton column near the threshold") {
  Instance inst = single_job_half_speed();
  // Duals mirroring the boundary solve: the singleton violates at C slightly
  // above 2 when lambda stays moderate.
  auto priced = price_column(inst.jobs[0].speed, Rat(1), {Rat(1, 100)}, Rat(201, 100));
  REQUIRE(priced.has_value());
  CHECK(priced->first == 0b1);
}

TEST_CASE("pricing with prohibitive prices returns nothing") {
  Instance inst = single_job_half_speed();
  CHECK(!price_column(inst.jobs[0].speed, Rat(1), {Rat(100)}, Rat(2)).has_value());
}

TEST_CASE("pricing at the optimal duals certifies termination") {
  Rng rng(300);
  for (int t = 0; t < 10; ++t) {
    Instance inst = gen_instance(rng.next(), GenProfile::mixed, 4, 2);
    auto sr = binary_search_C(inst, Rat(1, 50));
    for (int j = 0; j < inst.job_count(); ++j)
      CHECK(!price_column(inst.jobs[static_cast<size_t>(j)].speed,
                          sr.sol.lambda[static_cast<size_t>(j)], sr.sol.mu, sr.C)
                 .has_value());
  }
}

TEST_CASE("column generation agrees with explicit enumeration exactly") {
  Rng rng(1001);
  for (int t = 0; t < 14; ++t) {
    int m = static_cast<int>(rng.uniform(2, 6));
    int n = static_cast<int>(rng.uniform(1, 4));
    Instance inst = gen_instance(rng.next(), GenProfile::mixed, m, n);
    auto sr = binary_search_C(inst, Rat(1, 20));
    for (Rat C : {sr.C, sr.C * Rat(2)}) {
      auto ex = solve_config_lp(inst, C, LpEngine::explicit_enumeration);
      auto cg = solve_config_lp(inst, C, LpEngine::column_generation);
      REQUIRE(ex.has_value());
      REQUIRE(cg.has_value());
      CHECK(objective_of(*ex) == objective_of(*cg));
    }
    // And they agree on infeasibility below the bracket.
    if (sr.lower_infeasible) {
      CHECK(!solve_config_lp(inst, sr.lower, LpEngine::explicit_enumeration).has_value());
      CHECK(!solve_config_lp(inst, sr.lower, LpEngine::column_generation).has_value());
    }
  }
}

TEST_CASE("nonpositive targets and tolerances are rejected") {
  Instance inst = single_job_half_speed();
  CHECK_THROWS_AS(solve_config_lp(inst, Rat(0)), ValidationError);
  CHECK_THROWS_AS(binary_search_C(inst, Rat(0)), ValidationError);
}

TEST_CASE("the LP text dump carries job and capacity rows") {
  Instance inst = single_job_half_speed();
  std::string text = config_lp_text(inst, Rat(2));
  CHECK(text.find("job_j") != std::string::npos);
  CHECK(text.find("cap_i") != std::string::npos);
  CHECK(text.find("Maximize") != std::string::npos);
}
