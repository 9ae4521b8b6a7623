#include "malsched/oracle.hpp"

#include "malsched/errors.hpp"

namespace malsched {

namespace {

constexpr double kSearchGuard = 1e7;

struct JobOptions {
  std::vector<Mask> sets;
  std::vector<Rat> times;  // 1/g per set
};

}  // namespace

std::pair<Rat, Assignment> exact_assignment(const Instance& inst) {
  const int n = inst.job_count();
  if (inst.machine_count() > 20)
    throw ValidationError("exhaustive assignment search guard: more than 20 machines");
  std::vector<JobOptions> options(static_cast<size_t>(n));
  double combos = 1;
  for (int j = 0; j < n; ++j) {
    for (Mask s = 1; s <= inst.all_machines(); ++s) {
      Rat g = inst.jobs[static_cast<size_t>(j)].speed.evaluate(s);
      if (g.sign() <= 0) continue;
      options[static_cast<size_t>(j)].sets.push_back(s);
      options[static_cast<size_t>(j)].times.push_back(Rat(1) / g);
    }
    if (options[static_cast<size_t>(j)].sets.empty())
      throw ValidationError("a job has no usable machine set");
    combos *= static_cast<double>(options[static_cast<size_t>(j)].sets.size());
    if (combos > kSearchGuard)
      throw ValidationError("exhaustive assignment search guard exceeded (over 1e7 combinations)");
  }

  std::vector<Rat> loads(static_cast<size_t>(inst.machine_count()));
  std::vector<Mask> current(static_cast<size_t>(n), 0);
  std::optional<Rat> best;
  Assignment best_assignment;

  // Depth-first over jobs in ascending set order; strict improvement keeps
  // the lexicographically first minimizer. Partial max load only grows, so
  // it prunes.
  auto partial_max = [&]() {
    Rat mx;
    for (const Rat& l : loads)
      if (l > mx) mx = l;
    return mx;
  };
  std::function<void(int)> dfs = [&](int j) {
    if (best && partial_max() >= *best) return;
    if (j == n) {
      Rat value = partial_max();
      if (!best || value < *best) {
        best = value;
        best_assignment.sets = current;
      }
      return;
    }
    const JobOptions& opt = options[static_cast<size_t>(j)];
    for (size_t t = 0; t < opt.sets.size(); ++t) {
      current[static_cast<size_t>(j)] = opt.sets[t];
      for (int i : elements(opt.sets[t])) loads[static_cast<size_t>(i)] += opt.times[t];
      dfs(j + 1);
      for (int i : elements(opt.sets[t])) loads[static_cast<size_t>(i)] -= opt.times[t];
    }
  };
  dfs(0);
  MALSCHED_REQUIRE(best.has_value(), "exhaustive search found no assignment");
  return {*best, best_assignment};
}

std::pair<Rat, Mask> exact_demand(const SpeedFn& fn, const std::vector<Rat>& prices) {
  Rat best;  // the empty set always attains 0
  Mask arg = 0;
  for_each_subset(full_mask(fn.ground_size()), [&](Mask s) {
    Rat v = fn.evaluate(s);
    for (int i : elements(s)) v -= prices[static_cast<size_t>(i)];
    if (v > best) {
      best = v;
      arg = s;
    }
  });
  return {best, arg};
}

Rat exact_mmfa(const MmfaInstance& inst) {
  const int items = inst.item_count();
  const int agents = inst.agent_count();
  double combos = 1;
  for (int i = 0; i < items; ++i) {
    combos *= static_cast<double>(agents + 1);
    if (combos > kSearchGuard)
      throw ValidationError("exhaustive allocation search guard exceeded (over 1e7 combinations)");
  }
  std::vector<int> owner(static_cast<size_t>(items), -1);  // -1: unassigned
  Rat best;
  bool first = true;
  std::function<void(int)> dfs = [&](int i) {
    if (i == items) {
      std::vector<Mask> bundle(static_cast<size_t>(agents), 0);
      for (int t = 0; t < items; ++t)
        if (owner[static_cast<size_t>(t)] >= 0)
          bundle[static_cast<size_t>(owner[static_cast<size_t>(t)])] =
              with(bundle[static_cast<size_t>(owner[static_cast<size_t>(t)])], t);
      Rat value;
      bool f2 = true;
      for (int a = 0; a < agents; ++a) {
        Rat u = inst.agents[static_cast<size_t>(a)].utility.evaluate(bundle[static_cast<size_t>(a)]);
        if (f2 || u < value) value = u;
        f2 = false;
      }
      if (first || value > best) best = value;
      first = false;
      return;
    }
    for (int a = -1; a < agents; ++a) {
      owner[static_cast<size_t>(i)] = a;
      dfs(i + 1);
    }
    owner[static_cast<size_t>(i)] = -1;
  };
  dfs(0);
  return best;
}

}  // namespace malsched
