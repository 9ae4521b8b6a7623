#include "malsched/mnat.hpp"

#include <algorithm>

#include "malsched/errors.hpp"

namespace malsched {

namespace {

/// Shared greedy core. `prefer` marks elements whose zero marginals still
/// count as improvements (the infinitesimal secondary objective); it is empty
/// for the plain demand computation.
template <typename F>
Mask greedy_demand(int m, F&& value, const std::vector<Rat>& prices, Mask prefer) {
  Mask s = 0;
  Rat current = value(Mask{0});
  while (true) {
    int best = -1;
    bool best_pref = false;
    Rat best_marg;
    for (int i = 0; i < m; ++i) {
      if (contains(s, i)) continue;
      Rat marg = value(with(s, i)) - current - prices[static_cast<size_t>(i)];
      const bool pref = contains(prefer, i);
      const bool eligible = marg.sign() > 0 || (marg.is_zero() && pref);
      if (!eligible) continue;
      if (best < 0 || marg > best_marg || (marg == best_marg && pref && !best_pref)) {
        best = i;
        best_marg = marg;
        best_pref = pref;
      }
    }
    if (best < 0) return s;
    current += best_marg + prices[static_cast<size_t>(best)];
    s = with(s, best);
  }
}

}  // namespace

Mask demand(const std::function<Rat(Mask)>& fn, int ground_size, const std::vector<Rat>& prices) {
  return greedy_demand(ground_size, fn, prices, 0);
}

Mask demand(const SpeedFn& fn, const std::vector<Rat>& prices) {
  return greedy_demand(fn.ground_size(), [&](Mask s) { return fn.evaluate(s); }, prices, 0);
}

std::optional<MnatViolation> check_mnat(const std::function<Rat(Mask)>& fn, int ground_size) {
  if (ground_size > 10)
    throw ValidationError("exchange certification is exhaustive and limited to 10 elements");
  const Mask ground = full_mask(ground_size);
  std::vector<Rat> val(size_t{1} << ground_size);
  for (Mask s = 0; s <= ground; ++s) val[s] = fn(s);

  for (Mask s = 0; s <= ground; ++s) {
    for (Mask t = 0; t <= ground; ++t) {
      if ((s & ~t) == 0) continue;
      Rat lhs = val[s] + val[t];
      for (int i : elements(s & ~t)) {
        if (val[without(s, i)] + val[with(t, i)] >= lhs) continue;
        bool ok = false;
        for (int j : elements(t & ~s)) {
          if (val[with(without(s, i), j)] + val[with(without(t, j), i)] >= lhs) {
            ok = true;
            break;
          }
        }
        if (!ok) return MnatViolation{s, t, i};
      }
    }
  }
  return std::nullopt;
}

std::optional<MnatViolation> check_mnat(const SpeedFn& fn) {
  return check_mnat([&](Mask s) { return fn.evaluate(s); }, fn.ground_size());
}

ReducedSpeed::ReducedSpeed(const SpeedFn& base, Rat lambda, std::vector<Rat> mu)
    : base_(&base), lambda_(std::move(lambda)) {
  MALSCHED_REQUIRE(lambda_.sign() > 0, "reduced speed requires a strictly positive job dual");
  prices_.reserve(mu.size());
  for (const Rat& m : mu) prices_.push_back(m / lambda_);
}

Rat ReducedSpeed::evaluate(Mask s) const {
  Rat v = base_->evaluate(s) * Rat(2);
  for (int i : elements(s)) v -= prices_[static_cast<size_t>(i)];
  return v;
}

RankOracle::RankOracle(ReducedSpeed reduced) : reduced_(std::move(reduced)) {}

int RankOracle::rank(Mask u) const {
  if (u == 0) return 0;
  auto it = memo_.find(u);
  if (it != memo_.end()) return it->second;
  const int m = reduced_.ground_size();
  // Prices are folded into the reduced value itself, so the greedy runs with
  // zero prices and the membership-in-u preference as the secondary key.
  std::vector<Rat> zero(static_cast<size_t>(m));
  Mask t = greedy_demand(m, [&](Mask s) { return reduced_.evaluate(s); }, zero, u);
  const int r = popcount(t & u);
  memo_.emplace(u, r);
  return r;
}

Mask matroid_greedy_top(const RankOracle& oracle, Mask s, const std::vector<Rat>& weights) {
  std::vector<int> order = elements(s);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return weights[static_cast<size_t>(a)] > weights[static_cast<size_t>(b)];
  });
  Mask picked = 0;
  for (int i : order)
    if (oracle.is_independent(with(picked, i))) picked = with(picked, i);
  return picked;
}

}  // namespace malsched
