#include "malsched/speed.hpp"

#include <algorithm>

#include "malsched/errors.hpp"

namespace malsched {

const char* SpeedFn::kind() const {
  switch (spec_.index()) {
    case 0: return "linear";
    case 1: return "weighted_matroid_rank";
    case 2: return "matroid_based_valuation";
    case 3: return "explicit_table";
    case 4: return "linear_shift";
    default: return "oracle";
  }
}

namespace {

Rat eval_wmr(const SpeedFn::WeightedMatroidRank& f, Mask s) {
  // Matroid greedy is exact for weighted rank: scan S by nonincreasing
  // weight (index tie-break), keep elements that preserve independence.
  std::vector<int> order = elements(s);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return f.weights[static_cast<size_t>(a)] > f.weights[static_cast<size_t>(b)];
  });
  Mask picked = 0;
  Rat total;
  for (int i : order) {
    if (f.weights[static_cast<size_t>(i)].is_zero()) continue;
    if (f.matroid.is_independent(with(picked, i))) {
      picked = with(picked, i);
      total += f.weights[static_cast<size_t>(i)];
    }
  }
  return total;
}

Rat eval_mbv(const SpeedFn::MatroidBasedValuation& f, Mask s) {
  // dp[W] = best weight of a matching that fills exactly the slot set W
  // using distinct machines from S (machines may stay unused).
  const size_t nslots = f.slot_names.size();
  const size_t nsubsets = size_t{1} << nslots;
  std::vector<Rat> dp(nsubsets);
  std::vector<bool> reachable(nsubsets, false);
  reachable[0] = true;
  for (int i : elements(s)) {
    for (size_t w = nsubsets; w-- > 0;) {
      for (size_t v = 0; v < nslots; ++v) {
        if (!(w >> v & 1)) continue;
        const size_t prev = w & ~(size_t{1} << v);
        if (!reachable[prev]) continue;
        Rat cand = dp[prev] + f.slot_weights[static_cast<size_t>(i)][v];
        if (!reachable[w] || cand > dp[w]) {
          dp[w] = cand;
          reachable[w] = true;
        }
      }
    }
  }
  Rat best;
  for (size_t w = 0; w < nsubsets; ++w)
    if (reachable[w] && f.slot_matroid.is_independent(static_cast<Mask>(w)) && dp[w] > best)
      best = dp[w];
  return best;
}

}  // namespace

Rat SpeedFn::evaluate(Mask s) const {
  if (s & ~full_mask(ground_size_))
    throw ValidationError("speed evaluated outside its ground set");
  if (const auto* f = std::get_if<Linear>(&spec_)) {
    Rat total;
    for (int i : elements(s)) total += f->weights[static_cast<size_t>(i)];
    return total;
  }
  if (const auto* f = std::get_if<WeightedMatroidRank>(&spec_)) return eval_wmr(*f, s);
  if (const auto* f = std::get_if<MatroidBasedValuation>(&spec_)) return eval_mbv(*f, s);
  if (const auto* f = std::get_if<ExplicitTable>(&spec_)) return f->values[s];
  if (const auto* f = std::get_if<LinearShift>(&spec_)) {
    Rat v = f->base->evaluate(s);
    for (int i : elements(s)) v -= f->shifts[static_cast<size_t>(i)];
    return v;
  }
  return (*std::get<Oracle>(spec_).eval)(s);
}

std::pair<Rat, Mask> SpeedFn::max_speed() const {
  const Mask ground = full_mask(ground_size_);
  const bool monotone = !std::holds_alternative<LinearShift>(spec_) &&
                        !std::holds_alternative<Oracle>(spec_);
  if (monotone) return {evaluate(ground), ground};
  if (ground_size_ > 20)
    throw ValidationError("max_speed scan over a non-monotone speed with >20 machines");
  Rat best;
  Mask arg = 0;
  for_each_subset(ground, [&](Mask s) {
    Rat v = evaluate(s);
    if (v > best) {
      best = v;
      arg = s;
    }
  });
  return {best, arg};
}

bool SpeedFn::operator==(const SpeedFn& o) const {
  if (ground_size_ != o.ground_size_ || spec_.index() != o.spec_.index()) return false;
  if (const auto* f = std::get_if<Linear>(&spec_))
    return f->weights == std::get<Linear>(o.spec_).weights;
  if (const auto* f = std::get_if<WeightedMatroidRank>(&spec_)) {
    const auto& g = std::get<WeightedMatroidRank>(o.spec_);
    return f->matroid == g.matroid && f->weights == g.weights;
  }
  if (const auto* f = std::get_if<MatroidBasedValuation>(&spec_)) {
    const auto& g = std::get<MatroidBasedValuation>(o.spec_);
    return f->slot_names == g.slot_names && f->slot_matroid == g.slot_matroid &&
           f->slot_weights == g.slot_weights;
  }
  if (const auto* f = std::get_if<ExplicitTable>(&spec_))
    return f->values == std::get<ExplicitTable>(o.spec_).values;
  if (const auto* f = std::get_if<LinearShift>(&spec_)) {
    const auto& g = std::get<LinearShift>(o.spec_);
    return f->shifts == g.shifts && *f->base == *g.base;
  }
  return std::get<Oracle>(spec_).eval == std::get<Oracle>(o.spec_).eval;
}

void validate_speed(const SpeedFn& fn, const SpeedCheckOptions& opt,
                    std::vector<std::string>& errors, std::vector<std::string>& warnings) {
  const int m = fn.ground_size();
  auto check_weights = [&](const std::vector<Rat>& w, size_t expect, const char* what) {
    if (w.size() != expect) errors.push_back(std::string(what) + ": wrong weight count");
    for (const Rat& x : w)
      if (x.sign() < 0) errors.push_back(std::string(what) + ": negative weight");
  };
  if (const auto* f = std::get_if<SpeedFn::Linear>(&fn.spec())) {
    check_weights(f->weights, static_cast<size_t>(m), "linear");
  } else if (const auto* f = std::get_if<SpeedFn::WeightedMatroidRank>(&fn.spec())) {
    check_weights(f->weights, static_cast<size_t>(m), "weighted_matroid_rank");
    if (f->matroid.ground_size() != m)
      errors.push_back("weighted_matroid_rank: matroid ground differs from machine set");
    for (auto& p : f->matroid.validate()) errors.push_back("weighted_matroid_rank: " + p);
  } else if (const auto* f = std::get_if<SpeedFn::MatroidBasedValuation>(&fn.spec())) {
    const int nslots = static_cast<int>(f->slot_names.size());
    if (nslots > opt.mbv_slot_limit)
      errors.push_back("matroid_based_valuation: slot count " + std::to_string(nslots) +
                       " above exact-evaluation limit " + std::to_string(opt.mbv_slot_limit));
    if (f->slot_matroid.ground_size() != nslots)
      errors.push_back("matroid_based_valuation: slot matroid ground mismatch");
    for (auto& p : f->slot_matroid.validate()) errors.push_back("matroid_based_valuation: " + p);
    if (f->slot_weights.size() != static_cast<size_t>(m))
      errors.push_back("matroid_based_valuation: weight table has wrong machine count");
    for (const auto& row : f->slot_weights) check_weights(row, static_cast<size_t>(nslots), "matroid_based_valuation");
  } else if (const auto* f = std::get_if<SpeedFn::ExplicitTable>(&fn.spec())) {
    if (m > opt.table_ground_limit)
      errors.push_back("explicit_table: ground set above limit " +
                       std::to_string(opt.table_ground_limit));
    else if (f->values.size() != (size_t{1} << m))
      errors.push_back("explicit_table: table must list every subset");
    if (!f->values.empty() && !f->values[0].is_zero())
      errors.push_back("explicit_table: value of the empty set must be 0");
    for (const Rat& v : f->values)
      if (v.sign() < 0) errors.push_back("explicit_table: negative value");
  } else if (const auto* f = std::get_if<SpeedFn::LinearShift>(&fn.spec())) {
    if (static_cast<int>(f->shifts.size()) != m) errors.push_back("linear_shift: wrong shift count");
    for (const Rat& x : f->shifts)
      if (x.sign() < 0) errors.push_back("linear_shift: negative shift");
    if (!f->base || f->base->ground_size() != m)
      errors.push_back("linear_shift: base ground mismatch");
    else
      validate_speed(*f->base, opt, errors, warnings);
  }
  if (!errors.empty()) return;

  const bool monotone_exempt = std::holds_alternative<SpeedFn::LinearShift>(fn.spec()) ||
                               std::holds_alternative<SpeedFn::Oracle>(fn.spec());
  if (monotone_exempt) return;
  if (m > opt.monotone_ground_limit) {
    // Nonnegative weights make every variant except the table monotone by
    // construction; only an unverifiable table deserves a warning.
    if (std::holds_alternative<SpeedFn::ExplicitTable>(fn.spec()))
      warnings.push_back(std::string("monotonicity not brute-force checked for ") + fn.kind() +
                         " (ground size above threshold)");
    return;
  }
  for_each_subset(full_mask(m), [&](Mask s) {
    Rat base = fn.evaluate(s);
    for (int i = 0; i < m; ++i) {
      if (contains(s, i)) continue;
      if (fn.evaluate(with(s, i)) < base) {
        errors.push_back(std::string(fn.kind()) + ": not monotone at element index " +
                         std::to_string(i));
        return;
      }
    }
  });
}

}  // namespace malsched
