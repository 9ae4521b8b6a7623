#include "malsched/matroid.hpp"

#include <algorithm>

namespace malsched {

bool Matroid::is_independent(Mask s) const {
  if (const auto* u = std::get_if<Uniform>(&spec_)) return popcount(s) <= u->rank;
  if (const auto* p = std::get_if<Partition>(&spec_)) {
    for (size_t b = 0; b < p->blocks.size(); ++b)
      if (popcount(s & p->blocks[b]) > p->capacities[b]) return false;
    return true;
  }
  if (const auto* e = std::get_if<Explicit>(&spec_)) {
    for (Mask basis : e->bases)
      if ((s & ~basis) == 0) return true;
    return false;
  }
  return true;  // free
}

std::vector<std::string> Matroid::validate() const {
  std::vector<std::string> problems;
  const Mask ground = full_mask(ground_size_);
  if (const auto* u = std::get_if<Uniform>(&spec_)) {
    if (u->rank < 0 || u->rank > ground_size_)
      problems.push_back("uniform rank out of range [0, ground size]");
  } else if (const auto* p = std::get_if<Partition>(&spec_)) {
    if (p->blocks.size() != p->capacities.size())
      problems.push_back("partition blocks and capacities differ in length");
    Mask seen = 0;
    for (size_t b = 0; b < p->blocks.size(); ++b) {
      if (p->blocks[b] & seen) problems.push_back("partition blocks are not disjoint");
      seen |= p->blocks[b];
      if (b < p->capacities.size() &&
          (p->capacities[b] < 0 || p->capacities[b] > popcount(p->blocks[b])))
        problems.push_back("partition capacity out of range for its block");
    }
    if (seen != ground) problems.push_back("partition blocks do not cover the ground set");
  } else if (const auto* e = std::get_if<Explicit>(&spec_)) {
    if (e->bases.empty()) {
      problems.push_back("explicit matroid needs at least one basis");
      return problems;
    }
    const int card = popcount(e->bases.front());
    for (Mask b : e->bases) {
      if (b & ~ground) problems.push_back("basis contains elements outside the ground set");
      if (popcount(b) != card) problems.push_back("bases differ in cardinality");
    }
    // Basis exchange: for B1, B2 and i in B1 \ B2 there is i' in B2 \ B1
    // with B1 - i + i' again a basis.
    auto is_basis = [&](Mask s) {
      return std::find(e->bases.begin(), e->bases.end(), s) != e->bases.end();
    };
    for (Mask b1 : e->bases)
      for (Mask b2 : e->bases)
        for (int i : elements(b1 & ~b2)) {
          bool ok = false;
          for (int j : elements(b2 & ~b1))
            if (is_basis(with(without(b1, i), j))) {
              ok = true;
              break;
            }
          if (!ok) {
            problems.push_back("explicit family violates basis exchange");
            return problems;
          }
        }
  }
  return problems;
}

bool Matroid::operator==(const Matroid& o) const {
  if (ground_size_ != o.ground_size_ || spec_.index() != o.spec_.index()) return false;
  if (const auto* u = std::get_if<Uniform>(&spec_))
    return u->rank == std::get<Uniform>(o.spec_).rank;
  if (const auto* p = std::get_if<Partition>(&spec_)) {
    const auto& q = std::get<Partition>(o.spec_);
    return p->blocks == q.blocks && p->capacities == q.capacities;
  }
  if (const auto* e = std::get_if<Explicit>(&spec_))
    return e->bases == std::get<Explicit>(o.spec_).bases;
  return true;
}

}  // namespace malsched
