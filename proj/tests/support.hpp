#pragma once

#include <random>
#include <vector>

#include "bergman/lattice.hpp"
#include "bergman/weights.hpp"

namespace bergman::testing {

/// m in [1, max_m], 1..max_gens generators with exponents in [0, max_exp],
/// never the zero generator.
inline MonomialIdeal random_ideal(std::mt19937_64& rng, std::size_t max_m = 4, std::size_t max_gens = 4,
                                  int max_exp = 5) {
  std::uniform_int_distribution<std::size_t> dm(1, max_m), dg(1, max_gens);
  std::uniform_int_distribution<int> de(0, max_exp);
  const std::size_t m = dm(rng), l = dg(rng);
  std::vector<MultiIndex> gens;
  while (gens.size() < l) {
    std::vector<int> v(m);
    int total = 0;
    for (auto& x : v) total += x = de(rng);
    if (total > 0) gens.emplace_back(v);
  }
  return MonomialIdeal(m, std::move(gens));
}

/// Random egg domain with p_j uniform in [lo, hi].
inline EggDomain random_egg(std::mt19937_64& rng, std::size_t m, double lo = 0.5, double hi = 3.0) {
  std::uniform_real_distribution<double> dp(lo, hi);
  std::vector<double> p(m);
  for (auto& x : p) x = dp(rng);
  return EggDomain::egg(p);
}

/// Random tree of depth <= max_depth (depth counted below the root) with m
/// leaves, leaf powers 2p with p in [0.5, 2.5] and node exponents in [0.5, 2].
inline EggNode random_subtree(std::mt19937_64& rng, std::size_t leaves, int depth, int& label) {
  std::uniform_real_distribution<double> dp(0.5, 2.5), de(0.5, 2.0);
  if (leaves == 1 && (depth == 0 || rng() % 2 == 0))
    return EggNode::make_leaf("z" + std::to_string(label++), 2.0 * dp(rng));
  if (depth == 0) throw std::logic_error("random_subtree: depth exhausted");
  std::vector<EggNode> kids;
  std::size_t left = leaves;
  while (left > 0) {
    const std::size_t take = depth == 1 ? 1 : 1 + rng() % left;
    kids.push_back(random_subtree(rng, take, depth - 1, label));
    left -= take;
  }
  return EggNode::make_group(de(rng), std::move(kids));
}

inline EggDomain random_nested(std::mt19937_64& rng, std::size_t m, int max_depth) {
  int label = 1;
  std::vector<EggNode> kids;
  std::size_t left = m;
  while (left > 0) {
    const std::size_t take = max_depth == 1 ? 1 : 1 + rng() % left;
    kids.push_back(random_subtree(rng, take, max_depth - 1, label));
    left -= take;
  }
  return EggDomain(EggNode::make_group(1.0, std::move(kids)));
}

inline MultiIndex random_index(std::mt19937_64& rng, std::size_t m, int max_degree) {
  std::vector<int> v(m, 0);
  const int d = static_cast<int>(rng() % static_cast<unsigned>(max_degree + 1));
  for (int i = 0; i < d; ++i) ++v[rng() % m];
  return MultiIndex(v);
}

}  // namespace bergman::testing
