#pragma once

#include <algorithm>
#include <numeric>
#include <random>

#include "nfv/election/election.hpp"

namespace nfv::vote {

struct RandomElectionOptions {
  Int max_cost = 3;
  /// Probability that a cost entry is Forbidden.
  double forbidden = 0.15;
  /// Probability that a voter starts latent.
  double latent = 0.25;
  /// Probability that a voter's order is top-truncated.
  double truncated = 0.0;
};

/// Random election over candidates c0 (designated), c1, ... with every cost
/// table filled from 0..max_cost or Forbidden.
inline Election random_election(std::mt19937_64 &rng, std::size_t m, std::size_t n,
                                const RandomElectionOptions &opt = {}) {
  if (m == 0)
    throw InputError("random elections need at least one candidate");
  auto chance = [&](double p) { return std::bernoulli_distribution(p)(rng); };
  auto cost = [&]() -> Cost {
    if (chance(opt.forbidden))
      return Cost::forbidden();
    return std::uniform_int_distribution<Int>(0, opt.max_cost)(rng);
  };
  Election e;
  for (std::size_t c = 0; c < m; ++c)
    e.candidates.push_back("c" + std::to_string(c));
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    Int approval = std::uniform_int_distribution<Int>(0, static_cast<Int>(m))(rng);
    Voter v = default_voter(m, order, approval);
    if (chance(opt.truncated))
      v.truncated_at = std::uniform_int_distribution<std::size_t>(0, m)(rng);
    v.active = !chance(opt.latent);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
        if (a != b)
          v.swap[a][b] = cost();
    for (std::size_t p = 0; p <= m; ++p)
      if (static_cast<Int>(p) != approval)
        v.push[p] = cost();
    v.influence = cost();
    v.activate = cost();
    v.deactivate = cost();
    e.voters.push_back(std::move(v));
  }
  return e;
}

} // namespace nfv::vote
