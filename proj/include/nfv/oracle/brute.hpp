#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

#include "nfv/election/election.hpp"
#include "nfv/election/rules.hpp"

namespace nfv::oracle {

using vote::ActionSet;
using vote::Cost;
using vote::Election;
using vote::Rule;
using vote::VoterAction;
using vote::WinnerModel;

struct OracleCaps {
  std::size_t candidates = 4;
  std::size_t voters = 4;
};

struct OracleOutcome {
  std::optional<Int> cost; ///< empty: no action set makes c* win
  ActionSet actions;
};

namespace detail {

struct Option {
  VoterAction action;
  Int cost = 0;
  std::vector<std::size_t> order; ///< order after the action
};

/// Every permitted action of one voter: all target orders, all push
/// offsets in the domain, with and without a control change.
inline std::vector<Option> voter_options(const Election &e, std::size_t k) {
  const auto &v = e.voters[k];
  const std::size_t m = e.m();
  std::vector<Option> out;
  std::vector<std::size_t> target(m);
  std::iota(target.begin(), target.end(), 0);
  do {
    auto swaps = vote::inversion_set(v.order, target);
    for (Int off = -v.approval; off + v.approval <= static_cast<Int>(m); ++off)
      for (int toggle = 0; toggle < 2; ++toggle) {
        VoterAction act{swaps, off, toggle == 1};
        Cost c = vote::voter_cost(e, k, act);
        if (!c.is_forbidden())
          out.push_back({std::move(act), c.value(), target});
      }
  } while (std::next_permutation(target.begin(), target.end()));
  return out;
}

inline bool encoding_less(const ActionSet &a, const ActionSet &b) {
  auto x = a.encoding(), y = b.encoding();
  return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
}

} // namespace detail

/// Exhaustive minimum-cost action set making c* win. Ties go to the
/// lexicographically smallest action-set encoding.
inline OracleOutcome brute_oracle(const Election &e, const Rule &rule, WinnerModel model,
                                  const OracleCaps &caps = {}) {
  vote::validate(e);
  if (!vote::is_linear(e))
    throw InputError("the oracle needs linear orders; linearize first");
  if (e.m() > caps.candidates || e.voters.size() > caps.voters)
    throw ResourceError("oracle caps exceeded: " + std::to_string(e.m()) + " candidates, " +
                        std::to_string(e.voters.size()) + " voters");
  const std::size_t n = e.voters.size();
  std::vector<std::vector<detail::Option>> options;
  std::vector<Int> min_rest(n + 1, 0);
  for (std::size_t k = 0; k < n; ++k)
    options.push_back(detail::voter_options(e, k));
  for (std::size_t k = n; k-- > 0;) {
    if (options[k].empty())
      return {};
    Int lo = options[k][0].cost;
    for (const auto &o : options[k])
      lo = std::min(lo, o.cost);
    min_rest[k] = min_rest[k + 1] + lo;
  }

  // cost tables are irrelevant to winner evaluation, so leaves mutate a bare copy
  Election bare;
  bare.candidates = e.candidates;
  bare.designated = e.designated;
  for (const auto &v : e.voters) {
    vote::Voter b;
    b.order = v.order;
    b.approval = v.approval;
    b.active = v.active;
    bare.voters.push_back(std::move(b));
  }

  OracleOutcome best;
  ActionSet current = ActionSet::none(n);
  auto recurse = [&](auto &&self, std::size_t k, Int cost) -> void {
    if (best.cost && cost + min_rest[k] > *best.cost)
      return;
    if (k == n) {
      if (best.cost && cost == *best.cost && !detail::encoding_less(current, best.actions))
        return;
      if (vote::designated_wins(bare, rule, model)) {
        best.cost = cost;
        best.actions = current;
      }
      return;
    }
    for (const auto &o : options[k]) {
      current.voters[k] = o.action;
      auto &b = bare.voters[k];
      b.order = o.order;
      b.approval = e.voters[k].approval + o.action.push;
      b.active = e.voters[k].active != o.action.toggle;
      self(self, k + 1, cost + o.cost);
    }
    current.voters[k] = {};
    bare.voters[k].order = e.voters[k].order;
    bare.voters[k].approval = e.voters[k].approval;
    bare.voters[k].active = e.voters[k].active;
  };
  recurse(recurse, 0, 0);
  return best;
}

namespace detail {

inline bool condorcet_winner(const std::vector<std::vector<std::size_t>> &profile,
                             std::size_t m, std::size_t c) {
  for (std::size_t d = 0; d < m; ++d) {
    if (d == c)
      continue;
    Int margin = 0;
    for (const auto &order : profile) {
      auto pc = std::find(order.begin(), order.end(), c);
      auto pd = std::find(order.begin(), order.end(), d);
      margin += pc < pd ? 1 : -1;
    }
    if (margin <= 0)
      return false;
  }
  return true;
}

} // namespace detail

/// Breadth-first search over profiles, one adjacent swap per step.
inline Int oracle_dodgson(const Election &e, std::size_t c, const OracleCaps &caps = {}) {
  if (e.m() > caps.candidates || e.voters.size() > caps.voters)
    throw ResourceError("oracle caps exceeded");
  std::vector<std::vector<std::size_t>> start;
  for (const auto &v : e.voters)
    if (v.active)
      start.push_back(vote::full_order(v, e.m()));
  std::map<std::vector<std::vector<std::size_t>>, Int> dist{{start, 0}};
  std::deque<std::vector<std::vector<std::size_t>>> queue{start};
  while (!queue.empty()) {
    auto profile = queue.front();
    queue.pop_front();
    Int d = dist[profile];
    if (detail::condorcet_winner(profile, e.m(), c))
      return d;
    for (std::size_t k = 0; k < profile.size(); ++k)
      for (std::size_t p = 0; p + 1 < e.m(); ++p) {
        auto next = profile;
        std::swap(next[k][p], next[k][p + 1]);
        if (dist.emplace(next, d + 1).second)
          queue.push_back(std::move(next));
      }
  }
  throw std::logic_error("Dodgson search exhausted without a Condorcet winner");
}

/// Removal sets tried by increasing size; empty when none works.
inline std::optional<Int> oracle_young(const Election &e, std::size_t c,
                                       const OracleCaps &caps = {}) {
  if (e.m() > caps.candidates || e.voters.size() > caps.voters)
    throw ResourceError("oracle caps exceeded");
  std::vector<std::vector<std::size_t>> all;
  for (const auto &v : e.voters)
    if (v.active)
      all.push_back(vote::full_order(v, e.m()));
  const std::size_t n = all.size();
  for (std::size_t size = 0; size <= n; ++size) {
    std::vector<bool> removed(n, false);
    std::fill(removed.end() - static_cast<std::ptrdiff_t>(size), removed.end(), true);
    do {
      std::vector<std::vector<std::size_t>> rest;
      for (std::size_t k = 0; k < n; ++k)
        if (!removed[k])
          rest.push_back(all[k]);
      if (detail::condorcet_winner(rest, e.m(), c))
        return static_cast<Int>(size);
    } while (std::next_permutation(removed.begin(), removed.end()));
  }
  return std::nullopt;
}

} // namespace nfv::oracle
