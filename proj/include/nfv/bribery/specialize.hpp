#pragma once

#include <map>
#include <string>

#include "nfv/election/election.hpp"
#include "nfv/election/rules.hpp"

namespace nfv::bribery {

enum class Problem {
  Multi,
  Swap,
  Shift,
  Support,
  Mixed,
  Dollar,
  Manipulation,
  Ccav,
  Ccdv,
  Extension,
  PossibleWinner,
  Dodgson,
  Young
};

inline const std::map<std::string, Problem> &problem_names() {
  static const std::map<std::string, Problem> names = {
      {"multi", Problem::Multi},
      {"swap", Problem::Swap},
      {"shift", Problem::Shift},
      {"support", Problem::Support},
      {"mixed", Problem::Mixed},
      {"dollar", Problem::Dollar},
      {"manipulation", Problem::Manipulation},
      {"ccav", Problem::Ccav},
      {"ccdv", Problem::Ccdv},
      {"extension", Problem::Extension},
      {"possible-winner", Problem::PossibleWinner},
      {"dodgson", Problem::Dodgson},
      {"young", Problem::Young}};
  return names;
}

inline Problem parse_problem(const std::string &name) {
  auto it = problem_names().find(name);
  if (it == problem_names().end())
    throw InputError("unknown problem '" + name + "'");
  return it->second;
}

struct Specialized {
  vote::Election election;
  vote::Rule rule;
};

namespace detail {

inline void forbid_push(vote::Voter &v) {
  for (auto &p : v.push)
    p = vote::Cost::forbidden();
  v.push[static_cast<std::size_t>(v.approval)] = 0;
}

inline void fill_swap(vote::Voter &v, const vote::Cost &c) {
  for (std::size_t a = 0; a < v.swap.size(); ++a)
    for (std::size_t b = 0; b < v.swap.size(); ++b)
      if (a != b)
        v.swap[a][b] = c;
}

/// sigma = 0 between two unranked candidates, Forbidden otherwise. Must run
/// on the voter before linearization.
inline void free_among_unranked(vote::Voter &lin, const vote::Voter &orig, std::size_t m) {
  std::vector<bool> ranked(m, false);
  for (std::size_t p = 0; p < orig.ranked(); ++p)
    ranked[orig.order[p]] = true;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      if (a != b)
        lin.swap[a][b] = (!ranked[a] && !ranked[b]) ? vote::Cost(0) : vote::Cost::forbidden();
}

} // namespace detail

/// Multi-Bribery instance of a named bribery problem. Prices of $Bribery are read
/// from the influence costs, manipulators are the voters with nothing
/// ranked, and Extension Bribery takes approval-top-truncated orders whose
/// push costs are the extension costs.
inline Specialized specialize(Problem problem, const vote::Election &instance,
                              const vote::Rule &rule) {
  using vote::Cost;
  vote::validate(instance);
  const std::size_t m = instance.m();
  const Cost never = Cost::forbidden();
  Specialized out{vote::linearize(instance), rule};
  auto &voters = out.election.voters;
  auto require_complete = [&](const char *what) {
    for (const auto &v : instance.voters)
      if (!vote::is_complete(v, m))
        throw InputError(std::string(what) + " needs complete orders");
  };
  auto no_control = [&](vote::Voter &v) {
    v.activate = never;
    v.deactivate = never;
  };

  switch (problem) {
  case Problem::Multi:
    break;
  case Problem::Swap:
  case Problem::Shift:
    require_complete("swap bribery");
    for (auto &v : voters) {
      detail::forbid_push(v);
      no_control(v);
      v.influence = 0;
      if (problem == Problem::Shift)
        for (std::size_t a = 0; a < m; ++a)
          for (std::size_t b = 0; b < m; ++b)
            if (a != b && a != instance.designated && b != instance.designated)
              v.swap[a][b] = never;
    }
    break;
  case Problem::Support:
    for (auto &v : voters) {
      detail::fill_swap(v, never);
      no_control(v);
      v.influence = 0;
    }
    break;
  case Problem::Mixed:
    require_complete("mixed bribery");
    for (auto &v : voters) {
      no_control(v);
      v.influence = 0;
    }
    break;
  case Problem::Dollar:
    require_complete("$bribery");
    for (auto &v : voters) {
      detail::fill_swap(v, 0);
      detail::forbid_push(v);
      no_control(v);
    }
    break;
  case Problem::Manipulation:
    for (std::size_t k = 0; k < voters.size(); ++k) {
      auto &v = voters[k];
      const bool manipulator = instance.voters[k].ranked() == 0;
      if (!manipulator && !vote::is_complete(instance.voters[k], m))
        throw InputError("manipulation: non-manipulators need complete orders");
      detail::fill_swap(v, 0);
      detail::forbid_push(v);
      no_control(v);
      v.influence = manipulator ? Cost(0) : never;
    }
    break;
  case Problem::Ccav:
  case Problem::Ccdv:
    require_complete("control");
    for (auto &v : voters) {
      detail::fill_swap(v, never);
      detail::forbid_push(v);
      v.influence = 0;
      if (problem == Problem::Ccav)
        v.deactivate = never;
      else
        v.activate = never;
    }
    break;
  case Problem::Extension:
    for (std::size_t k = 0; k < voters.size(); ++k) {
      auto &v = voters[k];
      const auto &orig = instance.voters[k];
      if (static_cast<Int>(orig.ranked()) != orig.approval)
        throw InputError("extension bribery needs approval-top-truncated orders");
      detail::free_among_unranked(v, orig, m);
      for (Int j = -orig.approval; j < 0; ++j)
        v.push[static_cast<std::size_t>(j + orig.approval)] = never;
      no_control(v);
      v.influence = 0;
    }
    break;
  case Problem::PossibleWinner:
    for (std::size_t k = 0; k < voters.size(); ++k) {
      auto &v = voters[k];
      detail::free_among_unranked(v, instance.voters[k], m);
      detail::forbid_push(v);
      no_control(v);
      v.influence = 0;
    }
    break;
  case Problem::Dodgson:
    require_complete("Dodgson score");
    out.rule = vote::Rule::of(vote::RuleKind::Condorcet, "condorcet");
    for (auto &v : voters) {
      detail::fill_swap(v, 1);
      detail::forbid_push(v);
      no_control(v);
      v.influence = 0;
    }
    break;
  case Problem::Young:
    require_complete("Young score");
    out.rule = vote::Rule::of(vote::RuleKind::Condorcet, "condorcet");
    for (auto &v : voters) {
      detail::fill_swap(v, never);
      detail::forbid_push(v);
      v.influence = 0;
      v.activate = never;
      v.deactivate = 1;
    }
    break;
  }
  return out;
}

} // namespace nfv::bribery
