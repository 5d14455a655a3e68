#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "nfv/election/election.hpp"

namespace nfv::vote {

struct PairwiseMatrix {
  std::size_t m = 0;
  std::vector<Int> counts;

  /// Active voters preferring a to b.
  [[nodiscard]] Int operator()(std::size_t a, std::size_t b) const { return counts[a * m + b]; }
};

inline std::size_t active_count(const Election &e) {
  return static_cast<std::size_t>(
      std::count_if(e.voters.begin(), e.voters.end(), [](const Voter &v) { return v.active; }));
}

/// Complete orders of the active voters, in voter order.
inline std::vector<std::vector<std::size_t>> active_orders(const Election &e) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t k = 0; k < e.voters.size(); ++k) {
    const Voter &v = e.voters[k];
    if (!v.active)
      continue;
    if (!is_complete(v, e.m()))
      throw InputError("voter " + std::to_string(k) + " has a truncated order; linearize first");
    out.push_back(full_order(v, e.m()));
  }
  return out;
}

inline PairwiseMatrix pairwise_matrix(const Election &e) {
  PairwiseMatrix pm{e.m(), std::vector<Int>(e.m() * e.m(), 0)};
  for (const auto &order : active_orders(e))
    for (std::size_t p = 0; p < order.size(); ++p)
      for (std::size_t q = p + 1; q < order.size(); ++q)
        ++pm.counts[order[p] * e.m() + order[q]];
  return pm;
}

struct Rational {
  Int p = 1;
  Int q = 2;
  friend bool operator==(const Rational &, const Rational &) = default;
};

enum class RuleKind { Scoring, Copeland, Maximin, Kemeny, Bucklin, SPAV, Fallback, Condorcet };

struct Rule {
  RuleKind kind = RuleKind::Scoring;
  std::vector<Int> scores; ///< Scoring only
  Rational alpha;          ///< Copeland only
  std::string name;

  /// Non-increasing, non-negative scores; s1 <= |C| unless unnatural is set.
  static Rule scoring(std::vector<Int> s, std::string name = "scoring", bool unnatural = false) {
    for (std::size_t p = 0; p < s.size(); ++p) {
      if (s[p] < 0)
        throw InputError("scoring vector entries must be non-negative");
      if (p > 0 && s[p] > s[p - 1])
        throw InputError("scoring vector must be non-increasing");
    }
    if (s.empty())
      throw InputError("empty scoring vector");
    if (!unnatural && s[0] > static_cast<Int>(s.size()))
      throw InputError("scoring vector is not natural (s1 > |C|)");
    Rule r;
    r.kind = RuleKind::Scoring;
    r.scores = std::move(s);
    r.name = std::move(name);
    return r;
  }

  static Rule copeland(Int p = 1, Int q = 2) {
    if (q <= 0 || p < 0 || p > q)
      throw InputError("Copeland alpha must be a rational in [0, 1]");
    Rule r;
    r.kind = RuleKind::Copeland;
    r.alpha = {p, q};
    r.name = "copeland";
    return r;
  }

  static Rule of(RuleKind k, std::string name) {
    Rule r;
    r.kind = k;
    r.name = std::move(name);
    return r;
  }
};

/// Fixed vocabulary: plurality, borda, veto, K-approval, scoring:S1,S2,..,
/// copeland (alpha 1/2), copeland:P/Q, maximin, kemeny, bucklin, spav,
/// fallback, condorcet.
inline Rule rule_from_name(const std::string &name, std::size_t m) {
  auto ints = [](const std::string &text) {
    std::vector<Int> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t next = text.find(',', pos);
      std::string tok = text.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
      try {
        std::size_t used = 0;
        out.push_back(std::stoll(tok, &used));
        if (used != tok.size())
          throw std::invalid_argument(tok);
      } catch (const std::exception &) {
        throw InputError("bad integer '" + tok + "' in rule name");
      }
      if (next == std::string::npos)
        break;
      pos = next + 1;
    }
    return out;
  };
  const Int mm = static_cast<Int>(m);
  if (name == "plurality") {
    std::vector<Int> s(m, 0);
    s[0] = 1;
    return Rule::scoring(s, name);
  }
  if (name == "borda") {
    std::vector<Int> s;
    for (Int p = mm - 1; p >= 0; --p)
      s.push_back(p);
    return Rule::scoring(s, name);
  }
  if (name == "veto") {
    std::vector<Int> s(m, 1);
    s.back() = 0;
    return Rule::scoring(s, name);
  }
  if (auto dash = name.find("-approval"); dash != std::string::npos && dash > 0 &&
                                          dash + 9 == name.size()) {
    Int k = ints(name.substr(0, dash)).at(0);
    if (k < 1 || k > mm)
      throw InputError("K-approval needs 1 <= K <= |C|");
    std::vector<Int> s(m, 0);
    std::fill(s.begin(), s.begin() + k, 1);
    return Rule::scoring(s, name);
  }
  if (name.rfind("scoring:", 0) == 0) {
    auto s = ints(name.substr(8));
    if (s.size() != m)
      throw InputError("scoring vector needs exactly |C| entries");
    return Rule::scoring(s, name);
  }
  if (name == "copeland")
    return Rule::copeland();
  if (name.rfind("copeland:", 0) == 0) {
    auto slash = name.find('/');
    if (slash == std::string::npos)
      throw InputError("copeland:P/Q expected");
    Rule r = Rule::copeland(ints(name.substr(9, slash - 9)).at(0), ints(name.substr(slash + 1)).at(0));
    r.name = name;
    return r;
  }
  static const std::map<std::string, RuleKind> plain = {
      {"maximin", RuleKind::Maximin}, {"kemeny", RuleKind::Kemeny},
      {"bucklin", RuleKind::Bucklin}, {"spav", RuleKind::SPAV},
      {"fallback", RuleKind::Fallback}, {"condorcet", RuleKind::Condorcet}};
  if (auto it = plain.find(name); it != plain.end())
    return Rule::of(it->second, name);
  throw InputError("unknown rule '" + name + "'");
}

inline const char *rule_vocabulary() {
  return "plurality, borda, veto, K-approval (e.g. 2-approval), scoring:S1,..,Sm, "
         "copeland, copeland:P/Q, maximin, kemeny, bucklin, spav, fallback, condorcet";
}

/// SP-AV and Fallback compare with <=, every other rule with <.
inline WinnerModel default_winner_model(const Rule &r) {
  return (r.kind == RuleKind::SPAV || r.kind == RuleKind::Fallback) ? WinnerModel::CoWinner
                                                                     : WinnerModel::Unique;
}

struct RuleConfig {
  std::size_t kemeny_cap = 6;
};

namespace detail {

inline std::vector<std::size_t> argmax(const std::vector<Int> &score) {
  std::vector<std::size_t> out;
  Int best = *std::max_element(score.begin(), score.end());
  for (std::size_t c = 0; c < score.size(); ++c)
    if (score[c] == best)
      out.push_back(c);
  return out;
}

/// Points from voters ranking c within their top min(k, approval) positions;
/// approval is ignored when use_approval is false.
inline std::vector<Int> truncated_scores(const Election &e, std::size_t k, bool use_approval) {
  std::vector<Int> score(e.m(), 0);
  for (const auto &v : e.voters) {
    if (!v.active)
      continue;
    auto order = full_order(v, e.m());
    std::size_t top = k;
    if (use_approval)
      top = std::min(top, static_cast<std::size_t>(v.approval));
    for (std::size_t p = 0; p < top && p < order.size(); ++p)
      ++score[order[p]];
  }
  return score;
}

} // namespace detail

inline std::vector<Int> scoring_scores(const Election &e, const std::vector<Int> &s) {
  if (s.size() != e.m())
    throw InputError("scoring vector length differs from |C|");
  std::vector<Int> score(e.m(), 0);
  for (const auto &order : active_orders(e))
    for (std::size_t p = 0; p < order.size(); ++p)
      score[order[p]] = checked_add(score[order[p]], s[p]);
  return score;
}

/// Copeland scores scaled by q: a pairwise win is worth q, a tie p.
inline std::vector<Int> copeland_scores(const PairwiseMatrix &pm, Rational alpha) {
  std::vector<Int> score(pm.m, 0);
  for (std::size_t a = 0; a < pm.m; ++a)
    for (std::size_t b = 0; b < pm.m; ++b)
      if (a != b) {
        if (pm(a, b) > pm(b, a))
          score[a] += alpha.q;
        else if (pm(a, b) == pm(b, a))
          score[a] += alpha.p;
      }
  return score;
}

/// Copeland winners for a relation given as +1 (a beats b), 0 (tie), -1.
inline std::vector<std::size_t> copeland_winners_of_relation(
    std::size_t m, const std::vector<std::vector<int>> &beats, Rational alpha) {
  std::vector<Int> score(m, 0);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      if (a != b)
        score[a] += beats[a][b] > 0 ? alpha.q : (beats[a][b] == 0 ? alpha.p : 0);
  return detail::argmax(score);
}

/// v*(c) = min over c' != c of v(c, c').
inline std::vector<Int> maximin_scores(const PairwiseMatrix &pm) {
  std::vector<Int> score(pm.m, 0);
  for (std::size_t a = 0; a < pm.m; ++a) {
    std::optional<Int> best;
    for (std::size_t b = 0; b < pm.m; ++b)
      if (a != b)
        best = best ? std::min(*best, pm(a, b)) : pm(a, b);
    score[a] = best.value_or(0);
  }
  return score;
}

struct BucklinResult {
  std::optional<std::size_t> round;
  std::vector<std::size_t> winners;
};

/// Least k where some k-approval score exceeds half of the active voters.
inline BucklinResult bucklin(const Election &e) {
  active_orders(e);
  const Int n = static_cast<Int>(active_count(e));
  for (std::size_t k = 1; k <= e.m() && n > 0; ++k) {
    auto score = detail::truncated_scores(e, k, false);
    if (2 * *std::max_element(score.begin(), score.end()) > n)
      return {k, detail::argmax(score)};
  }
  return {};
}

inline std::vector<Int> spav_scores(const Election &e) {
  active_orders(e);
  return detail::truncated_scores(e, e.m(), true);
}

/// Bucklin over the approved prefixes; round is empty when it falls back
/// to SP-AV.
inline BucklinResult fallback(const Election &e) {
  active_orders(e);
  const Int n = static_cast<Int>(active_count(e));
  for (std::size_t k = 1; k <= e.m(); ++k) {
    auto score = detail::truncated_scores(e, k, true);
    if (2 * *std::max_element(score.begin(), score.end()) > n)
      return {k, detail::argmax(score)};
  }
  return {std::nullopt, detail::argmax(spav_scores(e))};
}

/// Agreement of ranking r with the active voters: pairs it orders as they do.
inline Int kemeny_agreement(const PairwiseMatrix &pm, const std::vector<std::size_t> &r) {
  Int total = 0;
  for (std::size_t p = 0; p < r.size(); ++p)
    for (std::size_t q = p + 1; q < r.size(); ++q)
      total += pm(r[p], r[q]);
  return total;
}

inline std::vector<std::size_t> kemeny_winners(const Election &e, const RuleConfig &cfg = {}) {
  if (e.m() > cfg.kemeny_cap)
    throw ResourceError("Kemeny with " + std::to_string(e.m()) + " candidates exceeds the cap of " +
                        std::to_string(cfg.kemeny_cap));
  auto pm = pairwise_matrix(e);
  std::vector<std::size_t> r(e.m());
  std::iota(r.begin(), r.end(), 0);
  std::optional<Int> best;
  std::vector<bool> top(e.m(), false);
  do {
    Int a = kemeny_agreement(pm, r);
    if (!best || a > *best) {
      best = a;
      std::fill(top.begin(), top.end(), false);
    }
    if (a == *best)
      top[r[0]] = true;
  } while (std::next_permutation(r.begin(), r.end()));
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < e.m(); ++c)
    if (top[c])
      out.push_back(c);
  return out;
}

inline bool is_condorcet_winner(const PairwiseMatrix &pm, std::size_t c) {
  for (std::size_t d = 0; d < pm.m; ++d)
    if (d != c && pm(c, d) <= pm(d, c))
      return false;
  return true;
}

/// Winner set, sorted by candidate index.
inline std::vector<std::size_t> winners(const Election &e, const Rule &rule,
                                        const RuleConfig &cfg = {}) {
  switch (rule.kind) {
  case RuleKind::Scoring:
    return detail::argmax(scoring_scores(e, rule.scores));
  case RuleKind::Copeland:
    return detail::argmax(copeland_scores(pairwise_matrix(e), rule.alpha));
  case RuleKind::Maximin:
    return detail::argmax(maximin_scores(pairwise_matrix(e)));
  case RuleKind::Kemeny:
    return kemeny_winners(e, cfg);
  case RuleKind::Bucklin:
    return bucklin(e).winners;
  case RuleKind::SPAV:
    return detail::argmax(spav_scores(e));
  case RuleKind::Fallback:
    return fallback(e).winners;
  case RuleKind::Condorcet: {
    auto pm = pairwise_matrix(e);
    for (std::size_t c = 0; c < e.m(); ++c)
      if (is_condorcet_winner(pm, c))
        return {c};
    return {};
  }
  }
  return {};
}

inline bool wins(const std::vector<std::size_t> &w, std::size_t c, WinnerModel model) {
  bool member = std::find(w.begin(), w.end(), c) != w.end();
  return member && (model == WinnerModel::CoWinner || w.size() == 1);
}

/// Whether the designated candidate wins; Condorcet always needs a unique winner.
inline bool designated_wins(const Election &e, const Rule &rule, WinnerModel model,
                            const RuleConfig &cfg = {}) {
  return wins(winners(e, rule, cfg), e.designated, model);
}

struct ScoreCaps {
  std::size_t candidates = 5;
  std::size_t voters = 8;
};

/// Fewest adjacent swaps after which c is the Condorcet winner. Exhaustive
/// over per-voter target orders, merged by the resulting margins against c.
inline Int dodgson_score(const Election &e, std::size_t c, const ScoreCaps &caps = {}) {
  const std::size_t m = e.m();
  if (m > caps.candidates || e.voters.size() > caps.voters)
    throw ResourceError("Dodgson score beyond the enumeration caps");
  auto orders = active_orders(e);
  // state: for every d != c, number of voters preferring c to d
  std::map<std::vector<Int>, Int> best{{std::vector<Int>(m, 0), 0}};
  std::vector<std::size_t> target(m);
  for (const auto &order : orders) {
    std::map<std::vector<Int>, Int> next;
    std::iota(target.begin(), target.end(), 0);
    do {
      Int dist = static_cast<Int>(inversion_set(order, target).size());
      auto rank = ranks_of(target);
      for (const auto &[state, cost] : best) {
        auto s = state;
        for (std::size_t d = 0; d < m; ++d)
          if (d != c && rank[c] < rank[d])
            ++s[d];
        auto it = next.find(s);
        if (it == next.end() || cost + dist < it->second)
          next[s] = cost + dist;
      }
    } while (std::next_permutation(target.begin(), target.end()));
    best = std::move(next);
  }
  const Int n = static_cast<Int>(orders.size());
  std::optional<Int> out;
  for (const auto &[state, cost] : best) {
    bool ok = true;
    for (std::size_t d = 0; d < m; ++d)
      ok = ok && (d == c || 2 * state[d] > n);
    if (ok && (!out || cost < *out))
      out = cost;
  }
  if (!out)
    throw std::logic_error("no Dodgson target found");
  return *out;
}

/// Fewest active voters to remove so that c is the Condorcet winner of the
/// rest; empty when no subset works.
inline std::optional<Int> young_score(const Election &e, std::size_t c, const ScoreCaps &caps = {}) {
  if (e.m() > caps.candidates || e.voters.size() > caps.voters)
    throw ResourceError("Young score beyond the enumeration caps");
  auto orders = active_orders(e);
  const std::size_t n = orders.size();
  std::optional<Int> best;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    Int removed = __builtin_popcountll(mask);
    if (best && removed >= *best)
      continue;
    Election rest;
    rest.candidates = e.candidates;
    rest.designated = c;
    for (std::size_t k = 0; k < n; ++k)
      if (!(mask >> k & 1))
        rest.voters.push_back(default_voter(e.m(), orders[k]));
    if (is_condorcet_winner(pairwise_matrix(rest), c))
      best = removed;
  }
  return best;
}

} // namespace nfv::vote
