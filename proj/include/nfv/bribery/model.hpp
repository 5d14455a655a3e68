#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nfv/election/election.hpp"
#include "nfv/election/rules.hpp"
#include "nfv/extended.hpp"

namespace nfv::bribery {

using ext::Expr;
using ext::ExtendedProgram;
using ext::Relation;
using vote::Cost;
using vote::Election;
using vote::Rule;
using vote::RuleKind;
using vote::WinnerModel;

/// Declared-variable indices of one voter brick (identical in every brick).
struct CommonBlockLayout {
  std::size_t m = 0;
  std::vector<std::size_t> rank;                       ///< x_c in 1..m
  std::map<vote::CandidatePair, std::size_t> swap;     ///< s_{c,c'}, c < c'
  std::vector<std::vector<std::size_t>> order;         ///< x_(c,c'): c above c' afterwards
  std::vector<std::size_t> push;                       ///< p_j at index j + m, j in -m..m
  std::size_t approval = 0;                            ///< x_alpha
  std::size_t influence = 0;                           ///< x_iota
  std::size_t active = 0;                              ///< x_a
  std::size_t latent = 0;                              ///< x_l

  [[nodiscard]] std::size_t push_var(Int j) const {
    return push.at(static_cast<std::size_t>(j + static_cast<Int>(m)));
  }
};

struct BriberyModel {
  ExtendedProgram program;
  CommonBlockLayout layout;
};

/// Per-voter bricks with the permutation, swap, order, push, influence and
/// control constraints and the cost objective. Forbidden costs fix the
/// corresponding variable to 0.
inline BriberyModel build_common(const Election &e) {
  vote::validate(e);
  if (!vote::is_linear(e))
    throw InputError("bribery models need linear orders; linearize first");
  if (e.voters.empty())
    throw InputError("bribery models need at least one voter");
  const std::size_t m = e.m(), n = e.voters.size();
  const Int mm = static_cast<Int>(m);
  BriberyModel bm{ExtendedProgram(n), {}};
  auto &ep = bm.program;
  auto &L = bm.layout;
  L.m = m;

  for (std::size_t c = 0; c < m; ++c)
    L.rank.push_back(ep.add_variable("rank" + std::to_string(c), 1, mm));
  ext::add_permutation_block(ep, L.rank);

  std::vector<std::vector<Int>> reference;
  for (const auto &v : e.voters) {
    auto r = vote::ranks_of(v.order);
    reference.emplace_back(r.begin(), r.end());
  }
  auto inv = ext::add_inversion_indicators(ep, L.rank, reference, "swap");
  for (const auto &[pair, var] : inv.vars) {
    L.swap[pair] = var;
    ep.names[var] = "swap" + std::to_string(pair.first) + "_" + std::to_string(pair.second);
    for (std::size_t i = 0; i < n; ++i) {
      const auto &v = e.voters[i];
      auto [a, b] = pair;
      const Cost &c = reference[i][a] < reference[i][b] ? v.swap[a][b] : v.swap[b][a];
      if (c.is_forbidden())
        ep.set_bounds(var, i, 0, 0);
      else
        ep.set_weight(var, i, c.value());
    }
  }

  L.order.assign(m, std::vector<std::size_t>(m, 0));
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      if (a != b) {
        std::size_t x = ep.add_variable("ord" + std::to_string(a) + "_" + std::to_string(b), 0, 1);
        L.order[a][b] = x;
        ep.add_local(ext::var(x) - ext::bool_m(mm, Relation::Lt, ext::var(L.rank[a]),
                                               ext::var(L.rank[b])),
                     Relation::Eq, 0);
      }

  std::vector<std::pair<Int, Expr>> one, shift;
  for (Int j = -mm; j <= mm; ++j) {
    std::size_t p = ep.add_variable("push" + std::string(j < 0 ? "" : "+") + std::to_string(j), 0, 1);
    L.push.push_back(p);
    for (std::size_t i = 0; i < n; ++i) {
      const auto &v = e.voters[i];
      if (!v.push_in_domain(j) || v.pi(j).is_forbidden())
        ep.set_bounds(p, i, 0, 0);
      else
        ep.set_weight(p, i, v.pi(j).value());
    }
    one.emplace_back(1, ext::var(p));
    if (j != 0)
      shift.emplace_back(-j, ext::var(p));
  }
  ep.add_local(ext::lin(one), Relation::Eq, 1);
  L.approval = ep.add_variable("approval", 0, mm);
  shift.emplace_back(1, ext::var(L.approval));
  std::vector<Int> approvals;
  for (const auto &v : e.voters)
    approvals.push_back(v.approval);
  ep.add_local(ext::lin(shift), Relation::Eq, approvals);

  L.influence = ep.add_variable("influence", 0, 1);
  std::vector<std::pair<Int, Expr>> touched;
  for (const auto &[pair, var] : L.swap)
    touched.emplace_back(1, ext::var(var));
  for (Int j = -mm; j <= mm; ++j)
    if (j != 0)
      touched.emplace_back(1, ext::var(L.push_var(j)));
  ep.add_local(ext::var(L.influence) - ext::bool_m(mm * mm, ext::lin(touched)), Relation::Eq, 0);

  L.active = ep.add_variable("active", 0, 1);
  L.latent = ep.add_variable("latent", 0, 1);
  ep.add_local(ext::var(L.active) + ext::var(L.latent), Relation::Eq, 1);

  for (std::size_t i = 0; i < n; ++i) {
    const auto &v = e.voters[i];
    if (v.influence.is_forbidden())
      ep.set_bounds(L.influence, i, 0, 0);
    else
      ep.set_weight(L.influence, i, v.influence.value());
    // alpha is charged to latent voters that become active, delta to active
    // voters that become latent
    std::size_t flip = v.active ? L.latent : L.active;
    const Cost &c = v.active ? v.deactivate : v.activate;
    if (c.is_forbidden())
      ep.set_bounds(flip, i, 0, 0);
    else
      ep.set_weight(flip, i, c.value());
  }
  return bm;
}

struct NoGuess {
  friend bool operator==(const NoGuess &, const NoGuess &) = default;
};
/// outcome[a][b] = +1 if a beats b, 0 on a tie, -1 if b beats a.
struct C1Relation {
  std::vector<std::vector<int>> outcome;
  friend bool operator==(const C1Relation &, const C1Relation &) = default;
};
struct MaximinGuess {
  Int bound = 0;
  std::vector<std::size_t> defeater; ///< ignored at the designated candidate
  friend bool operator==(const MaximinGuess &, const MaximinGuess &) = default;
};
struct BucklinGuess {
  Int active = 1;
  std::size_t round = 1;
  friend bool operator==(const BucklinGuess &, const BucklinGuess &) = default;
};
/// round empty: Bucklin fails on every round and SP-AV decides.
struct FallbackGuess {
  Int active = 0;
  std::optional<std::size_t> round;
  friend bool operator==(const FallbackGuess &, const FallbackGuess &) = default;
};
struct KemenyGuess {
  std::vector<std::size_t> ranking;
  friend bool operator==(const KemenyGuess &, const KemenyGuess &) = default;
};

using Guess =
    std::variant<NoGuess, C1Relation, MaximinGuess, BucklinGuess, FallbackGuess, KemenyGuess>;

inline std::string describe(const Guess &g, const Election &e) {
  const auto &names = e.candidates;
  return std::visit(
      [&](const auto &x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NoGuess>) {
          return "none";
        } else if constexpr (std::is_same_v<T, C1Relation>) {
          std::string s = "relation";
          for (std::size_t a = 0; a < names.size(); ++a)
            for (std::size_t b = a + 1; b < names.size(); ++b) {
              int o = x.outcome[a][b];
              s += " " + names[a] + (o > 0 ? ">" : (o < 0 ? "<" : "=")) + names[b];
            }
          return s;
        } else if constexpr (std::is_same_v<T, MaximinGuess>) {
          std::string s = "maximin B=" + std::to_string(x.bound);
          for (std::size_t c = 0; c < names.size(); ++c)
            if (c != e.designated)
              s += " d(" + names[c] + ")=" + names[x.defeater[c]];
          return s;
        } else if constexpr (std::is_same_v<T, BucklinGuess>) {
          return "bucklin active=" + std::to_string(x.active) + " round=" +
                 std::to_string(x.round);
        } else if constexpr (std::is_same_v<T, FallbackGuess>) {
          return "fallback active=" + std::to_string(x.active) +
                 (x.round ? " round=" + std::to_string(*x.round) : std::string(" spav"));
        } else {
          std::string s = "kemeny";
          for (std::size_t c : x.ranking)
            s += " " + names[c];
          return s;
        }
      },
      g);
}

/// The winner model a run uses: explicit choice, then the election's, then
/// the rule default. Condorcet always needs a unique winner.
inline WinnerModel effective_model(const Election &e, const Rule &rule,
                                   std::optional<WinnerModel> requested = std::nullopt) {
  if (rule.kind == RuleKind::Condorcet)
    return WinnerModel::Unique;
  if (requested)
    return *requested;
  if (e.winner_model)
    return *e.winner_model;
  return vote::default_winner_model(rule);
}

/// Complete guess space in lexicographic order. C1 relations are kept only
/// if c* wins the rule on them.
inline std::vector<Guess> enumerate_guesses(const Election &e, const Rule &rule,
                                            WinnerModel model,
                                            const vote::RuleConfig &cfg = {}) {
  const std::size_t m = e.m(), cstar = e.designated;
  const Int n = static_cast<Int>(e.voters.size());
  std::vector<Guess> out;
  switch (rule.kind) {
  case RuleKind::Scoring:
  case RuleKind::SPAV:
  case RuleKind::Condorcet:
    out.emplace_back(NoGuess{});
    break;
  case RuleKind::Copeland: {
    std::vector<vote::CandidatePair> pairs;
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = a + 1; b < m; ++b)
        pairs.emplace_back(a, b);
    std::vector<int> digit(pairs.size(), -1);
    for (;;) {
      C1Relation rel{std::vector<std::vector<int>>(m, std::vector<int>(m, 0))};
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        rel.outcome[pairs[p].first][pairs[p].second] = digit[p];
        rel.outcome[pairs[p].second][pairs[p].first] = -digit[p];
      }
      if (vote::wins(vote::copeland_winners_of_relation(m, rel.outcome, rule.alpha), cstar, model))
        out.emplace_back(std::move(rel));
      std::size_t p = pairs.size();
      while (p > 0 && digit[p - 1] == 1)
        digit[--p] = -1;
      if (p == 0)
        break;
      ++digit[p - 1];
    }
    break;
  }
  case RuleKind::Maximin: {
    std::vector<std::size_t> others;
    for (std::size_t c = 0; c < m; ++c)
      if (c != cstar)
        others.push_back(c);
    for (Int bound = 0; bound <= n; ++bound) {
      std::vector<std::size_t> d(m, cstar);
      auto first_choice = [&](std::size_t c) { return c == 0 ? std::size_t{1} : std::size_t{0}; };
      for (std::size_t c : others)
        d[c] = first_choice(c);
      for (;;) {
        out.emplace_back(MaximinGuess{bound, d});
        // odometer over d(c) != c, last candidate fastest
        std::size_t p = others.size();
        bool done = true;
        while (p > 0) {
          std::size_t c = others[p - 1];
          std::size_t next = d[c] + 1;
          if (next == c)
            ++next;
          if (next < m) {
            d[c] = next;
            done = false;
            break;
          }
          d[c] = first_choice(c);
          --p;
        }
        if (done)
          break;
      }
    }
    break;
  }
  case RuleKind::Bucklin:
    for (Int a = 1; a <= n; ++a)
      for (std::size_t k = 1; k <= m; ++k)
        out.emplace_back(BucklinGuess{a, k});
    break;
  case RuleKind::Fallback:
    for (Int a = 0; a <= n; ++a) {
      for (std::size_t k = 1; a > 0 && k <= m; ++k)
        out.emplace_back(FallbackGuess{a, k});
      out.emplace_back(FallbackGuess{a, std::nullopt});
    }
    break;
  case RuleKind::Kemeny: {
    if (m > cfg.kemeny_cap)
      throw ResourceError("Kemeny with " + std::to_string(m) + " candidates exceeds the cap");
    std::vector<std::size_t> rest;
    for (std::size_t c = 0; c < m; ++c)
      if (c != cstar)
        rest.push_back(c);
    do {
      std::vector<std::size_t> r{cstar};
      r.insert(r.end(), rest.begin(), rest.end());
      out.emplace_back(KemenyGuess{r});
    } while (std::next_permutation(rest.begin(), rest.end()));
    break;
  }
  }
  return out;
}

namespace detail {

/// Adds rule variables and global rows to a common model.
class RuleBuilder {
public:
  RuleBuilder(BriberyModel &bm, const Election &e, WinnerModel model)
      : ep_(bm.program), L_(bm.layout), e_(e), model_(model),
        mm_(static_cast<Int>(bm.layout.m)) {}

  /// Declared y in [lo, hi] with the local row y - expr = 0.
  std::size_t define(const std::string &name, const Expr &expr, Int lo, Int hi) {
    std::size_t y = ep_.add_variable(name, lo, hi);
    ep_.add_local(ext::var(y) - expr, Relation::Eq, 0);
    return y;
  }

  /// Active copy y^{x_a}, memoized per variable.
  Expr active(std::size_t y) {
    if (auto it = split_.find(y); it != split_.end())
      return it->second;
    Expr v = ext::split_by_bit(ep_, y, L_.active).value;
    split_.emplace(y, v);
    return v;
  }

  Expr rank(std::size_t c) const { return ext::var(L_.rank[c]); }

  /// bool_m(x_c <= k) for a constant k.
  Expr within(std::size_t c, Int k) const {
    return ext::bool_m(mm_, Relation::Le, rank(c), ext::constant(k));
  }

  /// bool_m(x_c <= x_alpha).
  Expr approved(std::size_t c) const {
    return ext::bool_m(mm_, Relation::Le, rank(c), ext::var(L_.approval));
  }

  /// Global comparison of active score sums: sum tau_c < or <= sum tau_{c*}.
  void compare(const std::vector<Expr> &score) {
    const std::size_t cstar = e_.designated;
    for (std::size_t c = 0; c < score.size(); ++c)
      if (c != cstar)
        ep_.add_global(score[c] - score[cstar],
                       model_ == WinnerModel::Unique ? Relation::Lt : Relation::Le, 0);
  }

  /// Active scores from per-brick expressions with values in [lo, hi].
  std::vector<Expr> scores(const std::string &prefix, const std::vector<Expr> &tau, Int lo,
                           Int hi) {
    std::vector<Expr> out;
    for (std::size_t c = 0; c < tau.size(); ++c)
      out.push_back(active(define(prefix + std::to_string(c), tau[c], lo, hi)));
    return out;
  }

  /// Majority in round k, no majority in round k - 1, and the active count.
  void bucklin_rows(const std::vector<Expr> &now, const std::vector<Expr> *before, Int active) {
    ep_.add_global(2 * now[e_.designated], Relation::Gt, active);
    compare(now);
    if (before)
      for (const auto &s : *before)
        ep_.add_global(2 * s, Relation::Le, active);
    ep_.add_global(ext::var(L_.active), Relation::Eq, active);
  }

  void scoring(const Rule &rule) {
    std::vector<Expr> tau;
    for (std::size_t c = 0; c < L_.m; ++c) {
      std::vector<std::pair<Int, Expr>> terms;
      for (std::size_t k = 0; k < L_.m; ++k)
        if (rule.scores[k] != 0)
          terms.emplace_back(rule.scores[k], ext::bool_m(mm_, Relation::Eq, rank(c),
                                                         ext::constant(static_cast<Int>(k) + 1)));
      tau.push_back(terms.empty() ? ext::constant(0) : ext::lin(terms));
    }
    compare(scores("tau", tau, rule.scores.back(), rule.scores.front()));
  }

  void c1(const C1Relation &g) {
    for (std::size_t a = 0; a < L_.m; ++a)
      for (std::size_t b = a + 1; b < L_.m; ++b) {
        Expr diff = pair_active(a, b) - pair_active(b, a);
        int o = g.outcome.at(a).at(b);
        ep_.add_global(o > 0 ? diff : (o < 0 ? -1 * diff : diff),
                       o == 0 ? Relation::Eq : Relation::Gt, 0);
      }
  }

  void maximin(const MaximinGuess &g) {
    const std::size_t cstar = e_.designated;
    for (std::size_t c = 0; c < L_.m; ++c) {
      if (c == cstar)
        continue;
      std::size_t d = g.defeater.at(c);
      if (d == c || d >= L_.m)
        throw InputError("maximin defeater must differ from its candidate");
      ep_.add_global(pair_active(cstar, c), Relation::Ge, g.bound);
      ep_.add_global(pair_active(c, d),
                     model_ == WinnerModel::Unique ? Relation::Lt : Relation::Le, g.bound);
    }
  }

  void bucklin(const BucklinGuess &g) {
    const Int k = static_cast<Int>(g.round);
    std::vector<Expr> tau, tau_before;
    for (std::size_t c = 0; c < L_.m; ++c) {
      tau.push_back(within(c, k));
      if (k > 1)
        tau_before.push_back(within(c, k - 1));
    }
    auto now = scores("tau", tau, 0, 1);
    if (k > 1) {
      auto before = scores("taub", tau_before, 0, 1);
      bucklin_rows(now, &before, g.active);
    } else {
      bucklin_rows(now, nullptr, g.active);
    }
  }

  void spav() {
    std::vector<Expr> tau;
    for (std::size_t c = 0; c < L_.m; ++c)
      tau.push_back(approved(c));
    compare(scores("tau", tau, 0, 1));
  }

  void fallback(const FallbackGuess &g) {
    std::vector<Expr> appr;
    for (std::size_t c = 0; c < L_.m; ++c)
      appr.push_back(approved(c));
    if (!g.round) {
      auto now = scores("tau", appr, 0, 1);
      for (const auto &s : now)
        ep_.add_global(2 * s, Relation::Le, g.active);
      compare(now);
      ep_.add_global(ext::var(L_.active), Relation::Eq, g.active);
      return;
    }
    const Int k = static_cast<Int>(*g.round);
    std::vector<Expr> tau, tau_before;
    for (std::size_t c = 0; c < L_.m; ++c) {
      tau.push_back(ext::logical_and(within(c, k), appr[c]));
      if (k > 1)
        tau_before.push_back(ext::logical_and(within(c, k - 1), appr[c]));
    }
    auto now = scores("tau", tau, 0, 1);
    if (k > 1) {
      auto before = scores("taub", tau_before, 0, 1);
      bucklin_rows(now, &before, g.active);
    } else {
      bucklin_rows(now, nullptr, g.active);
    }
  }

  void kemeny(const KemenyGuess &g) {
    const std::size_t m = L_.m;
    if (g.ranking.size() != m || g.ranking.front() != e_.designated)
      throw InputError("Kemeny guess must rank the designated candidate first");
    auto disagreement = [&](const std::vector<std::size_t> &r, const std::string &name) {
      auto pos = vote::ranks_of(r);
      std::vector<std::pair<Int, Expr>> terms;
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
          if (a != b) {
            Int ref = pos[b] > pos[a] ? 1 : -1;
            Expr sign = ext::sgn_m(mm_, rank(a) - rank(b));
            terms.emplace_back(1, ext::bool_m(2, Relation::Eq, sign, ext::constant(ref)));
          }
      Expr sum = terms.empty() ? ext::constant(0) : ext::lin(terms);
      return active(define(name, sum, 0, mm_ * (mm_ - 1)));
    };
    Expr star = disagreement(g.ranking, "kemstar");
    std::vector<std::size_t> r(m);
    std::iota(r.begin(), r.end(), 0);
    std::size_t idx = 0;
    do {
      if (r.front() == e_.designated)
        continue;
      Expr other = disagreement(r, "kem" + std::to_string(idx++));
      ep_.add_global(other - star,
                     model_ == WinnerModel::Unique ? Relation::Gt : Relation::Ge, 0);
    } while (std::next_permutation(r.begin(), r.end()));
  }

  void condorcet() {
    const std::size_t cstar = e_.designated;
    for (std::size_t c = 0; c < L_.m; ++c)
      if (c != cstar)
        ep_.add_global(pair_active(cstar, c) - pair_active(c, cstar), Relation::Gt, 0);
  }

private:
  Expr pair_active(std::size_t a, std::size_t b) { return active(L_.order[a][b]); }

  ExtendedProgram &ep_;
  const CommonBlockLayout &L_;
  const Election &e_;
  WinnerModel model_;
  Int mm_;
  std::map<std::size_t, Expr> split_;
};

} // namespace detail

/// Adds the rule's variables and global rows for one guess.
inline void build_rule(BriberyModel &bm, const Election &e, const Rule &rule, const Guess &guess,
                       WinnerModel model, const vote::RuleConfig &cfg = {}) {
  detail::RuleBuilder rb(bm, e, model);
  auto expect = [&](auto *ptr) {
    if (!ptr)
      throw InputError("guess does not match rule '" + rule.name + "'");
    return ptr;
  };
  switch (rule.kind) {
  case RuleKind::Scoring:
    expect(std::get_if<NoGuess>(&guess));
    if (rule.scores.size() != e.m())
      throw InputError("scoring vector length differs from |C|");
    rb.scoring(rule);
    break;
  case RuleKind::Copeland:
    rb.c1(*expect(std::get_if<C1Relation>(&guess)));
    break;
  case RuleKind::Maximin:
    rb.maximin(*expect(std::get_if<MaximinGuess>(&guess)));
    break;
  case RuleKind::Bucklin:
    rb.bucklin(*expect(std::get_if<BucklinGuess>(&guess)));
    break;
  case RuleKind::SPAV:
    expect(std::get_if<NoGuess>(&guess));
    rb.spav();
    break;
  case RuleKind::Fallback:
    rb.fallback(*expect(std::get_if<FallbackGuess>(&guess)));
    break;
  case RuleKind::Kemeny:
    if (e.m() > cfg.kemeny_cap)
      throw ResourceError("Kemeny with " + std::to_string(e.m()) + " candidates exceeds the cap");
    rb.kemeny(*expect(std::get_if<KemenyGuess>(&guess)));
    break;
  case RuleKind::Condorcet:
    expect(std::get_if<NoGuess>(&guess));
    rb.condorcet();
    break;
  }
}

/// Common block plus rule block for one guess.
inline BriberyModel build_model(const Election &e, const Rule &rule, const Guess &guess,
                                WinnerModel model, const vote::RuleConfig &cfg = {}) {
  BriberyModel bm = build_common(e);
  build_rule(bm, e, rule, guess, model, cfg);
  return bm;
}

} // namespace nfv::bribery
