#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nfv/bribery/model.hpp"
#include "nfv/core/solver.hpp"

namespace nfv::bribery {

using vote::ActionSet;

struct GuessLog {
  Guess guess;
  std::string outcome; ///< solver outcome: infeasible, unbounded or optimal V
  std::optional<Int> cost;
};

struct BriberyOutcome {
  std::optional<Int> cost; ///< empty: no guess admits a solution
  ActionSet actions;
  std::optional<Guess> guess;
  WinnerModel model = WinnerModel::Unique;
  std::vector<GuessLog> log;
};

struct BriberyOptions {
  std::optional<WinnerModel> model;
  vote::RuleConfig rules;
  SolverConfig solver;
};

/// Reads the action set off a feasible assignment of the declared variables
/// (x[brick][var]).
inline ActionSet decode(const std::vector<std::vector<Int>> &x, const CommonBlockLayout &L,
                        const Election &e) {
  if (x.size() != e.voters.size())
    throw DecodingError("assignment has " + std::to_string(x.size()) + " bricks, election has " +
                        std::to_string(e.voters.size()) + " voters");
  ActionSet out = ActionSet::none(e.voters.size());
  const Int m = static_cast<Int>(L.m);
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto &act = out.voters[i];
    const auto &v = e.voters[i];
    for (const auto &[pair, var] : L.swap)
      if (x[i].at(var) == 1)
        act.swaps.insert(pair);
    std::optional<Int> offset;
    for (Int j = -m; j <= m; ++j)
      if (x[i].at(L.push_var(j)) == 1) {
        if (offset)
          throw DecodingError("voter " + std::to_string(i) + ": two push indicators set");
        offset = j;
      }
    if (!offset)
      throw DecodingError("voter " + std::to_string(i) + ": no push indicator set");
    act.push = *offset;
    act.toggle = (x[i].at(L.active) == 1) != v.active;
    std::vector<std::size_t> order;
    try {
      order = vote::apply_swaps(v.order, act.swaps);
    } catch (const AdmissibilityError &ex) {
      throw DecodingError("voter " + std::to_string(i) + ": " + ex.what());
    }
    auto rank = vote::ranks_of(order);
    for (std::size_t c = 0; c < L.m; ++c)
      if (x[i].at(L.rank[c]) != static_cast<Int>(rank[c]))
        throw DecodingError("voter " + std::to_string(i) +
                            ": rank variables disagree with the swap indicators");
  }
  return out;
}

/// Extended model, standard rewrite and solver outcome for one guess.
struct GuessRun {
  BriberyModel model;
  ext::RewriteResult rewritten;
  SolveOutcome outcome;
};

inline ext::RewriteResult rewrite_checked(const ExtendedProgram &ep) {
  ext::RewriteResult rr = ext::rewrite(ep);
  if (!rr.accounting.holds())
    throw std::logic_error("rewrite accounting violated: " + rr.accounting.describe());
  return rr;
}

inline GuessRun run_guess(const Election &e, const Rule &rule, const Guess &guess,
                          WinnerModel model, const BriberyOptions &opt = {}) {
  BriberyModel bm = build_model(e, rule, guess, model, opt.rules);
  ext::RewriteResult rr = rewrite_checked(bm.program);
  SolveOutcome out = solve(rr.program, opt.solver);
  return {std::move(bm), std::move(rr), std::move(out)};
}

/// Minimum over all guesses of the optimal bribery cost. Every decoded
/// action set is replayed: its cost must equal the objective and c* must win
/// the perturbed election.
inline BriberyOutcome solve_multibribery(const Election &e, const Rule &rule,
                                         const BriberyOptions &opt = {}) {
  BriberyOutcome res;
  res.model = effective_model(e, rule, opt.model);
  for (const Guess &g : enumerate_guesses(e, rule, res.model, opt.rules)) {
    GuessRun run;
    try {
      run = run_guess(e, rule, g, res.model, opt);
    } catch (const ResourceError &ex) {
      throw ResourceError("guess [" + describe(g, e) + "]: " + ex.what());
    } catch (const OverflowError &ex) {
      throw OverflowError("guess [" + describe(g, e) + "]: " + ex.what());
    }
    GuessLog entry{g, describe(run.outcome), std::nullopt};
    if (is_unbounded(run.outcome))
      throw std::logic_error("bribery program unbounded for guess [" + describe(g, e) + "]");
    if (const auto *opt_out = std::get_if<Optimal>(&run.outcome)) {
      ActionSet acts = decode(run.rewritten.project(opt_out->assignment), run.model.layout, e);
      vote::Cost c = vote::action_cost(e, acts);
      if (c.is_forbidden() || c.value() != opt_out->value)
        throw DecodingError("decoded cost " + c.str() + " differs from objective " +
                            std::to_string(opt_out->value) + " for guess [" + describe(g, e) + "]");
      if (!vote::designated_wins(vote::apply_actions(e, acts), rule, res.model, opt.rules))
        throw DecodingError("decoded action set does not make c* win for guess [" +
                            describe(g, e) + "]");
      entry.cost = opt_out->value;
      if (!res.cost || opt_out->value < *res.cost) {
        res.cost = opt_out->value;
        res.actions = std::move(acts);
        res.guess = g;
      }
    }
    res.log.push_back(std::move(entry));
  }
  if (!res.cost)
    res.actions = ActionSet::none(e.voters.size());
  return res;
}

} // namespace nfv::bribery
