#include <random>
#include <string>

#include <gtest/gtest.h>

#include "nfv/bribery/solve.hpp"
#include "nfv/bribery/specialize.hpp"
#include "nfv/election/random.hpp"
#include "nfv/extended/text.hpp"
#include "nfv/oracle/brute.hpp"
#include "support/elections.hpp"

using namespace nfv;
using namespace nfv::bribery;
using vote::Cost;
using vote::WinnerModel;

namespace {

std::size_t index_of(const ext::ExtendedProgram &ep, const std::string &name) {
  for (std::size_t j = 0; j < ep.names.size(); ++j)
    if (ep.names[j] == name)
      return j;
  ADD_FAILURE() << "no variable " << name;
  return 0;
}

std::string x(std::size_t j) { return "(x " + std::to_string(j) + ")"; }

bool has_line(const ext::ExtendedProgram &ep, const std::string &line) {
  return ("\n" + ext::dump(ep)).find("\n" + line + "\n") != std::string::npos;
}

/// Declared assignment of the untouched election: identity ranks, p_0 = 1.
std::vector<std::vector<Int>> identity_assignment(const BriberyModel &bm, const vote::Election &e) {
  const auto &L = bm.layout;
  std::vector<std::vector<Int>> out;
  for (const auto &v : e.voters) {
    std::vector<Int> row(bm.program.t(), 0);
    auto rank = vote::ranks_of(v.order);
    for (std::size_t c = 0; c < L.m; ++c) {
      row[L.rank[c]] = static_cast<Int>(rank[c]);
      for (std::size_t d = 0; d < L.m; ++d)
        if (c != d)
          row[L.order[c][d]] = rank[c] < rank[d];
    }
    row[L.push_var(0)] = 1;
    row[L.approval] = v.approval;
    row[L.active] = v.active;
    row[L.latent] = !v.active;
    out.push_back(row);
  }
  return out;
}

} // namespace

TEST(CommonBlock, BrickShape) {
  vote::Election e;
  e.candidates = {"c*", "a", "b"};
  e.voters.push_back(vote::default_voter(3, {1, 2, 0}, 1));
  e.voters[0].push = {4, 0, 2, Cost::forbidden()};
  auto bm = build_common(e);
  const auto &L = bm.layout;
  const auto &ep = bm.program;
  ASSERT_EQ(L.rank.size(), 3u);
  for (std::size_t r : L.rank) {
    EXPECT_EQ(ep.lower[r][0], Bound(1));
    EXPECT_EQ(ep.upper[r][0], Bound(3));
  }
  EXPECT_EQ(L.swap.size(), 3u);
  std::size_t ordered = 0;
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t d = 0; d < 3; ++d)
      ordered += c != d;
  EXPECT_EQ(ordered, 6u);
  EXPECT_EQ(L.push.size(), 7u);
  // offsets -1, 0, 1 open; +2 forbidden; -3, -2, +3 outside the domain
  for (Int j = -3; j <= 3; ++j)
    EXPECT_EQ(ep.upper[L.push_var(j)][0], Bound(j >= -1 && j <= 1 ? 1 : 0)) << j;
  EXPECT_EQ(ep.weight[L.push_var(-1)][0], 4);
  EXPECT_EQ(ep.weight[L.push_var(1)][0], 2);
  EXPECT_EQ(ep.upper[L.influence][0], Bound(1));
  EXPECT_EQ(ep.upper[L.latent][0], Bound(0));
}

TEST(CommonBlock, ForbiddenSwapFixesIndicator) {
  auto e = nfv::testing::sample_election();
  e.voters[0].swap[1][2] = Cost::forbidden();
  e.voters[1].swap[2][1] = 4;
  auto bm = build_common(e);
  std::size_t s = bm.layout.swap.at({1, 2});
  EXPECT_EQ(bm.program.upper[s][0], Bound(0));
  EXPECT_EQ(bm.program.upper[s][1], Bound(1));
  EXPECT_EQ(bm.program.weight[s][1], 4);
}

TEST(CommonBlock, ControlCostsOnlyChargeActualChanges) {
  auto e = nfv::testing::sample_election();
  e.voters[0].active = false;
  e.voters[0].activate = 3;
  e.voters[0].deactivate = 8;
  e.voters[1].deactivate = 5;
  e.voters[1].activate = 9;
  auto bm = build_common(e);
  const auto &L = bm.layout;
  EXPECT_EQ(bm.program.weight[L.active][0], 3);
  EXPECT_EQ(bm.program.weight[L.latent][0], 0);
  EXPECT_EQ(bm.program.weight[L.active][1], 0);
  EXPECT_EQ(bm.program.weight[L.latent][1], 5);
  // forbidden deactivation of the third voter pins it active
  EXPECT_EQ(bm.program.upper[L.latent][2], Bound(0));
}

TEST(CommonBlock, IdentityAssignmentIsFeasibleAtZeroCost) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    auto e = vote::random_election(rng, 3, 3);
    auto bm = build_common(e);
    auto x0 = identity_assignment(bm, e);
    auto ev = ext::eval_extended(bm.program, x0);
    EXPECT_TRUE(ev.feasible);
    EXPECT_EQ(ev.value, 0);
    EXPECT_TRUE(decode(x0, bm.layout, e).empty());
  }
}

TEST(CommonBlock, RejectsTruncatedOrders) {
  auto e = nfv::testing::sample_election();
  e.voters[0].truncated_at = 1;
  EXPECT_THROW(build_common(e), InputError);
}

TEST(Decode, ReadsSwapSetOfOneBrick) {
  auto e = nfv::testing::sample_election();
  auto bm = build_common(e);
  auto xs = identity_assignment(bm, e);
  const auto &L = bm.layout;
  // voter 1: a > b > c* becomes c* > a > b
  auto &row = xs[0];
  row[L.swap.at({0, 1})] = 1;
  row[L.swap.at({0, 2})] = 1;
  row[L.rank[0]] = 1;
  row[L.rank[1]] = 2;
  row[L.rank[2]] = 3;
  auto acts = decode(xs, L, e);
  EXPECT_EQ(acts.voters[0].swaps, (std::set<vote::CandidatePair>{{0, 1}, {0, 2}}));
  EXPECT_TRUE(acts.voters[1].empty());
  EXPECT_EQ(vote::action_cost(e, acts), Cost(2));
}

TEST(Decode, InconsistentIndicatorsAreReported) {
  auto e = nfv::testing::sample_election();
  auto bm = build_common(e);
  auto xs = identity_assignment(bm, e);
  xs[1][bm.layout.swap.at({0, 1})] = 1;
  EXPECT_THROW(decode(xs, bm.layout, e), DecodingError);
  xs = identity_assignment(bm, e);
  xs[2][bm.layout.push_var(0)] = 0;
  EXPECT_THROW(decode(xs, bm.layout, e), DecodingError);
}

TEST(RuleBlock, BordaScoreDefinition) {
  auto e = nfv::testing::sample_election();
  auto bm = build_model(e, vote::rule_from_name("borda", 3), NoGuess{}, WinnerModel::Unique);
  const auto &ep = bm.program;
  std::size_t tau = index_of(ep, "tau0"), rank = bm.layout.rank[0];
  EXPECT_TRUE(has_line(ep, "(local = (lin (1 " + x(tau) + ") (-1 (lin (2 (bool 3 (cmp = " +
                               x(rank) + " (const 1)))) (1 (bool 3 (cmp = " + x(rank) +
                               " (const 2))))))) (rhs 0))"))
      << ext::dump(ep);
  std::size_t star = index_of(ep, "tau0^active"), a = index_of(ep, "tau1^active");
  EXPECT_TRUE(has_line(ep, "(global < (lin (1 " + x(a) + ") (-1 " + x(star) + ")) (rhs 0))"));
}

TEST(RuleBlock, CoWinnerUsesNonStrictRows) {
  auto e = nfv::testing::sample_election();
  auto bm = build_model(e, vote::rule_from_name("plurality", 3), NoGuess{}, WinnerModel::CoWinner);
  std::size_t star = index_of(bm.program, "tau0^active"), a = index_of(bm.program, "tau1^active");
  EXPECT_TRUE(has_line(bm.program, "(global <= (lin (1 " + x(a) + ") (-1 " + x(star) + ")) (rhs 0))"));
}

TEST(RuleBlock, MaximinRows) {
  auto e = nfv::testing::sample_election();
  MaximinGuess g{2, {0, 2, 0}};
  auto bm = build_model(e, vote::rule_from_name("maximin", 3), g, WinnerModel::Unique);
  const auto &ep = bm.program;
  EXPECT_TRUE(has_line(ep, "(global >= " + x(index_of(ep, "ord0_1^active")) + " (rhs 2))"));
  EXPECT_TRUE(has_line(ep, "(global < " + x(index_of(ep, "ord1_2^active")) + " (rhs 2))"));
}

TEST(RuleBlock, BucklinMajorityRow) {
  auto e = nfv::testing::sample_election();
  auto bm = build_model(e, vote::rule_from_name("bucklin", 3), BucklinGuess{3, 2},
                        WinnerModel::Unique);
  const auto &ep = bm.program;
  EXPECT_TRUE(has_line(ep, "(global > (lin (2 " + x(index_of(ep, "tau0^active")) + ")) (rhs 3))"));
  EXPECT_TRUE(has_line(ep, "(global = " + x(bm.layout.active) + " (rhs 3))"));
}

TEST(RuleBlock, MismatchedGuessIsInputError) {
  auto e = nfv::testing::sample_election();
  EXPECT_THROW(build_model(e, vote::rule_from_name("maximin", 3), NoGuess{}, WinnerModel::Unique),
               InputError);
  EXPECT_THROW(build_model(e, vote::rule_from_name("borda", 3), BucklinGuess{1, 1},
                           WinnerModel::Unique),
               InputError);
}

TEST(Guesses, Counts) {
  auto e = nfv::testing::sample_election();
  auto count = [&](const char *rule) {
    return enumerate_guesses(e, vote::rule_from_name(rule, 3), WinnerModel::Unique).size();
  };
  EXPECT_EQ(count("plurality"), 1u);
  EXPECT_EQ(count("spav"), 1u);
  EXPECT_EQ(count("maximin"), 16u);
  EXPECT_EQ(count("bucklin"), 9u);
  EXPECT_EQ(count("fallback"), 13u);
  EXPECT_EQ(count("kemeny"), 2u);
  auto maximin = enumerate_guesses(e, vote::rule_from_name("maximin", 3), WinnerModel::Unique);
  for (std::size_t i = 0; i < maximin.size(); ++i)
    for (std::size_t j = i + 1; j < maximin.size(); ++j)
      EXPECT_FALSE(maximin[i] == maximin[j]);
  for (const auto &g : maximin) {
    const auto &d = std::get<MaximinGuess>(g).defeater;
    EXPECT_NE(d[1], 1u);
    EXPECT_NE(d[2], 2u);
  }
}

TEST(Guesses, CopelandTwoCandidatePrefilter) {
  vote::Election e;
  e.candidates = {"c*", "a"};
  e.voters.push_back(vote::default_voter(2, {1, 0}));
  auto unique = enumerate_guesses(e, vote::rule_from_name("copeland", 2), WinnerModel::Unique);
  ASSERT_EQ(unique.size(), 1u);
  EXPECT_EQ(std::get<C1Relation>(unique[0]).outcome[0][1], 1);
  auto co = enumerate_guesses(e, vote::rule_from_name("copeland", 2), WinnerModel::CoWinner);
  EXPECT_EQ(co.size(), 2u);
}

TEST(Solve, SamplePlurality) {
  auto e = nfv::testing::sample_election();
  auto rule = vote::rule_from_name("plurality", 3);
  auto res = solve_multibribery(e, rule);
  ASSERT_EQ(res.cost, Int{2});
  EXPECT_EQ(vote::action_cost(e, res.actions), Cost(2));
  EXPECT_EQ(res.actions.voters[0].swaps, (std::set<vote::CandidatePair>{{0, 1}, {0, 2}}));
  BriberyOptions co;
  co.model = WinnerModel::CoWinner;
  EXPECT_EQ(solve_multibribery(e, rule, co).cost, Int{0});
}

TEST(Solve, TwoCandidateForcedSwap) {
  vote::Election e;
  e.candidates = {"c*", "a"};
  e.voters.push_back(vote::default_voter(2, {1, 0}));
  e.voters[0].swap[1][0] = 5;
  EXPECT_EQ(solve_multibribery(e, vote::rule_from_name("plurality", 2)).cost, Int{5});
}

TEST(Solve, NoSolutionWhenEverythingForbidden) {
  auto e = nfv::testing::sample_election();
  for (auto &v : e.voters)
    for (auto &row : v.swap)
      for (auto &c : row)
        c = Cost::forbidden();
  auto res = solve_multibribery(e, vote::rule_from_name("plurality", 3));
  EXPECT_FALSE(res.cost);
  EXPECT_FALSE(res.guess);
  EXPECT_EQ(res.log.size(), 1u);
}

TEST(Solve, WinningGuessMatchesRealizedElection) {
  std::mt19937_64 rng(77);
  int checked = 0;
  for (int trial = 0; trial < 30; ++trial) {
    auto e = vote::random_election(rng, 3, 3);
    for (const char *name : {"copeland", "maximin", "bucklin", "fallback", "kemeny"}) {
      auto rule = vote::rule_from_name(name, 3);
      auto res = solve_multibribery(e, rule);
      if (!res.cost)
        continue;
      ++checked;
      auto after = vote::apply_actions(e, res.actions);
      auto pm = vote::pairwise_matrix(after);
      const Int active = static_cast<Int>(vote::active_count(after));
      std::visit(
          [&](const auto &g) {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, C1Relation>) {
              for (std::size_t a = 0; a < 3; ++a)
                for (std::size_t b = 0; b < 3; ++b) {
                  if (a == b)
                    continue;
                  Int diff = pm(a, b) - pm(b, a);
                  EXPECT_EQ(g.outcome[a][b], (diff > 0) - (diff < 0)) << name;
                }
            } else if constexpr (std::is_same_v<T, MaximinGuess>) {
              for (std::size_t c = 1; c < 3; ++c) {
                EXPECT_GE(pm(0, c), g.bound);
                EXPECT_LT(pm(c, g.defeater[c]), g.bound);
              }
            } else if constexpr (std::is_same_v<T, BucklinGuess>) {
              EXPECT_EQ(g.active, active);
              EXPECT_EQ(vote::bucklin(after).round, g.round);
            } else if constexpr (std::is_same_v<T, FallbackGuess>) {
              EXPECT_EQ(g.active, active);
              EXPECT_EQ(vote::fallback(after).round, g.round);
            } else if constexpr (std::is_same_v<T, KemenyGuess>) {
              std::vector<std::size_t> r{0, 1, 2};
              Int best = vote::kemeny_agreement(pm, g.ranking);
              do
                EXPECT_LE(vote::kemeny_agreement(pm, r), best);
              while (std::next_permutation(r.begin(), r.end()));
            }
          },
          *res.guess);
    }
  }
  EXPECT_GT(checked, 40);
}

TEST(Solve, ObjectiveEqualsDecodedCostOnEveryGuess) {
  std::mt19937_64 rng(78);
  for (int trial = 0; trial < 10; ++trial) {
    auto e = vote::random_election(rng, 3, 2);
    auto rule = vote::rule_from_name("maximin", 3);
    for (const auto &g : enumerate_guesses(e, rule, WinnerModel::Unique)) {
      auto run = run_guess(e, rule, g, WinnerModel::Unique);
      if (const auto *opt = std::get_if<Optimal>(&run.outcome)) {
        auto acts = decode(run.rewritten.project(opt->assignment), run.model.layout, e);
        EXPECT_EQ(vote::action_cost(e, acts), Cost(opt->value));
      }
    }
  }
}

TEST(Specialize, DodgsonAndYoungOnSample) {
  auto e = nfv::testing::sample_election();
  auto condorcet = vote::rule_from_name("condorcet", 3);
  auto d = specialize(Problem::Dodgson, e, condorcet);
  EXPECT_EQ(solve_multibribery(d.election, d.rule).cost, Int{2});
  auto y = specialize(Problem::Young, e, condorcet);
  EXPECT_EQ(solve_multibribery(y.election, y.rule).cost, Int{2});
  e.designated = 1;
  d = specialize(Problem::Dodgson, e, condorcet);
  EXPECT_EQ(solve_multibribery(d.election, d.rule).cost, Int{0});
}

TEST(Specialize, ManipulationWithoutManipulators) {
  auto e = nfv::testing::sample_election();
  auto borda = vote::rule_from_name("borda", 3);
  auto special = specialize(Problem::Manipulation, e, borda);
  EXPECT_FALSE(solve_multibribery(special.election, special.rule).cost);
  e.designated = 1;
  special = specialize(Problem::Manipulation, e, borda);
  EXPECT_EQ(solve_multibribery(special.election, special.rule).cost, Int{0});
}

TEST(Specialize, ManipulatorsReorderFreely) {
  auto e = nfv::testing::sample_election();
  e.voters.push_back(vote::default_voter(3, {}));
  e.voters.push_back(vote::default_voter(3, {}));
  auto special = specialize(Problem::Manipulation, e, vote::rule_from_name("plurality", 3));
  EXPECT_EQ(solve_multibribery(special.election, special.rule).cost, Int{0});
}

TEST(Specialize, RowTables) {
  auto e = nfv::testing::sample_election();
  e.voters[0].influence = 4;
  auto shift = specialize(Problem::Shift, e, vote::rule_from_name("borda", 3)).election;
  EXPECT_TRUE(shift.voters[0].swap[1][2].is_forbidden());
  EXPECT_EQ(shift.voters[0].swap[1][0], Cost(1));
  EXPECT_EQ(shift.voters[0].influence, Cost(0));
  auto dollar = specialize(Problem::Dollar, e, vote::rule_from_name("borda", 3)).election;
  EXPECT_EQ(dollar.voters[0].swap[1][2], Cost(0));
  EXPECT_EQ(dollar.voters[0].influence, Cost(4));
  auto ccav = specialize(Problem::Ccav, e, vote::rule_from_name("borda", 3)).election;
  EXPECT_TRUE(ccav.voters[0].deactivate.is_forbidden());
  EXPECT_TRUE(ccav.voters[0].swap[0][1].is_forbidden());
  auto young = specialize(Problem::Young, e, vote::rule_from_name("borda", 3));
  EXPECT_EQ(young.rule.kind, vote::RuleKind::Condorcet);
  EXPECT_EQ(young.election.voters[0].deactivate, Cost(1));
}

TEST(Specialize, InputErrors) {
  auto e = nfv::testing::sample_election();
  EXPECT_THROW(parse_problem("bribe"), InputError);
  e.voters[0].truncated_at = 1;
  EXPECT_THROW(specialize(Problem::Swap, e, vote::rule_from_name("borda", 3)), InputError);
  EXPECT_THROW(specialize(Problem::Extension, e, vote::rule_from_name("spav", 3)), InputError);
  EXPECT_NO_THROW(specialize(Problem::PossibleWinner, e, vote::rule_from_name("borda", 3)));
}

TEST(Solve, OracleAgreementOnLargerElections) {
  std::mt19937_64 rng(79);
  for (int trial = 0; trial < 4; ++trial) {
    auto e = vote::random_election(rng, 3, 4);
    auto rule = vote::rule_from_name(trial % 2 ? "borda" : "plurality", 3);
    EXPECT_EQ(solve_multibribery(e, rule).cost,
              oracle::brute_oracle(e, rule, WinnerModel::Unique).cost);
  }
}
