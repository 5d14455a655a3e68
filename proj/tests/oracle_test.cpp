#include <random>

#include <gtest/gtest.h>

#include "nfv/bribery/specialize.hpp"
#include "nfv/election/random.hpp"
#include "nfv/oracle/brute.hpp"
#include "support/elections.hpp"

using namespace nfv;
using namespace nfv::vote;
using nfv::oracle::brute_oracle;

TEST(Oracle, SamplePlurality) {
  auto e = nfv::testing::sample_election();
  auto rule = rule_from_name("plurality", 3);
  auto unique = brute_oracle(e, rule, WinnerModel::Unique);
  EXPECT_EQ(unique.cost, Int{2});
  EXPECT_EQ(action_cost(e, unique.actions), Cost(2));
  EXPECT_TRUE(designated_wins(apply_actions(e, unique.actions), rule, WinnerModel::Unique));
  auto co = brute_oracle(e, rule, WinnerModel::CoWinner);
  EXPECT_EQ(co.cost, Int{0});
  EXPECT_TRUE(co.actions.empty());
}

TEST(Oracle, AlreadyWinningCostsNothing) {
  auto e = nfv::testing::sample_election();
  e.designated = 1;
  auto out = brute_oracle(e, rule_from_name("maximin", 3), WinnerModel::Unique);
  EXPECT_EQ(out.cost, Int{0});
  EXPECT_TRUE(out.actions.empty());
}

TEST(Oracle, AllSwapsForbiddenGivesNoSolution) {
  auto e = nfv::testing::sample_election();
  for (auto &v : e.voters)
    for (auto &row : v.swap)
      for (auto &c : row)
        c = Cost::forbidden();
  auto out = brute_oracle(e, rule_from_name("plurality", 3), WinnerModel::Unique);
  EXPECT_FALSE(out.cost);
}

TEST(Oracle, TwoCandidateForcedSwap) {
  Election e;
  e.candidates = {"c*", "a"};
  e.voters.push_back(default_voter(2, {1, 0}));
  e.voters[0].swap[1][0] = 5;
  auto out = brute_oracle(e, rule_from_name("plurality", 2), WinnerModel::Unique);
  EXPECT_EQ(out.cost, Int{5});
}

TEST(Oracle, NegativeCostsAreTaken) {
  auto e = nfv::testing::sample_election();
  e.designated = 1;
  e.voters[2].swap[0][1] = -3;
  // a already wins; the negative swap is still worth taking if a keeps winning
  auto out = brute_oracle(e, rule_from_name("maximin", 3), WinnerModel::Unique);
  EXPECT_EQ(out.cost, Int{-3});
}

TEST(Oracle, CapsAndLinearity) {
  auto e = nfv::testing::sample_election();
  oracle::OracleCaps caps{2, 4};
  EXPECT_THROW(brute_oracle(e, rule_from_name("borda", 3), WinnerModel::Unique, caps),
               ResourceError);
  e.voters[0].truncated_at = 1;
  EXPECT_THROW(brute_oracle(e, rule_from_name("borda", 3), WinnerModel::Unique), InputError);
}

TEST(Oracle, TieBreakIsLexicographic) {
  Election e;
  e.candidates = {"c*", "a", "b"};
  e.voters.push_back(default_voter(3, {1, 0, 2}));
  e.voters.push_back(default_voter(3, {2, 0, 1}));
  e.voters.push_back(default_voter(3, {0, 1, 2}));
  auto out = brute_oracle(e, rule_from_name("plurality", 3), WinnerModel::Unique);
  ASSERT_EQ(out.cost, Int{1});
  // the first or second voter could lift c*; the second acting encodes smaller
  EXPECT_TRUE(out.actions.voters[0].empty());
  EXPECT_EQ(out.actions.voters[1].swaps, (std::set<CandidatePair>{{0, 2}}));
}

TEST(Oracle, DodgsonAndYoungOnSample) {
  auto e = nfv::testing::sample_election();
  EXPECT_EQ(oracle::oracle_dodgson(e, 0), 2);
  EXPECT_EQ(oracle::oracle_dodgson(e, 1), 0);
  EXPECT_EQ(oracle::oracle_young(e, 0), Int{2});
  EXPECT_EQ(oracle::oracle_young(e, 1), Int{0});
}

TEST(Oracle, DodgsonSingleVoterClimb) {
  Election e;
  e.candidates = {"a", "b", "c"};
  e.voters.push_back(default_voter(3, {1, 2, 0}));
  EXPECT_EQ(oracle::oracle_dodgson(e, 0), 2);
}

TEST(Oracle, ScoresAgreeWithSpecializedOracle) {
  std::mt19937_64 rng(41);
  RandomElectionOptions opt;
  opt.latent = 0;
  for (int trial = 0; trial < 40; ++trial) {
    auto e = random_election(rng, 3, 1 + trial % 3, opt);
    auto condorcet = rule_from_name("condorcet", 3);
    auto d = bribery::specialize(bribery::Problem::Dodgson, e, condorcet);
    EXPECT_EQ(brute_oracle(d.election, d.rule, WinnerModel::Unique).cost,
              Int{oracle::oracle_dodgson(e, 0)});
    EXPECT_EQ(dodgson_score(e, 0), oracle::oracle_dodgson(e, 0));
    auto y = bribery::specialize(bribery::Problem::Young, e, condorcet);
    EXPECT_EQ(brute_oracle(y.election, y.rule, WinnerModel::Unique).cost,
              oracle::oracle_young(e, 0));
    EXPECT_EQ(young_score(e, 0), oracle::oracle_young(e, 0));
  }
}

TEST(Oracle, MonotoneInSwapCosts) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 40; ++trial) {
    auto e = random_election(rng, 3, 2);
    auto rule = rule_from_name(trial % 2 ? "borda" : "maximin", 3);
    auto before = brute_oracle(e, rule, WinnerModel::Unique).cost;
    auto cheaper = e;
    auto &v = cheaper.voters[trial % 2];
    std::size_t a = static_cast<std::size_t>(trial % 3), b = (a + 1) % 3;
    v.swap[a][b] = v.swap[a][b].is_forbidden() ? Cost(0) : Cost(v.swap[a][b].value() - 1);
    auto after = brute_oracle(cheaper, rule, WinnerModel::Unique).cost;
    if (before) {
      ASSERT_TRUE(after);
      EXPECT_LE(*after, *before);
    }
  }
}
