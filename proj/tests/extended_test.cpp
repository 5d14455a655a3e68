#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "nfv/core/solver.hpp"
#include "nfv/extended.hpp"
#include "support/random_extended.hpp"

using namespace nfv;
using namespace nfv::ext;

namespace {

std::size_t column_named(const RewriteResult &rr, const std::string &prefix) {
  for (std::size_t c = 0; c < rr.column_names.size(); ++c)
    if (rr.column_names[c].rfind(prefix, 0) == 0)
      return c;
  ADD_FAILURE() << "no column starting with " << prefix;
  return 0;
}

/// Optimal standard assignment with the declared variables fixed.
std::vector<Int> solve_fixed(const RewriteResult &rr,
                             const std::vector<std::vector<Int>> &x) {
  auto out = solve(nfv::testing::fix_declared(rr, x));
  EXPECT_TRUE(is_optimal(out)) << describe(out);
  return is_optimal(out) ? std::get<Optimal>(out).assignment : std::vector<Int>{};
}

} // namespace

TEST(Certify, AcceptsArgumentInsideRange) {
  ExtendedProgram ep;
  auto x = ep.add_variable("x", -3, 3);
  Expr b = bool_m(5, var(x));
  ep.add_local(b, Relation::Eq, 1);
  auto cert = certify_validity(ep);
  EXPECT_EQ(cert.of(b).lo, 0);
  EXPECT_EQ(cert.of(b).hi, 1);
}

TEST(Certify, RejectsArgumentOutsideRange) {
  ExtendedProgram ep;
  auto x = ep.add_variable("x", -3, 3);
  ep.add_local(bool_m(2, var(x)), Relation::Eq, 1);
  EXPECT_THROW(certify_validity(ep), ValidityError);
  EXPECT_THROW(rewrite(ep), ValidityError);
}

TEST(Certify, RejectsNonBinaryLogicalOperand) {
  ExtendedProgram ep;
  auto a = ep.add_variable("a", 0, 2);
  auto b = ep.add_variable("b", 0, 1);
  ep.add_local(logical_or(var(a), var(b)), Relation::Eq, 1);
  EXPECT_THROW(certify_validity(ep), ValidityError);
}

TEST(Certify, PerBrickOverridesAreRespected) {
  ExtendedProgram ep(2);
  auto x = ep.add_variable("x", -1, 1);
  ep.set_bounds(x, 1, -4, 4);
  ep.add_local(sgn_m(1, var(x)), Relation::Eq, 0);
  EXPECT_THROW(certify_validity(ep), ValidityError);
  ep.set_bounds(x, 1, -1, 1);
  EXPECT_NO_THROW(certify_validity(ep));
}

TEST(Eval, DefinitionalTables) {
  ExtendedProgram ep;
  auto x = ep.add_variable("x", -10, 10);
  EXPECT_EQ(eval_expr(bool_m(3, var(x)), 0, {0}), 0);
  EXPECT_EQ(eval_expr(bool_m(3, var(x)), 0, {-2}), 1);
  EXPECT_EQ(eval_expr(sgn_m(5, var(x)), 0, {-4}), -1);
  EXPECT_EQ(eval_expr(sgn_m(5, var(x)), 0, {5}), 1);
  EXPECT_EQ(eval_expr(bool_m(3, var(x)), 0, {5}), std::nullopt);
  EXPECT_EQ(eval_expr(logical_not(var(x)), 0, {2}), std::nullopt);
  EXPECT_EQ(eval_expr(bool_m(2, Relation::Lt, var(x), constant(1)), 0, {-1}), 1);
  EXPECT_EQ(eval_expr(bool_m(2, Relation::Lt, var(x), constant(1)), 0, {-2}),
            std::nullopt);

  ep.add_local(bool_m(3, var(x)), Relation::Eq, 0);
  EXPECT_TRUE(eval_extended(ep, {{0}}).feasible);
  auto undefined = eval_extended(ep, {{5}});
  EXPECT_TRUE(undefined.undefined);
  EXPECT_FALSE(undefined.feasible);
}

TEST(Eval, GlobalSumsAndObjective) {
  ExtendedProgram ep(3);
  auto x = ep.add_variable("x", 0, 3, 2);
  ep.set_weight(x, 2, -1);
  ep.add_global(var(x), Relation::Le, 4);
  auto ok = eval_extended(ep, {{1}, {1}, {2}});
  EXPECT_TRUE(ok.feasible);
  EXPECT_EQ(ok.value, 2 + 2 - 2);
  EXPECT_FALSE(eval_extended(ep, {{2}, {2}, {1}}).feasible);
  EXPECT_THROW(eval_extended(ep, {{1}, {1}}), InputError);
}

TEST(Rewrite, OrTruthTable) {
  ExtendedProgram ep;
  auto f = ep.add_variable("f", 0, 1);
  auto g = ep.add_variable("g", 0, 1);
  auto y = ep.add_variable("y", 0, 1);
  ep.add_local(var(y) - logical_or(var(f), var(g)), Relation::Eq, 0);
  auto rr = rewrite(ep);
  std::size_t xe = column_named(rr, "or:");
  std::size_t se = column_named(rr, "orslack:");
  struct Row {
    Int f, g, xe, se;
  };
  for (Row row : {Row{1, 1, 1, 0}, Row{1, 0, 1, 1}, Row{0, 1, 1, 1}, Row{0, 0, 0, 0}}) {
    auto z = solve_fixed(rr, {{row.f, row.g, std::max(row.f, row.g)}});
    ASSERT_FALSE(z.empty());
    EXPECT_EQ(z[xe], row.xe);
    EXPECT_EQ(z[se], row.se);
    // the wrong value of y is rejected
    auto wrong = solve(nfv::testing::fix_declared(rr, {{row.f, row.g, 1 - row.xe}}));
    EXPECT_TRUE(is_infeasible(wrong));
  }
}

TEST(Rewrite, BoolSandwichForcesSigns) {
  ExtendedProgram ep;
  auto x = ep.add_variable("x", -3, 3);
  auto y = ep.add_variable("y", 0, 1);
  ep.add_local(var(y) - bool_m(5, var(x)), Relation::Eq, 0);
  auto rr = rewrite(ep);
  std::size_t v = column_named(rr, "v:");
  std::size_t u = column_named(rr, "u:");
  // x stays inside (-5, 5) so U = L = 5 with no copies
  EXPECT_EQ(rr.column_names.size(), 2u + 4u);
  EXPECT_EQ(*rr.program.upper[column_named(rr, "sv:")], 5);
  EXPECT_EQ(*rr.program.upper[column_named(rr, "su:")], 5);

  // independent oracle: binaries satisfying 1 + x <= 5v <= 5 + x and
  // 1 - x <= 5u <= 5 - x
  auto sandwich = [](Int xf, Int bit, int sign) {
    Int lhs = 1 + sign * xf, rhs = 5 + sign * xf;
    return lhs <= 5 * bit && 5 * bit <= rhs;
  };
  for (Int xf = -3; xf <= 3; ++xf) {
    std::vector<Int> vs, us;
    for (Int bit : {0, 1}) {
      if (sandwich(xf, bit, 1))
        vs.push_back(bit);
      if (sandwich(xf, bit, -1))
        us.push_back(bit);
    }
    ASSERT_EQ(vs.size(), 1u);
    ASSERT_EQ(us.size(), 1u);
    auto z = solve_fixed(rr, {{xf, xf == 0 ? 0 : 1}});
    ASSERT_FALSE(z.empty());
    EXPECT_EQ(z[v], vs[0]) << "x=" << xf;
    EXPECT_EQ(z[u], us[0]) << "x=" << xf;
  }
  auto z = solve_fixed(rr, {{2, 1}});
  EXPECT_EQ(z[v], 1);
  EXPECT_EQ(z[u], 0);
}

TEST(Rewrite, SgnAtZeroSetsBothBits) {
  ExtendedProgram ep;
  auto x = ep.add_variable("x", -3, 3);
  auto y = ep.add_variable("y", -1, 1);
  ep.add_local(var(y) - sgn_m(5, var(x)), Relation::Eq, 0);
  auto rr = rewrite(ep);
  auto z = solve_fixed(rr, {{0, 0}});
  EXPECT_EQ(z[column_named(rr, "v:")], 1);
  EXPECT_EQ(z[column_named(rr, "u:")], 1);
  EXPECT_TRUE(is_infeasible(solve(nfv::testing::fix_declared(rr, {{0, 1}}))));
  EXPECT_EQ(solve_fixed(rr, {{-2, -1}})[column_named(rr, "u:")], 1);
}

TEST(Rewrite, ArgumentAtHeightUsesCopies) {
  // |x| reaches m, so U = L = m + 1 via the copy columns
  ExtendedProgram ep;
  auto x = ep.add_variable("x", -2, 2);
  auto y = ep.add_variable("y", -1, 1);
  ep.add_local(var(y) - sgn_m(2, var(x)), Relation::Eq, 0);
  auto rr = rewrite(ep);
  EXPECT_EQ(rr.program.max_coefficient(), 2);
  EXPECT_TRUE(rr.accounting.holds()) << rr.accounting.describe();
  for (Int xf = -2; xf <= 2; ++xf) {
    Int sign = xf > 0 ? 1 : (xf < 0 ? -1 : 0);
    EXPECT_TRUE(is_optimal(solve(nfv::testing::fix_declared(rr, {{xf, sign}}))));
    for (Int other = -1; other <= 1; ++other)
      if (other != sign) {
        EXPECT_TRUE(is_infeasible(solve(nfv::testing::fix_declared(rr, {{xf, other}}))));
      }
  }
}

TEST(Rewrite, GlobalInequalityDisablesAllButOneSlack) {
  ExtendedProgram ep(3);
  auto x = ep.add_variable("x", 0, 3);
  ep.add_global(var(x), Relation::Le, 4);
  auto rr = rewrite(ep);
  const auto &p = rr.program;
  EXPECT_EQ(p.r, 1u);
  EXPECT_EQ(p.s, 0u);
  ASSERT_EQ(p.t, 2u);
  std::size_t s = column_named(rr, "gslack:");
  EXPECT_EQ(p.lower[p.coord(0, s)], Bound(0));
  EXPECT_EQ(p.upper[p.coord(0, s)], std::nullopt);
  for (std::size_t i : {1u, 2u}) {
    EXPECT_EQ(p.lower[p.coord(i, s)], Bound(0));
    EXPECT_EQ(p.upper[p.coord(i, s)], Bound(0));
  }
  EXPECT_TRUE(is_optimal(solve(nfv::testing::fix_declared(rr, {{1}, {1}, {2}}))));
  EXPECT_TRUE(is_infeasible(solve(nfv::testing::fix_declared(rr, {{2}, {2}, {1}}))));
}

TEST(Rewrite, LocalSlackRangeFollowsBounds) {
  ExtendedProgram ep(2);
  auto x = ep.add_variable("x", 0, 3);
  auto y = ep.add_variable("y", -2, 2);
  ep.add_local(var(x) + var(y), Relation::Gt, std::vector<Int>{0, 1});
  auto rr = rewrite(ep);
  std::size_t s = column_named(rr, "slack:");
  // Q = max(|l|, |u|) * a * n * t = 3 * 1 * 2 * 2
  EXPECT_EQ(rr.program.lower[s], Bound(-12));
  EXPECT_EQ(rr.program.upper[s], Bound(-1));
  auto inf = ep;
  inf.set_bounds(y, std::nullopt, 2);
  EXPECT_THROW(rewrite(inf), ValidityError);
}

TEST(Rewrite, HashConsesIdenticalOperations) {
  ExtendedProgram ep;
  auto x = ep.add_variable("x", -2, 2);
  Expr b = bool_m(3, var(x));
  ep.add_local(b, Relation::Eq, 1);
  ep.add_local(b + bool_m(3, var(x)), Relation::Eq, 2);
  auto rr = rewrite(ep);
  EXPECT_EQ(rr.program.t, 1u + 4u);
  EXPECT_EQ(extended_width(ep), 1u);
}

TEST(Rewrite, AccountingOnPermutationBlock) {
  auto ep = permutation_block(3, 2);
  auto rr = rewrite(ep);
  const auto &acc = rr.accounting;
  EXPECT_EQ(acc.width, 3u);
  EXPECT_EQ(acc.height, 3);
  EXPECT_EQ(acc.r_out, acc.r);
  EXPECT_EQ(acc.a_out, std::max(acc.a, acc.height));
  EXPECT_TRUE(acc.holds()) << acc.describe();
}

TEST(Gadgets, PermutationBlockShape) {
  auto ep = permutation_block(3);
  ASSERT_EQ(ep.constraints.size(), 4u);
  EXPECT_EQ(ep.constraints[0].rhs, (std::vector<Int>{6}));
  EXPECT_TRUE(eval_extended(ep, {{2, 3, 1}}).feasible);
  EXPECT_FALSE(eval_extended(ep, {{1, 1, 4}}).feasible);

  auto one = permutation_block(1);
  ASSERT_EQ(one.constraints.size(), 1u);
  EXPECT_TRUE(eval_extended(one, {{1}}).feasible);
  EXPECT_THROW(permutation_block(0), InputError);
}

TEST(Gadgets, PermutationBlockFeasibleSetIsSymmetricGroup) {
  for (Int m = 1; m <= 5; ++m) {
    auto ep = permutation_block(m);
    auto rr = m <= 4 ? rewrite(ep) : RewriteResult{};
    std::size_t count = 0;
    nfv::testing::for_each_declared(ep, [&](const std::vector<std::vector<Int>> &x) {
      std::vector<Int> sorted = x[0];
      std::sort(sorted.begin(), sorted.end());
      bool perm = true;
      for (Int j = 0; j < m; ++j)
        perm = perm && sorted[static_cast<std::size_t>(j)] == j + 1;
      EXPECT_EQ(eval_extended(ep, x).feasible, perm);
      if (m <= 4) {
        EXPECT_EQ(is_optimal(solve(nfv::testing::fix_declared(rr, x))), perm);
      }
      count += perm;
    });
    std::size_t fact = 1;
    for (Int j = 2; j <= m; ++j)
      fact *= static_cast<std::size_t>(j);
    EXPECT_EQ(count, fact);
  }
}

TEST(Gadgets, InversionIndicators) {
  auto value_of = [](const ExtendedProgram &ep, std::vector<Int> x,
                     std::size_t j, std::size_t k) -> Int {
    // try both values of every indicator, keep the feasible completion
    std::size_t m = x.size();
    std::size_t pairs = ep.t() - m;
    for (std::size_t mask = 0; mask < (std::size_t{1} << pairs); ++mask) {
      std::vector<Int> full = x;
      for (std::size_t q = 0; q < pairs; ++q)
        full.push_back(static_cast<Int>((mask >> q) & 1));
      if (eval_extended(ep, {full}).feasible) {
        std::size_t idx = 0;
        for (std::size_t a = 0; a < m; ++a)
          for (std::size_t b = a + 1; b < m; ++b, ++idx)
            if (a == j && b == k)
              return full[m + idx];
      }
    }
    return -1;
  };
  auto two = inversion_indicators(2, {1, 2});
  EXPECT_EQ(value_of(two, {2, 1}, 0, 1), 1);
  EXPECT_EQ(value_of(two, {1, 2}, 0, 1), 0);

  auto three = inversion_indicators(3, {1, 3, 2});
  EXPECT_EQ(value_of(three, {1, 2, 3}, 1, 2), 1);
  EXPECT_EQ(value_of(three, {1, 2, 3}, 0, 1), 0);
  EXPECT_EQ(value_of(three, {1, 2, 3}, 0, 2), 0);

  EXPECT_THROW(inversion_indicators(3, {1, 1, 2}), InputError);

  // the rewritten program agrees with the definition on every permutation
  auto rr = rewrite(three);
  EXPECT_TRUE(rr.accounting.holds()) << rr.accounting.describe();
  std::vector<Int> x = {1, 2, 3};
  do {
    std::vector<Int> full = x;
    std::vector<Int> ref = {1, 3, 2};
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = a + 1; b < 3; ++b)
        full.push_back((x[a] < x[b]) != (ref[a] < ref[b]) ? 1 : 0);
    EXPECT_TRUE(is_optimal(solve(nfv::testing::fix_declared(rr, {full}))));
    full.back() = 1 - full.back();
    EXPECT_TRUE(is_infeasible(solve(nfv::testing::fix_declared(rr, {full}))));
  } while (std::next_permutation(x.begin(), x.end()));
}

TEST(Gadgets, SplitByBit) {
  auto check = [](Int lo, Int hi, Int xv, Int zv) {
    ExtendedProgram ep;
    auto x = ep.add_variable("x", lo, hi);
    auto z = ep.add_variable("z", 0, 1);
    auto bs = split_by_bit(ep, x, z);
    auto out = ep.add_variable("out", lo, hi);
    ep.add_local(var(out) - bs.value, Relation::Eq, 0);
    EXPECT_EQ(bs.constraints.size(), 3u);
    // enumerate the auxiliary parts; every feasible completion agrees
    std::vector<Int> seen;
    for (Int a = 0; a <= hi - lo; ++a)
      for (Int b = 0; b <= hi - lo; ++b)
        for (Int o = lo; o <= hi; ++o)
          if (eval_extended(ep, {{xv, zv, a, b, o}}).feasible)
            seen.push_back(o);
    return seen;
  };
  EXPECT_EQ(check(0, 4, 3, 1), (std::vector<Int>{3}));
  EXPECT_EQ(check(0, 4, 3, 0), (std::vector<Int>{0}));
  EXPECT_EQ(check(-2, 2, -2, 0), (std::vector<Int>{0}));
  EXPECT_EQ(check(-2, 2, -2, 1), (std::vector<Int>{-2}));
  EXPECT_EQ(check(-2, 2, 1, 1), (std::vector<Int>{1}));

  ExtendedProgram bad;
  auto x = bad.add_variable("x", 0, std::nullopt);
  auto z = bad.add_variable("z", 0, 1);
  EXPECT_THROW(split_by_bit(bad, x, z), InputError);
}

TEST(Text, DumpRoundTrips) {
  ExtendedProgram ep(2);
  auto x = ep.add_variable("x", -2, 2, 3);
  auto y = ep.add_variable("y", 0, 1);
  ep.set_bounds(x, 1, std::nullopt, 4);
  ep.set_weight(y, 1, -2);
  ep.add_local(var(y) - bool_m(4, Relation::Le, var(x), constant_per_brick({1, -1})),
               Relation::Eq, 0);
  ep.add_local(logical_or(var(y), logical_not(var(y))) + sgn_m(3, 2 * var(y)),
               Relation::Ge, std::vector<Int>{1, 0});
  ep.add_global(lin({{2, var(x)}, {-1, var(y)}}), Relation::Lt, 5);
  std::string text = dump(ep);
  auto back = parse_extended(text);
  EXPECT_EQ(dump(back), text);
  EXPECT_EQ(back.names, ep.names);
  EXPECT_EQ(back.lower, ep.lower);
  EXPECT_EQ(back.upper, ep.upper);
  EXPECT_EQ(back.weight, ep.weight);
  ASSERT_EQ(back.constraints.size(), 3u);
  EXPECT_EQ(back.constraints[1].lhs.key(), ep.constraints[1].lhs.key());

  EXPECT_THROW(parse_extended("(extended 1) (var x (lo 0) (hi 1)"), ParseError);
  EXPECT_THROW(parse_extended("(extended 1) (frob)"), ParseError);
  EXPECT_THROW(parse_extended("(extended 1) (local = (x 3) (rhs 0))"), ParseError);
  EXPECT_THROW(parse_extended("(extended 1) (local ~ (x 0) (rhs 0))"), ParseError);
}

TEST(Properties, RewriteSoundnessOnRandomPrograms) {
  std::mt19937_64 rng(2024);
  std::size_t feasible_programs = 0;
  for (int trial = 0; trial < 40; ++trial) {
    auto ep = nfv::testing::random_extended(rng);
    auto rr = rewrite(ep);
    EXPECT_TRUE(rr.accounting.holds()) << rr.accounting.describe() << "\n" << dump(ep);
    auto rep = nfv::testing::check_soundness(ep, rr);
    ASSERT_TRUE(rep.failure.empty()) << rep.failure << "\n" << dump(ep);
    feasible_programs += rep.feasible > 0;
  }
  EXPECT_GT(feasible_programs, 10u);
}
