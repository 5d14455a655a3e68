#pragma once

#include <map>
#include <utility>
#include <vector>

#include "nfv/extended/program.hpp"

namespace nfv::ext {

struct PermutationBlock {
  std::vector<std::size_t> vars;
  std::size_t sum_constraint = 0;
  std::vector<std::size_t> disequalities;
};

/// x_1..x_m in [1, m], sum x_j = m(m+1)/2 and x_j !=_m x_k for j < k.
/// Satisfied exactly by the permutations of {1..m}.
inline PermutationBlock add_permutation_block(ExtendedProgram &ep,
                                              const std::vector<std::size_t> &vars) {
  const Int m = static_cast<Int>(vars.size());
  if (m == 0)
    throw InputError("permutation block needs at least one variable");
  PermutationBlock pb;
  pb.vars = vars;
  std::vector<std::pair<Int, Expr>> terms;
  for (auto j : vars) {
    ep.set_bounds(j, 1, m);
    terms.emplace_back(1, var(j));
  }
  pb.sum_constraint = ep.add_local(lin(terms), Relation::Eq, m * (m + 1) / 2);
  for (std::size_t a = 0; a < vars.size(); ++a)
    for (std::size_t b = a + 1; b < vars.size(); ++b)
      pb.disequalities.push_back(
          ep.add_local(bool_m(m, var(vars[a]) - var(vars[b])), Relation::Eq, 1));
  return pb;
}

/// Fresh program with m declared variables forming one permutation block.
inline ExtendedProgram permutation_block(Int m, std::size_t bricks = 1) {
  if (m < 1)
    throw InputError("permutation block needs m >= 1");
  ExtendedProgram ep(bricks);
  std::vector<std::size_t> vars;
  for (Int j = 1; j <= m; ++j)
    vars.push_back(ep.add_variable("x" + std::to_string(j), 1, m));
  add_permutation_block(ep, vars);
  return ep;
}

inline void require_permutation(const std::vector<Int> &o) {
  std::vector<char> seen(o.size() + 1, 0);
  for (Int v : o) {
    if (v < 1 || v > static_cast<Int>(o.size()) || seen[static_cast<std::size_t>(v)])
      throw InputError("reference is not a permutation of 1..m");
    seen[static_cast<std::size_t>(v)] = 1;
  }
}

struct InversionIndicators {
  /// (j, k) with j < k in block order -> declared binary s_jk
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> vars;
  std::vector<std::size_t> constraints;
};

/// Binaries s_jk = bool_2(sgn_m(x_j - x_k) = sgn(o_k - o_j)), one per pair,
/// where o is the reference permutation of brick i (reference.size() is 1 or
/// n). s_jk = 1 iff x orders j and k oppositely to the reference.
inline InversionIndicators
add_inversion_indicators(ExtendedProgram &ep, const std::vector<std::size_t> &x,
                         const std::vector<std::vector<Int>> &reference,
                         const std::string &prefix = "s") {
  const Int m = static_cast<Int>(x.size());
  if (reference.size() != 1 && reference.size() != ep.n)
    throw InputError("inversion reference needs 1 or n permutations");
  for (const auto &o : reference) {
    if (o.size() != x.size())
      throw InputError("reference length does not match the block");
    require_permutation(o);
  }
  InversionIndicators ind;
  for (std::size_t j = 0; j < x.size(); ++j)
    for (std::size_t k = j + 1; k < x.size(); ++k) {
      std::vector<Int> okj;
      for (const auto &o : reference)
        okj.push_back(o[k] > o[j] ? 1 : -1);
      std::size_t s = ep.add_variable(
          prefix + std::to_string(j + 1) + "_" + std::to_string(k + 1), 0, 1);
      Expr sign = sgn_m(m, var(x[j]) - var(x[k]));
      Expr ref = okj.size() == 1 ? constant(okj[0]) : constant_per_brick(okj);
      ind.vars[{j, k}] = s;
      ind.constraints.push_back(ep.add_local(
          var(s) - bool_m(2, Relation::Eq, sign, ref), Relation::Eq, 0));
    }
  return ind;
}

/// Fresh program: permutation block of size m plus its inversion indicators.
inline ExtendedProgram inversion_indicators(Int m, const std::vector<Int> &reference) {
  require_permutation(reference);
  if (static_cast<Int>(reference.size()) != m)
    throw InputError("reference length does not match m");
  ExtendedProgram ep = permutation_block(m);
  std::vector<std::size_t> x;
  for (Int j = 0; j < m; ++j)
    x.push_back(static_cast<std::size_t>(j));
  add_inversion_indicators(ep, x, {reference});
  return ep;
}

struct BitSplit {
  /// x^z as an expression: equals x when z = 1 and 0 when z = 0.
  Expr value;
  std::size_t on = 0;  ///< shifted part carried when z = 1
  std::size_t off = 0; ///< shifted part carried when z = 0
  std::vector<std::size_t> constraints;
};

/// Splits x by the binary z. With x = x~ + l the added constraints are
///   x~^z <= (u - l) z,  x~^!z <= (u - l)(1 - z),  x~^z + x~^!z = x - l
/// and x^z = x~^z + l z.
inline BitSplit split_by_bit(ExtendedProgram &ep, std::size_t x, std::size_t z) {
  Int lo = 0, hi = 0;
  for (std::size_t i = 0; i < ep.n; ++i) {
    const Bound &l = ep.lower.at(x)[i];
    const Bound &u = ep.upper.at(x)[i];
    if (!l || !u)
      throw InputError("split_by_bit needs finite bounds on '" + ep.names[x] + "'");
    lo = i == 0 ? *l : std::min(lo, *l);
    hi = i == 0 ? *u : std::max(hi, *u);
  }
  const Int width = checked_sub(hi, lo);
  BitSplit bs;
  bs.on = ep.add_variable(ep.names[x] + "^" + ep.names[z], 0, width);
  bs.off = ep.add_variable(ep.names[x] + "^!" + ep.names[z], 0, width);
  bs.constraints.push_back(
      ep.add_local(lin({{1, var(bs.on)}, {-width, var(z)}}), Relation::Le, 0));
  bs.constraints.push_back(
      ep.add_local(lin({{1, var(bs.off)}, {width, var(z)}}), Relation::Le, width));
  bs.constraints.push_back(ep.add_local(
      lin({{1, var(bs.on)}, {1, var(bs.off)}, {-1, var(x)}}), Relation::Eq, -lo));
  bs.value = lo == 0 ? var(bs.on) : lin({{1, var(bs.on)}, {lo, var(z)}});
  return bs;
}

} // namespace nfv::ext
