#pragma once

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nfv/core/program.hpp"
#include "nfv/core/solver.hpp"
#include "nfv/extended.hpp"

namespace nfv::reduce {

struct BinPackingEncoding {
  ext::ExtendedProgram program;
  std::size_t bins = 0;

  /// Bin (0-based) of every item from the declared assignment x[item][bin].
  [[nodiscard]] std::vector<std::size_t> decode(const std::vector<std::vector<Int>> &x) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < x.size(); ++i) {
      std::optional<std::size_t> bin;
      for (std::size_t j = 0; j < bins; ++j)
        if (x[i].at(j) != 0) {
          if (bin)
            throw DecodingError("item " + std::to_string(i) + " is split over two bins");
          bin = j;
        }
      if (!bin)
        throw DecodingError("item " + std::to_string(i) + " is in no bin");
      out.push_back(*bin);
    }
    return out;
  }
};

/// One brick per item with x_1..x_k in [0, o_i]: sum_j x_j = o_i,
/// sum_j bool_M(x_j) = 1 with M = max o_i, and sum_i x_j <= B per bin.
inline BinPackingEncoding encode_bin_packing(const std::vector<Int> &items, std::size_t k,
                                             Int capacity) {
  if (items.empty())
    throw InputError("bin packing needs at least one item");
  if (k == 0 || capacity <= 0)
    throw InputError("bin count and capacity must be positive");
  for (Int o : items)
    if (o <= 0)
      throw InputError("item sizes must be positive");
  const Int M = *std::max_element(items.begin(), items.end());
  BinPackingEncoding enc{ext::ExtendedProgram(items.size()), k};
  auto &ep = enc.program;
  std::vector<std::pair<Int, ext::Expr>> assign, one;
  for (std::size_t j = 0; j < k; ++j) {
    std::size_t x = ep.add_variable("bin" + std::to_string(j + 1), 0, 0);
    for (std::size_t i = 0; i < items.size(); ++i)
      ep.set_bounds(x, i, 0, items[i]);
    assign.emplace_back(1, ext::var(x));
    one.emplace_back(1, ext::bool_m(M, ext::var(x)));
    ep.add_global(ext::var(x), ext::Relation::Le, capacity);
  }
  ep.add_local(ext::lin(assign), ext::Relation::Eq, items);
  ep.add_local(ext::lin(one), ext::Relation::Eq, 1);
  return enc;
}

/// A packing (bin per item) or nothing, via rewrite and the n-fold solver.
inline std::optional<std::vector<std::size_t>> solve_bin_packing(const std::vector<Int> &items,
                                                                 std::size_t k, Int capacity) {
  auto enc = encode_bin_packing(items, k, capacity);
  auto rr = ext::rewrite(enc.program);
  auto out = solve(rr.program);
  if (!is_optimal(out))
    return std::nullopt;
  return enc.decode(rr.project(std::get<Optimal>(out).assignment));
}

/// n bricks of one binary each and the single global row sum_i w_i x^i = T,
/// realized with per-brick global blocks D_i = [w_i]; r = t = 1, s = 0.
inline StandardNFoldProgram encode_subset_sum(const std::vector<Int> &weights, Int target) {
  if (weights.empty())
    throw InputError("subset sum needs at least one weight");
  StandardNFoldProgram p;
  p.n = weights.size();
  p.r = 1;
  p.s = 0;
  p.t = 1;
  p.D = Matrix(1, 1);
  p.A = Matrix(0, 1);
  for (Int w : weights) {
    if (w <= 0)
      throw InputError("subset sum weights must be positive");
    Matrix d(1, 1);
    d.at(0, 0) = w;
    p.brick_D.push_back(d);
    p.lower.emplace_back(0);
    p.upper.emplace_back(1);
    p.weight.push_back(0);
  }
  p.b = {target};
  return p;
}

namespace detail {

inline std::vector<Int> ints_of(const std::string &text, const std::string &what) {
  std::istringstream is(text);
  std::vector<Int> out;
  std::string tok;
  while (is >> tok)
    out.push_back(nfv::detail::parse_int(tok, what));
  return out;
}

inline std::pair<std::string, std::string> split_slash(const std::string &text,
                                                       const std::string &shape) {
  auto slash = text.find('/');
  if (slash == std::string::npos || text.find('/', slash + 1) != std::string::npos)
    throw ParseError("expected '" + shape + "'");
  return {text.substr(0, slash), text.substr(slash + 1)};
}

} // namespace detail

struct SubsetSumInstance {
  std::vector<Int> weights;
  Int target = 0;
};

/// "w1 w2 ... / T"
inline SubsetSumInstance parse_subset_sum(const std::string &text) {
  auto [lhs, rhs] = detail::split_slash(text, "w1 w2 ... / T");
  SubsetSumInstance inst{detail::ints_of(lhs, "weights"), 0};
  auto t = detail::ints_of(rhs, "target");
  if (inst.weights.empty() || t.size() != 1)
    throw ParseError("expected 'w1 w2 ... / T'");
  inst.target = t[0];
  return inst;
}

struct BinPackingInstance {
  std::vector<Int> items;
  std::size_t bins = 0;
  Int capacity = 0;
};

/// "o1 o2 ... / k B"
inline BinPackingInstance parse_bin_packing(const std::string &text) {
  auto [lhs, rhs] = detail::split_slash(text, "o1 o2 ... / k B");
  BinPackingInstance inst{detail::ints_of(lhs, "items"), 0, 0};
  auto kb = detail::ints_of(rhs, "bins and capacity");
  if (inst.items.empty() || kb.size() != 2 || kb[0] <= 0)
    throw ParseError("expected 'o1 o2 ... / k B'");
  inst.bins = static_cast<std::size_t>(kb[0]);
  inst.capacity = kb[1];
  return inst;
}

} // namespace nfv::reduce
