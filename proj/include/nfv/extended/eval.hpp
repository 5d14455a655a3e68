#pragma once

#include <optional>
#include <vector>

#include "nfv/extended/program.hpp"

namespace nfv::ext {

/// Value of e in one brick, or nullopt when some operation is undefined.
inline std::optional<Int> eval_expr(const Expr &e, std::size_t brick,
                                    const std::vector<Int> &x) {
  using R = std::optional<Int>;
  auto binary = [](const R &v) { return v && (*v == 0 || *v == 1); };
  auto in_range = [](const R &v, Int m) { return v && *v >= -m && *v <= m; };
  return std::visit(
      [&](const auto &node) -> R {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, VarRef>) {
          return x.at(node.index);
        } else if constexpr (std::is_same_v<T, Constant>) {
          return node.at(brick);
        } else if constexpr (std::is_same_v<T, LinComb>) {
          Int sum = 0;
          for (const auto &[c, sub] : node.terms) {
            R v = eval_expr(sub, brick, x);
            if (!v)
              return std::nullopt;
            sum = checked_add(sum, checked_mul(c, *v));
          }
          return sum;
        } else if constexpr (std::is_same_v<T, Not>) {
          R v = eval_expr(node.arg, brick, x);
          if (!binary(v))
            return std::nullopt;
          return 1 - *v;
        } else if constexpr (std::is_same_v<T, Or>) {
          R a = eval_expr(node.lhs, brick, x);
          R b = eval_expr(node.rhs, brick, x);
          if (!binary(a) || !binary(b))
            return std::nullopt;
          return std::max(*a, *b);
        } else if constexpr (std::is_same_v<T, BoolM>) {
          if (auto *arg = std::get_if<Expr>(&node.arg)) {
            R v = eval_expr(*arg, brick, x);
            if (!in_range(v, node.m))
              return std::nullopt;
            return *v == 0 ? 0 : 1;
          }
          const auto &c = std::get<Comparison>(node.arg);
          R f = eval_expr(c.lhs, brick, x);
          R g = eval_expr(c.rhs, brick, x);
          if (!f || !g)
            return std::nullopt;
          if (!in_range(checked_sub(*f, *g), node.m))
            return std::nullopt;
          return holds(*f, c.rel, *g) ? 1 : 0;
        } else {
          R v = eval_expr(node.arg, brick, x);
          if (!in_range(v, node.m))
            return std::nullopt;
          return *v > 0 ? 1 : (*v < 0 ? -1 : 0);
        }
      },
      e.node().v);
}

struct ExtendedEvaluation {
  bool feasible = false;
  bool undefined = false;
  Int value = 0;
};

/// Reference semantics. assignment[i][j] is declared variable j of brick i.
inline ExtendedEvaluation eval_extended(const ExtendedProgram &ep,
                                        const std::vector<std::vector<Int>> &assignment) {
  check_shape(ep);
  if (assignment.size() != ep.n)
    throw InputError("assignment needs one vector per brick");
  for (const auto &x : assignment)
    if (x.size() != ep.t())
      throw InputError("assignment brick length does not match t");

  ExtendedEvaluation out;
  out.feasible = true;
  for (std::size_t i = 0; i < ep.n; ++i)
    for (std::size_t j = 0; j < ep.t(); ++j) {
      Int v = assignment[i][j];
      out.value = checked_add(out.value, checked_mul(ep.weight[j][i], v));
      if ((ep.lower[j][i] && v < *ep.lower[j][i]) ||
          (ep.upper[j][i] && v > *ep.upper[j][i]))
        out.feasible = false;
    }
  for (const auto &c : ep.constraints) {
    Int global_sum = 0;
    for (std::size_t i = 0; i < ep.n; ++i) {
      auto v = eval_expr(c.lhs, i, assignment[i]);
      if (!v) {
        out.undefined = true;
        out.feasible = false;
        return out;
      }
      if (c.scope == Scope::Local) {
        if (!holds(*v, c.rel, c.rhs_at(i)))
          out.feasible = false;
      } else {
        global_sum = checked_add(global_sum, *v);
      }
    }
    if (c.scope == Scope::Global && !holds(global_sum, c.rel, c.rhs[0]))
      out.feasible = false;
  }
  return out;
}

} // namespace nfv::ext
