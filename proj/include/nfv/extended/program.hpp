#pragma once

#include <algorithm>
#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "nfv/core/program.hpp"
#include "nfv/extended/expr.hpp"

namespace nfv::ext {

enum class Scope { Global, Local };

/// lhs (rel) rhs. A global constraint sums lhs over all bricks and has a
/// single rhs; a local one holds in every brick, rhs either uniform (one
/// value) or one value per brick.
struct UniformConstraint {
  Scope scope = Scope::Local;
  Expr lhs;
  Relation rel = Relation::Eq;
  std::vector<Int> rhs;

  [[nodiscard]] Int rhs_at(std::size_t brick) const {
    return rhs.size() == 1 ? rhs[0] : rhs.at(brick);
  }
};

/// Extended n-fold program over t declared variables per brick. Bounds and
/// weights are stored per brick so callers can override single bricks.
struct ExtendedProgram {
  std::size_t n = 1;
  std::vector<std::string> names;
  std::vector<std::vector<Bound>> lower; // [var][brick]
  std::vector<std::vector<Bound>> upper; // [var][brick]
  std::vector<std::vector<Int>> weight;  // [var][brick]
  std::vector<UniformConstraint> constraints;

  ExtendedProgram() = default;
  explicit ExtendedProgram(std::size_t bricks) : n(bricks) {}

  [[nodiscard]] std::size_t t() const { return names.size(); }

  std::size_t add_variable(std::string name, Bound lo, Bound hi, Int w = 0) {
    names.push_back(std::move(name));
    lower.emplace_back(n, lo);
    upper.emplace_back(n, hi);
    weight.emplace_back(n, w);
    return names.size() - 1;
  }

  void set_bounds(std::size_t var, std::size_t brick, Bound lo, Bound hi) {
    lower.at(var).at(brick) = lo;
    upper.at(var).at(brick) = hi;
  }

  void set_bounds(std::size_t var, Bound lo, Bound hi) {
    for (std::size_t i = 0; i < n; ++i)
      set_bounds(var, i, lo, hi);
  }

  void set_weight(std::size_t var, std::size_t brick, Int w) {
    weight.at(var).at(brick) = w;
  }

  std::size_t add_local(Expr lhs, Relation rel, Int rhs) {
    constraints.push_back({Scope::Local, std::move(lhs), rel, {rhs}});
    return constraints.size() - 1;
  }

  std::size_t add_local(Expr lhs, Relation rel, std::vector<Int> rhs) {
    if (rhs.size() != 1 && rhs.size() != n)
      throw InputError("local right-hand side needs 1 or n values");
    constraints.push_back({Scope::Local, std::move(lhs), rel, std::move(rhs)});
    return constraints.size() - 1;
  }

  std::size_t add_global(Expr lhs, Relation rel, Int rhs) {
    constraints.push_back({Scope::Global, std::move(lhs), rel, {rhs}});
    return constraints.size() - 1;
  }
};

/// Throws InputError on shape problems (missing bricks, bad indices,
/// per-brick constants of the wrong length, empty boxes).
inline void check_shape(const ExtendedProgram &ep) {
  if (ep.n == 0)
    throw InputError("extended program needs at least one brick");
  const std::size_t t = ep.t();
  if (ep.lower.size() != t || ep.upper.size() != t || ep.weight.size() != t)
    throw InputError("bounds and weights must cover every declared variable");
  for (std::size_t j = 0; j < t; ++j) {
    if (ep.lower[j].size() != ep.n || ep.upper[j].size() != ep.n ||
        ep.weight[j].size() != ep.n)
      throw InputError("variable '" + ep.names[j] + "' needs n bounds and weights");
    for (std::size_t i = 0; i < ep.n; ++i)
      if (ep.lower[j][i] && ep.upper[j][i] && *ep.lower[j][i] > *ep.upper[j][i])
        throw InputError("empty box for variable '" + ep.names[j] + "' in brick " +
                         std::to_string(i));
  }
  for (const auto &c : ep.constraints) {
    detail::require(c.lhs, "constraint");
    if (c.scope == Scope::Global ? c.rhs.size() != 1
                                 : (c.rhs.size() != 1 && c.rhs.size() != ep.n))
      throw InputError("constraint right-hand side has the wrong length");
    for_each_subexpr(c.lhs, [&](const Expr &e) {
      if (auto *v = std::get_if<VarRef>(&e.node().v); v && v->index >= t)
        throw InputError("variable index " + std::to_string(v->index) +
                         " out of range in " + c.lhs.key());
      if (auto *k = std::get_if<Constant>(&e.node().v);
          k && k->values.size() != 1 && k->values.size() != ep.n)
        throw InputError("per-brick constant with wrong length in " + c.lhs.key());
    });
  }
}

/// Distinct operation nodes of the program, keyed canonically.
inline std::vector<Expr> distinct_operations(const ExtendedProgram &ep) {
  std::vector<Expr> ops;
  std::set<std::string> seen;
  for (const auto &c : ep.constraints)
    for_each_subexpr(c.lhs, [&](const Expr &e) {
      const auto &v = e.node().v;
      bool op = std::holds_alternative<Not>(v) || std::holds_alternative<Or>(v) ||
                std::holds_alternative<BoolM>(v) || std::holds_alternative<SgnM>(v);
      if (op && seen.insert(e.key()).second)
        ops.push_back(e);
    });
  return ops;
}

/// Inequalities (constraint relations and comparisons under bool_m), logical
/// operations, bool_m and sgn_m operations; each distinct node counted once.
inline std::size_t extended_width(const ExtendedProgram &ep) {
  std::size_t w = 0;
  for (const auto &e : distinct_operations(ep)) {
    ++w;
    if (auto *b = std::get_if<BoolM>(&e.node().v))
      if (auto *c = std::get_if<Comparison>(&b->arg); c && is_inequality(c->rel))
        ++w;
  }
  for (const auto &c : ep.constraints)
    if (is_inequality(c.rel))
      ++w;
  return w;
}

/// Maximum m over all bool_m and sgn_m operations, 0 if there are none.
inline Int extended_height(const ExtendedProgram &ep) {
  Int m = 0;
  for (const auto &e : distinct_operations(ep)) {
    if (auto *b = std::get_if<BoolM>(&e.node().v))
      m = std::max(m, b->m);
    else if (auto *s = std::get_if<SgnM>(&e.node().v))
      m = std::max(m, s->m);
  }
  return m;
}

} // namespace nfv::ext
