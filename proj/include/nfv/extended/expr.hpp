#pragma once

#include <cstddef>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nfv/core/checked.hpp"
#include "nfv/core/errors.hpp"

namespace nfv::ext {

enum class Relation { Eq, Lt, Le, Gt, Ge };

inline const char *to_string(Relation rel) {
  switch (rel) {
  case Relation::Eq:
    return "=";
  case Relation::Lt:
    return "<";
  case Relation::Le:
    return "<=";
  case Relation::Gt:
    return ">";
  case Relation::Ge:
    return ">=";
  }
  return "?";
}

inline Relation parse_relation(const std::string &tok) {
  if (tok == "=")
    return Relation::Eq;
  if (tok == "<")
    return Relation::Lt;
  if (tok == "<=")
    return Relation::Le;
  if (tok == ">")
    return Relation::Gt;
  if (tok == ">=")
    return Relation::Ge;
  throw ParseError("unknown relation '" + tok + "'");
}

inline bool holds(Int lhs, Relation rel, Int rhs) {
  switch (rel) {
  case Relation::Eq:
    return lhs == rhs;
  case Relation::Lt:
    return lhs < rhs;
  case Relation::Le:
    return lhs <= rhs;
  case Relation::Gt:
    return lhs > rhs;
  case Relation::Ge:
    return lhs >= rhs;
  }
  return false;
}

inline bool is_inequality(Relation rel) { return rel != Relation::Eq; }

struct ExprNode;

/// Immutable, shareable handle to a brick-local uniform expression.
class Expr {
public:
  Expr() = default;
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}

  [[nodiscard]] const ExprNode &node() const { return *node_; }
  [[nodiscard]] bool valid() const { return node_ != nullptr; }
  /// Canonical s-expression; identical expressions have identical keys.
  [[nodiscard]] const std::string &key() const;

private:
  std::shared_ptr<const ExprNode> node_;
};

struct VarRef {
  std::size_t index;
};

/// A constant; either uniform (one value) or one value per brick.
struct Constant {
  std::vector<Int> values;
  [[nodiscard]] Int at(std::size_t brick) const {
    return values.size() == 1 ? values[0] : values.at(brick);
  }
};

struct LinComb {
  std::vector<std::pair<Int, Expr>> terms;
};

struct Not {
  Expr arg;
};

struct Or {
  Expr lhs;
  Expr rhs;
};

/// f (rel) g; only ever appears as the argument of BoolM.
struct Comparison {
  Relation rel;
  Expr lhs;
  Expr rhs;
};

struct BoolM {
  Int m;
  std::variant<Expr, Comparison> arg;
};

struct SgnM {
  Int m;
  Expr arg;
};

struct ExprNode {
  std::variant<VarRef, Constant, LinComb, Not, Or, BoolM, SgnM> v;
  std::string key;
};

inline const std::string &Expr::key() const { return node_->key; }

namespace detail {

inline std::string comparison_key(const Comparison &c) {
  return std::string("(cmp ") + to_string(c.rel) + " " + c.lhs.key() + " " +
         c.rhs.key() + ")";
}

inline Expr make(std::variant<VarRef, Constant, LinComb, Not, Or, BoolM, SgnM> v) {
  auto node = std::make_shared<ExprNode>();
  std::ostringstream k;
  std::visit(
      [&](const auto &x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, VarRef>) {
          k << "(x " << x.index << ")";
        } else if constexpr (std::is_same_v<T, Constant>) {
          k << "(const";
          for (Int c : x.values)
            k << ' ' << c;
          k << ")";
        } else if constexpr (std::is_same_v<T, LinComb>) {
          k << "(lin";
          for (const auto &[c, e] : x.terms)
            k << " (" << c << ' ' << e.key() << ")";
          k << ")";
        } else if constexpr (std::is_same_v<T, Not>) {
          k << "(not " << x.arg.key() << ")";
        } else if constexpr (std::is_same_v<T, Or>) {
          k << "(or " << x.lhs.key() << ' ' << x.rhs.key() << ")";
        } else if constexpr (std::is_same_v<T, BoolM>) {
          k << "(bool " << x.m << ' ';
          if (auto *e = std::get_if<Expr>(&x.arg))
            k << e->key();
          else
            k << comparison_key(std::get<Comparison>(x.arg));
          k << ")";
        } else {
          k << "(sgn " << x.m << ' ' << x.arg.key() << ")";
        }
      },
      v);
  node->key = k.str();
  node->v = std::move(v);
  return Expr(std::move(node));
}

inline void require(const Expr &e, const char *what) {
  if (!e.valid())
    throw InputError(std::string("empty expression passed to ") + what);
}

} // namespace detail

inline Expr var(std::size_t index) { return detail::make(VarRef{index}); }

inline Expr constant(Int value) { return detail::make(Constant{{value}}); }

/// Brick-dependent constant, one value per brick.
inline Expr constant_per_brick(std::vector<Int> values) {
  if (values.empty())
    throw InputError("per-brick constant needs at least one value");
  return detail::make(Constant{std::move(values)});
}

inline Expr lin(std::vector<std::pair<Int, Expr>> terms) {
  for (const auto &[c, e] : terms)
    detail::require(e, "lin");
  return detail::make(LinComb{std::move(terms)});
}

inline Expr operator+(const Expr &a, const Expr &b) { return lin({{1, a}, {1, b}}); }
inline Expr operator-(const Expr &a, const Expr &b) { return lin({{1, a}, {-1, b}}); }
inline Expr operator*(Int c, const Expr &a) { return lin({{c, a}}); }

inline Expr logical_not(const Expr &e) {
  detail::require(e, "not");
  return detail::make(Not{e});
}

inline Expr logical_or(const Expr &a, const Expr &b) {
  detail::require(a, "or");
  detail::require(b, "or");
  return detail::make(Or{a, b});
}

/// a AND b as NOT(NOT a OR NOT b).
inline Expr logical_and(const Expr &a, const Expr &b) {
  return logical_not(logical_or(logical_not(a), logical_not(b)));
}

inline Expr bool_m(Int m, const Expr &e) {
  detail::require(e, "bool_m");
  if (m <= 0)
    throw InputError("bool_m needs a positive m");
  return detail::make(BoolM{m, e});
}

/// bool_m(f rel g): 1 iff the comparison holds; needs |f - g| <= m.
inline Expr bool_m(Int m, Relation rel, const Expr &f, const Expr &g) {
  detail::require(f, "bool_m");
  detail::require(g, "bool_m");
  if (m <= 0)
    throw InputError("bool_m needs a positive m");
  return detail::make(BoolM{m, Comparison{rel, f, g}});
}

inline Expr sgn_m(Int m, const Expr &e) {
  detail::require(e, "sgn_m");
  if (m <= 0)
    throw InputError("sgn_m needs a positive m");
  return detail::make(SgnM{m, e});
}

/// Visits every distinct operation node reachable from e (post-order).
template <class F>
void for_each_subexpr(const Expr &e, F &&f) {
  std::visit(
      [&](const auto &x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, LinComb>) {
          for (const auto &[c, sub] : x.terms)
            for_each_subexpr(sub, f);
        } else if constexpr (std::is_same_v<T, Not>) {
          for_each_subexpr(x.arg, f);
        } else if constexpr (std::is_same_v<T, Or>) {
          for_each_subexpr(x.lhs, f);
          for_each_subexpr(x.rhs, f);
        } else if constexpr (std::is_same_v<T, BoolM>) {
          if (auto *a = std::get_if<Expr>(&x.arg)) {
            for_each_subexpr(*a, f);
          } else {
            const auto &c = std::get<Comparison>(x.arg);
            for_each_subexpr(c.lhs, f);
            for_each_subexpr(c.rhs, f);
          }
        } else if constexpr (std::is_same_v<T, SgnM>) {
          for_each_subexpr(x.arg, f);
        }
      },
      e.node().v);
  f(e);
}

} // namespace nfv::ext
