#pragma once

#include <map>
#include <string>
#include <vector>

#include "nfv/core/propagate.hpp"
#include "nfv/extended/program.hpp"

namespace nfv::ext {

using nfv::detail::Interval;

namespace detail {

using nfv::detail::kInf;
using nfv::detail::Wide;

inline Wide clamp_inf(Wide v) { return v >= kInf ? kInf : (v <= -kInf ? -kInf : v); }

inline Interval scale(const Interval &a, Int c) {
  if (c == 0)
    return {0, 0};
  auto mul = [&](Wide v) -> Wide {
    if (v >= kInf)
      return c > 0 ? kInf : -kInf;
    if (v <= -kInf)
      return c > 0 ? -kInf : kInf;
    return clamp_inf(v * c);
  };
  Wide x = mul(a.lo), y = mul(a.hi);
  return c > 0 ? Interval{x, y} : Interval{y, x};
}

inline Interval add(const Interval &a, const Interval &b) {
  auto sum = [](Wide x, Wide y) -> Wide {
    if (x <= -kInf || y <= -kInf)
      return -kInf;
    if (x >= kInf || y >= kInf)
      return kInf;
    return clamp_inf(x + y);
  };
  Wide lo = (a.lo <= -kInf || b.lo <= -kInf) ? -kInf : sum(a.lo, b.lo);
  Wide hi = (a.hi >= kInf || b.hi >= kInf) ? kInf : sum(a.hi, b.hi);
  return {lo, hi};
}

inline Interval hull(const Interval &a, const Interval &b) {
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

inline std::string show(const Interval &iv) {
  auto s = [](Wide v, const char *inf) {
    if (v >= kInf || v <= -kInf)
      return std::string(inf);
    return std::to_string(static_cast<long long>(v));
  };
  return "[" + s(iv.lo, "-inf") + ", " + s(iv.hi, "inf") + "]";
}

/// Interval propagation for one brick with memoization by canonical key.
class BrickCertifier {
public:
  BrickCertifier(const ExtendedProgram &ep, std::size_t brick)
      : ep_(ep), brick_(brick) {}

  Interval operator()(const Expr &e) {
    if (auto it = memo_.find(e.key()); it != memo_.end())
      return it->second;
    Interval out = compute(e);
    memo_.emplace(e.key(), out);
    return out;
  }

  /// Interval of the difference f - g for a comparison.
  Interval difference(const Comparison &c) {
    return add((*this)(c.lhs), scale((*this)(c.rhs), -1));
  }

  [[nodiscard]] const std::map<std::string, Interval> &intervals() const {
    return memo_;
  }

private:
  Interval compute(const Expr &e) {
    return std::visit(
        [&](const auto &node) -> Interval {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, VarRef>) {
            return nfv::detail::from_bounds(ep_.lower[node.index][brick_],
                                            ep_.upper[node.index][brick_]);
          } else if constexpr (std::is_same_v<T, Constant>) {
            Int v = node.at(brick_);
            return {v, v};
          } else if constexpr (std::is_same_v<T, LinComb>) {
            Interval acc{0, 0};
            for (const auto &[c, sub] : node.terms)
              acc = add(acc, scale((*this)(sub), c));
            return acc;
          } else if constexpr (std::is_same_v<T, Not>) {
            Interval a = (*this)(node.arg);
            require_binary(a, node.arg, e);
            return {1 - a.hi, 1 - a.lo};
          } else if constexpr (std::is_same_v<T, Or>) {
            Interval a = (*this)(node.lhs), b = (*this)(node.rhs);
            require_binary(a, node.lhs, e);
            require_binary(b, node.rhs, e);
            return {std::max(a.lo, b.lo), std::max(a.hi, b.hi)};
          } else if constexpr (std::is_same_v<T, BoolM>) {
            if (auto *arg = std::get_if<Expr>(&node.arg)) {
              Interval a = (*this)(*arg);
              require_range(a, node.m, e);
              if (a.lo == 0 && a.hi == 0)
                return {0, 0};
              if (a.lo > 0 || a.hi < 0)
                return {1, 1};
              return {0, 1};
            }
            const auto &c = std::get<Comparison>(node.arg);
            Interval d = difference(c);
            require_range(d, node.m, e);
            return comparison_range(c.rel, d);
          } else {
            Interval a = (*this)(node.arg);
            require_range(a, node.m, e);
            auto sgn = [](Wide v) -> Wide { return v > 0 ? 1 : (v < 0 ? -1 : 0); };
            return {sgn(a.lo), sgn(a.hi)};
          }
        },
        e.node().v);
  }

  static Interval comparison_range(Relation rel, const Interval &d) {
    bool always = false, never = false;
    switch (rel) {
    case Relation::Eq:
      always = d.lo == 0 && d.hi == 0;
      never = d.lo > 0 || d.hi < 0;
      break;
    case Relation::Gt:
      always = d.lo > 0;
      never = d.hi <= 0;
      break;
    case Relation::Ge:
      always = d.lo >= 0;
      never = d.hi < 0;
      break;
    case Relation::Lt:
      always = d.hi < 0;
      never = d.lo >= 0;
      break;
    case Relation::Le:
      always = d.hi <= 0;
      never = d.lo > 0;
      break;
    }
    if (always)
      return {1, 1};
    if (never)
      return {0, 0};
    return {0, 1};
  }

  void require_binary(const Interval &a, const Expr &operand, const Expr &op) const {
    if (a.lo < 0 || a.hi > 1)
      throw ValidityError("operand " + operand.key() + " of " + op.key() +
                          " is not binary: interval " + show(a) + " in brick " +
                          std::to_string(brick_));
  }

  void require_range(const Interval &a, Int m, const Expr &op) const {
    if (a.lo < -m || a.hi > m)
      throw ValidityError("argument of " + op.key() + " has interval " + show(a) +
                          " outside [-" + std::to_string(m) + ", " +
                          std::to_string(m) + "] in brick " + std::to_string(brick_));
  }

  const ExtendedProgram &ep_;
  std::size_t brick_;
  std::map<std::string, Interval> memo_;
};

} // namespace detail

/// Sound value ranges of every expression, merged over all bricks.
struct ValidityCertificate {
  std::map<std::string, Interval> intervals;
  /// Per brick ranges of every constraint's left-hand side.
  std::vector<std::vector<Interval>> constraint_lhs;

  [[nodiscard]] const Interval &of(const Expr &e) const {
    auto it = intervals.find(e.key());
    if (it == intervals.end())
      throw InputError("no certificate for " + e.key());
    return it->second;
  }
};

/// Propagates bound intervals through every expression and checks that each
/// operation stays inside its domain; throws ValidityError naming the first
/// offending expression.
inline ValidityCertificate certify_validity(const ExtendedProgram &ep) {
  check_shape(ep);
  ValidityCertificate cert;
  cert.constraint_lhs.assign(ep.constraints.size(), {});
  for (std::size_t i = 0; i < ep.n; ++i) {
    detail::BrickCertifier brick(ep, i);
    for (std::size_t k = 0; k < ep.constraints.size(); ++k) {
      const auto &c = ep.constraints[k];
      cert.constraint_lhs[k].push_back(brick(c.lhs));
      // comparison differences are needed by the rewrite as well
      for_each_subexpr(c.lhs, [&](const Expr &e) {
        if (auto *b = std::get_if<BoolM>(&e.node().v))
          if (auto *cmp = std::get_if<Comparison>(&b->arg)) {
            Interval d = brick.difference(*cmp);
            std::string key = detail::comparison_key(*cmp);
            auto it = cert.intervals.find(key);
            cert.intervals[key] = it == cert.intervals.end() ? d : detail::hull(it->second, d);
          }
      });
    }
    for (const auto &[key, iv] : brick.intervals()) {
      auto it = cert.intervals.find(key);
      if (it == cert.intervals.end())
        cert.intervals.emplace(key, iv);
      else
        it->second = detail::hull(it->second, iv);
    }
  }
  return cert;
}

} // namespace nfv::ext
