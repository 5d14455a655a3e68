#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "nfv/core/program.hpp"
#include "nfv/extended/certify.hpp"
#include "nfv/extended/program.hpp"

namespace nfv::ext {

/// Input and output parameters of a rewrite.
struct Accounting {
  std::size_t t = 0; ///< declared variables
  std::size_t r = 0; ///< global constraints
  std::size_t s = 0; ///< local constraints
  Int a = 1;         ///< largest coefficient of the input, at least 1
  std::size_t width = 0;
  Int height = 0;
  std::size_t t_out = 0;
  std::size_t r_out = 0;
  std::size_t s_out = 0;
  Int a_out = 1; ///< largest coefficient of the output, at least 1

  /// r' = r, a' = max(a, M), t' - t <= 6 w and s' - s <= 6 w.
  [[nodiscard]] bool holds() const {
    return r_out == r && a_out == std::max(a, height) && t_out - t <= 6 * width &&
           s_out - s <= 6 * width;
  }

  [[nodiscard]] std::string describe() const {
    return "t=" + std::to_string(t) + " r=" + std::to_string(r) +
           " s=" + std::to_string(s) + " a=" + std::to_string(a) +
           " w=" + std::to_string(width) + " M=" + std::to_string(height) +
           " -> t'=" + std::to_string(t_out) + " r'=" + std::to_string(r_out) +
           " s'=" + std::to_string(s_out) + " a'=" + std::to_string(a_out);
  }
};

struct RewriteResult {
  StandardNFoldProgram program;
  /// var_map[i][j]: coordinate of declared variable j of brick i.
  std::vector<std::vector<std::size_t>> var_map;
  std::vector<std::string> column_names;
  Accounting accounting;

  /// Declared-variable view of a standard assignment.
  [[nodiscard]] std::vector<std::vector<Int>> project(const std::vector<Int> &x) const {
    std::vector<std::vector<Int>> out(var_map.size());
    for (std::size_t i = 0; i < var_map.size(); ++i)
      for (std::size_t c : var_map[i])
        out[i].push_back(x.at(c));
    return out;
  }
};

namespace detail {

/// Walks the affine skeleton of e: Var and operation nodes other than Not are
/// atoms; constants, linear combinations and Not are expanded.
template <class OnAtom, class OnConst>
void flatten(const Expr &e, Int scale, OnAtom &&atom, OnConst &&cst) {
  std::visit(
      [&](const auto &node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Constant>) {
          cst(node.values, scale);
        } else if constexpr (std::is_same_v<T, LinComb>) {
          for (const auto &[c, sub] : node.terms)
            flatten(sub, checked_mul(scale, c), atom, cst);
        } else if constexpr (std::is_same_v<T, Not>) {
          cst(std::vector<Int>{1}, scale);
          flatten(node.arg, checked_mul(scale, -1), atom, cst);
        } else {
          atom(e, scale);
        }
      },
      e.node().v);
}

/// Largest coefficient of one linear form over atoms.
inline Int form_bound(const std::vector<std::pair<const Expr *, Int>> &parts) {
  std::map<std::string, Int> coef;
  for (auto [e, scale] : parts)
    flatten(*e, scale,
            [&](const Expr &atom, Int c) {
              coef[atom.key()] = checked_add(coef[atom.key()], c);
            },
            [](const std::vector<Int> &, Int) {});
  Int m = 0;
  for (const auto &kv : coef)
    m = std::max(m, checked_abs(kv.second));
  return m;
}

struct Affine {
  std::map<std::size_t, Int> coef;
  std::vector<Int> cst;

  explicit Affine(std::size_t n = 0) : cst(n, 0) {}

  void add(const Affine &o, Int scale) {
    for (auto [c, v] : o.coef)
      coef[c] = checked_add(coef[c], checked_mul(scale, v));
    for (std::size_t i = 0; i < cst.size(); ++i)
      cst[i] = checked_add(cst[i], checked_mul(scale, o.cst[i]));
  }
};

struct Column {
  std::string name;
  std::vector<Bound> lo, hi;
  std::vector<Int> w;
};

struct LocalRow {
  std::map<std::size_t, Int> coef;
  std::vector<Int> rhs;
};

struct GlobalRow {
  std::map<std::size_t, Int> coef;
  Int rhs = 0;
};

class Rewriter {
public:
  Rewriter(const ExtendedProgram &ep, const ValidityCertificate &cert, Int a)
      : ep_(ep), cert_(cert), n_(ep.n), a_(a),
        target_(std::max(a, extended_height(ep))) {
    for (std::size_t j = 0; j < ep.t(); ++j)
      cols_.push_back({ep.names[j], ep.lower[j], ep.upper[j], ep.weight[j]});
  }

  void constraint(std::size_t k) {
    const auto &c = ep_.constraints[k];
    Affine f = affine(c.lhs);
    if (c.scope == Scope::Local) {
      LocalRow row{f.coef, std::vector<Int>(n_)};
      for (std::size_t i = 0; i < n_; ++i)
        row.rhs[i] = checked_sub(c.rhs_at(i), f.cst[i]);
      if (is_inequality(c.rel)) {
        Int q = slack_range(k);
        auto [lo, hi] = slack_bounds(c.rel, q, q);
        row.coef[column("slack:" + std::to_string(k), lo, hi)] = 1;
      }
      locals_.push_back(std::move(row));
    } else {
      GlobalRow row{f.coef, c.rhs[0]};
      for (std::size_t i = 0; i < n_; ++i)
        row.rhs = checked_sub(row.rhs, f.cst[i]);
      if (is_inequality(c.rel))
        gslacks_.push_back({globals_.size(), k});
      globals_.push_back(std::move(row));
    }
  }

  RewriteResult finish() {
    // global slacks go last so they never enter brick enumeration
    for (auto [row, k] : gslacks_) {
      auto [lo, hi] = slack_bounds(ep_.constraints[k].rel, std::nullopt, std::nullopt);
      std::size_t col = column("gslack:" + std::to_string(k), 0, 0);
      cols_[col].lo[0] = lo;
      cols_[col].hi[0] = hi;
      globals_[row].coef[col] = 1;
    }
    gslacks_.clear();
    RewriteResult res;
    auto &p = res.program;
    p.n = n_;
    p.t = cols_.size();
    p.r = globals_.size();
    p.s = locals_.size();
    p.D = Matrix(p.r, p.t);
    p.A = Matrix(p.s, p.t);
    for (std::size_t k = 0; k < p.r; ++k)
      for (auto [c, v] : globals_[k].coef)
        p.D.at(k, c) = v;
    for (std::size_t k = 0; k < p.s; ++k)
      for (auto [c, v] : locals_[k].coef)
        p.A.at(k, c) = v;
    for (const auto &g : globals_)
      p.b.push_back(g.rhs);
    for (std::size_t i = 0; i < n_; ++i)
      for (const auto &l : locals_)
        p.b.push_back(l.rhs[i]);
    for (std::size_t i = 0; i < n_; ++i)
      for (const auto &col : cols_) {
        p.lower.push_back(col.lo[i]);
        p.upper.push_back(col.hi[i]);
        p.weight.push_back(col.w[i]);
      }
    res.var_map.assign(n_, {});
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < ep_.t(); ++j)
        res.var_map[i].push_back(p.coord(i, j));
    for (const auto &col : cols_)
      res.column_names.push_back(col.name);
    return res;
  }

private:
  std::size_t column(std::string name, Bound lo, Bound hi) {
    cols_.push_back({std::move(name), std::vector<Bound>(n_, lo),
                     std::vector<Bound>(n_, hi), std::vector<Int>(n_, 0)});
    return cols_.size() - 1;
  }

  /// x' = x as a local row; used to split a coefficient above the target.
  std::size_t copy_of(std::size_t col, const std::string &name) {
    std::size_t c = column(name, cols_[col].lo[0], cols_[col].hi[0]);
    LocalRow row{{{c, 1}, {col, -1}}, std::vector<Int>(n_, 0)};
    locals_.push_back(std::move(row));
    return c;
  }

  static std::pair<Bound, Bound> slack_bounds(Relation rel, Bound q, Bound q_neg) {
    Bound neg = q_neg ? Bound(-*q_neg) : std::nullopt;
    switch (rel) {
    case Relation::Le:
      return {0, q};
    case Relation::Lt:
      return {1, q};
    case Relation::Ge:
      return {neg, 0};
    case Relation::Gt:
      return {neg, -1};
    case Relation::Eq:
      break;
    }
    return {0, 0};
  }

  /// max(|l|, |u|) * a * n * t over finite declared bounds, raised to the
  /// certified range of rhs - lhs when that is larger.
  Int slack_range(std::size_t k) {
    const auto &c = ep_.constraints[k];
    Int norm = 0;
    for (std::size_t j = 0; j < ep_.t(); ++j)
      for (std::size_t i = 0; i < n_; ++i) {
        if (ep_.lower[j][i])
          norm = std::max(norm, checked_abs(*ep_.lower[j][i]));
        if (ep_.upper[j][i])
          norm = std::max(norm, checked_abs(*ep_.upper[j][i]));
      }
    Int q = checked_mul(checked_mul(norm, a_),
                        checked_mul(static_cast<Int>(n_), static_cast<Int>(ep_.t())));
    for (std::size_t i = 0; i < n_; ++i) {
      const Interval &iv = cert_.constraint_lhs[k][i];
      if (!iv.finite())
        throw ValidityError("inequality " + c.lhs.key() +
                            " depends on a variable without finite bounds");
      Int rhs = c.rhs_at(i);
      q = std::max({q, checked_abs(checked_sub(rhs, narrow(iv.lo))),
                    checked_abs(checked_sub(rhs, narrow(iv.hi)))});
    }
    return std::max<Int>(q, 1);
  }

  Affine affine(const Expr &e) {
    Affine out(n_);
    flatten(
        e, 1,
        [&](const Expr &atom, Int c) {
          if (auto *v = std::get_if<VarRef>(&atom.node().v)) {
            out.coef[v->index] = checked_add(out.coef[v->index], c);
          } else {
            out.add(op_result(atom), c);
          }
        },
        [&](const std::vector<Int> &vals, Int c) {
          for (std::size_t i = 0; i < n_; ++i)
            out.cst[i] = checked_add(out.cst[i],
                                     checked_mul(c, vals.size() == 1 ? vals[0] : vals[i]));
        });
    return out;
  }

  const Affine &op_result(const Expr &e) {
    if (auto it = memo_.find(e.key()); it != memo_.end())
      return it->second;
    Affine res = std::visit(
        [&](const auto &node) -> Affine {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, Or>) {
            return rewrite_or(e, node);
          } else if constexpr (std::is_same_v<T, BoolM>) {
            if (auto *arg = std::get_if<Expr>(&node.arg)) {
              auto [v, u] = sign_pair(affine(*arg), node.m, cert_.of(*arg), e.key());
              return result(2, {{v, -1}, {u, -1}});
            }
            const auto &c = std::get<Comparison>(node.arg);
            Affine d = affine(c.lhs);
            d.add(affine(c.rhs), -1);
            auto [v, u] = sign_pair(d, node.m, cert_.intervals.at(comparison_key(c)),
                                    e.key());
            // v = [f >= g], u = [f <= g]
            switch (c.rel) {
            case Relation::Eq:
              return result(-1, {{v, 1}, {u, 1}});
            case Relation::Gt:
              return result(1, {{u, -1}});
            case Relation::Ge:
              return result(0, {{v, 1}});
            case Relation::Lt:
              return result(1, {{v, -1}});
            case Relation::Le:
              return result(0, {{u, 1}});
            }
            return Affine(n_);
          } else if constexpr (std::is_same_v<T, SgnM>) {
            auto [v, u] = sign_pair(affine(node.arg), node.m, cert_.of(node.arg), e.key());
            return result(0, {{v, 1}, {u, -1}});
          } else {
            throw InputError("not an operation: " + e.key());
          }
        },
        e.node().v);
    return memo_.emplace(e.key(), std::move(res)).first->second;
  }

  Affine result(Int c, std::vector<std::pair<std::size_t, Int>> terms) {
    Affine out(n_);
    for (auto &x : out.cst)
      x = c;
    for (auto [col, v] : terms)
      out.coef[col] = v;
    return out;
  }

  Affine rewrite_or(const Expr &e, const Or &node) {
    Affine sum = affine(node.lhs);
    sum.add(affine(node.rhs), 1);
    std::size_t x = column("or:" + e.key(), 0, 1);
    std::size_t s = column("orslack:" + e.key(), 0, 1);
    // 2x - e - f - s = 0
    LocalRow row{{}, std::vector<Int>(n_)};
    for (auto [c, v] : sum.coef)
      row.coef[c] = checked_mul(v, -1);
    if (target_ >= 2) {
      row.coef[x] = 2;
    } else {
      row.coef[x] = 1;
      row.coef[copy_of(x, "orcopy:" + e.key())] = 1;
    }
    row.coef[s] = -1;
    for (std::size_t i = 0; i < n_; ++i)
      row.rhs[i] = sum.cst[i];
    locals_.push_back(std::move(row));
    return result(0, {{x, 1}});
  }

  /// v = [d >= 0], u = [d <= 0] through
  ///   m v (+ v') - d - s_v = 0, s_v in [1, U]
  ///   m u (+ u') + d - s_u = 0, s_u in [1, L]
  /// with U = m, or m + 1 when d can reach m (the copy v' = v supplies the
  /// extra unit so no coefficient exceeds m); symmetric for L.
  std::pair<std::size_t, std::size_t> sign_pair(const Affine &d, Int m,
                                                const Interval &range,
                                                const std::string &tag) {
    std::size_t v = column("v:" + tag, 0, 1);
    std::size_t u = column("u:" + tag, 0, 1);
    bool wide_v = range.hi >= m;
    bool wide_u = range.lo <= -m;
    std::size_t sv = column("sv:" + tag, 1, wide_v ? m + 1 : m);
    std::size_t su = column("su:" + tag, 1, wide_u ? m + 1 : m);
    LocalRow rv{{}, std::vector<Int>(n_)}, ru{{}, std::vector<Int>(n_)};
    for (auto [c, x] : d.coef) {
      rv.coef[c] = checked_mul(x, -1);
      ru.coef[c] = x;
    }
    rv.coef[v] = m;
    ru.coef[u] = m;
    rv.coef[sv] = -1;
    ru.coef[su] = -1;
    for (std::size_t i = 0; i < n_; ++i) {
      rv.rhs[i] = d.cst[i];
      ru.rhs[i] = checked_mul(d.cst[i], -1);
    }
    if (wide_v)
      rv.coef[copy_of(v, "vcopy:" + tag)] = 1;
    if (wide_u)
      ru.coef[copy_of(u, "ucopy:" + tag)] = 1;
    locals_.push_back(std::move(rv));
    locals_.push_back(std::move(ru));
    return {v, u};
  }

  const ExtendedProgram &ep_;
  const ValidityCertificate &cert_;
  std::size_t n_;
  Int a_;
  Int target_;
  std::vector<Column> cols_;
  std::vector<LocalRow> locals_;
  std::vector<GlobalRow> globals_;
  std::vector<std::pair<std::size_t, std::size_t>> gslacks_; ///< (row, constraint)
  std::map<std::string, Affine> memo_;
};

} // namespace detail

/// Largest coefficient over every linear form the rewrite places in a row:
/// constraint sides, bool_m/sgn_m arguments and Or operand sums, with
/// operations treated as atoms. At least 1.
inline Int input_coefficient_bound(const ExtendedProgram &ep) {
  Int a = 1;
  for (const auto &c : ep.constraints) {
    a = std::max(a, detail::form_bound({{&c.lhs, 1}}));
    for_each_subexpr(c.lhs, [&](const Expr &e) {
      std::visit(
          [&](const auto &node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Or>) {
              a = std::max(a, detail::form_bound({{&node.lhs, 1}, {&node.rhs, 1}}));
            } else if constexpr (std::is_same_v<T, BoolM>) {
              if (auto *arg = std::get_if<Expr>(&node.arg)) {
                a = std::max(a, detail::form_bound({{arg, 1}}));
              } else {
                const auto &cmp = std::get<Comparison>(node.arg);
                a = std::max(a, detail::form_bound({{&cmp.lhs, 1}, {&cmp.rhs, -1}}));
              }
            } else if constexpr (std::is_same_v<T, SgnM>) {
              a = std::max(a, detail::form_bound({{&node.arg, 1}}));
            }
          },
          e.node().v);
    });
  }
  return a;
}

/// Rewrites a valid extended program into standard form. Declared variable j
/// keeps column j of every brick; auxiliary columns follow.
inline RewriteResult rewrite(const ExtendedProgram &ep) {
  ValidityCertificate cert = certify_validity(ep);
  Int a = input_coefficient_bound(ep);
  detail::Rewriter rw(ep, cert, a);
  for (std::size_t k = 0; k < ep.constraints.size(); ++k)
    rw.constraint(k);
  RewriteResult res = rw.finish();

  Accounting &acc = res.accounting;
  acc.t = ep.t();
  for (const auto &c : ep.constraints)
    (c.scope == Scope::Global ? acc.r : acc.s) += 1;
  acc.a = a;
  acc.width = extended_width(ep);
  acc.height = extended_height(ep);
  acc.t_out = res.program.t;
  acc.r_out = res.program.r;
  acc.s_out = res.program.s;
  acc.a_out = std::max<Int>(1, res.program.max_coefficient());
  return res;
}

} // namespace nfv::ext
