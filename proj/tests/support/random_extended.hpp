#pragma once

#include <functional>
#include <random>

#include "nfv/core/solver.hpp"
#include "nfv/extended.hpp"

namespace nfv::testing {

/// Random valid extended program: n <= 3 bricks, t <= 3 declared variables
/// with bounds in [-3, 3], up to max_ops operation nodes, declared box
/// volume (over all bricks) at most max_volume.
inline ext::ExtendedProgram random_extended(std::mt19937_64 &rng, int max_ops = 4,
                                            double max_volume = 400) {
  using namespace nfv::ext;
  auto pick = [&](Int lo, Int hi) { return std::uniform_int_distribution<Int>(lo, hi)(rng); };
  for (;;) {
    ExtendedProgram ep(static_cast<std::size_t>(pick(1, 3)));
    const std::size_t t = static_cast<std::size_t>(pick(1, 3));
    for (std::size_t j = 0; j < t; ++j) {
      Int a = pick(-3, 3), b = pick(-3, 3);
      if (pick(0, 2) == 0) {
        a = 0;
        b = 1;
      }
      ep.add_variable("x" + std::to_string(j), std::min(a, b), std::max(a, b), pick(-2, 2));
    }
    // per-brick overrides, then shrink until the box is small enough
    for (std::size_t j = 0; j < t; ++j)
      for (std::size_t i = 1; i < ep.n; ++i)
        if (pick(0, 3) == 0) {
          Int lo = *ep.lower[j][i], hi = *ep.upper[j][i];
          if (hi > lo && pick(0, 1))
            ep.set_bounds(j, i, lo + 1, hi);
          ep.set_weight(j, i, pick(-2, 2));
        }
    auto volume = [&]() {
      double v = 1;
      for (std::size_t j = 0; j < t; ++j)
        for (std::size_t i = 0; i < ep.n; ++i)
          v *= static_cast<double>(*ep.upper[j][i] - *ep.lower[j][i] + 1);
      return v;
    };
    while (volume() > max_volume) {
      std::size_t j = static_cast<std::size_t>(pick(0, static_cast<Int>(t) - 1));
      std::size_t i = static_cast<std::size_t>(pick(0, static_cast<Int>(ep.n) - 1));
      Int lo = *ep.lower[j][i], hi = *ep.upper[j][i];
      if (hi > lo)
        pick(0, 1) ? ep.set_bounds(j, i, lo, hi - 1) : ep.set_bounds(j, i, lo + 1, hi);
    }

    // interval of an expression over all bricks
    auto range = [&](const Expr &e) {
      Interval acc{0, 0};
      for (std::size_t i = 0; i < ep.n; ++i) {
        ext::detail::BrickCertifier c(ep, i);
        Interval iv = c(e);
        acc = i == 0 ? iv : ext::detail::hull(acc, iv);
      }
      return acc;
    };
    auto magnitude = [](const Interval &iv) {
      return static_cast<Int>(std::max(-iv.lo, iv.hi));
    };

    int ops = 0;
    auto linear = [&]() {
      std::vector<std::pair<Int, Expr>> terms;
      int k = static_cast<int>(pick(1, 2));
      for (int q = 0; q < k; ++q) {
        Int c = pick(-2, 2);
        terms.emplace_back(c == 0 ? 1 : c, var(static_cast<std::size_t>(pick(0, static_cast<Int>(t) - 1))));
      }
      if (pick(0, 2) == 0) {
        std::vector<Int> vals;
        for (std::size_t i = 0; i < ep.n; ++i)
          vals.push_back(pick(-1, 1));
        terms.emplace_back(1, pick(0, 1) ? constant(vals[0]) : constant_per_brick(vals));
      }
      return lin(std::move(terms));
    };
    auto height_for = [&](const Interval &iv) {
      return std::max<Int>(1, magnitude(iv)) + pick(0, 1);
    };
    std::function<Expr(int)> binary = [&](int depth) -> Expr {
      int choice = static_cast<int>(pick(0, depth > 1 ? 2 : 4));
      if (ops >= max_ops)
        choice = 5;
      switch (choice) {
      case 0:
      case 1: {
        ++ops;
        Expr f = linear();
        if (pick(0, 1))
          return bool_m(height_for(range(f)), f);
        Expr g = linear();
        Relation rel = static_cast<Relation>(pick(0, 4));
        return bool_m(height_for(range(f - g)), rel, f, g);
      }
      case 2: {
        ++ops;
        return logical_not(binary(depth + 1));
      }
      case 3:
      case 4: {
        ++ops;
        Expr a = binary(depth + 1);
        return logical_or(a, binary(depth + 1));
      }
      default:
        for (std::size_t j = 0; j < t; ++j)
          if (range(var(j)).lo >= 0 && range(var(j)).hi <= 1)
            return var(j);
        return constant(pick(0, 1));
      }
    };
    auto term = [&]() -> Expr {
      if (ops < max_ops && pick(0, 3) == 0) {
        ++ops;
        Expr f = linear();
        return sgn_m(height_for(range(f)), f);
      }
      if (ops < max_ops && pick(0, 1))
        return binary(0);
      return linear();
    };

    // a random box point keeps many instances feasible
    std::vector<std::vector<Int>> point(ep.n, std::vector<Int>(t));
    for (std::size_t i = 0; i < ep.n; ++i)
      for (std::size_t j = 0; j < t; ++j)
        point[i][j] = pick(*ep.lower[j][i], *ep.upper[j][i]);

    int k = static_cast<int>(pick(1, 3));
    for (int q = 0; q < k; ++q) {
      Expr lhs = pick(0, 1) ? lin({{pick(1, 2), term()}, {pick(-2, 2), term()}}) : term();
      Relation rel = static_cast<Relation>(pick(0, 4));
      bool global = pick(0, 2) == 0;
      std::vector<Int> vals;
      bool defined = true;
      for (std::size_t i = 0; i < ep.n; ++i) {
        auto v = eval_expr(lhs, i, point[i]);
        if (!v)
          defined = false;
        vals.push_back(v.value_or(0) + (pick(0, 3) == 0 ? pick(-1, 1) : 0));
      }
      if (!defined)
        continue;
      if (global) {
        Int sum = 0;
        for (Int v : vals)
          sum += v;
        ep.add_global(lhs, rel, sum);
      } else if (pick(0, 1)) {
        ep.add_local(lhs, rel, vals);
      } else {
        ep.add_local(lhs, rel, vals[0]);
      }
    }
    try {
      certify_validity(ep);
    } catch (const ValidityError &) {
      continue;
    }
    return ep;
  }
}

/// Calls f on every in-box declared assignment (bounds must be finite).
template <class F>
void for_each_declared(const ext::ExtendedProgram &ep, F &&f) {
  const std::size_t t = ep.t();
  std::vector<std::vector<Int>> x(ep.n, std::vector<Int>(t));
  for (std::size_t i = 0; i < ep.n; ++i)
    for (std::size_t j = 0; j < t; ++j)
      x[i][j] = *ep.lower[j][i];
  for (;;) {
    f(std::as_const(x));
    std::size_t i = 0, j = 0;
    for (;;) {
      if (i == ep.n)
        return;
      if (x[i][j] < *ep.upper[j][i]) {
        ++x[i][j];
        break;
      }
      x[i][j] = *ep.lower[j][i];
      if (++j == t) {
        j = 0;
        ++i;
      }
    }
  }
}

/// Standard program with every declared coordinate fixed to x.
inline StandardNFoldProgram fix_declared(const ext::RewriteResult &rr,
                                         const std::vector<std::vector<Int>> &x) {
  StandardNFoldProgram p = rr.program;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x[i].size(); ++j) {
      p.lower[rr.var_map[i][j]] = x[i][j];
      p.upper[rr.var_map[i][j]] = x[i][j];
    }
  return p;
}

struct SoundnessReport {
  std::size_t points = 0;
  std::size_t feasible = 0;
  std::string failure;
};

/// Compares eval_extended with the rewritten program on every declared
/// assignment: feasibility must coincide and objective values must agree.
inline SoundnessReport check_soundness(const ext::ExtendedProgram &ep,
                                       const ext::RewriteResult &rr) {
  SoundnessReport rep;
  for_each_declared(ep, [&](const std::vector<std::vector<Int>> &x) {
    if (!rep.failure.empty())
      return;
    ++rep.points;
    auto ev = ext::eval_extended(ep, x);
    auto out = solve(fix_declared(rr, x));
    bool std_feasible = is_optimal(out);
    if (ev.undefined) {
      rep.failure = "undefined evaluation inside a certified box";
      return;
    }
    if (ev.feasible != std_feasible) {
      rep.failure = std::string("feasibility differs: extended ") +
                    (ev.feasible ? "feasible" : "infeasible") + ", standard " +
                    describe(out);
      return;
    }
    if (ev.feasible) {
      ++rep.feasible;
      if (std::get<Optimal>(out).value != ev.value)
        rep.failure = "objective differs";
    }
  });
  return rep;
}

} // namespace nfv::testing
