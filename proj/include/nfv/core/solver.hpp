#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "nfv/core/checked.hpp"
#include "nfv/core/errors.hpp"
#include "nfv/core/program.hpp"
#include "nfv/core/propagate.hpp"

namespace nfv {

struct Infeasible {
  friend bool operator==(const Infeasible &, const Infeasible &) = default;
};

/// Feasible program whose objective decreases without bound along `ray`
/// starting from `point`.
struct Unbounded {
  std::vector<Int> point;
  std::vector<Int> ray;
  friend bool operator==(const Unbounded &, const Unbounded &) = default;
};

struct Optimal {
  std::vector<Int> assignment;
  Int value = 0;
  friend bool operator==(const Optimal &, const Optimal &) = default;
};

using SolveOutcome = std::variant<Infeasible, Unbounded, Optimal>;

inline bool is_optimal(const SolveOutcome &o) {
  return std::holds_alternative<Optimal>(o);
}
inline bool is_infeasible(const SolveOutcome &o) {
  return std::holds_alternative<Infeasible>(o);
}
inline bool is_unbounded(const SolveOutcome &o) {
  return std::holds_alternative<Unbounded>(o);
}

inline std::string describe(const SolveOutcome &o) {
  if (is_infeasible(o))
    return "infeasible";
  if (is_unbounded(o))
    return "unbounded";
  return "optimal " + std::to_string(std::get<Optimal>(o).value);
}

struct SolverConfig {
  std::size_t brick_table_cap = 1'000'000;
  std::size_t dp_state_cap = 1'000'000;
  /// Points enumerated by brute_force_solve.
  std::size_t brute_force_cap = 10'000'000;
  /// Largest |entry| tried by the ray search.
  Int ray_entry_cap = 6;
  /// Window used to look for a feasible point when the box stays infinite.
  Int unbounded_window = 64;
};

struct BrickEntry {
  std::vector<Int> y;
  std::vector<Int> d; ///< D * y
  Int cost = 0;       ///< w^i * y

  friend bool operator==(const BrickEntry &, const BrickEntry &) = default;
};

/// Feasible points of one brick in lexicographic order.
struct BrickSolutionTable {
  std::size_t brick = 0;
  std::vector<BrickEntry> entries;
};

namespace detail {

/// Depth-first enumeration of {y : rows(y) = rhs, y in dom}, branching on the
/// lowest unfixed index with ascending values, so output is lexicographic.
class BrickEnumerator {
public:
  BrickEnumerator(const std::vector<SparseRow> &rows, std::size_t width,
                  std::size_t cap)
      : rows_(rows), prop_(rows, width), width_(width), cap_(cap) {}

  template <class Emit>
  void run(std::vector<Interval> dom, Emit &&emit) {
    for (std::size_t j = 0; j < width_; ++j)
      if (!dom[j].finite())
        throw ResourceError("brick variable " + std::to_string(j) +
                            " has an infinite domain and no finiteness "
                            "certificate");
    if (!prop_.run(dom))
      return;
    recurse(dom, 0, emit);
  }

private:
  template <class Emit>
  void recurse(std::vector<Interval> &dom, std::size_t from, Emit &emit) {
    std::size_t j = from;
    while (j < width_ && dom[j].fixed())
      ++j;
    if (j == width_) {
      std::vector<Int> y(width_);
      for (std::size_t k = 0; k < width_; ++k)
        y[k] = static_cast<Int>(dom[k].lo);
      for (const auto &row : rows_) {
        Wide sum = 0;
        for (auto [v, c] : row.terms)
          sum += Wide(c) * y[v];
        if (sum != row.rhs)
          return;
      }
      if (++count_ > cap_)
        throw ResourceError("brick table exceeds cap of " +
                            std::to_string(cap_) + " entries");
      emit(std::move(y));
      return;
    }
    for (Wide v = dom[j].lo; v <= dom[j].hi; ++v) {
      std::vector<Interval> next = dom;
      next[j].lo = next[j].hi = v;
      if (prop_.run_from(next, j))
        recurse(next, j + 1, emit);
    }
  }

  const std::vector<SparseRow> &rows_;
  Propagator prop_;
  std::size_t width_;
  std::size_t cap_;
  std::size_t count_ = 0;
};

struct VecHash {
  std::size_t operator()(const std::vector<Int> &v) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (Int x : v) {
      h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) +
           (h >> 2);
    }
    return h;
  }
};

/// One step of the dynamic program: either a whole brick core or a single
/// trailing variable with no local rows.
struct Stage {
  std::size_t first_coord = 0;
  std::vector<BrickEntry> options;
};

inline std::vector<Int> d_of(const StandardNFoldProgram &p, std::size_t brick,
                             const std::vector<Int> &y, std::size_t offset) {
  std::vector<Int> d(p.r, 0);
  for (std::size_t k = 0; k < p.r; ++k) {
    Int sum = 0;
    for (std::size_t j = 0; j < y.size(); ++j)
      sum = checked_add(sum, checked_mul(p.global_coef(brick, k, offset + j), y[j]));
    d[k] = sum;
  }
  return d;
}

inline Int cost_of(const StandardNFoldProgram &p, std::size_t brick,
                   const std::vector<Int> &y, std::size_t offset) {
  Int c = 0;
  for (std::size_t j = 0; j < y.size(); ++j)
    c = checked_add(c, checked_mul(p.weight[p.coord(brick, offset + j)], y[j]));
  return c;
}

/// Index of the first column of the trailing run of all-zero A columns.
inline std::size_t core_width(const StandardNFoldProgram &p) {
  std::size_t k = p.t;
  while (k > 0) {
    bool zero = true;
    for (std::size_t row = 0; row < p.s; ++row)
      if (p.A.at(row, k - 1) != 0) {
        zero = false;
        break;
      }
    if (!zero)
      break;
    --k;
  }
  return k;
}

/// Tightens all bounds through every row of E^(n). Returns nullopt when some
/// domain empties (the program is infeasible).
inline std::optional<std::vector<Interval>>
tightened_domains(const StandardNFoldProgram &p) {
  std::vector<Interval> dom(p.dimension());
  for (std::size_t j = 0; j < dom.size(); ++j)
    dom[j] = from_bounds(p.lower[j], p.upper[j]);
  auto rows = all_rows(p);
  Propagator prop(rows, dom.size());
  if (!prop.run(dom))
    return std::nullopt;
  return dom;
}

/// Exact DP over stages keyed by the accumulated D contribution. Ties are
/// broken towards the lexicographically smallest assignment.
inline SolveOutcome solve_finite(const StandardNFoldProgram &p,
                                 const std::vector<Interval> &dom,
                                 const SolverConfig &cfg) {
  const std::size_t core = core_width(p);
  std::vector<Stage> stages;
  for (std::size_t i = 0; i < p.n; ++i) {
    Stage st;
    st.first_coord = p.coord(i, 0);
    if (core > 0) {
      std::vector<SparseRow> rows = local_rows(p, i);
      std::vector<Interval> bdom(dom.begin() + static_cast<std::ptrdiff_t>(p.coord(i, 0)),
                                 dom.begin() + static_cast<std::ptrdiff_t>(p.coord(i, core)));
      BrickEnumerator en(rows, core, cfg.brick_table_cap);
      en.run(bdom, [&](std::vector<Int> y) {
        BrickEntry e;
        e.d = d_of(p, i, y, 0);
        e.cost = cost_of(p, i, y, 0);
        e.y = std::move(y);
        st.options.push_back(std::move(e));
      });
    } else {
      st.options.push_back(BrickEntry{{}, std::vector<Int>(p.r, 0), 0});
    }
    if (st.options.empty())
      return Infeasible{};
    stages.push_back(std::move(st));
    for (std::size_t j = core; j < p.t; ++j) {
      const Interval &iv = dom[p.coord(i, j)];
      if (!iv.finite())
        throw ResourceError("coordinate " + std::to_string(p.coord(i, j)) +
                            " has an infinite domain");
      if (static_cast<std::size_t>(iv.width()) + 1 > cfg.brick_table_cap)
        throw ResourceError("single-variable stage exceeds brick table cap");
      Stage single;
      single.first_coord = p.coord(i, j);
      for (Wide v = iv.lo; v <= iv.hi; ++v) {
        BrickEntry e;
        e.y = {static_cast<Int>(v)};
        e.d.resize(p.r);
        for (std::size_t k = 0; k < p.r; ++k)
          e.d[k] = checked_mul(p.global_coef(i, k, j), e.y[0]);
        e.cost = checked_mul(p.weight[p.coord(i, j)], e.y[0]);
        single.options.push_back(std::move(e));
      }
      stages.push_back(std::move(single));
    }
  }

  const std::size_t S = stages.size();
  const std::size_t r = p.r;
  // suffix ranges of the D contribution, per row
  std::vector<std::vector<Wide>> suf_min(S + 1, std::vector<Wide>(r, 0));
  std::vector<std::vector<Wide>> suf_max(S + 1, std::vector<Wide>(r, 0));
  for (std::size_t k = S; k-- > 0;) {
    for (std::size_t row = 0; row < r; ++row) {
      Wide lo = kInf, hi = -kInf;
      for (const auto &o : stages[k].options) {
        lo = std::min<Wide>(lo, o.d[row]);
        hi = std::max<Wide>(hi, o.d[row]);
      }
      suf_min[k][row] = suf_min[k + 1][row] + lo;
      suf_max[k][row] = suf_max[k + 1][row] + hi;
    }
  }
  std::vector<Int> target(p.b.begin(), p.b.begin() + static_cast<std::ptrdiff_t>(r));
  auto viable = [&](const std::vector<Int> &state, std::size_t k) {
    for (std::size_t row = 0; row < r; ++row) {
      Wide need = Wide(target[row]) - state[row];
      if (need < suf_min[k][row] || need > suf_max[k][row])
        return false;
    }
    return true;
  };

  using StateSet = std::unordered_map<std::vector<Int>, Int, VecHash>;
  std::vector<StateSet> reach(S + 1);
  std::vector<Int> zero(r, 0);
  if (!viable(zero, 0))
    return Infeasible{};
  reach[0].emplace(zero, 0);
  for (std::size_t k = 0; k < S; ++k) {
    for (const auto &[state, unused] : reach[k]) {
      (void)unused;
      for (const auto &o : stages[k].options) {
        std::vector<Int> next(r);
        for (std::size_t row = 0; row < r; ++row)
          next[row] = checked_add(state[row], o.d[row]);
        if (!viable(next, k + 1))
          continue;
        reach[k + 1].emplace(std::move(next), 0);
        if (reach[k + 1].size() > cfg.dp_state_cap)
          throw ResourceError("dynamic program exceeds state cap of " +
                              std::to_string(cfg.dp_state_cap));
      }
    }
    if (reach[k + 1].empty())
      return Infeasible{};
  }

  // cost-to-go; states absent from the map cannot complete
  std::vector<StateSet> ctg(S + 1);
  if (reach[S].count(target))
    ctg[S].emplace(target, 0);
  if (ctg[S].empty())
    return Infeasible{};
  for (std::size_t k = S; k-- > 0;) {
    for (const auto &[state, unused] : reach[k]) {
      (void)unused;
      std::optional<Int> best;
      for (const auto &o : stages[k].options) {
        std::vector<Int> next(r);
        for (std::size_t row = 0; row < r; ++row)
          next[row] = state[row] + o.d[row];
        auto it = ctg[k + 1].find(next);
        if (it == ctg[k + 1].end())
          continue;
        Int c = checked_add(o.cost, it->second);
        if (!best || c < *best)
          best = c;
      }
      if (best)
        ctg[k].emplace(state, *best);
    }
    reach[k + 1].clear();
  }
  auto root = ctg[0].find(zero);
  if (root == ctg[0].end())
    return Infeasible{};

  Optimal opt;
  opt.value = root->second;
  opt.assignment.assign(p.dimension(), 0);
  std::vector<Int> state = zero;
  Int remaining = opt.value;
  for (std::size_t k = 0; k < S; ++k) {
    bool found = false;
    for (const auto &o : stages[k].options) {
      std::vector<Int> next(r);
      for (std::size_t row = 0; row < r; ++row)
        next[row] = state[row] + o.d[row];
      auto it = ctg[k + 1].find(next);
      if (it == ctg[k + 1].end() || o.cost + it->second != remaining)
        continue;
      for (std::size_t j = 0; j < o.y.size(); ++j)
        opt.assignment[stages[k].first_coord + j] = o.y[j];
      state = std::move(next);
      remaining = it->second;
      found = true;
      break;
    }
    if (!found)
      throw std::logic_error("dynamic program reconstruction failed");
  }
  return opt;
}

/// Searches small-support integer rays z with E^(n) z = 0, w z < 0 that stay
/// inside the box from any feasible point.
inline std::optional<std::vector<Int>>
find_improving_ray(const StandardNFoldProgram &p,
                   const std::vector<Interval> &dom, const SolverConfig &cfg) {
  std::vector<std::size_t> free_coords;
  std::vector<int> sign; // +1: only z>=0, -1: only z<=0, 0: both
  for (std::size_t j = 0; j < dom.size(); ++j) {
    bool lo = dom[j].lo_finite(), hi = dom[j].hi_finite();
    if (lo && hi)
      continue;
    free_coords.push_back(j);
    sign.push_back(lo ? 1 : (hi ? -1 : 0));
  }
  if (free_coords.empty())
    return std::nullopt;
  Int a = std::max<Int>(1, p.max_coefficient());
  Int K = 1;
  for (std::size_t i = 0; i < p.t && K < cfg.ray_entry_cap; ++i)
    K = std::min<Int>(cfg.ray_entry_cap, K * a);
  auto rows = all_rows(p);
  const std::size_t max_support = std::min<std::size_t>({p.t, free_coords.size(), 3});

  std::vector<Int> z(p.dimension(), 0);
  std::vector<std::size_t> chosen;
  std::optional<std::vector<Int>> found;
  auto check = [&]() {
    Wide obj = 0;
    for (auto j : chosen)
      obj += Wide(p.weight[j]) * z[j];
    if (obj >= 0)
      return false;
    for (const auto &row : rows) {
      Wide sum = 0;
      for (auto [v, c] : row.terms)
        sum += Wide(c) * z[v];
      if (sum != 0)
        return false;
    }
    return true;
  };
  std::function<bool(std::size_t, std::size_t)> pick_values;
  pick_values = [&](std::size_t idx, std::size_t /*unused*/) -> bool {
    if (idx == chosen.size())
      return check();
    std::size_t j = chosen[idx];
    int sg = 0;
    for (std::size_t q = 0; q < free_coords.size(); ++q)
      if (free_coords[q] == j)
        sg = sign[q];
    for (Int v = -K; v <= K; ++v) {
      if (v == 0 || (sg > 0 && v < 0) || (sg < 0 && v > 0))
        continue;
      z[j] = v;
      if (pick_values(idx + 1, 0))
        return true;
    }
    z[j] = 0;
    return false;
  };
  std::function<bool(std::size_t, std::size_t)> pick_support;
  pick_support = [&](std::size_t start, std::size_t want) -> bool {
    if (chosen.size() == want)
      return pick_values(0, 0);
    for (std::size_t q = start; q < free_coords.size(); ++q) {
      chosen.push_back(free_coords[q]);
      if (pick_support(q + 1, want))
        return true;
      z[chosen.back()] = 0;
      chosen.pop_back();
    }
    return false;
  };
  for (std::size_t want = 1; want <= max_support && !found; ++want)
    if (pick_support(0, want))
      found = z;
  return found;
}

} // namespace detail

/// Exact feasible points of brick i, with their D projections and costs.
/// Only the brick's own box and local rows are used.
inline BrickSolutionTable
enumerate_brick_assignments(const StandardNFoldProgram &p, std::size_t brick,
                            const SolverConfig &cfg = {}) {
  require_valid(p);
  if (brick >= p.n)
    throw InputError("brick index " + std::to_string(brick) + " out of range");
  std::vector<detail::Interval> dom(p.t);
  for (std::size_t j = 0; j < p.t; ++j)
    dom[j] = detail::from_bounds(p.lower[p.coord(brick, j)],
                                 p.upper[p.coord(brick, j)]);
  auto rows = detail::local_rows(p, brick);
  BrickSolutionTable table;
  table.brick = brick;
  detail::BrickEnumerator en(rows, p.t, cfg.brick_table_cap);
  en.run(dom, [&](std::vector<Int> y) {
    BrickEntry e;
    e.d = detail::d_of(p, brick, y, 0);
    e.cost = detail::cost_of(p, brick, y, 0);
    e.y = std::move(y);
    table.entries.push_back(std::move(e));
  });
  return table;
}

/// Solves a standard n-fold program exactly. Among optimal points the
/// lexicographically smallest is returned.
inline SolveOutcome solve(const StandardNFoldProgram &p,
                          const SolverConfig &cfg = {}) {
  require_valid(p);
  auto dom = detail::tightened_domains(p);
  if (!dom)
    return Infeasible{};
  bool finite = std::all_of(dom->begin(), dom->end(),
                            [](const detail::Interval &iv) { return iv.finite(); });
  if (finite)
    return detail::solve_finite(p, *dom, cfg);

  auto ray = detail::find_improving_ray(p, *dom, cfg);
  if (!ray)
    throw ResourceError("box remains infinite after bound tightening and no "
                        "improving ray was found");
  // look for a feasible point inside a finite window of the box
  std::vector<detail::Interval> window = *dom;
  const detail::Wide W = cfg.unbounded_window;
  for (auto &iv : window) {
    if (!iv.lo_finite() && !iv.hi_finite()) {
      iv.lo = -W;
      iv.hi = W;
    } else if (!iv.hi_finite()) {
      iv.hi = iv.lo + W;
    } else if (!iv.lo_finite()) {
      iv.lo = iv.hi - W;
    }
  }
  StandardNFoldProgram capped = p;
  for (std::size_t j = 0; j < window.size(); ++j) {
    capped.lower[j] = narrow(window[j].lo);
    capped.upper[j] = narrow(window[j].hi);
  }
  auto inner = detail::solve_finite(capped, window, cfg);
  if (auto *o = std::get_if<Optimal>(&inner))
    return Unbounded{o->assignment, *ray};
  throw ResourceError("improving ray exists but no feasible point was found "
                      "inside the search window");
}

/// Reference solver: enumerates the whole box in lexicographic order.
inline SolveOutcome brute_force_solve(const StandardNFoldProgram &p,
                                      const SolverConfig &cfg = {}) {
  require_valid(p);
  const std::size_t dim = p.dimension();
  detail::Wide volume = 1;
  for (std::size_t j = 0; j < dim; ++j) {
    if (!p.lower[j] || !p.upper[j])
      throw InputError("brute_force_solve requires finite bounds");
    volume *= detail::Wide(*p.upper[j] - *p.lower[j] + 1);
    if (volume > detail::Wide(cfg.brute_force_cap))
      throw ResourceError("box volume exceeds brute-force cap of " +
                          std::to_string(cfg.brute_force_cap));
  }
  std::vector<Int> x(dim);
  for (std::size_t j = 0; j < dim; ++j)
    x[j] = *p.lower[j];
  std::optional<Optimal> best;
  while (true) {
    Evaluation ev = evaluate(p, x);
    if (ev.feasible && (!best || ev.value < best->value))
      best = Optimal{x, ev.value};
    // odometer: last coordinate varies fastest
    bool done = true;
    for (std::size_t j = dim; j-- > 0;) {
      if (x[j] < *p.upper[j]) {
        ++x[j];
        done = false;
        break;
      }
      x[j] = *p.lower[j];
    }
    if (done)
      break;
  }
  if (best)
    return *best;
  return Infeasible{};
}

} // namespace nfv
