#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "nfv/core/checked.hpp"
#include "nfv/core/program.hpp"

namespace nfv::detail {

using Wide = __int128;

/// Magnitudes at or beyond this are treated as infinite.
inline constexpr Wide kInf = Wide(1) << 100;

struct Interval {
  Wide lo = -kInf;
  Wide hi = kInf;

  [[nodiscard]] bool lo_finite() const { return lo > -kInf; }
  [[nodiscard]] bool hi_finite() const { return hi < kInf; }
  [[nodiscard]] bool finite() const { return lo_finite() && hi_finite(); }
  [[nodiscard]] bool fixed() const { return lo == hi; }
  [[nodiscard]] bool empty() const { return lo > hi; }
  [[nodiscard]] Wide width() const { return hi - lo; }
};

inline Interval from_bounds(const Bound &l, const Bound &u) {
  Interval iv;
  if (l)
    iv.lo = *l;
  if (u)
    iv.hi = *u;
  return iv;
}

/// sum_j coef_j * x_{var_j} = rhs
struct SparseRow {
  std::vector<std::pair<std::size_t, Int>> terms;
  Int rhs = 0;
};

inline Wide floor_div(Wide a, Wide b) {
  Wide q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0)))
    --q;
  return q;
}

inline Wide ceil_div(Wide a, Wide b) { return -floor_div(-a, b); }

/// Bounds propagation over linear equality rows with a worklist of rows.
/// Returns false as soon as some domain becomes empty. Propagation is only a
/// pruning device: callers must still check rows on fully fixed points.
class Propagator {
public:
  Propagator(const std::vector<SparseRow> &rows, std::size_t num_vars)
      : rows_(&rows), var_rows_(num_vars) {
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (auto [v, c] : rows[r].terms)
        if (c != 0)
          var_rows_[v].push_back(r);
  }

  /// Propagate from every row.
  bool run(std::vector<Interval> &dom, std::size_t budget = 200000) const {
    std::vector<std::size_t> work(rows_->size());
    for (std::size_t r = 0; r < work.size(); ++r)
      work[r] = r;
    return drain(dom, work, budget);
  }

  /// Propagate from the rows touching one changed variable.
  bool run_from(std::vector<Interval> &dom, std::size_t var,
                std::size_t budget = 200000) const {
    std::vector<std::size_t> work(var_rows_[var].begin(), var_rows_[var].end());
    return drain(dom, work, budget);
  }

  [[nodiscard]] const std::vector<std::size_t> &rows_of(std::size_t v) const {
    return var_rows_[v];
  }

private:
  bool drain(std::vector<Interval> &dom, std::vector<std::size_t> &work,
             std::size_t budget) const {
    std::vector<char> queued(rows_->size(), 0);
    for (auto r : work)
      queued[r] = 1;
    std::size_t head = 0;
    std::size_t steps = 0;
    while (head < work.size()) {
      if (++steps > budget)
        return true;
      std::size_t r = work[head++];
      queued[r] = 0;
      if (!revise((*rows_)[r], dom, [&](std::size_t v) {
            for (auto rr : var_rows_[v])
              if (!queued[rr]) {
                queued[rr] = 1;
                work.push_back(rr);
              }
          }))
        return false;
      if (head > 4096 && head * 2 > work.size()) {
        work.erase(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(head));
        head = 0;
      }
    }
    return true;
  }

  template <class OnChange>
  static bool revise(const SparseRow &row, std::vector<Interval> &dom,
                     OnChange &&changed) {
    Wide min_sum = 0, max_sum = 0;
    int min_inf = 0, max_inf = 0;
    for (auto [v, c] : row.terms) {
      const Interval &d = dom[v];
      if (c > 0) {
        d.lo_finite() ? (void)(min_sum += Wide(c) * d.lo) : (void)++min_inf;
        d.hi_finite() ? (void)(max_sum += Wide(c) * d.hi) : (void)++max_inf;
      } else if (c < 0) {
        d.hi_finite() ? (void)(min_sum += Wide(c) * d.hi) : (void)++min_inf;
        d.lo_finite() ? (void)(max_sum += Wide(c) * d.lo) : (void)++max_inf;
      }
    }
    const Wide rhs = row.rhs;
    if (min_inf == 0 && min_sum > rhs)
      return false;
    if (max_inf == 0 && max_sum < rhs)
      return false;
    for (auto [v, c] : row.terms) {
      if (c == 0)
        continue;
      Interval &d = dom[v];
      // contributions of this term to min/max sums
      bool term_min_inf, term_max_inf;
      Wide term_min = 0, term_max = 0;
      if (c > 0) {
        term_min_inf = !d.lo_finite();
        term_max_inf = !d.hi_finite();
        if (!term_min_inf)
          term_min = Wide(c) * d.lo;
        if (!term_max_inf)
          term_max = Wide(c) * d.hi;
      } else {
        term_min_inf = !d.hi_finite();
        term_max_inf = !d.lo_finite();
        if (!term_min_inf)
          term_min = Wide(c) * d.hi;
        if (!term_max_inf)
          term_max = Wide(c) * d.lo;
      }
      // c*x = rhs - rest, rest in [rest_min, rest_max]
      bool rest_min_inf = (min_inf - (term_min_inf ? 1 : 0)) > 0;
      bool rest_max_inf = (max_inf - (term_max_inf ? 1 : 0)) > 0;
      Wide rest_min = min_sum - term_min;
      Wide rest_max = max_sum - term_max;
      bool changed_here = false;
      // c*x <= rhs - rest_min ; c*x >= rhs - rest_max
      if (!rest_min_inf) {
        Wide cap = rhs - rest_min;
        if (c > 0) {
          Wide nh = floor_div(cap, c);
          if (nh < d.hi) {
            d.hi = nh;
            changed_here = true;
          }
        } else {
          Wide nl = ceil_div(cap, c);
          if (nl > d.lo) {
            d.lo = nl;
            changed_here = true;
          }
        }
      }
      if (!rest_max_inf) {
        Wide floor_v = rhs - rest_max;
        if (c > 0) {
          Wide nl = ceil_div(floor_v, c);
          if (nl > d.lo) {
            d.lo = nl;
            changed_here = true;
          }
        } else {
          Wide nh = floor_div(floor_v, c);
          if (nh < d.hi) {
            d.hi = nh;
            changed_here = true;
          }
        }
      }
      if (d.empty())
        return false;
      if (changed_here)
        changed(v);
    }
    return true;
  }

  const std::vector<SparseRow> *rows_;
  std::vector<std::vector<std::size_t>> var_rows_;
};

/// Local rows of brick i over brick-local variable indices 0..t-1.
inline std::vector<SparseRow> local_rows(const StandardNFoldProgram &p,
                                         std::size_t brick) {
  std::vector<SparseRow> rows;
  rows.reserve(p.s);
  for (std::size_t k = 0; k < p.s; ++k) {
    SparseRow row;
    for (std::size_t j = 0; j < p.t; ++j)
      if (p.A.at(k, j) != 0)
        row.terms.emplace_back(j, p.A.at(k, j));
    row.rhs = p.local_rhs(brick, k);
    rows.push_back(std::move(row));
  }
  return rows;
}

/// All rows of E^(n) over global coordinates.
inline std::vector<SparseRow> all_rows(const StandardNFoldProgram &p) {
  std::vector<SparseRow> rows;
  rows.reserve(p.r + p.n * p.s);
  for (std::size_t k = 0; k < p.r; ++k) {
    SparseRow row;
    for (std::size_t i = 0; i < p.n; ++i)
      for (std::size_t j = 0; j < p.t; ++j)
        if (Int c = p.global_coef(i, k, j); c != 0)
          row.terms.emplace_back(p.coord(i, j), c);
    row.rhs = p.global_rhs(k);
    rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < p.n; ++i)
    for (std::size_t k = 0; k < p.s; ++k) {
      SparseRow row;
      for (std::size_t j = 0; j < p.t; ++j)
        if (p.A.at(k, j) != 0)
          row.terms.emplace_back(p.coord(i, j), p.A.at(k, j));
      row.rhs = p.local_rhs(i, k);
      rows.push_back(std::move(row));
    }
  return rows;
}

} // namespace nfv::detail
