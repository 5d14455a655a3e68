#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nfv/core/checked.hpp"
#include "nfv/core/errors.hpp"

namespace nfv::vote {

/// Integer cost or Forbidden. Forbidden absorbs under addition.
class Cost {
public:
  Cost(Int v = 0) : v_(v) {} // NOLINT(google-explicit-constructor)

  static Cost forbidden() {
    Cost c;
    c.v_.reset();
    return c;
  }

  [[nodiscard]] bool is_forbidden() const { return !v_.has_value(); }

  [[nodiscard]] Int value() const {
    if (!v_)
      throw InputError("value of a forbidden cost");
    return *v_;
  }

  friend Cost operator+(const Cost &a, const Cost &b) {
    if (a.is_forbidden() || b.is_forbidden())
      return forbidden();
    return checked_add(*a.v_, *b.v_);
  }
  Cost &operator+=(const Cost &o) { return *this = *this + o; }

  friend bool operator==(const Cost &, const Cost &) = default;

  [[nodiscard]] std::string str() const {
    return v_ ? std::to_string(*v_) : std::string("forbidden");
  }

private:
  std::optional<Int> v_;
};

enum class WinnerModel { Unique, CoWinner };

inline std::string to_string(WinnerModel w) {
  return w == WinnerModel::Unique ? "unique" : "cowinner";
}

inline WinnerModel parse_winner_model(const std::string &s) {
  if (s == "unique")
    return WinnerModel::Unique;
  if (s == "cowinner" || s == "co-winner")
    return WinnerModel::CoWinner;
  throw InputError("unknown winner model '" + s + "' (expected unique or cowinner)");
}

struct Voter {
  /// Candidate indices, most preferred first. Candidates not listed are unranked.
  std::vector<std::size_t> order;
  /// Only the first truncated_at entries of order are ranked.
  std::optional<std::size_t> truncated_at;
  Int approval = 0;
  bool active = true;
  /// swap[c][c2] = sigma(c, c2), the cost of swapping c ranked above c2.
  std::vector<std::vector<Cost>> swap;
  /// push[offset + approval] for offsets -approval..m-approval.
  std::vector<Cost> push;
  Cost influence = 0;
  Cost activate = Cost::forbidden();
  Cost deactivate = Cost::forbidden();

  [[nodiscard]] std::size_t ranked() const {
    return std::min(order.size(), truncated_at.value_or(order.size()));
  }

  [[nodiscard]] bool push_in_domain(Int offset) const {
    return offset >= -approval && offset + approval < static_cast<Int>(push.size());
  }

  [[nodiscard]] const Cost &pi(Int offset) const {
    if (!push_in_domain(offset))
      throw InputError("push offset " + std::to_string(offset) + " outside the domain");
    return push[static_cast<std::size_t>(offset + approval)];
  }

  friend bool operator==(const Voter &, const Voter &) = default;
};

/// Voter with default costs: sigma = 1, pi forbidden except pi(0) = 0,
/// influence 0, (de)activation forbidden.
inline Voter default_voter(std::size_t m, std::vector<std::size_t> order, Int approval = 0) {
  Voter v;
  v.order = std::move(order);
  v.approval = approval;
  v.swap.assign(m, std::vector<Cost>(m, 1));
  for (std::size_t c = 0; c < m; ++c)
    v.swap[c][c] = 0;
  v.push.assign(m + 1, Cost::forbidden());
  if (approval >= 0 && approval <= static_cast<Int>(m))
    v.push[static_cast<std::size_t>(approval)] = 0;
  return v;
}

struct Election {
  std::vector<std::string> candidates;
  std::size_t designated = 0;
  std::optional<WinnerModel> winner_model;
  std::vector<Voter> voters;

  [[nodiscard]] std::size_t m() const { return candidates.size(); }

  [[nodiscard]] std::size_t index_of(const std::string &name) const {
    for (std::size_t c = 0; c < candidates.size(); ++c)
      if (candidates[c] == name)
        return c;
    throw InputError("unknown candidate '" + name + "'");
  }

  friend bool operator==(const Election &, const Election &) = default;
};

/// Structural checks; throws InputError naming the first problem.
inline void validate(const Election &e) {
  const std::size_t m = e.m();
  if (m == 0)
    throw InputError("an election needs at least one candidate");
  if (e.designated >= m)
    throw InputError("designated candidate out of range");
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (e.candidates[i] == e.candidates[j])
        throw InputError("duplicate candidate '" + e.candidates[i] + "'");
  for (std::size_t k = 0; k < e.voters.size(); ++k) {
    const Voter &v = e.voters[k];
    const std::string at = "voter " + std::to_string(k) + ": ";
    std::vector<bool> seen(m, false);
    for (std::size_t c : v.order) {
      if (c >= m)
        throw InputError(at + "order names an unknown candidate");
      if (seen[c])
        throw InputError(at + "candidate '" + e.candidates[c] + "' ranked twice");
      seen[c] = true;
    }
    if (v.truncated_at && *v.truncated_at > v.order.size())
      throw InputError(at + "truncated_at exceeds the order length");
    if (v.approval < 0 || v.approval > static_cast<Int>(m))
      throw InputError(at + "approval count outside 0.." + std::to_string(m));
    if (v.swap.size() != m)
      throw InputError(at + "swap cost table has wrong size");
    for (const auto &row : v.swap)
      if (row.size() != m)
        throw InputError(at + "swap cost table has wrong size");
    if (v.push.size() != m + 1)
      throw InputError(at + "push cost table has wrong size");
    if (!(v.pi(0) == Cost(0)))
      throw InputError(at + "push cost of offset 0 must be 0, got " + v.pi(0).str());
  }
}

/// Ranked prefix followed by the unranked candidates in index order.
inline std::vector<std::size_t> full_order(const Voter &v, std::size_t m) {
  std::vector<std::size_t> out(v.order.begin(),
                               v.order.begin() + static_cast<std::ptrdiff_t>(v.ranked()));
  std::vector<bool> used(m, false);
  for (std::size_t c : out)
    used[c] = true;
  for (std::size_t c = 0; c < m; ++c)
    if (!used[c])
      out.push_back(c);
  return out;
}

/// A voter whose ranked part determines a linear order.
inline bool is_complete(const Voter &v, std::size_t m) { return v.ranked() + 1 >= m; }

/// rank[c] in 1..m.
inline std::vector<std::size_t> ranks_of(const std::vector<std::size_t> &order) {
  std::vector<std::size_t> r(order.size());
  for (std::size_t p = 0; p < order.size(); ++p)
    r[order[p]] = p + 1;
  return r;
}

/// Completes the order by candidate index; swaps between tied candidates
/// become free when tie_cost_zero is set.
inline Voter linearize(const Voter &v, std::size_t m, bool tie_cost_zero = true) {
  Voter out = v;
  out.order = full_order(v, m);
  out.truncated_at.reset();
  if (tie_cost_zero)
    for (std::size_t p = v.ranked(); p < m; ++p)
      for (std::size_t q = v.ranked(); q < m; ++q)
        if (p != q)
          out.swap[out.order[p]][out.order[q]] = 0;
  return out;
}

inline Election linearize(const Election &e, bool tie_cost_zero = true) {
  Election out = e;
  for (auto &v : out.voters)
    v = linearize(v, e.m(), tie_cost_zero);
  return out;
}

inline bool is_linear(const Election &e) {
  return std::all_of(e.voters.begin(), e.voters.end(), [&](const Voter &v) {
    return v.order.size() == e.m() && !v.truncated_at;
  });
}

using CandidatePair = std::pair<std::size_t, std::size_t>;

inline CandidatePair unordered(std::size_t a, std::size_t b) {
  return a < b ? CandidatePair{a, b} : CandidatePair{b, a};
}

/// Pairs ordered differently by the two complete orders.
inline std::set<CandidatePair> inversion_set(const std::vector<std::size_t> &from,
                                             const std::vector<std::size_t> &to) {
  auto r1 = ranks_of(from), r2 = ranks_of(to);
  std::set<CandidatePair> out;
  for (std::size_t a = 0; a < r1.size(); ++a)
    for (std::size_t b = a + 1; b < r1.size(); ++b)
      if ((r1[a] < r1[b]) != (r2[a] < r2[b]))
        out.insert({a, b});
  return out;
}

/// The unique complete order whose inversion set against order is swaps.
inline std::vector<std::size_t> apply_swaps(const std::vector<std::size_t> &order,
                                            const std::set<CandidatePair> &swaps) {
  const std::size_t m = order.size();
  auto rank = ranks_of(order);
  std::vector<std::size_t> out(m, m);
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t above = 0;
    for (std::size_t d = 0; d < m; ++d)
      if (d != c && ((rank[d] < rank[c]) != (swaps.count(unordered(c, d)) > 0)))
        ++above;
    if (out[above] != m)
      throw AdmissibilityError("swap set is not the inversion set of any order");
    out[above] = c;
  }
  return out;
}

struct VoterAction {
  /// Unordered pairs (smaller index first) whose relative order flips.
  std::set<CandidatePair> swaps;
  Int push = 0;
  /// Activate a latent voter or deactivate an active one.
  bool toggle = false;

  [[nodiscard]] bool empty() const { return swaps.empty() && push == 0 && !toggle; }
  friend bool operator==(const VoterAction &, const VoterAction &) = default;
};

struct ActionSet {
  std::vector<VoterAction> voters;

  static ActionSet none(std::size_t n) { return ActionSet{std::vector<VoterAction>(n)}; }

  [[nodiscard]] bool empty() const {
    return std::all_of(voters.begin(), voters.end(),
                       [](const VoterAction &a) { return a.empty(); });
  }

  /// Flat integer encoding; its lexicographic order breaks ties.
  [[nodiscard]] std::vector<Int> encoding() const {
    std::vector<Int> out;
    for (const auto &a : voters) {
      out.push_back(static_cast<Int>(a.swaps.size()));
      for (auto [x, y] : a.swaps) {
        out.push_back(static_cast<Int>(x));
        out.push_back(static_cast<Int>(y));
      }
      out.push_back(a.push);
      out.push_back(a.toggle ? 1 : 0);
    }
    return out;
  }

  friend bool operator==(const ActionSet &, const ActionSet &) = default;
};

inline void require_shape(const Election &e, const ActionSet &a) {
  if (a.voters.size() != e.voters.size())
    throw InputError("action set has " + std::to_string(a.voters.size()) +
                     " voters, election has " + std::to_string(e.voters.size()));
  for (std::size_t k = 0; k < a.voters.size(); ++k) {
    const auto &act = a.voters[k];
    for (auto [x, y] : act.swaps)
      if (x >= y || y >= e.m())
        throw InputError("voter " + std::to_string(k) + ": malformed swap pair");
    if (!e.voters[k].push_in_domain(act.push))
      throw InputError("voter " + std::to_string(k) + ": push offset " +
                       std::to_string(act.push) + " outside the domain");
  }
}

/// Cost of one voter's action.
inline Cost voter_cost(const Election &e, std::size_t k, const VoterAction &act) {
  const Voter &v = e.voters[k];
  if (!e.voters[k].push_in_domain(act.push))
    throw InputError("push offset outside the domain");
  Cost total = 0;
  if (!act.swaps.empty()) {
    auto rank = ranks_of(full_order(v, e.m()));
    for (auto [x, y] : act.swaps)
      total += rank[x] < rank[y] ? v.swap[x][y] : v.swap[y][x];
  }
  total += v.pi(act.push);
  if (!act.swaps.empty() || act.push != 0)
    total += v.influence;
  if (act.toggle)
    total += v.active ? v.deactivate : v.activate;
  return total;
}

inline Cost action_cost(const Election &e, const ActionSet &a) {
  require_shape(e, a);
  Cost total = 0;
  for (std::size_t k = 0; k < a.voters.size(); ++k)
    total += voter_cost(e, k, a.voters[k]);
  return total;
}

/// The perturbed election. Push tables are re-centred on the new approval
/// count with every non-zero offset forbidden.
inline Election apply_actions(const Election &e, const ActionSet &a) {
  require_shape(e, a);
  Election out = e;
  for (std::size_t k = 0; k < a.voters.size(); ++k) {
    const auto &act = a.voters[k];
    Voter &v = out.voters[k];
    if (!act.swaps.empty()) {
      if (!is_complete(v, e.m()))
        throw InputError("swaps need a complete order; linearize first");
      v.order = apply_swaps(full_order(v, e.m()), act.swaps);
      v.truncated_at.reset();
    }
    if (act.push != 0) {
      v.approval += act.push;
      v.push.assign(e.m() + 1, Cost::forbidden());
      v.push[static_cast<std::size_t>(v.approval)] = 0;
    }
    if (act.toggle)
      v.active = !v.active;
  }
  return out;
}

} // namespace nfv::vote
