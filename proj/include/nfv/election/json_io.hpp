#pragma once

#include <initializer_list>
#include <string>

#include <nlohmann/json.hpp>

#include "nfv/core/program.hpp"
#include "nfv/election/election.hpp"

namespace nfv::vote {

namespace detail {

using Json = nlohmann::ordered_json;

[[noreturn]] inline void schema_error(const std::string &path, const std::string &what) {
  throw ParseError(path + ": " + what);
}

inline void only_fields(const Json &obj, const std::string &path,
                        std::initializer_list<const char *> allowed) {
  if (!obj.is_object())
    schema_error(path, "expected an object");
  for (const auto &item : obj.items()) {
    bool ok = false;
    for (const char *f : allowed)
      ok = ok || item.key() == f;
    if (!ok)
      schema_error(path, "unknown field '" + item.key() + "'");
  }
}

inline Int int_at(const Json &j, const std::string &path) {
  if (!j.is_number_integer())
    schema_error(path, "expected an integer");
  return j.get<Int>();
}

inline Cost cost_at(const Json &j, const std::string &path) {
  if (j.is_string() && j.get<std::string>() == "forbidden")
    return Cost::forbidden();
  if (!j.is_number_integer())
    schema_error(path, "expected an integer or \"forbidden\"");
  return j.get<Int>();
}

inline Json cost_json(const Cost &c) {
  return c.is_forbidden() ? Json("forbidden") : Json(c.value());
}

inline std::size_t candidate_at(const Election &e, const Json &j, const std::string &path) {
  if (!j.is_string())
    schema_error(path, "expected a candidate name");
  const auto name = j.get<std::string>();
  for (std::size_t c = 0; c < e.m(); ++c)
    if (e.candidates[c] == name)
      return c;
  schema_error(path, "unknown candidate '" + name + "'");
}

inline Voter voter_at(const Election &e, const Json &j, const std::string &path) {
  only_fields(j, path,
              {"order", "truncated_at", "approval", "active", "swap_costs", "push_costs",
               "influence", "activate", "deactivate"});
  if (!j.contains("order") || !j["order"].is_array())
    schema_error(path + ".order", "expected an array of candidate names");
  std::vector<std::size_t> order;
  for (std::size_t p = 0; p < j["order"].size(); ++p)
    order.push_back(candidate_at(e, j["order"][p], path + ".order[" + std::to_string(p) + "]"));
  Int approval = j.contains("approval") ? int_at(j["approval"], path + ".approval") : 0;
  Voter v = default_voter(e.m(), std::move(order), approval);
  if (approval < 0 || approval > static_cast<Int>(e.m()))
    schema_error(path + ".approval", "outside 0.." + std::to_string(e.m()));
  if (j.contains("truncated_at")) {
    Int t = int_at(j["truncated_at"], path + ".truncated_at");
    if (t < 0)
      schema_error(path + ".truncated_at", "must be non-negative");
    v.truncated_at = static_cast<std::size_t>(t);
  }
  if (j.contains("active")) {
    if (!j["active"].is_boolean())
      schema_error(path + ".active", "expected a boolean");
    v.active = j["active"].get<bool>();
  }
  if (j.contains("swap_costs")) {
    const auto &sc = j["swap_costs"];
    if (!sc.is_object())
      schema_error(path + ".swap_costs", "expected an object");
    for (const auto &item : sc.items()) {
      const std::string at = path + ".swap_costs[\"" + item.key() + "\"]";
      auto comma = item.key().find(',');
      if (comma == std::string::npos)
        schema_error(at, "key must be \"a,b\"");
      std::size_t a = candidate_at(e, Json(item.key().substr(0, comma)), at);
      std::size_t b = candidate_at(e, Json(item.key().substr(comma + 1)), at);
      if (a == b)
        schema_error(at, "pair of identical candidates");
      v.swap[a][b] = cost_at(item.value(), at);
    }
  }
  if (j.contains("push_costs")) {
    const auto &pc = j["push_costs"];
    if (!pc.is_object())
      schema_error(path + ".push_costs", "expected an object");
    for (const auto &item : pc.items()) {
      const std::string at = path + ".push_costs[\"" + item.key() + "\"]";
      Int offset = 0;
      try {
        offset = nfv::detail::parse_int(item.key(), "push offset");
      } catch (const std::exception &) {
        schema_error(at, "key must be an integer offset");
      }
      if (!v.push_in_domain(offset))
        schema_error(at, "offset outside -approval..m-approval");
      v.push[static_cast<std::size_t>(offset + approval)] = cost_at(item.value(), at);
    }
  }
  if (j.contains("influence"))
    v.influence = cost_at(j["influence"], path + ".influence");
  if (j.contains("activate"))
    v.activate = cost_at(j["activate"], path + ".activate");
  if (j.contains("deactivate"))
    v.deactivate = cost_at(j["deactivate"], path + ".deactivate");
  return v;
}

} // namespace detail

/// Reads the JSON election format. Schema violations raise ParseError with
/// a path; semantic problems (repeated candidates, pi(0) != 0) InputError.
inline Election parse_election(const std::string &text) {
  using detail::Json;
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error &ex) {
    throw ParseError(std::string("invalid JSON: ") + ex.what());
  }
  detail::only_fields(j, "$", {"candidates", "designated", "winner_model", "voters"});
  Election e;
  if (!j.contains("candidates") || !j["candidates"].is_array() || j["candidates"].empty())
    detail::schema_error("$.candidates", "expected a non-empty array of names");
  for (std::size_t c = 0; c < j["candidates"].size(); ++c) {
    const auto &name = j["candidates"][c];
    if (!name.is_string() || name.get<std::string>().empty())
      detail::schema_error("$.candidates[" + std::to_string(c) + "]", "expected a name");
    if (name.get<std::string>().find(',') != std::string::npos)
      detail::schema_error("$.candidates[" + std::to_string(c) + "]", "names may not contain ','");
    e.candidates.push_back(name.get<std::string>());
  }
  if (j.contains("designated"))
    e.designated = detail::candidate_at(e, j["designated"], "$.designated");
  if (j.contains("winner_model")) {
    if (!j["winner_model"].is_string())
      detail::schema_error("$.winner_model", "expected \"unique\" or \"cowinner\"");
    try {
      e.winner_model = parse_winner_model(j["winner_model"].get<std::string>());
    } catch (const InputError &ex) {
      detail::schema_error("$.winner_model", ex.what());
    }
  }
  if (!j.contains("voters") || !j["voters"].is_array())
    detail::schema_error("$.voters", "expected an array");
  for (std::size_t k = 0; k < j["voters"].size(); ++k) {
    const std::string path = "$.voters[" + std::to_string(k) + "]";
    e.voters.push_back(detail::voter_at(e, j["voters"][k], path));
  }
  validate(e);
  return e;
}

/// Writes every table explicitly, so parse(serialize(e)) == e.
inline std::string serialize_election(const Election &e, int indent = 2) {
  using detail::Json;
  validate(e);
  Json j;
  j["candidates"] = e.candidates;
  j["designated"] = e.candidates[e.designated];
  if (e.winner_model)
    j["winner_model"] = to_string(*e.winner_model);
  j["voters"] = Json::array();
  for (const auto &v : e.voters) {
    Json vj;
    Json order = Json::array();
    for (std::size_t c : v.order)
      order.push_back(e.candidates[c]);
    vj["order"] = order;
    if (v.truncated_at)
      vj["truncated_at"] = *v.truncated_at;
    vj["approval"] = v.approval;
    vj["active"] = v.active;
    Json sc = Json::object();
    for (std::size_t a = 0; a < e.m(); ++a)
      for (std::size_t b = 0; b < e.m(); ++b)
        if (a != b)
          sc[e.candidates[a] + "," + e.candidates[b]] = detail::cost_json(v.swap[a][b]);
    vj["swap_costs"] = sc;
    Json pc = Json::object();
    for (std::size_t p = 0; p < v.push.size(); ++p)
      pc[std::to_string(static_cast<Int>(p) - v.approval)] = detail::cost_json(v.push[p]);
    vj["push_costs"] = pc;
    vj["influence"] = detail::cost_json(v.influence);
    vj["activate"] = detail::cost_json(v.activate);
    vj["deactivate"] = detail::cost_json(v.deactivate);
    j["voters"].push_back(vj);
  }
  return j.dump(indent) + "\n";
}

} // namespace nfv::vote
