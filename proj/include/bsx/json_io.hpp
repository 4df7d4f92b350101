#pragma once

#include <initializer_list>
#include <limits>
#include <string>

#include <json.hpp>

#include "bsx/mn_graph.hpp"
#include "bsx/preaction.hpp"

namespace bsx {

using json = nlohmann::ordered_json;

namespace detail {

inline void require_object(const json& j, const std::string& what,
                           std::initializer_list<const char*> allowed,
                           std::initializer_list<const char*> required) {
  if (!j.is_object()) throw error(errc::invalid_input, what + " must be an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw error(errc::invalid_input, "unknown field '" + key + "' in " + what);
  }
  for (const char* r : required)
    if (!j.contains(r)) throw error(errc::invalid_input, "missing field '" + std::string(r) + "' in " + what);
}

inline std::int64_t get_int(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw error(errc::invalid_input, std::string(key) + " must be an integer");
  return v.get<std::int64_t>();
}

inline std::string get_string(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_string()) throw error(errc::invalid_input, std::string(key) + " must be a string");
  return v.get<std::string>();
}

}  // namespace detail

// Finite values that fit in 64 bits are written as numbers, larger ones as
// decimal strings, infinity as "inf".
inline json ext_card_to_json(const ext_card& c) {
  if (c.is_infinite()) return "inf";
  if (c.value() <= std::numeric_limits<std::uint64_t>::max())
    return c.value().convert_to<std::uint64_t>();
  return c.value().str();
}

inline ext_card ext_card_from_json(const json& j) {
  if (j.is_number_unsigned()) return ext_card(j.get<std::uint64_t>());
  if (j.is_number_integer()) return ext_card(j.get<std::int64_t>());
  if (j.is_string()) return ext_card::parse(j.get<std::string>());
  throw error(errc::invalid_input, "label must be a positive integer or \"inf\"");
}

inline json bigint_to_json(const bigint& x) {
  if (x >= std::numeric_limits<std::int64_t>::min() && x <= std::numeric_limits<std::int64_t>::max())
    return x.convert_to<std::int64_t>();
  return x.str();
}

inline bs_params params_from_json(const json& j) {
  return bs_params(detail::get_int(j, "m"), detail::get_int(j, "n"));
}

inline json graph_to_json(const mn_graph& g) {
  json j;
  j["m"] = g.params().m();
  j["n"] = g.params().n();
  j["vertices"] = json::array();
  for (const auto& [id, l] : g.vertices())
    j["vertices"].push_back({{"id", id}, {"label", ext_card_to_json(l)}});
  j["edges"] = json::array();
  for (const auto& [id, e] : g.edges())
    j["edges"].push_back({{"id", id}, {"src", e.src}, {"dst", e.dst}});
  return j;
}

inline mn_graph graph_from_json(const json& j) {
  detail::require_object(j, "graph", {"m", "n", "vertices", "edges"},
                         {"m", "n", "vertices", "edges"});
  mn_graph g(params_from_json(j));
  if (!j.at("vertices").is_array() || !j.at("edges").is_array())
    throw error(errc::invalid_input, "vertices and edges must be arrays");
  for (const json& v : j.at("vertices")) {
    detail::require_object(v, "vertex", {"id", "label"}, {"id", "label"});
    g.add_vertex(detail::get_string(v, "id"), ext_card_from_json(v.at("label")));
  }
  for (const json& e : j.at("edges")) {
    detail::require_object(e, "edge", {"id", "src", "dst"}, {"id", "src", "dst"});
    g.add_edge(detail::get_string(e, "id"), detail::get_string(e, "src"),
               detail::get_string(e, "dst"));
  }
  return g;
}

inline json report_to_json(const validation_report& r) {
  json j;
  j["ok"] = r.ok;
  if (!r.ok) {
    j["violations"] = json::array();
    for (const auto& v : r.violations)
      j["violations"].push_back(
          {{"kind", violation_name(v.kind)}, {"location", v.location}, {"detail", v.detail}});
  }
  return j;
}

inline json preaction_to_json(const pre_action& pa) {
  json j;
  j["m"] = pa.params.m();
  j["n"] = pa.params.n();
  j["points"] = pa.size();
  j["beta"] = json::array();
  for (const auto& y : pa.beta) j["beta"].push_back(y ? json(*y) : json(nullptr));
  j["tau"] = json::array();
  for (point x = 0; x < pa.size(); ++x)
    if (pa.tau[x]) j["tau"].push_back({x, *pa.tau[x]});
  j["kind"] = pa.kind == action_kind::complete ? "complete" : "truncated";
  if (pa.basepoint) j["basepoint"] = *pa.basepoint;
  if (pa.period) j["period"] = bigint_to_json(*pa.period);
  return j;
}

inline pre_action preaction_from_json(const json& j) {
  detail::require_object(j, "pre-action",
                         {"m", "n", "points", "beta", "tau", "kind", "basepoint", "period"},
                         {"m", "n", "points", "beta", "tau", "kind"});
  auto get_point = [](const json& v, const char* what) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
      throw error(errc::invalid_input, std::string(what) + " must be a non-negative integer");
    return v.get<point>();
  };
  std::size_t n = get_point(j.at("points"), "points");
  pre_action pa(params_from_json(j), n);
  const json& beta = j.at("beta");
  if (!beta.is_array() || beta.size() != n)
    throw error(errc::invalid_input, "beta must list one image per point");
  for (std::size_t x = 0; x < n; ++x)
    if (!beta[x].is_null()) pa.beta[x] = get_point(beta[x], "beta entry");
  const json& tau = j.at("tau");
  if (!tau.is_array()) throw error(errc::invalid_input, "tau must be an array of pairs");
  for (const json& pair : tau) {
    if (!pair.is_array() || pair.size() != 2)
      throw error(errc::invalid_input, "tau entries must be [source, target]");
    point x = get_point(pair[0], "tau source");
    if (x >= n) throw error(errc::invalid_input, "tau source out of range");
    if (pa.tau[x]) throw error(errc::invalid_input, "tau source listed twice");
    pa.tau[x] = get_point(pair[1], "tau target");
  }
  std::string kind = detail::get_string(j, "kind");
  if (kind == "complete")
    pa.kind = action_kind::complete;
  else if (kind == "truncated")
    pa.kind = action_kind::truncated;
  else
    throw error(errc::invalid_input, "kind must be \"complete\" or \"truncated\"");
  if (j.contains("basepoint")) pa.basepoint = get_point(j.at("basepoint"), "basepoint");
  if (j.contains("period")) pa.period = ext_card_from_json(j.at("period")).value();
  return pa;
}

}  // namespace bsx
