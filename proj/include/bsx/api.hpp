#pragma once
// JSON in, JSON out: one entry point per operation, shared by the command line
// and the HTTP service so both produce the same bytes.

#include <exception>
#include <functional>
#include <map>
#include <string>

#include "bsx/json_io.hpp"
#include "bsx/subgroups.hpp"

namespace bsx::api {

// A rejected request together with the body to send back.
class failure : public std::exception {
 public:
  failure(int status, json body) : status_(status), body_(std::move(body)) {}
  int status() const { return status_; }
  const json& body() const { return body_; }
  const char* what() const noexcept override { return "request failed"; }

 private:
  int status_;
  json body_;
};

inline int status_for(errc code) {
  switch (code) {
    case errc::invalid_input:
    case errc::syntax_error:
    case errc::invalid_graph:
    case errc::invalid_preaction:
    case errc::invalid_params:
      return 400;
    default:
      return 422;
  }
}

inline json error_body(const error& e) {
  json j;
  j["error"] = e.name();
  j["message"] = e.what();
  if (const auto* pre = dynamic_cast<const precondition_failed*>(&e)) j["prime"] = pre->prime();
  if (const auto* syn = dynamic_cast<const syntax_error*>(&e)) j["position"] = syn->position();
  return j;
}

namespace detail {

using bsx::detail::get_int;
using bsx::detail::get_string;
using bsx::detail::require_object;

inline failure invalid(const std::string& name, const validation_report& r) {
  json body = {{"error", name}, {"message", name == "InvalidGraph" ? "graph violates the rules"
                                                                   : "pre-action violates the rules"}};
  json rep = report_to_json(r);
  for (const auto& [k, v] : rep.items()) body[k] = v;
  return failure(400, std::move(body));
}

inline mn_graph load_graph(const json& j) {
  mn_graph g = graph_from_json(j);
  validation_report r = validate(g);
  if (!r.ok) throw invalid("InvalidGraph", r);
  return g;
}

inline pre_action load_preaction(const json& j) {
  pre_action pa = preaction_from_json(j);
  validation_report r = validate_preaction(pa);
  if (!r.ok) throw invalid("InvalidPreAction", r);
  return pa;
}

inline bool looks_like_preaction(const json& j) { return j.is_object() && j.contains("beta"); }

inline unsigned get_rounds(const json& j) {
  std::int64_t r = get_int(j, "rounds");
  if (r < 0 || r > 64) throw error(errc::invalid_input, "rounds must be between 0 and 64");
  return unsigned(r);
}

inline int get_orientation(const json& j, const char* key) {
  std::string s = get_string(j, key);
  if (s == "+") return 1;
  if (s == "-") return -1;
  throw error(errc::invalid_input, std::string(key) + " must be \"+\" or \"-\"");
}

inline json id_set(const std::set<std::string>& ids) {
  json out = json::array();
  for (const auto& id : ids) out.push_back(id);
  return out;
}

inline json embedding_to_json(const graph_embedding& e) {
  json out;
  out["vertices"] = json::object();
  for (const auto& [a, b] : e.vertices) out["vertices"][a] = b;
  out["edges"] = json::object();
  for (const auto& [a, b] : e.edges) out["edges"][a] = b;
  return out;
}

}  // namespace detail

inline json phenotype_op(const json& j) {
  detail::require_object(j, "request", {"m", "n", "k"}, {"m", "n", "k"});
  return ext_card_to_json(phenotype(params_from_json(j), ext_card_from_json(j.at("k"))));
}

inline json validate_op(const json& j) {
  if (detail::looks_like_preaction(j)) {
    pre_action pa = preaction_from_json(j);
    json out = report_to_json(validate_preaction(pa));
    return out;
  }
  mn_graph g = graph_from_json(j);
  validation_report r = validate(g);
  json out;
  out["ok"] = r.ok;
  out["saturated"] = r.ok && is_saturated(g);
  if (!r.ok) out["violations"] = report_to_json(r)["violations"];
  return out;
}

inline json admissible_op(const json& j) {
  detail::require_object(j, "request", {"m", "n", "label", "dir"}, {"m", "n", "label", "dir"});
  std::string dir = detail::get_string(j, "dir");
  if (dir != "out" && dir != "in") throw error(errc::invalid_input, "dir must be \"out\" or \"in\"");
  json labels = json::array();
  for (const auto& l : admissible_neighbor_labels(params_from_json(j), ext_card_from_json(j.at("label")),
                                                  dir == "out" ? direction::out : direction::in))
    labels.push_back(ext_card_to_json(l));
  return {{"labels", labels}};
}

inline json weld_op(const json& j) {
  detail::require_object(j, "request", {"graph", "v", "w"}, {"graph", "v", "w"});
  return graph_to_json(
      weld(detail::load_graph(j.at("graph")), detail::get_string(j, "v"), detail::get_string(j, "w")));
}

inline json connect_op(const json& j) {
  detail::require_object(j, "request", {"m", "n", "from", "to", "from_orient", "to_orient"},
                         {"m", "n", "from", "to", "from_orient", "to_orient"});
  connected_path p = connect_path(params_from_json(j), ext_card_from_json(j.at("from")),
                                  ext_card_from_json(j.at("to")),
                                  detail::get_orientation(j, "from_orient"),
                                  detail::get_orientation(j, "to_orient"));
  json out;
  out["graph"] = graph_to_json(p.graph);
  out["path"] = p.vertex_ids;
  out["edges"] = p.edge_ids;
  out["orientations"] = json::array();
  for (int o : p.orientations) out["orientations"].push_back(o > 0 ? "+" : "-");
  return out;
}

inline json saturate_op(const json& j) {
  detail::require_object(j, "request", {"graph", "rounds"}, {"graph", "rounds"});
  saturation_result r = forest_saturate(detail::load_graph(j.at("graph")), detail::get_rounds(j));
  return {{"graph", graph_to_json(r.graph)}, {"frontier", detail::id_set(r.frontier)}};
}

inline json merge_op(const json& j) {
  detail::require_object(j, "request", {"g1", "g2", "rounds"}, {"g1", "g2", "rounds"});
  merge_result r = merge_graphs(detail::load_graph(j.at("g1")), detail::load_graph(j.at("g2")),
                                detail::get_rounds(j));
  json out;
  out["graph"] = graph_to_json(r.graph);
  out["embed1"] = detail::embedding_to_json(r.embed1);
  out["embed2"] = detail::embedding_to_json(r.embed2);
  out["frontier"] = detail::id_set(r.frontier);
  return out;
}

inline json flip_op(const json& j) { return graph_to_json(flip(detail::load_graph(j))); }

inline json realize_op(const json& j) { return preaction_to_json(realize(detail::load_graph(j))); }

inline json bass_serre_op(const json& j) {
  return graph_to_json(bass_serre(detail::load_preaction(j)));
}

inline json schreier_op(const json& j) {
  pre_action pa = detail::load_preaction(j);
  json out;
  out["points"] = pa.size();
  out["edges"] = json::array();
  for (point x = 0; x < pa.size(); ++x) {
    if (pa.beta[x]) out["edges"].push_back({{"src", x}, {"dst", *pa.beta[x]}, {"label", "b"}});
    if (pa.tau[x]) out["edges"].push_back({{"src", x}, {"dst", *pa.tau[x]}, {"label", "t"}});
  }
  if (pa.basepoint) out["basepoint"] = *pa.basepoint;
  return out;
}

inline json eval_op(const json& j) {
  detail::require_object(j, "request", {"preaction", "point", "word"}, {"preaction", "word"});
  pre_action pa = detail::load_preaction(j.at("preaction"));
  point x = j.contains("point") ? point(detail::get_int(j, "point")) : pa.base();
  if (j.contains("point") && (detail::get_int(j, "point") < 0 || x >= pa.size()))
    throw error(errc::invalid_input, "point out of range");
  auto y = evaluate(pa, x, parse_word(detail::get_string(j, "word")));
  return {{"point", y ? json(*y) : json(nullptr)}};
}

inline json verdict_to_json(const kernel_verdict& v) {
  json out;
  out["verdict"] = status_name(v.status);
  if (v.status == kernel_status::not_in_kernel) out["reason"] = reason_name(v.reason);
  if (v.witness)
    out["certificate"] = {{"kind", reason_name(v.reason)},
                          {"vertex", v.witness->vertex},
                          {"prime", v.witness->prime}};
  return out;
}

inline json classify_op(const json& j) {
  if (detail::looks_like_preaction(j)) return verdict_to_json(classify_kernel(detail::load_preaction(j)));
  return verdict_to_json(classify_kernel(detail::load_graph(j)));
}

// A pointed pre-action, or {"graph": ..., "vertex": ...}.
inline json mcq_op(const json& j) {
  if (detail::looks_like_preaction(j)) return {{"answer", answer_name(mcq_member(detail::load_preaction(j)))}};
  detail::require_object(j, "request", {"graph", "vertex"}, {"graph", "vertex"});
  mn_graph g = detail::load_graph(j.at("graph"));
  std::string v = detail::get_string(j, "vertex");
  if (!g.has_vertex(v)) throw error(errc::invalid_input, "unknown vertex '" + v + "'");
  return {{"answer", answer_name(mcq_member(g, v))}};
}

inline json quotient_op(const json& j) {
  detail::require_object(j, "request", {"m", "n", "q", "window"}, {"m", "n", "q", "window"});
  std::int64_t q = detail::get_int(j, "q"), window = detail::get_int(j, "window");
  if (q < 1) throw error(errc::invalid_input, "q must be positive");
  if (window < 1 || window > 10000) throw error(errc::invalid_input, "window must be between 1 and 10000");
  if (q > 1000000 || q * (2 * window + 1) > 10000000)
    throw error(errc::invalid_input, "quotient action too large");
  return preaction_to_json(quotient_action(params_from_json(j), std::uint64_t(q), std::size_t(window)));
}

using handler = std::function<json(const json&)>;

inline const std::map<std::string, handler>& operations() {
  static const std::map<std::string, handler> ops = {
      {"phenotype", phenotype_op}, {"validate", validate_op},   {"admissible-targets", admissible_op},
      {"weld", weld_op},           {"connect", connect_op},     {"saturate", saturate_op},
      {"merge", merge_op},         {"flip", flip_op},           {"realize", realize_op},
      {"bass-serre", bass_serre_op}, {"schreier", schreier_op}, {"eval", eval_op},
      {"classify", classify_op},   {"mcq", mcq_op},             {"quotient", quotient_op},
  };
  return ops;
}

struct response {
  int status = 200;
  json body;
  std::string text() const { return body.dump() + "\n"; }
};

inline response run(const std::string& op, const json& request) {
  auto it = operations().find(op);
  if (it == operations().end())
    return {404, {{"error", "UnknownOperation"}, {"message", "no operation '" + op + "'"}}};
  try {
    return {200, it->second(request)};
  } catch (const failure& f) {
    return {f.status(), f.body()};
  } catch (const error& e) {
    return {status_for(e.code()), error_body(e)};
  } catch (const json::exception& e) {
    return {400, {{"error", "InvalidInput"}, {"message", e.what()}}};
  }
}

inline response run_text(const std::string& op, const std::string& request_text) {
  json request;
  try {
    request = json::parse(request_text);
  } catch (const json::parse_error& e) {
    return {400, {{"error", "InvalidInput"}, {"message", e.what()}}};
  }
  return run(op, request);
}

}  // namespace bsx::api
