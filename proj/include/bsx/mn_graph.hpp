#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bsx/arith.hpp"

namespace bsx {

struct edge {
  std::string src;
  std::string dst;

  friend bool operator==(const edge&, const edge&) = default;
};

// Directed multigraph whose vertices carry b-orbit sizes. Only positive edges
// are stored; the negative edge of e is e traversed backwards. Edge labels are
// derived from the source label and never stored.
class mn_graph {
 public:
  explicit mn_graph(const bs_params& bs) : bs_(bs) {}

  const bs_params& params() const { return bs_; }
  const std::map<std::string, ext_card>& vertices() const { return vertices_; }
  const std::map<std::string, edge>& edges() const { return edges_; }

  bool has_vertex(const std::string& v) const { return vertices_.count(v) != 0; }
  bool has_edge(const std::string& e) const { return edges_.count(e) != 0; }

  const ext_card& label(const std::string& v) const {
    auto it = vertices_.find(v);
    if (it == vertices_.end()) throw error(errc::invalid_input, "no vertex '" + v + "'");
    return it->second;
  }

  void add_vertex(const std::string& id, const ext_card& label) {
    if (!vertices_.emplace(id, label).second)
      throw error(errc::invalid_input, "duplicate vertex id '" + id + "'");
  }

  // Endpoints are not checked here; validate() reports dangling edges.
  void add_edge(const std::string& id, const std::string& src, const std::string& dst) {
    if (!edges_.emplace(id, edge{src, dst}).second)
      throw error(errc::invalid_input, "duplicate edge id '" + id + "'");
    ++out_[src];
    ++in_[dst];
  }

  std::string fresh_vertex(const std::string& prefix, const ext_card& label) {
    std::string id = fresh_id(prefix, vertices_);
    add_vertex(id, label);
    return id;
  }

  std::string fresh_edge(const std::string& prefix, const std::string& src,
                         const std::string& dst) {
    std::string id = fresh_id(prefix, edges_);
    add_edge(id, src, dst);
    return id;
  }

  void remove_edge(const std::string& id) {
    auto it = edges_.find(id);
    if (it == edges_.end()) return;
    --out_[it->second.src];
    --in_[it->second.dst];
    edges_.erase(it);
  }

  void remove_vertex(const std::string& v) {
    if (out_degree(v) + in_degree(v) != 0)
      throw error(errc::invalid_input, "vertex '" + v + "' still has edges");
    vertices_.erase(v);
  }

  std::size_t out_degree(const std::string& v) const { return lookup(out_, v); }
  std::size_t in_degree(const std::string& v) const { return lookup(in_, v); }

  ext_card edge_label(const std::string& e) const {
    const ext_card& l = label(edges_.at(e).src);
    return l.divided_by(l.gcd_with(bs_.n()));
  }

  bigint max_out(const std::string& v) const { return label(v).gcd_with(bs_.n()); }
  bigint max_in(const std::string& v) const { return label(v).gcd_with(bs_.m()); }

  friend bool operator==(const mn_graph& a, const mn_graph& b) {
    return a.bs_ == b.bs_ && a.vertices_ == b.vertices_ && a.edges_ == b.edges_;
  }

 private:
  template <class Map>
  std::string fresh_id(const std::string& prefix, const Map& used) {
    std::string id;
    do {
      id = prefix + std::to_string(next_id_++);
    } while (used.count(id));
    return id;
  }

  static std::size_t lookup(const std::map<std::string, std::size_t>& m,
                            const std::string& k) {
    auto it = m.find(k);
    return it == m.end() ? 0 : it->second;
  }

  bs_params bs_;
  std::map<std::string, ext_card> vertices_;
  std::map<std::string, edge> edges_;
  std::map<std::string, std::size_t> out_;
  std::map<std::string, std::size_t> in_;
  std::size_t next_id_ = 0;
};

// ---------------------------------------------------------------------------
// validation

enum class violation_kind {
  transfer_mismatch,
  out_degree_overflow,
  in_degree_overflow,
  dangling_edge,
  beta_not_permutation,
  tau_not_injective,
  out_of_range,
  domain_not_invariant,
  range_not_invariant,
  equivariance_broken,
  incomplete,
  bad_basepoint,
};

inline const char* violation_name(violation_kind k) {
  switch (k) {
    case violation_kind::transfer_mismatch: return "TransferMismatch";
    case violation_kind::out_degree_overflow: return "OutDegreeOverflow";
    case violation_kind::in_degree_overflow: return "InDegreeOverflow";
    case violation_kind::dangling_edge: return "DanglingEdge";
    case violation_kind::beta_not_permutation: return "BetaNotPermutation";
    case violation_kind::tau_not_injective: return "TauNotInjective";
    case violation_kind::out_of_range: return "OutOfRange";
    case violation_kind::domain_not_invariant: return "DomainNotInvariant";
    case violation_kind::range_not_invariant: return "RangeNotInvariant";
    case violation_kind::equivariance_broken: return "EquivarianceBroken";
    case violation_kind::incomplete: return "Incomplete";
    case violation_kind::bad_basepoint: return "BadBasepoint";
  }
  return "Unknown";
}

struct violation {
  violation_kind kind;
  std::string location;
  std::string detail;
};

struct validation_report {
  bool ok = true;
  std::vector<violation> violations;

  void add(violation_kind k, std::string where, std::string detail) {
    ok = false;
    violations.push_back({k, std::move(where), std::move(detail)});
  }
};

inline validation_report validate(const mn_graph& g) {
  validation_report r;
  const bs_params& bs = g.params();
  for (const auto& [id, e] : g.edges()) {
    if (!g.has_vertex(e.src) || !g.has_vertex(e.dst)) {
      r.add(violation_kind::dangling_edge, id, "endpoint missing");
      continue;
    }
    const ext_card& ls = g.label(e.src);
    const ext_card& lt = g.label(e.dst);
    ext_card from_src = ls.divided_by(ls.gcd_with(bs.n()));
    ext_card from_dst = lt.divided_by(lt.gcd_with(bs.m()));
    if (from_src != from_dst)
      r.add(violation_kind::transfer_mismatch, id,
            "source gives " + from_src.to_string() + ", target gives " +
                from_dst.to_string());
  }
  for (const auto& [v, l] : g.vertices()) {
    (void)l;
    if (g.out_degree(v) > g.max_out(v))
      r.add(violation_kind::out_degree_overflow, v,
            std::to_string(g.out_degree(v)) + " > " + g.max_out(v).str());
    if (g.in_degree(v) > g.max_in(v))
      r.add(violation_kind::in_degree_overflow, v,
            std::to_string(g.in_degree(v)) + " > " + g.max_in(v).str());
  }
  return r;
}

inline void require_valid(const mn_graph& g) {
  validation_report r = validate(g);
  if (!r.ok)
    throw error(errc::invalid_graph, std::string(violation_name(r.violations[0].kind)) +
                                         " at " + r.violations[0].location);
}

struct deficit {
  bigint missing_out;
  bigint missing_in;
};

// Missing outgoing and incoming edges per vertex; saturated vertices are omitted.
inline std::map<std::string, deficit> saturation_deficits(const mn_graph& g) {
  std::map<std::string, deficit> out;
  for (const auto& [v, l] : g.vertices()) {
    (void)l;
    bigint mo = g.max_out(v) - g.out_degree(v);
    bigint mi = g.max_in(v) - g.in_degree(v);
    if (mo != 0 || mi != 0) out[v] = {mo, mi};
  }
  return out;
}

inline bool is_saturated(const mn_graph& g) { return saturation_deficits(g).empty(); }

// ---------------------------------------------------------------------------
// local structure

enum class direction { out, in };

// Labels L' such that an edge from (dir = out) or into (dir = in) a vertex
// labelled `label` may end (or start) at a vertex labelled L'.
inline std::vector<ext_card> admissible_neighbor_labels(const bs_params& bs,
                                                        const ext_card& label,
                                                        direction dir) {
  if (label.is_infinite()) return {label};
  // edge label seen from this end, then the other end's per-prime choices
  const std::int64_t here = dir == direction::out ? bs.n() : bs.m();
  bigint e = label.value() / gcd_big(label.value(), here);
  bigint base = e;
  std::vector<std::pair<std::uint64_t, unsigned>> free_primes;
  for (const auto& pe : bs.primes()) {
    unsigned there = dir == direction::out ? pe.vm : pe.vn;
    if (there == 0) continue;
    if (e % pe.p == 0)
      base *= pow_big(pe.p, there);
    else
      free_primes.push_back({pe.p, there});
  }
  std::vector<bigint> vals{base};
  for (auto [p, cap] : free_primes) {
    std::vector<bigint> next;
    for (const bigint& v : vals) {
      bigint x = v;
      for (unsigned k = 0; k <= cap; ++k, x *= p) next.push_back(x);
    }
    vals.swap(next);
  }
  std::sort(vals.begin(), vals.end());
  return {vals.begin(), vals.end()};
}

// Weakly connected components, each sorted, ordered by smallest vertex id.
inline std::vector<std::vector<std::string>> components(const mn_graph& g) {
  std::map<std::string, std::string> parent;
  for (const auto& [v, l] : g.vertices()) {
    (void)l;
    parent[v] = v;
  }
  std::function<std::string(const std::string&)> find = [&](const std::string& x) {
    std::string r = x;
    while (parent[r] != r) r = parent[r];
    for (std::string y = x; parent[y] != r;) {
      std::string nxt = parent[y];
      parent[y] = r;
      y = nxt;
    }
    return r;
  };
  for (const auto& [id, e] : g.edges()) {
    (void)id;
    if (!g.has_vertex(e.src) || !g.has_vertex(e.dst)) continue;
    std::string a = find(e.src), b = find(e.dst);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::map<std::string, std::vector<std::string>> groups;
  for (const auto& [v, l] : g.vertices()) {
    (void)l;
    groups[find(v)].push_back(v);
  }
  std::vector<std::vector<std::string>> out;
  for (auto& [root, vs] : groups) {
    (void)root;
    out.push_back(std::move(vs));
  }
  return out;
}

inline bool is_connected(const mn_graph& g) {
  return !g.vertices().empty() && components(g).size() == 1;
}

struct component_phenotype {
  std::vector<std::string> vertices;
  ext_card phenotype;
};

inline std::vector<component_phenotype> graph_phenotype(const mn_graph& g) {
  require_valid(g);
  std::vector<component_phenotype> out;
  for (auto& comp : components(g)) {
    ext_card q = phenotype(g.params(), g.label(comp.front()));
    for (const auto& v : comp)
      if (phenotype(g.params(), g.label(v)) != q)
        throw std::logic_error("phenotype not constant on a component");
    out.push_back({comp, q});
  }
  return out;
}

// Identifies w with v; the result keeps v's id.
inline mn_graph weld(const mn_graph& g, const std::string& v, const std::string& w) {
  if (v == w) throw error(errc::invalid_input, "cannot weld a vertex to itself");
  if (g.label(v) != g.label(w))
    throw error(errc::label_mismatch,
                "labels " + g.label(v).to_string() + " and " + g.label(w).to_string());
  if (bigint(g.out_degree(v) + g.out_degree(w)) > g.max_out(v) ||
      bigint(g.in_degree(v) + g.in_degree(w)) > g.max_in(v))
    throw error(errc::degree_overflow, "welding '" + v + "' and '" + w + "'");
  mn_graph out(g.params());
  for (const auto& [id, l] : g.vertices())
    if (id != w) out.add_vertex(id, l);
  for (const auto& [id, e] : g.edges())
    out.add_edge(id, e.src == w ? v : e.src, e.dst == w ? v : e.dst);
  return out;
}

inline mn_graph flip(const mn_graph& g) {
  mn_graph out(g.params().swapped());
  for (const auto& [id, l] : g.vertices()) out.add_vertex(id, l);
  for (const auto& [id, e] : g.edges()) out.add_edge(id, e.dst, e.src);
  return out;
}

// ---------------------------------------------------------------------------
// connecting paths

namespace detail {

// Labels along a path and the orientation (+1 / -1) of each edge.
struct path_spec {
  std::vector<ext_card> labels;
  std::vector<int> orient;

  bool empty() const { return orient.empty(); }
};

inline path_spec flipped(path_spec p) {
  for (int& o : p.orient) o = -o;
  return p;
}

inline path_spec reversed(path_spec p) {
  std::reverse(p.labels.begin(), p.labels.end());
  std::reverse(p.orient.begin(), p.orient.end());
  for (int& o : p.orient) o = -o;
  return p;
}

inline path_spec concat(path_spec a, const path_spec& b) {
  if (a.labels.back() != b.labels.front())
    throw std::logic_error("path junction labels differ");
  a.labels.insert(a.labels.end(), b.labels.begin() + 1, b.labels.end());
  a.orient.insert(a.orient.end(), b.orient.begin(), b.orient.end());
  return a;
}

// Smallest label a positive edge out of `l` can reach.
inline bigint positive_step(const bs_params& bs, const bigint& l) {
  bigint e = l / gcd_big(l, bs.n());
  bigint next = e;
  for (const auto& pe : bs.primes())
    if (pe.vm > 0 && e % pe.p == 0) next *= pow_big(pe.p, pe.vm);
  return next;
}

// Positive edges from k while a prime p with vm <= vn outside the phenotype
// still divides the label. At least one step is taken when k != q so that the
// path starts with a positive edge.
inline path_spec descend(const bs_params& bs, const bigint& k, const bigint& q) {
  auto must_drop = [&](const bigint& l) {
    for (const auto& pe : bs.primes()) {
      if (pe.vm > pe.vn) continue;
      bool in_phenotype = pe.vm == pe.vn && valuation(q, pe.p) > pe.vn;
      if (!in_phenotype && l % pe.p == 0) return true;
    }
    return false;
  };
  path_spec p{{ext_card(k)}, {}};
  bigint l = k;
  while (must_drop(l) || (p.empty() && l != q)) {
    l = positive_step(bs, l);
    p.labels.push_back(ext_card(l));
    p.orient.push_back(1);
  }
  return p;
}

// Path from k down to its phenotype q whose first edge has orientation `first`.
inline path_spec to_phenotype(const bs_params& bs, const bigint& k, const bigint& q,
                              int first) {
  if (first < 0) return flipped(to_phenotype(bs.swapped(), k, q, 1));
  path_spec p = descend(bs, k, q);
  bigint end = p.labels.back().value();
  if (end != q) p = concat(p, flipped(descend(bs.swapped(), end, q)));
  if (p.labels.back() != ext_card(q)) throw std::logic_error("descent missed the phenotype");
  return p;
}

// Path from q to q with prescribed end orientations.
inline path_spec bridge(const bs_params& bs, const ext_card& q, int first, int last) {
  if (first < 0) return flipped(bridge(bs.swapped(), q, 1, -last));
  if (last > 0) return {{q, q}, {1}};
  ext_card middle = q.divided_by(q.gcd_with(bs.n())).times(bs.abs_m());
  return {{q, middle, q}, {1, -1}};
}

inline path_spec join_at_phenotype(const bs_params& bs, const ext_card& q,
                                   const path_spec& head, const path_spec& tail,
                                   int first, int last) {
  if (head.empty() && tail.empty()) return bridge(bs, q, first, last);
  if (head.empty()) {
    int b = tail.orient.front();
    return b == first ? tail : concat(bridge(bs, q, first, b), tail);
  }
  int a = head.orient.back();
  if (tail.empty()) return a == last ? head : concat(head, bridge(bs, q, a, last));
  int b = tail.orient.front();
  return a == b ? concat(head, tail) : concat(concat(head, bridge(bs, q, a, b)), tail);
}

inline path_spec connect_spec(const bs_params& bs, const ext_card& k, const ext_card& l,
                              int first, int last) {
  if (bs.abs_m() < 2 || bs.abs_n() < 2)
    throw error(errc::param_too_small, "connecting requires |m|, |n| >= 2");
  ext_card q = phenotype(bs, k);
  if (phenotype(bs, l) != q)
    throw error(errc::phenotype_mismatch, "phenotypes " + q.to_string() + " and " +
                                              phenotype(bs, l).to_string());
  if (q.is_infinite()) {
    path_spec empty{{q}, {}};
    return join_at_phenotype(bs, q, empty, empty, first, last);
  }
  path_spec head = k == q ? path_spec{{q}, {}} : to_phenotype(bs, k.value(), q.value(), first);
  path_spec tail = l == q ? path_spec{{q}, {}}
                          : reversed(to_phenotype(bs, l.value(), q.value(), -last));
  return join_at_phenotype(bs, q, head, tail, first, last);
}

}  // namespace detail

struct connected_path {
  mn_graph graph;
  std::vector<std::string> vertex_ids;  // in path order
  std::vector<std::string> edge_ids;
  std::vector<int> orientations;

  const std::string& start() const { return vertex_ids.front(); }
  const std::string& end() const { return vertex_ids.back(); }
};

// Simple path from a vertex labelled k to one labelled l whose first and last
// edges have the given orientations (+1 positive, -1 negative).
inline connected_path connect_path(const bs_params& bs, const ext_card& k, const ext_card& l,
                                   int first, int last) {
  detail::path_spec spec = detail::connect_spec(bs, k, l, first, last);
  connected_path out{mn_graph(bs), {}, {}, spec.orient};
  for (std::size_t i = 0; i < spec.labels.size(); ++i) {
    out.vertex_ids.push_back("p" + std::to_string(i));
    out.graph.add_vertex(out.vertex_ids.back(), spec.labels[i]);
  }
  for (std::size_t i = 0; i < spec.orient.size(); ++i) {
    out.edge_ids.push_back("e" + std::to_string(i + 1));
    const std::string& a = out.vertex_ids[i];
    const std::string& b = out.vertex_ids[i + 1];
    if (spec.orient[i] > 0)
      out.graph.add_edge(out.edge_ids.back(), a, b);
    else
      out.graph.add_edge(out.edge_ids.back(), b, a);
  }
  if (!validate(out.graph).ok) throw std::logic_error("connecting path is not an (m,n)-graph");
  return out;
}

// ---------------------------------------------------------------------------
// saturation and merging

struct saturation_result {
  mn_graph graph;
  std::set<std::string> frontier;  // unsaturated vertices added in the last round
};

inline saturation_result forest_saturate(const mn_graph& g, unsigned rounds) {
  require_valid(g);
  const bs_params& bs = g.params();
  saturation_result r{g, {}};
  mn_graph& h = r.graph;
  std::vector<std::string> current;
  for (const auto& [v, l] : g.vertices()) {
    (void)l;
    current.push_back(v);
  }
  for (unsigned round = 0; round < rounds; ++round) {
    std::vector<std::string> added;
    for (const std::string& v : current) {
      ext_card l = h.label(v);
      ext_card child = l.divided_by(l.gcd_with(bs.n())).times(bs.abs_m());
      ext_card parent = l.divided_by(l.gcd_with(bs.m())).times(bs.abs_n());
      for (bigint i = h.out_degree(v); i < h.max_out(v); ++i) {
        std::string w = h.fresh_vertex("s", child);
        h.fresh_edge("se", v, w);
        added.push_back(w);
      }
      for (bigint i = h.in_degree(v); i < h.max_in(v); ++i) {
        std::string u = h.fresh_vertex("s", parent);
        h.fresh_edge("se", u, v);
        added.push_back(u);
      }
    }
    current.swap(added);
  }
  if (rounds > 0)
    for (const std::string& v : current)
      if (bigint(h.out_degree(v)) < h.max_out(v) || bigint(h.in_degree(v)) < h.max_in(v))
        r.frontier.insert(v);
  return r;
}

struct graph_embedding {
  std::map<std::string, std::string> vertices;
  std::map<std::string, std::string> edges;
};

struct merge_result {
  mn_graph graph;
  graph_embedding embed1;
  graph_embedding embed2;
  std::set<std::string> frontier;
};

// Lexicographically smallest unsaturated vertex. The orientation is +1 when it
// misses an incoming edge (preferred) and -1 when it only misses an outgoing one.
inline std::optional<std::pair<std::string, int>> free_slot(const mn_graph& g) {
  for (const auto& [v, l] : g.vertices()) {
    (void)l;
    if (bigint(g.in_degree(v)) < g.max_in(v)) return std::pair{v, 1};
    if (bigint(g.out_degree(v)) < g.max_out(v)) return std::pair{v, -1};
  }
  return std::nullopt;
}

inline merge_result merge_graphs(const mn_graph& g1, const mn_graph& g2, unsigned rounds) {
  const bs_params& bs = g1.params();
  if (!(g2.params() == bs)) throw error(errc::invalid_input, "graphs have different (m,n)");
  if (bs.abs_m() < 2 || bs.abs_n() < 2)
    throw error(errc::param_too_small, "merging requires |m|, |n| >= 2");
  require_valid(g1);
  require_valid(g2);
  if (!is_connected(g1) || !is_connected(g2))
    throw error(errc::not_connected, "merge inputs must be connected and non-empty");
  auto slot1 = free_slot(g1);
  auto slot2 = free_slot(g2);
  if (!slot1 || !slot2) throw error(errc::no_free_slot, "a merge input is saturated");
  ext_card l1 = g1.label(slot1->first);
  ext_card l2 = g2.label(slot2->first);
  if (phenotype(bs, l1) != phenotype(bs, l2))
    throw error(errc::phenotype_mismatch, "phenotypes " + phenotype(bs, l1).to_string() +
                                              " and " + phenotype(bs, l2).to_string());
  connected_path path = connect_path(bs, l1, l2, -slot1->second, slot2->second);

  mn_graph h(bs);
  merge_result r{h, {}, {}, {}};
  auto rename = [&](const std::string& id, bool vertex) {
    std::string out = id;
    for (int k = 2; vertex ? h.has_vertex(out) : h.has_edge(out); ++k)
      out = id + "~" + std::to_string(k);
    return out;
  };
  auto copy_in = [&](const mn_graph& g, graph_embedding& emb) {
    for (const auto& [v, l] : g.vertices()) {
      std::string id = rename(v, true);
      h.add_vertex(id, l);
      emb.vertices[v] = id;
    }
    for (const auto& [e, ed] : g.edges()) {
      std::string id = rename(e, false);
      h.add_edge(id, emb.vertices.at(ed.src), emb.vertices.at(ed.dst));
      emb.edges[e] = id;
    }
  };
  copy_in(g1, r.embed1);
  copy_in(g2, r.embed2);
  graph_embedding via;
  copy_in(path.graph, via);
  h = weld(h, r.embed1.vertices.at(slot1->first), via.vertices.at(path.start()));
  h = weld(h, r.embed2.vertices.at(slot2->first), via.vertices.at(path.end()));
  saturation_result s = forest_saturate(h, rounds);
  r.graph = std::move(s.graph);
  r.frontier = std::move(s.frontier);
  return r;
}

// ---------------------------------------------------------------------------
// derived data

struct unbounded_witness {
  std::string vertex;
  std::uint64_t prime;
};

// A finite label L and prime p with vm != vn and |L|_p > min(vm, vn). Any
// saturated graph containing such a label has unbounded labels.
inline std::optional<unbounded_witness> detect_unbounded(const mn_graph& g) {
  require_valid(g);
  const bs_params& bs = g.params();
  if (bs.balanced()) return std::nullopt;
  for (const auto& [v, l] : g.vertices()) {
    if (l.is_infinite()) continue;
    for (const auto& pe : bs.primes())
      if (pe.vm != pe.vn && valuation(l.value(), pe.p) > std::min(pe.vm, pe.vn))
        return unbounded_witness{v, pe.p};
  }
  return std::nullopt;
}

// Edge monomorphisms of the graph of groups: the generator of the edge group
// maps to b^first at the source and b^second at the target.
inline std::map<std::string, std::pair<bigint, bigint>> graph_of_groups(const mn_graph& g) {
  require_valid(g);
  const bs_params& bs = g.params();
  std::map<std::string, std::pair<bigint, bigint>> out;
  for (const auto& [id, e] : g.edges()) {
    const ext_card& ls = g.label(e.src);
    const ext_card& lt = g.label(e.dst);
    if (ls.is_infinite() || lt.is_infinite())
      throw error(errc::infinite_label, "edge '" + id + "' touches an infinite label");
    bigint le = g.edge_label(id).value();
    out[id] = {bigint(bs.n()) * le / ls.value(), bigint(bs.m()) * le / lt.value()};
  }
  return out;
}

inline std::string quote_dot(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

inline std::string to_dot(const mn_graph& g) {
  std::string out = "digraph mn_graph {\n";
  for (const auto& [v, l] : g.vertices())
    out += "  " + quote_dot(v) + " [label=\"" + l.to_string() + "\"];\n";
  for (const auto& [id, e] : g.edges()) {
    std::string el = g.has_vertex(e.src) ? g.edge_label(id).to_string() : "?";
    out += "  " + quote_dot(e.src) + " -> " + quote_dot(e.dst) + " [label=\"" + el +
           "\", id=" + quote_dot(id) + "];\n";
  }
  return out + "}\n";
}

// ---------------------------------------------------------------------------
// isomorphism of labelled multigraphs

inline std::optional<graph_embedding> find_isomorphism(const mn_graph& a, const mn_graph& b) {
  if (!(a.params() == b.params()) || a.vertices().size() != b.vertices().size() ||
      a.edges().size() != b.edges().size())
    return std::nullopt;
  struct indexed {
    std::vector<std::string> ids;
    std::map<std::string, int> index;
    std::map<std::pair<int, int>, int> mult;
    std::vector<std::vector<int>> nbrs;
    std::vector<std::vector<int>> outs, ins;
  };
  auto build = [](const mn_graph& g) {
    indexed x;
    for (const auto& [v, l] : g.vertices()) {
      (void)l;
      x.index[v] = int(x.ids.size());
      x.ids.push_back(v);
    }
    x.nbrs.resize(x.ids.size());
    x.outs.resize(x.ids.size());
    x.ins.resize(x.ids.size());
    for (const auto& [id, e] : g.edges()) {
      (void)id;
      int s = x.index.at(e.src), d = x.index.at(e.dst);
      ++x.mult[{s, d}];
      x.outs[s].push_back(d);
      x.ins[d].push_back(s);
      x.nbrs[s].push_back(d);
      x.nbrs[d].push_back(s);
    }
    return x;
  };
  indexed xa = build(a), xb = build(b);
  const std::size_t n = xa.ids.size();

  // colour refinement run on both graphs with a shared palette
  std::vector<int> ca(n), cb(n);
  {
    std::map<std::string, int> palette;
    auto initial = [&](const mn_graph& g, const indexed& x, std::vector<int>& c) {
      for (std::size_t i = 0; i < n; ++i) {
        const std::string& v = x.ids[i];
        auto it = x.mult.find({int(i), int(i)});
        std::string key = g.label(v).to_string() + "/" + std::to_string(g.out_degree(v)) +
                          "/" + std::to_string(g.in_degree(v)) + "/" +
                          std::to_string(it == x.mult.end() ? 0 : it->second);
        c[i] = palette.emplace(key, int(palette.size())).first->second;
      }
    };
    initial(a, xa, ca);
    initial(b, xb, cb);
    for (std::size_t round = 0; round < n; ++round) {
      std::map<std::vector<int>, int> next_palette;
      auto refine = [&](const indexed& x, const std::vector<int>& c) {
        std::vector<int> out(n);
        for (std::size_t i = 0; i < n; ++i) {
          std::vector<int> sig{c[i]};
          std::vector<int> outs, ins;
          for (int d : x.outs[i]) outs.push_back(c[d]);
          for (int s : x.ins[i]) ins.push_back(c[s]);
          std::sort(outs.begin(), outs.end());
          std::sort(ins.begin(), ins.end());
          sig.insert(sig.end(), outs.begin(), outs.end());
          sig.push_back(-1);
          sig.insert(sig.end(), ins.begin(), ins.end());
          out[i] = next_palette.emplace(sig, int(next_palette.size())).first->second;
        }
        return out;
      };
      std::vector<int> na = refine(xa, ca), nb = refine(xb, cb);
      std::size_t before = std::set<int>(ca.begin(), ca.end()).size();
      ca.swap(na);
      cb.swap(nb);
      if (std::set<int>(ca.begin(), ca.end()).size() == before) break;
    }
    std::multiset<int> ma(ca.begin(), ca.end()), mb(cb.begin(), cb.end());
    if (ma != mb) return std::nullopt;
  }

  // search order: breadth first from each component so neighbours constrain early
  std::vector<int> order;
  std::vector<bool> seen(n, false);
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<int> queue{int(s)};
    seen[s] = true;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      order.push_back(queue[qi]);
      for (int y : xa.nbrs[queue[qi]])
        if (!seen[y]) {
          seen[y] = true;
          queue.push_back(y);
        }
    }
  }
  std::vector<int> map_ab(n, -1), map_ba(n, -1);
  auto mult = [](const indexed& x, int s, int d) {
    auto it = x.mult.find({s, d});
    return it == x.mult.end() ? 0 : it->second;
  };
  std::function<bool(std::size_t)> search = [&](std::size_t depth) {
    if (depth == n) return true;
    int u = order[depth];
    for (std::size_t cand = 0; cand < n; ++cand) {
      if (map_ba[cand] != -1 || cb[cand] != ca[u]) continue;
      bool ok = true;
      for (std::size_t j = 0; j < depth && ok; ++j) {
        int w = order[j];
        int fw = map_ab[w];
        ok = mult(xa, u, w) == mult(xb, int(cand), fw) &&
             mult(xa, w, u) == mult(xb, fw, int(cand));
      }
      if (ok) ok = mult(xa, u, u) == mult(xb, int(cand), int(cand));
      if (!ok) continue;
      map_ab[u] = int(cand);
      map_ba[cand] = u;
      if (search(depth + 1)) return true;
      map_ab[u] = -1;
      map_ba[cand] = -1;
    }
    return false;
  };
  if (!search(0)) return std::nullopt;

  graph_embedding emb;
  for (std::size_t i = 0; i < n; ++i) emb.vertices[xa.ids[i]] = xb.ids[map_ab[i]];
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> pool;
  for (const auto& [id, e] : b.edges()) pool[{e.src, e.dst}].push_back(id);
  for (const auto& [id, e] : a.edges()) {
    auto& bucket = pool[{emb.vertices.at(e.src), emb.vertices.at(e.dst)}];
    emb.edges[id] = bucket.back();
    bucket.pop_back();
  }
  return emb;
}

}  // namespace bsx
