#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bsx/mn_graph.hpp"
#include "bsx/words.hpp"

namespace bsx {

enum class action_kind { complete, truncated };

using point = std::size_t;
using partial_map = std::vector<std::optional<point>>;

// Finite pre-action of BS(m,n): beta permutes the points, tau is a partial
// injection with x tau beta^m = x beta^n tau. In truncated data beta may also be
// undefined at the open ends of b-paths.
struct pre_action {
  bs_params params;
  partial_map beta;
  partial_map tau;
  action_kind kind = action_kind::truncated;
  std::optional<point> basepoint;
  // Set when the data is a window of a known action in which every b-orbit
  // size divides this number.
  std::optional<bigint> period;

  explicit pre_action(const bs_params& bs) : params(bs) {}
  pre_action(const bs_params& bs, std::size_t points)
      : params(bs), beta(points), tau(points) {}

  std::size_t size() const { return beta.size(); }

  point base() const {
    if (!basepoint) throw error(errc::invalid_input, "pre-action has no basepoint");
    return *basepoint;
  }

  friend bool operator==(const pre_action& a, const pre_action& b) {
    return a.params == b.params && a.beta == b.beta && a.tau == b.tau && a.kind == b.kind &&
           a.basepoint == b.basepoint && a.period == b.period;
  }
};

inline partial_map invert(const partial_map& f) {
  partial_map inv(f.size());
  for (point x = 0; x < f.size(); ++x)
    if (f[x] && *f[x] < f.size()) inv[*f[x]] = x;
  return inv;
}

// Forward and inverse maps of a pre-action, built once for repeated walking.
class action_maps {
 public:
  explicit action_maps(const pre_action& pa)
      : beta_(pa.beta), beta_inv_(invert(pa.beta)), tau_(pa.tau), tau_inv_(invert(pa.tau)) {}

  std::optional<point> b(point x, int sign) const { return sign > 0 ? beta_[x] : beta_inv_[x]; }
  std::optional<point> t(point x, int sign) const { return sign > 0 ? tau_[x] : tau_inv_[x]; }

  // x beta^e for machine-sized e; nullopt if the walk leaves the data
  std::optional<point> b_pow(point x, std::int64_t e) const {
    std::optional<point> cur = x;
    int sign = e < 0 ? -1 : 1;
    for (std::uint64_t i = 0, steps = abs_u64(e); i < steps && cur; ++i) cur = b(*cur, sign);
    return cur;
  }

  // x beta^e for any e; closed cycles are walked modulo their length
  std::optional<point> b_pow(point x, const bigint& e) const {
    int sign = e < 0 ? -1 : 1;
    bigint steps = abs_big(e);
    std::optional<point> cur = x;
    bigint walked = 0;
    while (walked < steps) {
      cur = b(*cur, sign);
      ++walked;
      if (!cur) return std::nullopt;
      if (*cur == x) {
        bigint rest = steps % walked;
        for (bigint i = 0; i < rest; ++i) cur = b(*cur, sign);
        return cur;
      }
    }
    return cur;
  }

  // Points of the closed beta-cycle through x starting at x, or nullopt if open.
  std::optional<std::vector<point>> cycle(point x) const {
    std::vector<point> out{x};
    for (std::optional<point> cur = beta_[x]; cur != x; cur = beta_[*cur]) {
      if (!cur) return std::nullopt;
      out.push_back(*cur);
    }
    return out;
  }

  const partial_map& tau() const { return tau_; }
  const partial_map& tau_inv() const { return tau_inv_; }
  const partial_map& beta() const { return beta_; }

 private:
  partial_map beta_, beta_inv_, tau_, tau_inv_;
};

inline validation_report validate_preaction(const pre_action& pa) {
  validation_report r;
  const std::size_t n = pa.size();
  auto loc = [](point x) { return "point " + std::to_string(x); };
  if (pa.tau.size() != n) {
    r.add(violation_kind::out_of_range, "tau", "tau and beta cover different point sets");
    return r;
  }
  if (pa.basepoint && *pa.basepoint >= n)
    r.add(violation_kind::bad_basepoint, "basepoint", "basepoint out of range");
  for (const partial_map* f : {&pa.beta, &pa.tau}) {
    std::vector<bool> hit(n, false);
    bool is_beta = f == &pa.beta;
    for (point x = 0; x < n; ++x) {
      const auto& y = (*f)[x];
      if (!y) {
        if (is_beta && pa.kind == action_kind::complete)
          r.add(violation_kind::beta_not_permutation, loc(x), "beta undefined");
        continue;
      }
      if (*y >= n) {
        r.add(violation_kind::out_of_range, loc(x), "image " + std::to_string(*y));
        continue;
      }
      if (hit[*y])
        r.add(is_beta ? violation_kind::beta_not_permutation : violation_kind::tau_not_injective,
              loc(x), "image " + std::to_string(*y) + " repeated");
      hit[*y] = true;
    }
  }
  if (!r.ok) return r;

  action_maps maps(pa);
  const std::int64_t m = pa.params.m(), nn = pa.params.n();
  for (point x = 0; x < n; ++x) {
    if (pa.tau[x]) {
      auto shifted = maps.b_pow(x, nn);
      if (shifted && !pa.tau[*shifted])
        r.add(violation_kind::domain_not_invariant, loc(x), "x beta^n leaves the domain of tau");
      auto lhs = maps.b_pow(*pa.tau[x], m);
      auto rhs = shifted ? pa.tau[*shifted] : std::nullopt;
      if (lhs && rhs && *lhs != *rhs)
        r.add(violation_kind::equivariance_broken, loc(x), "x tau beta^m != x beta^n tau");
    }
    if (maps.tau_inv()[x]) {
      auto shifted = maps.b_pow(x, m);
      if (shifted && !maps.tau_inv()[*shifted])
        r.add(violation_kind::range_not_invariant, loc(x), "y beta^m leaves the range of tau");
    }
    if (pa.kind == action_kind::complete && (!pa.tau[x] || !maps.tau_inv()[x]))
      r.add(violation_kind::incomplete, loc(x), "tau is not a bijection");
  }
  return r;
}

inline void require_valid(const pre_action& pa) {
  validation_report r = validate_preaction(pa);
  if (!r.ok)
    throw error(errc::invalid_preaction, std::string(violation_name(r.violations[0].kind)) +
                                             " at " + r.violations[0].location);
}

inline bool beta_total(const pre_action& pa) {
  return std::all_of(pa.beta.begin(), pa.beta.end(), [](const auto& y) { return y.has_value(); });
}

inline std::string orbit_id(point min_point) { return "o" + std::to_string(min_point); }
inline std::string tau_orbit_id(point min_point) { return "t" + std::to_string(min_point); }

// beta-orbits become vertices labelled by size; beta^n-orbits in dom tau become
// edges. Ids are derived from the smallest point of each orbit.
inline mn_graph bass_serre(const pre_action& pa) {
  require_valid(pa);
  if (!beta_total(pa))
    throw error(errc::invalid_preaction, "Bass-Serre graph needs closed beta-cycles");
  action_maps maps(pa);
  mn_graph g(pa.params);
  std::vector<point> owner(pa.size(), pa.size());
  for (point x = 0; x < pa.size(); ++x) {
    if (owner[x] != pa.size()) continue;
    auto cyc = *maps.cycle(x);
    for (point y : cyc) owner[y] = x;
    g.add_vertex(orbit_id(x), ext_card(cyc.size()));
  }
  std::vector<bool> used(pa.size(), false);
  for (point x = 0; x < pa.size(); ++x) {
    if (!pa.tau[x] || used[x]) continue;
    for (point y = x; !used[y]; y = *maps.b_pow(y, pa.params.n())) used[y] = true;
    g.add_edge(tau_orbit_id(x), orbit_id(owner[x]), orbit_id(owner[*pa.tau[x]]));
  }
  return g;
}

inline bool is_transitive(const pre_action& pa) { return is_connected(bass_serre(pa)); }

struct realization {
  pre_action action;
  std::map<std::string, std::vector<point>> cycles;  // vertex -> its beta-cycle
};

// Realizes the edges of g missing from the image of bass_serre(pa) on top of pa.
// `embed` maps the Bass-Serre graph of pa into g.
inline realization realize_extending(const pre_action& pa, const mn_graph& g,
                                     const graph_embedding& embed) {
  require_valid(g);
  require_valid(pa);
  if (!(pa.params == g.params()))
    throw error(errc::embedding_mismatch, "pre-action and graph have different (m,n)");
  for (const auto& [v, l] : g.vertices())
    if (l.is_infinite())
      throw error(errc::infinite_label, "vertex '" + v + "' has an infinite label");
  const mn_graph h = bass_serre(pa);
  std::set<std::string> image_v, image_e;
  for (const auto& [v, l] : h.vertices()) {
    auto it = embed.vertices.find(v);
    if (it == embed.vertices.end() || !g.has_vertex(it->second) || g.label(it->second) != l ||
        !image_v.insert(it->second).second)
      throw error(errc::embedding_mismatch, "vertex '" + v + "' is not embedded");
  }
  for (const auto& [id, e] : h.edges()) {
    auto it = embed.edges.find(id);
    if (it == embed.edges.end() || !g.has_edge(it->second) || !image_e.insert(it->second).second)
      throw error(errc::embedding_mismatch, "edge '" + id + "' is not embedded");
    const edge& img = g.edges().at(it->second);
    if (img.src != embed.vertices.at(e.src) || img.dst != embed.vertices.at(e.dst))
      throw error(errc::embedding_mismatch, "edge '" + id + "' changes endpoints");
  }

  realization out{pa, {}};
  pre_action& res = out.action;
  action_maps maps(pa);
  for (const auto& [v, l] : h.vertices()) {
    (void)l;
    point x0 = std::stoul(v.substr(1));
    out.cycles[embed.vertices.at(v)] = *maps.cycle(x0);
  }
  for (const auto& [v, l] : g.vertices()) {
    if (image_v.count(v)) continue;
    std::size_t len = l.value().convert_to<std::size_t>();
    std::vector<point>& cyc = out.cycles[v];
    point start = res.size();
    res.beta.resize(start + len);
    res.tau.resize(start + len);
    for (std::size_t i = 0; i < len; ++i) {
      cyc.push_back(start + i);
      res.beta[start + i] = start + (i + 1) % len;
    }
  }

  partial_map tau_inv = invert(res.tau);
  auto mod = [](std::int64_t a, std::size_t len) {
    std::int64_t l = std::int64_t(len);
    return std::size_t(((a % l) + l) % l);
  };
  // residue r whose orbit {cyc[r + k step]} is free and has the smallest point
  auto pick = [&](const std::vector<point>& cyc, std::int64_t step, const partial_map& used) {
    std::size_t len = cyc.size();
    std::size_t classes = std::size_t(std::gcd(std::int64_t(len), std::llabs(step)));
    std::optional<std::size_t> best;
    point best_min = 0;
    for (std::size_t r = 0; r < classes; ++r) {
      if (used[cyc[r]]) continue;
      point lo = cyc[r];
      for (std::size_t i = r; i < len; i += classes) lo = std::min(lo, cyc[i]);
      if (!best || lo < best_min) {
        best = r;
        best_min = lo;
      }
    }
    if (!best) throw std::logic_error("no free orbit although the graph is valid");
    return *best;
  };
  const std::int64_t m = g.params().m(), n = g.params().n();
  for (const auto& [id, e] : g.edges()) {
    if (image_e.count(id)) continue;
    const auto& cs = out.cycles.at(e.src);
    const auto& ct = out.cycles.at(e.dst);
    std::size_t rs = pick(cs, n, res.tau);
    std::size_t rt = pick(ct, m, tau_inv);
    std::size_t len = g.edge_label(id).value().convert_to<std::size_t>();
    for (std::size_t k = 0; k < len; ++k) {
      point x = cs[mod(std::int64_t(rs) + std::int64_t(k) * n, cs.size())];
      point y = ct[mod(std::int64_t(rt) + std::int64_t(k) * m, ct.size())];
      res.tau[x] = y;
      tau_inv[y] = x;
    }
  }
  res.kind = is_saturated(g) ? action_kind::complete : action_kind::truncated;
  if (g.vertices().size() != h.vertices().size() || g.edges().size() != h.edges().size())
    res.period.reset();
  if (!validate_preaction(res).ok) throw std::logic_error("realization is not a pre-action");
  return out;
}

inline realization realize_layout(const mn_graph& g) {
  return realize_extending(pre_action(g.params()), g, {});
}

inline pre_action realize(const mn_graph& g) { return realize_layout(g).action; }

struct merged_action {
  pre_action action;
  mn_graph graph;                  // Bass-Serre graph of the result
  std::vector<point> points1;      // where the points of the inputs went
  std::vector<point> points2;
  std::set<std::string> frontier;
};

inline merged_action merge_preactions(const pre_action& pa1, const pre_action& pa2,
                                      unsigned rounds) {
  if (!(pa1.params == pa2.params))
    throw error(errc::invalid_input, "pre-actions have different (m,n)");
  if (pa1.params.abs_m() < 2 || pa1.params.abs_n() < 2)
    throw error(errc::param_too_small, "merging requires |m|, |n| >= 2");
  mn_graph g1 = bass_serre(pa1);
  mn_graph g2 = bass_serre(pa2);
  merge_result mg = merge_graphs(g1, g2, rounds);

  const std::size_t n1 = pa1.size();
  pre_action both(pa1.params, n1 + pa2.size());
  auto shift = [&](const std::optional<point>& y) {
    return y ? std::optional<point>(*y + n1) : std::nullopt;
  };
  for (point x = 0; x < n1; ++x) {
    both.beta[x] = pa1.beta[x];
    both.tau[x] = pa1.tau[x];
  }
  for (point x = 0; x < pa2.size(); ++x) {
    both.beta[x + n1] = shift(pa2.beta[x]);
    both.tau[x + n1] = shift(pa2.tau[x]);
  }
  both.basepoint = pa1.basepoint;

  // orbit ids encode their smallest point, so the union's ids map back directly
  graph_embedding emb;
  mn_graph h = bass_serre(both);
  auto source = [&](const std::string& id, const graph_embedding& e1,
                    const graph_embedding& e2, bool vertex) {
    point p = std::stoul(id.substr(1));
    std::string orig = id.substr(0, 1) + std::to_string(p < n1 ? p : p - n1);
    const graph_embedding& e = p < n1 ? e1 : e2;
    return vertex ? e.vertices.at(orig) : e.edges.at(orig);
  };
  for (const auto& [v, l] : h.vertices()) {
    (void)l;
    emb.vertices[v] = source(v, mg.embed1, mg.embed2, true);
  }
  for (const auto& [id, e] : h.edges()) {
    (void)e;
    emb.edges[id] = source(id, mg.embed1, mg.embed2, false);
  }
  realization r = realize_extending(both, mg.graph, emb);
  merged_action out{std::move(r.action), std::move(mg.graph), {}, {}, std::move(mg.frontier)};
  for (point x = 0; x < n1; ++x) out.points1.push_back(x);
  for (point x = 0; x < pa2.size(); ++x) out.points2.push_back(x + n1);
  return out;
}

// Applies the letters of w left to right; nullopt where the data runs out.
inline std::optional<point> evaluate(const action_maps& maps, point x, const word& w) {
  std::optional<point> cur = x;
  for (const auto& s : w.syllables()) {
    if (!cur) return std::nullopt;
    cur = s.is_t ? maps.t(*cur, s.power > 0 ? 1 : -1) : maps.b_pow(*cur, s.power);
  }
  return cur;
}

inline std::optional<point> evaluate(const pre_action& pa, point x, const word& w) {
  if (x >= pa.size()) throw error(errc::invalid_input, "point out of range");
  return evaluate(action_maps(pa), x, w);
}

// Points within distance R of x in the Schreier graph, in breadth-first order.
inline std::vector<point> ball(const pre_action& pa, point x, std::size_t radius) {
  action_maps maps(pa);
  std::vector<std::size_t> dist(pa.size(), SIZE_MAX);
  std::vector<point> order{x};
  dist[x] = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    point y = order[i];
    if (dist[y] == radius) continue;
    for (int sign : {1, -1})
      for (auto z : {maps.b(y, sign), maps.t(y, sign)})
        if (z && dist[*z] == SIZE_MAX) {
          dist[*z] = dist[y] + 1;
          order.push_back(*z);
        }
  }
  return order;
}

// Whether the radius-R balls around the basepoints are isomorphic as pointed
// labelled graphs. The isomorphism, if any, is forced by the labels, so a
// synchronized breadth-first walk finds it.
inline bool pointed_eq_radius(const pre_action& a, const pre_action& b, std::size_t radius) {
  action_maps ma(a), mb(b);
  std::map<point, point> fwd, back;
  std::map<point, std::size_t> depth;
  std::deque<point> queue;
  fwd[a.base()] = b.base();
  back[b.base()] = a.base();
  depth[a.base()] = 0;
  queue.push_back(a.base());
  using step = std::optional<point> (action_maps::*)(point, int) const;
  const step moves[] = {&action_maps::b, &action_maps::t};
  while (!queue.empty()) {
    point x = queue.front();
    queue.pop_front();
    if (depth[x] == radius) continue;
    point y = fwd[x];
    for (step mv : moves)
      for (int sign : {1, -1}) {
        auto nx = (ma.*mv)(x, sign);
        auto ny = (mb.*mv)(y, sign);
        if (nx.has_value() != ny.has_value()) return false;
        if (!nx) continue;
        auto fx = fwd.find(*nx);
        auto by = back.find(*ny);
        if (fx == fwd.end() && by == back.end()) {
          fwd[*nx] = *ny;
          back[*ny] = *nx;
          depth[*nx] = depth[x] + 1;
          queue.push_back(*nx);
        } else if (fx == fwd.end() || by == back.end() || fx->second != *ny) {
          return false;
        }
      }
  }
  // edges between points on the boundary sphere
  for (const auto& [x, y] : fwd) {
    for (step mv : moves)
      for (int sign : {1, -1}) {
        auto nx = (ma.*mv)(x, sign);
        auto ny = (mb.*mv)(y, sign);
        bool in_a = nx && fwd.count(*nx);
        bool in_b = ny && back.count(*ny);
        if (in_a != in_b) return false;
        if (in_a && fwd.at(*nx) != *ny) return false;
      }
  }
  return true;
}

inline std::string schreier_dot(const pre_action& pa) {
  std::string out = "digraph schreier {\n";
  for (point x = 0; x < pa.size(); ++x) {
    out += "  " + std::to_string(x);
    if (pa.basepoint == x) out += " [shape=doublecircle]";
    out += ";\n";
  }
  for (point x = 0; x < pa.size(); ++x) {
    if (pa.beta[x]) out += "  " + std::to_string(x) + " -> " + std::to_string(*pa.beta[x]) + " [label=\"b\"];\n";
    if (pa.tau[x])
      out += "  " + std::to_string(x) + " -> " + std::to_string(*pa.tau[x]) +
             " [label=\"t\", style=dashed];\n";
  }
  return out + "}\n";
}

}  // namespace bsx
