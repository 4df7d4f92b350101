#pragma once
// Shared test data and generators.

#include <map>
#include <random>
#include <tuple>
#include <string>
#include <vector>

#include "bsx/mn_graph.hpp"
#include "bsx/preaction.hpp"
#include "oracles.hpp"

namespace fixtures {

// The five-vertex (2,3)-graph with labels 8, 4, 6, 4, 9.
inline bsx::mn_graph figure3_graph() {
  bsx::mn_graph g(bsx::bs_params(2, 3));
  g.add_vertex("a", 4);
  g.add_vertex("b", 6);
  g.add_vertex("c", 4);
  g.add_vertex("d", 9);
  g.add_vertex("e", 8);
  g.add_edge("ba1", "b", "a");
  g.add_edge("ba2", "b", "a");
  g.add_edge("bc", "b", "c");
  g.add_edge("db1", "d", "b");
  g.add_edge("db2", "d", "b");
  g.add_edge("ae", "a", "e");
  return g;
}

// The same picture drawn as 31 points. Cycles a1..a4, b1..b6, c1..c4, d1..d9
// run upwards; the 8-cycle e runs downwards (e_i -> e_{i-1}).
inline bsx::pre_action figure3_preaction() {
  std::map<char, std::pair<std::size_t, std::size_t>> block = {
      {'a', {0, 4}}, {'b', {4, 6}}, {'c', {10, 4}}, {'d', {14, 9}}, {'e', {23, 8}}};
  auto pt = [&](char c, std::size_t i) { return block[c].first + i - 1; };
  bsx::pre_action pa(bsx::bs_params(2, 3), 31);
  for (auto [c, span] : block)
    for (std::size_t i = 1; i <= span.second; ++i) {
      std::size_t next = c == 'e' ? (i == 1 ? span.second : i - 1) : (i % span.second) + 1;
      pa.beta[pt(c, i)] = pt(c, next);
    }
  const std::vector<std::tuple<char, int, char, int>> tau = {
      {'b', 6, 'a', 4}, {'b', 3, 'a', 2}, {'b', 5, 'a', 3}, {'b', 2, 'a', 1},
      {'b', 4, 'c', 1}, {'b', 1, 'c', 3}, {'d', 7, 'b', 1}, {'d', 1, 'b', 3},
      {'d', 4, 'b', 5}, {'d', 8, 'b', 6}, {'d', 2, 'b', 2}, {'d', 5, 'b', 4},
      {'a', 1, 'e', 1}, {'a', 2, 'e', 3}, {'a', 3, 'e', 5}, {'a', 4, 'e', 7}};
  for (auto [c, i, d, j] : tau) pa.tau[pt(c, i)] = pt(d, j);
  pa.basepoint = 0;
  return pa;
}

// Edge condition recomputed on machine integers.
inline bool transfer_ok(const bsx::bs_params& bs, std::int64_t src, std::int64_t dst) {
  std::int64_t am = std::llabs(bs.m()), an = std::llabs(bs.n());
  return src / std::gcd(src, an) == dst / std::gcd(dst, am);
}

inline std::int64_t small(const bsx::ext_card& c) {
  return c.value().convert_to<std::int64_t>();
}

// Random connected valid graph with finite labels of phenotype q and at least
// one free slot. Grows by attaching admissible neighbours and occasionally
// closing cycles between existing vertices.
inline bsx::mn_graph random_graph(std::mt19937_64& rng, const bsx::bs_params& bs,
                                  std::int64_t q, int max_vertices) {
  std::vector<bsx::bigint> start = bsx::phenotype_preimage(bs, q, q * 40);
  bsx::mn_graph g(bs);
  g.add_vertex("v0", bsx::ext_card(start[rng() % start.size()]));
  int target = 1 + int(rng() % max_vertices);
  for (int attempt = 0; attempt < 60 && int(g.vertices().size()) < target; ++attempt) {
    auto it = g.vertices().begin();
    std::advance(it, rng() % g.vertices().size());
    std::string v = it->first;
    bool outgoing = rng() % 2;
    if (outgoing ? bsx::bigint(g.out_degree(v)) >= g.max_out(v)
                 : bsx::bigint(g.in_degree(v)) >= g.max_in(v))
      continue;
    auto labels = bsx::admissible_neighbor_labels(
        bs, g.label(v), outgoing ? bsx::direction::out : bsx::direction::in);
    bsx::ext_card l = labels[rng() % labels.size()];
    if (l.value() > 100000) continue;
    // sometimes reuse an existing vertex with that label
    std::string w;
    if (rng() % 4 == 0)
      for (const auto& [u, lu] : g.vertices())
        if (lu == l && u != v) {
          bool fits = outgoing ? bsx::bigint(g.in_degree(u)) < g.max_in(u)
                               : bsx::bigint(g.out_degree(u)) < g.max_out(u);
          if (fits) w = u;
        }
    if (w.empty()) w = g.fresh_vertex("v", l);
    if (outgoing)
      g.fresh_edge("x", v, w);
    else
      g.fresh_edge("x", w, v);
  }
  return g;
}

}  // namespace fixtures
