#pragma once

#include <algorithm>
#include <numeric>
#include <tuple>
#include <utility>
#include <optional>
#include <string>
#include <vector>

#include "bsx/preaction.hpp"

namespace bsx {

enum class answer { yes, no, unknown };
enum class closure_answer { yes, no, so_far };

inline const char* answer_name(answer a) {
  return a == answer::yes ? "yes" : a == answer::no ? "no" : "unknown";
}
inline const char* answer_name(closure_answer a) {
  return a == closure_answer::yes ? "yes" : a == closure_answer::no ? "no" : "so_far";
}

// Schreier component of the basepoint, renumbered in breadth-first order.
inline pre_action base_component(const pre_action& pa) {
  require_valid(pa);
  action_maps maps(pa);
  std::vector<point> order{pa.base()};
  std::vector<std::optional<point>> index(pa.size());
  index[pa.base()] = 0;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (int sign : {1, -1})
      for (auto y : {maps.b(order[i], sign), maps.t(order[i], sign)})
        if (y && !index[*y]) {
          index[*y] = order.size();
          order.push_back(*y);
        }
  pre_action out(pa.params, order.size());
  bool complete = true;
  for (std::size_t i = 0; i < order.size(); ++i) {
    point x = order[i];
    if (pa.beta[x]) out.beta[i] = *index[*pa.beta[x]];
    if (pa.tau[x]) out.tau[i] = *index[*pa.tau[x]];
    complete = complete && pa.beta[x] && pa.tau[x] && maps.tau_inv()[x];
  }
  out.kind = complete ? action_kind::complete : action_kind::truncated;
  out.basepoint = 0;
  out.period = pa.period;
  return out;
}

// Phenotype of the size of the basepoint's b-orbit.
inline ext_card subgroup_phenotype(const pre_action& pa) {
  require_valid(pa);
  auto cyc = action_maps(pa).cycle(pa.base());
  if (!cyc) throw error(errc::truncation_too_small, "b-orbit of the basepoint does not close");
  return phenotype(pa.params, ext_card(cyc->size()));
}

inline answer stabilizer_contains(const pre_action& pa, const word& w) {
  require_valid(pa);
  auto y = evaluate(pa, pa.base(), w);
  if (!y) return answer::unknown;
  return *y == pa.base() ? answer::yes : answer::no;
}

// Whether b^k acts trivially everywhere, i.e. every b-orbit size divides k.
// A known period settles windows of an action given by a formula.
inline closure_answer contains_normal_closure(const pre_action& pa, const bigint& k) {
  require_valid(pa);
  action_maps maps(pa);
  std::vector<bool> seen(pa.size(), false);
  for (point x = 0; x < pa.size(); ++x) {
    if (seen[x]) continue;
    auto cyc = maps.cycle(x);
    if (!cyc) continue;
    for (point y : *cyc) seen[y] = true;
    if (k % cyc->size() != 0) return closure_answer::no;
  }
  if (pa.kind == action_kind::complete || (pa.period && k % *pa.period == 0))
    return closure_answer::yes;
  return closure_answer::so_far;
}

// Membership of the basepoint stabilizer in MC_q: it must contain the normal
// closure of b^s(q), where q is its own phenotype.
inline answer mcq_member(const pre_action& pa) {
  pre_action comp = base_component(pa);
  ext_card q = subgroup_phenotype(comp);
  if (q.is_infinite()) return answer::no;
  switch (contains_normal_closure(comp, special_divisor_s(pa.params, q.value()))) {
    case closure_answer::yes: return answer::yes;
    case closure_answer::no: return answer::no;
    case closure_answer::so_far: break;
  }
  return answer::unknown;
}

// The same question asked of a Bass-Serre graph at a vertex; labels may be infinite.
inline answer mcq_member(const mn_graph& g, const std::string& vertex) {
  require_valid(g);
  ext_card q = phenotype(g.params(), g.label(vertex));
  if (q.is_infinite()) return answer::no;
  bigint s = special_divisor_s(g.params(), q.value());
  std::vector<std::string> comp;
  for (auto& c : components(g))
    if (std::find(c.begin(), c.end(), vertex) != c.end()) comp = c;
  bool saturated = true;
  for (const auto& v : comp) {
    const ext_card& l = g.label(v);
    if (l.is_infinite() || s % l.value() != 0) return answer::no;
    saturated = saturated && bigint(g.out_degree(v)) == g.max_out(v) &&
                bigint(g.in_degree(v)) == g.max_in(v);
  }
  return saturated ? answer::yes : answer::unknown;
}

enum class kernel_status { in_kernel, not_in_kernel, unknown };
enum class kernel_reason {
  none,
  finite_complete_action,
  finite_saturated_infinite_labels,
  unbounded_label_witness,
};

struct kernel_verdict {
  kernel_status status = kernel_status::unknown;
  kernel_reason reason = kernel_reason::none;
  std::optional<unbounded_witness> witness;
};

inline const char* status_name(kernel_status s) {
  switch (s) {
    case kernel_status::in_kernel: return "InKernel";
    case kernel_status::not_in_kernel: return "NotInKernel";
    case kernel_status::unknown: return "Unknown";
  }
  return "Unknown";
}

inline const char* reason_name(kernel_reason r) {
  switch (r) {
    case kernel_reason::none: return "";
    case kernel_reason::finite_complete_action: return "FiniteCompleteAction";
    case kernel_reason::finite_saturated_infinite_labels: return "FiniteSaturatedInfiniteLabels";
    case kernel_reason::unbounded_label_witness: return "UnboundedLabelWitness";
  }
  return "";
}

inline kernel_verdict classify_kernel(const mn_graph& g) {
  require_valid(g);
  if (g.vertices().empty()) throw error(errc::invalid_input, "empty graph");
  if (is_saturated(g)) {
    bool all_finite = true, all_infinite = true;
    for (const auto& [v, l] : g.vertices()) {
      (void)v;
      all_finite = all_finite && l.is_finite();
      all_infinite = all_infinite && l.is_infinite();
    }
    if (all_finite)
      return {kernel_status::not_in_kernel, kernel_reason::finite_complete_action, {}};
    if (all_infinite && g.params().balanced())
      return {kernel_status::not_in_kernel, kernel_reason::finite_saturated_infinite_labels, {}};
  }
  if (auto w = detect_unbounded(g))
    return {kernel_status::in_kernel, kernel_reason::unbounded_label_witness, w};
  return {};
}

inline kernel_verdict classify_kernel(const pre_action& pa) {
  require_valid(pa);
  if (pa.size() == 0) throw error(errc::invalid_input, "empty pre-action");
  if (pa.kind == action_kind::complete)
    return {kernel_status::not_in_kernel, kernel_reason::finite_complete_action, {}};
  // closed b-cycles are genuine b-orbits of every extension
  mn_graph closed(pa.params);
  action_maps maps(pa);
  std::vector<bool> seen(pa.size(), false);
  for (point x = 0; x < pa.size(); ++x) {
    if (seen[x]) continue;
    auto cyc = maps.cycle(x);
    if (!cyc) continue;
    for (point y : *cyc) seen[y] = true;
    closed.add_vertex(orbit_id(x), ext_card(cyc->size()));
  }
  if (auto w = detect_unbounded(closed))
    return {kernel_status::in_kernel, kernel_reason::unbounded_label_witness, w};
  return {};
}

inline std::uint64_t mod_inverse(std::int64_t a, std::uint64_t q) {
  std::int64_t r0 = std::int64_t(q), r1 = ((a % r0) + r0) % r0;
  std::int64_t s0 = 0, s1 = 1;
  while (r1 != 0) {
    std::int64_t k = r0 / r1;
    std::tie(r0, r1) = std::pair{r1, r0 - k * r1};
    std::tie(s0, s1) = std::pair{s1, s0 - k * s1};
  }
  if (r0 != 1) throw error(errc::not_coprime, "no inverse modulo " + std::to_string(q));
  return std::uint64_t(((s0 % std::int64_t(q)) + std::int64_t(q)) % std::int64_t(q));
}

// Levels -window..window of the action of BS(m,n) on Z/q x| Z, the quotient by
// the normal closure of b^q. Point (x, h) stands for b^x t^h; b moves it to
// (x + u^h, h) with u = n/m mod q, and t moves it to (x, h + 1).
inline pre_action quotient_action(const bs_params& bs, std::uint64_t q, std::size_t window) {
  if (q == 0) throw error(errc::invalid_input, "q must be positive");
  if (std::gcd(q, bs.abs_m()) != 1 || std::gcd(q, bs.abs_n()) != 1)
    throw error(errc::not_coprime, "q must be coprime to m and n");
  const std::int64_t iq = std::int64_t(q);
  auto reduce = [&](std::int64_t a) { return std::uint64_t(((a % iq) + iq) % iq); };
  using u128 = unsigned __int128;
  const std::uint64_t u = std::uint64_t(u128(reduce(bs.n())) * mod_inverse(bs.m(), q) % q);
  const std::uint64_t u_inv = mod_inverse(std::int64_t(u), q);
  const std::size_t levels = 2 * window + 1;
  std::vector<std::uint64_t> step(levels);
  step[window] = 1 % q;
  for (std::size_t i = 1; i <= window; ++i) {
    step[window + i] = std::uint64_t(u128(step[window + i - 1]) * u % q);
    step[window - i] = std::uint64_t(u128(step[window - i + 1]) * u_inv % q);
  }
  pre_action pa(bs, q * levels);
  auto at = [&](std::uint64_t x, std::size_t level) { return level * q + x; };
  for (std::size_t level = 0; level < levels; ++level)
    for (std::uint64_t x = 0; x < q; ++x) {
      pa.beta[at(x, level)] = at((x + step[level]) % q, level);
      if (level + 1 < levels) pa.tau[at(x, level)] = at(x, level + 1);
    }
  pa.kind = action_kind::truncated;
  pa.basepoint = at(0, window);
  pa.period = q;
  require_valid(pa);
  return pa;
}

// Moves the basepoint to base * w, whose stabilizer is w^-1 Stab w.
inline pre_action conjugate(const pre_action& pa, const word& w) {
  require_valid(pa);
  auto y = evaluate(pa, pa.base(), w);
  if (!y) throw error(errc::undefined, "word leaves the data at the basepoint");
  pre_action out = pa;
  out.basepoint = *y;
  return out;
}

// Three b-cycles of sizes p|n|, p, p|m| joined so that t^2 b t^-1 b fixes the
// first point of the largest one, which becomes the basepoint.
inline pre_action triangle_preaction(const bs_params& bs, std::uint64_t p) {
  if (std::gcd(p, bs.abs_m()) != 1 || std::gcd(p, bs.abs_n()) != 1)
    throw error(errc::not_coprime, "p must be coprime to m and n");
  const std::size_t l1 = p * bs.abs_n(), l2 = p, l3 = p * bs.abs_m();
  pre_action pa(bs, l1 + l2 + l3);
  const point y1 = 0, y2 = l1, y3 = l1 + l2;
  for (auto [start, len] : {std::pair{y1, l1}, {y2, l2}, {y3, l3}})
    for (std::size_t i = 0; i < len; ++i) pa.beta[start + i] = start + (i + 1) % len;
  auto on = [](point start, std::size_t len, std::int64_t offset) {
    std::int64_t l = std::int64_t(len);
    return start + point(((offset % l) + l) % l);
  };
  const std::int64_t m = bs.m(), n = bs.n();
  for (std::int64_t j = 0; j < std::int64_t(p); ++j) {
    pa.tau[on(y1, l1, j * n)] = on(y2, l2, j * m);
    pa.tau[on(y2, l2, j * n)] = on(y3, l3, j * m);
    pa.tau[on(y1, l1, -1 + j * n)] = on(y3, l3, 1 + j * m);
  }
  pa.kind = action_kind::truncated;
  pa.basepoint = y1;
  require_valid(pa);
  return pa;
}

}  // namespace bsx
