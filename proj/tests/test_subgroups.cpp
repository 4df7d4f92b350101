#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "bsx/subgroups.hpp"
#include "checks.hpp"
#include "fixtures.hpp"

using bsx::answer;
using bsx::bs_params;
using bsx::closure_answer;
using bsx::kernel_status;
using bsx::parse_word;
using bsx::point;
using bsx::pre_action;

namespace {

// b^k acts trivially, checked letter by letter.
bool b_power_trivial(const pre_action& pa, std::int64_t k) {
  for (point x = 0; x < pa.size(); ++x) {
    point y = x;
    for (std::int64_t i = 0; i < k; ++i) y = *pa.beta[y];
    if (y != x) return false;
  }
  return true;
}

bsx::word random_word(std::mt19937_64& rng, int letters) {
  bsx::word w;
  for (int i = 0; i < letters; ++i) {
    int sign = rng() % 2 ? 1 : -1;
    if (rng() % 2)
      w.push_b(sign);
    else
      w.push_t(sign);
  }
  return w;
}

std::string top_orbit(std::uint64_t q, std::size_t window) {
  return bsx::orbit_id(2 * window * q);
}

}  // namespace

TEST(SubgroupPhenotype, Examples) {
  EXPECT_EQ(bsx::subgroup_phenotype(bsx::quotient_action(bs_params(2, 3), 5, 3)), bsx::ext_card(5));
  pre_action fig = fixtures::figure3_preaction();
  fig.basepoint = 4;  // first point of the 6-cycle
  EXPECT_EQ(bsx::subgroup_phenotype(fig), bsx::ext_card(1));

  pre_action open(bs_params(2, 3), 3);
  open.beta[0] = 1;
  open.beta[1] = 2;
  open.basepoint = 0;
  try {
    bsx::subgroup_phenotype(open);
    FAIL() << "expected TruncationTooSmall";
  } catch (const bsx::error& e) {
    EXPECT_EQ(e.code(), bsx::errc::truncation_too_small);
  }
}

TEST(StabilizerContains, Examples) {
  bsx::mn_graph loop(bs_params(2, 3));
  loop.add_vertex("v", 1);
  loop.add_edge("e", "v", "v");
  pre_action full = bsx::realize(loop);
  full.basepoint = 0;
  ASSERT_EQ(full.kind, bsx::action_kind::complete);
  EXPECT_EQ(bsx::stabilizer_contains(full, bsx::word{}), answer::yes);

  pre_action quo = bsx::quotient_action(bs_params(2, 3), 5, 1);
  EXPECT_EQ(bsx::stabilizer_contains(quo, parse_word("b^5")), answer::yes);
  EXPECT_EQ(bsx::stabilizer_contains(quo, parse_word("b^2")), answer::no);
  EXPECT_EQ(bsx::stabilizer_contains(quo, parse_word("t b^5 T")), answer::yes);
  EXPECT_EQ(bsx::stabilizer_contains(quo, parse_word("t^2")), answer::unknown);
}

TEST(ContainsNormalClosure, Examples) {
  pre_action quo = bsx::quotient_action(bs_params(2, 3), 5, 3);
  EXPECT_EQ(bsx::contains_normal_closure(quo, 5), closure_answer::yes);
  EXPECT_EQ(bsx::contains_normal_closure(quo, 3), closure_answer::no);
  EXPECT_EQ(bsx::contains_normal_closure(quo, 10), closure_answer::yes);
  // without the period only the window is known
  quo.period.reset();
  EXPECT_EQ(bsx::contains_normal_closure(quo, 5), closure_answer::so_far);
  EXPECT_EQ(bsx::contains_normal_closure(quo, 3), closure_answer::no);
}

TEST(ContainsNormalClosure, MatchesLetterwiseCheckAndOrderR) {
  int actions = 0;
  for (auto [m, n] : {std::pair{1, 2}, {2, 3}, {2, 4}, {2, 2}, {3, 3}, {2, -2}, {-3, 6}}) {
    bs_params bs(m, n);
    for (std::size_t size = 1; size <= 5; ++size)
      for (const pre_action& pa : checks::all_complete_actions(bs, size)) {
        ++actions;
        for (std::int64_t k = 1; k <= 60; ++k) {
          closure_answer direct = bsx::contains_normal_closure(pa, k);
          EXPECT_EQ(direct == closure_answer::yes, b_power_trivial(pa, k));
          EXPECT_NE(direct, closure_answer::so_far);
          EXPECT_EQ(direct, bsx::contains_normal_closure(pa, bsx::order_r(bs, k)))
              << "m=" << m << " n=" << n << " k=" << k;
        }
      }
  }
  EXPECT_GT(actions, 100);
}

TEST(QuotientAction, OracleChecks) {
  for (auto [m, n] : {std::pair{2, 3}, {3, 2}, {-2, 3}, {5, 7}})
    for (std::uint64_t q : {1u, 5u, 11u, 13u, 49u}) {
      bs_params bs(m, n);
      if (std::gcd(q, bs.abs_m() * bs.abs_n()) != 1) continue;
      const std::size_t window = 3;
      pre_action pa = bsx::quotient_action(bs, q, window);
      ASSERT_TRUE(bsx::validate_preaction(pa).ok);
      EXPECT_EQ(pa.size(), q * (2 * window + 1));
      bsx::action_maps maps(pa);
      const bsx::word relator = parse_word("t b^" + std::to_string(m) + " T b^" + std::to_string(-n));
      for (point x = 0; x < pa.size(); ++x) {
        auto cyc = maps.cycle(x);
        ASSERT_TRUE(cyc);
        EXPECT_EQ(cyc->size(), q);
        auto y = bsx::evaluate(pa, x, relator);
        if (y) EXPECT_EQ(*y, x);
        if (pa.tau[x]) EXPECT_EQ(*pa.tau[x] / q, x / q + 1);
      }
    }
}

TEST(QuotientAction, SmallCases) {
  pre_action one = bsx::quotient_action(bs_params(2, 3), 1, 4);
  EXPECT_EQ(one.size(), 9u);
  for (point x = 0; x < one.size(); ++x) EXPECT_EQ(*one.beta[x], x);
  EXPECT_EQ(*one.basepoint, 4u);

  try {
    bsx::quotient_action(bs_params(2, 4), 2, 1);
    FAIL() << "expected NotCoprime";
  } catch (const bsx::error& e) {
    EXPECT_EQ(e.code(), bsx::errc::not_coprime);
  }
}

TEST(QuotientAction, BallsSeparateDifferentQ) {
  pre_action five = bsx::quotient_action(bs_params(2, 3), 5, 6);
  pre_action seven = bsx::quotient_action(bs_params(2, 3), 7, 6);
  EXPECT_FALSE(bsx::pointed_eq_radius(five, seven, 5));
  EXPECT_TRUE(bsx::pointed_eq_radius(five, seven, 1));
}

TEST(Mcq, QuotientActionsAndInjectedOrbit) {
  bs_params bs(2, 3);
  for (std::uint64_t q = 1; q <= 50; ++q) {
    if (std::gcd(q, std::uint64_t(6)) != 1) continue;
    EXPECT_EQ(bsx::special_divisor_s(bs, q), bsx::bigint(q));
    const std::size_t window = 2;
    pre_action pa = bsx::quotient_action(bs, q, window);
    EXPECT_EQ(bsx::mcq_member(pa), answer::yes) << q;

    // one more b-orbit of size 2q hanging off the top level
    bsx::mn_graph g = bsx::bass_serre(pa);
    std::string top = top_orbit(q, window);
    ASSERT_TRUE(g.has_vertex(top));
    g.add_vertex("big", 2 * q);
    g.add_edge("inject", top, "big");
    ASSERT_TRUE(bsx::validate(g).ok);
    const bsx::mn_graph h = bsx::bass_serre(pa);
    bsx::graph_embedding same;
    for (const auto& [v, l] : h.vertices()) same.vertices[v] = v;
    for (const auto& [e, ed] : h.edges()) same.edges[e] = e;
    pre_action bigger = bsx::realize_extending(pa, g, same).action;
    EXPECT_FALSE(bigger.period);
    EXPECT_EQ(bsx::mcq_member(bigger), answer::no) << q;
    auto witness = bsx::detect_unbounded(g);
    ASSERT_TRUE(witness);
    EXPECT_EQ(witness->vertex, "big");
    EXPECT_EQ(witness->prime, 2u);
  }
}

TEST(Mcq, Examples) {
  bsx::mn_graph ten(bs_params(2, 3));
  ten.add_vertex("v", 10);
  pre_action pa = bsx::realize(ten);
  pa.basepoint = 0;
  EXPECT_EQ(bsx::subgroup_phenotype(pa), bsx::ext_card(5));
  EXPECT_EQ(bsx::mcq_member(pa), answer::no);

  bsx::mn_graph inf(bs_params(2, 3));
  inf.add_vertex("v", bsx::ext_card::infinity());
  EXPECT_EQ(bsx::mcq_member(inf, "v"), answer::no);

  bsx::mn_graph five(bs_params(2, 3));
  five.add_vertex("v", 5);
  EXPECT_EQ(bsx::mcq_member(five, "v"), answer::unknown);
  five.add_edge("e", "v", "v");
  EXPECT_EQ(bsx::mcq_member(five, "v"), answer::yes);
  pre_action five_action = bsx::realize(five);
  five_action.basepoint = 0;
  EXPECT_EQ(bsx::mcq_member(five_action), answer::yes);

  EXPECT_EQ(bsx::mcq_member(fixtures::figure3_graph(), "a"), answer::no);
}

TEST(Mcq, OnlyBasepointComponentCounts) {
  bs_params bs(2, 3);
  bsx::mn_graph g(bs);
  g.add_vertex("v", 5);
  g.add_edge("e", "v", "v");
  g.add_vertex("w", 10);
  pre_action pa = bsx::realize(g);
  pa.basepoint = 0;
  ASSERT_EQ(bsx::action_maps(pa).cycle(0)->size(), 5u);
  EXPECT_EQ(bsx::mcq_member(pa), answer::yes);
  EXPECT_EQ(bsx::contains_normal_closure(pa, 5), closure_answer::no);
}

TEST(ClassifyKernel, Examples) {
  bsx::mn_graph loop(bs_params(2, 3));
  loop.add_vertex("v", 1);
  loop.add_edge("e", "v", "v");
  auto v1 = bsx::classify_kernel(loop);
  EXPECT_EQ(v1.status, kernel_status::not_in_kernel);
  EXPECT_EQ(v1.reason, bsx::kernel_reason::finite_complete_action);
  EXPECT_EQ(bsx::classify_kernel(bsx::realize(loop)).status, kernel_status::not_in_kernel);

  bsx::mn_graph ten(bs_params(2, 3));
  ten.add_vertex("v", 10);
  auto v2 = bsx::classify_kernel(ten);
  EXPECT_EQ(v2.status, kernel_status::in_kernel);
  ASSERT_TRUE(v2.witness);
  EXPECT_EQ(v2.witness->prime, 2u);
  auto v2a = bsx::classify_kernel(bsx::realize(ten));
  EXPECT_EQ(v2a.status, kernel_status::in_kernel);
  EXPECT_EQ(v2a.witness->vertex, "o0");

  bsx::mn_graph ones(bs_params(2, 3));
  ones.add_vertex("u", 1);
  ones.add_vertex("v", 1);
  ones.add_edge("e", "u", "v");
  EXPECT_EQ(bsx::classify_kernel(ones).status, kernel_status::unknown);
  EXPECT_EQ(bsx::classify_kernel(bsx::realize(ones)).status, kernel_status::unknown);

  bsx::mn_graph inf(bs_params(2, -2));
  inf.add_vertex("v", bsx::ext_card::infinity());
  inf.add_edge("e1", "v", "v");
  inf.add_edge("e2", "v", "v");
  ASSERT_TRUE(bsx::is_saturated(inf));
  auto v3 = bsx::classify_kernel(inf);
  EXPECT_EQ(v3.status, kernel_status::not_in_kernel);
  EXPECT_EQ(v3.reason, bsx::kernel_reason::finite_saturated_infinite_labels);

  EXPECT_THROW(bsx::classify_kernel(bsx::mn_graph(bs_params(2, 3))), bsx::error);
}

TEST(ClassifyKernel, ExtendingNeverContradicts) {
  std::mt19937_64 rng(41);
  int certified = 0, checked = 0;
  const std::vector<std::pair<bs_params, std::int64_t>> cases = {
      {bs_params(2, 3), 1}, {bs_params(2, 3), 5}, {bs_params(2, 4), 1},
      {bs_params(2, 2), 3}, {bs_params(3, 3), 1}, {bs_params(4, 6), 1}};
  for (int round = 0; round < 60; ++round) {
    auto [bs, q] = cases[round % cases.size()];
    bsx::mn_graph g = fixtures::random_graph(rng, bs, q, 5);
    auto before_graph = bsx::classify_kernel(g);
    pre_action pa = bsx::realize(g);
    auto before_action = bsx::classify_kernel(pa);

    bsx::mn_graph grown = bsx::forest_saturate(g, 2).graph;
    bool small_enough = true;
    for (const auto& [v, l] : grown.vertices()) small_enough = small_enough && l.value() < 20000;
    auto after_graph = bsx::classify_kernel(grown);
    if (before_graph.status != kernel_status::unknown) {
      ++certified;
      EXPECT_EQ(after_graph.status, before_graph.status);
    }
    if (!small_enough) continue;
    auto embed = bsx::find_isomorphism(bsx::bass_serre(pa), g);
    ASSERT_TRUE(embed);
    pre_action grown_action = bsx::realize_extending(pa, grown, *embed).action;
    auto after_action = bsx::classify_kernel(grown_action);
    if (before_action.status != kernel_status::unknown) {
      ++certified;
      EXPECT_EQ(after_action.status, before_action.status);
    }
    ++checked;
  }
  EXPECT_GE(checked, 50);
  EXPECT_GT(certified, 10);
}

TEST(Conjugate, MovesBasepoint) {
  pre_action fig = fixtures::figure3_preaction();
  EXPECT_EQ(bsx::conjugate(fig, bsx::word{}), fig);
  EXPECT_EQ(*bsx::conjugate(fig, parse_word("b")).basepoint, *fig.beta[0]);
  EXPECT_EQ(bsx::subgroup_phenotype(bsx::conjugate(fig, parse_word("b t"))),
            bsx::subgroup_phenotype(fig));
  try {
    bsx::conjugate(fig, parse_word("T T T"));
    FAIL() << "expected Undefined";
  } catch (const bsx::error& e) {
    EXPECT_EQ(e.code(), bsx::errc::undefined);
  }
}

TEST(Conjugate, PhenotypeInvariantOnCompleteActions) {
  std::mt19937_64 rng(5);
  int samples = 0;
  for (auto [m, n] : {std::pair{2, 3}, {2, 4}, {3, 3}, {-2, 4}}) {
    auto actions = checks::all_complete_actions(bs_params(m, n), 5);
    for (int i = 0; i < 200 && !actions.empty(); ++i) {
      const pre_action& pa = actions[rng() % actions.size()];
      pre_action moved = bsx::conjugate(pa, random_word(rng, 1 + int(rng() % 8)));
      EXPECT_EQ(bsx::subgroup_phenotype(moved), bsx::subgroup_phenotype(pa));
      ++samples;
    }
  }
  EXPECT_GT(samples, 400);
}

TEST(Triangle, StabilizesBasepoint) {
  for (auto [m, n] : {std::pair{2, 3}, {3, 4}, {-2, 3}})
    for (std::uint64_t p : {5u, 7u, 11u}) {
      bs_params bs(m, n);
      pre_action pa = bsx::triangle_preaction(bs, p);
      ASSERT_TRUE(bsx::validate_preaction(pa).ok);
      bsx::mn_graph g = bsx::bass_serre(pa);
      ASSERT_TRUE(bsx::validate(g).ok);
      ASSERT_TRUE(bsx::is_connected(g));
      std::vector<bsx::ext_card> labels;
      for (const auto& [v, l] : g.vertices()) labels.push_back(l);
      std::sort(labels.begin(), labels.end());
      std::vector<bsx::ext_card> want = {bsx::ext_card(p), bsx::ext_card(p * bs.abs_m()),
                                         bsx::ext_card(p * bs.abs_n())};
      std::sort(want.begin(), want.end());
      EXPECT_EQ(labels, want);
      EXPECT_EQ(g.edges().size(), 3u);
      EXPECT_EQ(bsx::subgroup_phenotype(pa), bsx::ext_card(p));
      for (const auto& [v, l] : g.vertices()) EXPECT_EQ(bsx::phenotype(bs, l), bsx::ext_card(p));

      const bsx::word w = parse_word("t^2 b t^-1 b");
      EXPECT_EQ(bsx::stabilizer_contains(pa, w), answer::yes);
      EXPECT_EQ(bsx::stabilizer_contains(pa, parse_word("t")), answer::no);

      // still true in every extension
      auto embed = bsx::find_isomorphism(g, g);
      ASSERT_TRUE(embed);
      pre_action grown = bsx::realize_extending(pa, bsx::forest_saturate(g, 1).graph, *embed).action;
      grown.basepoint = pa.basepoint;
      EXPECT_EQ(bsx::stabilizer_contains(grown, w), answer::yes);
    }
  EXPECT_THROW(bsx::triangle_preaction(bs_params(2, 3), 3), bsx::error);
}

// A complete action whose basepoint is fixed by t, b t B, ..., b^(k-1) t b^-(k-1)
// with k = gcd(m,n) has a single vertex with loops in its basepoint component.
TEST(KLoops, SingleVertexWithLoops) {
  int matching = 0;
  for (auto [m, n] : {std::pair{2, 4}, {2, 2}, {3, 3}, {2, -2}, {4, 6}, {1, 2}}) {
    bs_params bs(m, n);
    const std::int64_t k = std::gcd(std::int64_t(bs.abs_m()), std::int64_t(bs.abs_n()));
    std::vector<bsx::word> fixers;
    for (std::int64_t i = 0; i < k; ++i)
      fixers.push_back(parse_word("b^" + std::to_string(i) + " t b^" + std::to_string(-i)));
    for (std::size_t size = 1; size <= 5; ++size)
      for (const pre_action& pa : checks::all_complete_actions(bs, size)) {
        bool fixed = std::all_of(fixers.begin(), fixers.end(), [&](const bsx::word& w) {
          return bsx::stabilizer_contains(pa, w) == answer::yes;
        });
        if (!fixed) continue;
        ++matching;
        pre_action comp = bsx::base_component(pa);
        ASSERT_EQ(comp.kind, bsx::action_kind::complete);
        bsx::mn_graph g = bsx::bass_serre(comp);
        ASSERT_EQ(g.vertices().size(), 1u);
        const auto& [v, label] = *g.vertices().begin();
        for (const auto& [e, ed] : g.edges()) EXPECT_TRUE(ed.src == v && ed.dst == v);
        EXPECT_EQ(bsx::bigint(g.edges().size()), g.max_out(v));
      }
  }
  EXPECT_GT(matching, 20);
}
