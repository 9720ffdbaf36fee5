#include <gtest/gtest.h>

#include "support.hpp"

using namespace rgraph;
using rgraph::testing::load_fixture;

namespace {

bool independent(const MixedGraph& g, const std::string& q) { return rg_separate(g, parse_query(g, q)).implied_independent; }

}  // namespace

TEST(Separation, MixedBlocksFixture) {
  const auto g = load_fixture("mixed_blocks.rg");
  EXPECT_TRUE(independent(g, "B | V"));
  EXPECT_TRUE(independent(g, "Zb | V | A,B,U"));
  EXPECT_FALSE(independent(g, "A | B"));
  EXPECT_FALSE(independent(g, "U | V | A"));
}

TEST(Separation, DistressFixture) {
  const auto g = load_fixture("distress.rg");
  EXPECT_TRUE(independent(g, "Ab | Sc | S"));
  EXPECT_FALSE(independent(g, "Ab | Sc"));
  const auto c = load_fixture("distress_concentration.rg");
  EXPECT_TRUE(separate_concentration(c, parse_query(c, "Ab | Sc | S")).implied_independent);
}

TEST(Separation, TwoBlockFixture) {
  const auto g = load_fixture("two_block.rg");
  EXPECT_TRUE(independent(g, "1 | 4"));
  EXPECT_FALSE(independent(g, "1 | 4 | 2"));
  EXPECT_TRUE(independent(g, "3 | 4"));
  EXPECT_FALSE(independent(g, "3 | 4 | 1,2"));
}

TEST(Separation, WitnessIsAConnectingPath) {
  const auto g = load_fixture("mixed_blocks.rg");
  const auto v = rg_separate(g, parse_query(g, "U | V | A"));
  ASSERT_FALSE(v.implied_independent);
  ASSERT_GE(v.witness.size(), 2u);
  EXPECT_EQ(v.witness.front(), g.id_of("U"));
  EXPECT_EQ(v.witness.back(), g.id_of("V"));
  EXPECT_FALSE(v.argument.empty());
}

TEST(Separation, ChainForkCollider) {
  auto l = rgraph::testing::numbered_labels(3);
  const NodeSet s1 = NodeSet::single(0), s2 = NodeSet::single(1), s3 = NodeSet::single(2);
  const auto chain = build_graph(l, {{s1, s2}, s3}, {Edge::arrow(2, 1), Edge::arrow(1, 0)});
  EXPECT_TRUE(rg_separate(chain, {s1, s3, s2}).implied_independent);
  EXPECT_FALSE(rg_separate(chain, {s1, s3, {}}).implied_independent);
  const auto collider = build_graph(l, {{s2}, s1 | s3}, {Edge::arrow(0, 1), Edge::arrow(2, 1)});
  EXPECT_TRUE(rg_separate(collider, {s1, s3, {}}).implied_independent);
  EXPECT_FALSE(rg_separate(collider, {s1, s3, s2}).implied_independent);
  const auto dashed = build_graph(l, {{s1 | s2 | s3}, {}}, {Edge::dashed(0, 1), Edge::dashed(1, 2)});
  EXPECT_TRUE(rg_separate(dashed, {s1, s3, {}}).implied_independent);
  EXPECT_FALSE(rg_separate(dashed, {s1, s3, s2}).implied_independent);
  const auto full = build_graph(l, {{}, s1 | s2 | s3}, {Edge::full(0, 1), Edge::full(1, 2)});
  EXPECT_TRUE(rg_separate(full, {s1, s3, s2}).implied_independent);
  EXPECT_FALSE(rg_separate(full, {s1, s3, {}}).implied_independent);
}

TEST(Separation, ColliderDescendantInConditioningSet) {
  // 1 -> 3 <- 2, 3 -> 4: conditioning on 4 connects 1 and 2
  auto l = rgraph::testing::numbered_labels(4);
  const auto g = build_graph(l, {{NodeSet::single(3), NodeSet::single(2)}, NodeSet::single(0) | NodeSet::single(1)},
                             {Edge::arrow(0, 2), Edge::arrow(1, 2), Edge::arrow(2, 3)});
  EXPECT_TRUE(rg_separate(g, {NodeSet::single(0), NodeSet::single(1), {}}).implied_independent);
  EXPECT_FALSE(rg_separate(g, {NodeSet::single(0), NodeSet::single(1), NodeSet::single(3)}).implied_independent);
}

TEST(Separation, InvalidQueries) {
  const auto g = load_fixture("triangle.rg");
  EXPECT_THROW(rg_separate(g, {{}, NodeSet::single(1), {}}), Error);
  EXPECT_THROW(rg_separate(g, {NodeSet::single(0), NodeSet::single(0), {}}), Error);
  EXPECT_THROW(rg_separate(g, {NodeSet::single(0), NodeSet::single(9), {}}), Error);
  try {
    separate_concentration(g, {NodeSet::single(0), NodeSet::single(1), {}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SubclassMismatch);
  }
  const auto mixed = load_fixture("mixed_blocks.rg");
  EXPECT_THROW(d_separate(mixed, parse_query(mixed, "A | B")), Error);
}

// Every query on every regression graph with at most 4 nodes, against
// exhaustive path enumeration.
TEST(Separation, AgreesWithPathEnumerationExhaustively) {
  std::size_t checked = 0;
  for (std::size_t n = 2; n <= 4; ++n) {
    for (const auto& g : rgraph::testing::all_regression_graphs(n, false)) {
      for (const auto& q : rgraph::testing::all_queries(g.all())) {
        ASSERT_EQ(rg_separate(g, q).implied_independent, rgraph::testing::path_separated(g, q.alpha, q.beta, q.c))
            << serialize(build_graph(g)) << query_to_string(g, q);
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 100000u);
}

TEST(Separation, AgreesWithPathEnumerationOnRandomLargerGraphs) {
  std::mt19937_64 rng(19);
  std::uniform_int_distribution<std::uint64_t> sub(0, 255);
  for (int rep = 0; rep < 300; ++rep) {
    const auto g = rgraph::testing::random_regression_graph(rng, 8, 4, 0.3);
    for (int k = 0; k < 20; ++k) {
      NodeSet a = NodeSet(sub(rng)), b = NodeSet(sub(rng)) - a, c = NodeSet(sub(rng)) - a - b;
      if (a.empty() || b.empty()) continue;
      EXPECT_EQ(rg_separate(g, {a, b, c}).implied_independent, rgraph::testing::path_separated(g, a, b, c));
    }
  }
}

TEST(Separation, DSeparationAgreesWithEdgeMatrixOnDags) {
  for (std::size_t n = 2; n <= 4; ++n) {
    for (const auto& g : rgraph::testing::all_dags(n)) {
      for (const auto& q : rgraph::testing::all_queries(g.all())) {
        ASSERT_EQ(d_separate(g, q).implied_independent, rg_separate(g, q).implied_independent);
      }
    }
  }
}

TEST(Separation, ConcentrationAgreesWithEdgeMatrix) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<Edge> edges;
    for (NodeId i = 0; i < 6; ++i) {
      for (NodeId k = i + 1; k < 6; ++k) {
        if (u(rng) < 0.35) edges.push_back(Edge::full(i, k));
      }
    }
    const auto g = build_graph(rgraph::testing::numbered_labels(6), {{}, NodeSet::range(6)}, edges);
    for (const auto& q : rgraph::testing::pairwise_queries(g.all())) {
      ASSERT_EQ(separate_concentration(g, q).implied_independent, rg_separate(g, q).implied_independent);
    }
  }
}
