#include <gtest/gtest.h>

#include "support.hpp"

using namespace rgraph;
using rgraph::testing::load_fixture;

namespace {

NodeSet named(const MixedGraph& g, std::initializer_list<const char*> l) {
  NodeSet s;
  for (const char* x : l) s.insert(g.id_of(x));
  return s;
}

SummaryGraph transform(const MixedGraph& g, std::initializer_list<const char*> m,
                       std::initializer_list<const char*> c = {}) {
  return summary_graph(g, {named(g, m), named(g, c)});
}

}  // namespace

TEST(SummaryGraph, ReducedDevelopmentGraphHasNoInducedEdges) {
  const auto g = load_fixture("development.rg");
  const auto sg = transform(g, {"Y8", "Y4"});
  const auto reduced = load_fixture("development_reduced.rg");
  EXPECT_EQ(sg.labels(), reduced.labels());
  EXPECT_EQ(sg.edges(), reduced.edges());
  EXPECT_EQ(sg.marginalized(), (std::vector<std::string>{"Y8", "Y4"}));
}

TEST(SummaryGraph, TriangleTransforms) {
  const auto g = load_fixture("triangle.rg");
  // marginalizing 2 leaves 3 -> 1
  const auto m = transform(g, {"2"});
  ASSERT_EQ(m.edges().size(), 1u);
  EXPECT_TRUE(m.has_arrow(m.id_of("3"), m.id_of("1")));
  // conditioning on 3 leaves 2 -> 1
  const auto c = transform(g, {}, {"3"});
  ASSERT_EQ(c.edges().size(), 1u);
  EXPECT_TRUE(c.has_arrow(c.id_of("2"), c.id_of("1")));
  // marginalizing the common source 3 of 2 -> 1 gives a double edge
  const auto d = transform(g, {"3"});
  const auto doubles = detect_direct_confounding(d);
  ASSERT_EQ(doubles.size(), 1u);
  EXPECT_EQ(d.label(doubles[0].from), "2");
  EXPECT_EQ(d.label(doubles[0].to), "1");
}

TEST(SummaryGraph, TreatmentMarginalizingUnobserved) {
  const auto g = load_fixture("treatment.rg");
  const auto sg = transform(g, {"U"});
  EXPECT_TRUE(sg.has_dashed(sg.id_of("Y"), sg.id_of("A")));
  EXPECT_TRUE(sg.has_arrow(sg.id_of("Tp"), sg.id_of("Y")));
  EXPECT_TRUE(detect_direct_confounding(sg).empty());
}

TEST(SummaryGraph, ConditioningOnColliderDescendant) {
  // 1 -> 3 <- 2, 3 -> 4; conditioning on 4 joins 1 and 2
  auto l = rgraph::testing::numbered_labels(4);
  const auto g = build_graph(l, {{NodeSet::single(3), NodeSet::single(2)}, NodeSet::single(0) | NodeSet::single(1)},
                             {Edge::arrow(0, 2), Edge::arrow(1, 2), Edge::arrow(2, 3)});
  const auto sg = summary_graph(g, {{}, NodeSet::single(3)});
  EXPECT_TRUE(sg.adjacent(sg.id_of("1"), sg.id_of("2")));
}

TEST(SummaryGraph, InvalidSpecs) {
  const auto g = load_fixture("triangle.rg");
  EXPECT_THROW(summary_graph(g, {NodeSet::single(0), NodeSet::single(0)}), Error);
  EXPECT_THROW(summary_graph(g, {NodeSet::single(7), {}}), Error);
  const auto sg = transform(g, {}, {"3"});
  try {
    detect_direct_confounding(sg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConditioningPresent);
  }
}

TEST(SummaryGraph, EliminationOrderIndependent) {
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<std::uint64_t> sub(0, 127);
  for (int rep = 0; rep < 300; ++rep) {
    const auto g = rgraph::testing::random_regression_graph(rng, 7, 3, 0.4);
    const NodeSet m(sub(rng));
    MixedGraph rev = g;
    const auto order = m.to_vector();
    for (auto it = order.rbegin(); it != order.rend(); ++it) eliminate_node(rev, *it);
    const auto sg = summary_graph(g, {m, {}});
    EXPECT_EQ(sg.edges(), rev.induced_subgraph(g.all() - m).edges());
  }
}

// Every graph on at most 4 nodes, every transform, every query on the
// remaining nodes.
TEST(SummaryGraph, PreservesIndependencesExhaustively) {
  for (std::size_t n = 2; n <= 4; ++n) {
    for (const auto& g : rgraph::testing::all_regression_graphs(n, true)) {
      for (const auto& t : rgraph::testing::all_transform_specs(g.all())) {
        ASSERT_EQ(rgraph::testing::margin_mismatches(g, t, false), 0u) << serialize(build_graph(g));
      }
    }
  }
}

TEST(SummaryGraph, SeparationAgreesWithPathEnumeration) {
  for (const auto& g : rgraph::testing::all_regression_graphs(4, true)) {
    for (const auto& t : rgraph::testing::all_transform_specs(g.all())) {
      const auto sg = summary_graph(g, t);
      for (const auto& q : rgraph::testing::all_queries(sg.all())) {
        ASSERT_EQ(rg_separate(sg, q).implied_independent, rgraph::testing::path_separated(sg, q.alpha, q.beta, q.c));
      }
    }
  }
}

TEST(SummaryGraph, RepeatedMarginalizationComposes) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<std::uint64_t> sub(0, 63);
  for (int rep = 0; rep < 300; ++rep) {
    const auto g = rgraph::testing::random_regression_graph(rng, 6, 3, 0.5);
    const NodeSet a(sub(rng)), b = NodeSet(sub(rng)) - a;
    const auto once = summary_graph(g, {a | b, {}});
    const auto first = summary_graph(g, {a, {}});
    NodeSet b_in_first;
    for (NodeId i : b) b_in_first.insert(first.id_of(g.label(i)));
    const auto twice = summary_graph(first, {b_in_first, {}});
    EXPECT_EQ(once.labels(), twice.labels());
    EXPECT_EQ(once.edges(), twice.edges());
  }
}

TEST(Confounding, IndirectPathInTreatmentGraph) {
  const auto g = load_fixture("treatment.rg");
  const auto sg = transform(g, {"U"});
  const auto paths = detect_indirect_confounding(sg, sg.id_of("Y"), sg.id_of("Tp"));
  ASSERT_EQ(paths.size(), 1u);
  EXPECT_EQ(path_to_string(sg, paths[0]), "Y-A<-Tp");
  EXPECT_TRUE(detect_indirect_confounding(sg, sg.id_of("Y"), sg.id_of("Tr")).empty());
  try {
    detect_indirect_confounding(sg, sg.id_of("Tp"), sg.id_of("Y"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EdgeAbsent);
  }
}

TEST(Confounding, NoneInGeneratingGraph) {
  const auto g = load_fixture("treatment.rg");
  const auto r = distortion_report(g, {}, g.id_of("Y"), g.id_of("Tp"));
  EXPECT_TRUE(r.direct_confounding.empty());
  EXPECT_TRUE(r.indirect_confounding.empty());
  EXPECT_TRUE(r.under_conditioning.empty());
  EXPECT_TRUE(r.over_conditioning.empty());
}

TEST(Confounding, UnderAndOverConditioning) {
  // 3 -> 2 -> 1 with 2 marginalized: under-conditioning on the intermediate
  const auto g = load_fixture("triangle.rg");
  MixedGraph chain = g;
  chain.remove_pair(0, 2);
  const auto under = detect_conditioning_distortions(chain, {NodeSet::single(1), {}}, 0, 2);
  EXPECT_EQ(under.under_conditioning, (std::vector<NodeId>{1}));
  // 2 -> c <- 3 with c conditioned on: over-conditioning
  auto l = rgraph::testing::numbered_labels(3);
  const auto collider = build_graph(l, {{NodeSet::single(0), NodeSet::single(1)}, NodeSet::single(2)},
                                    {Edge::arrow(1, 0), Edge::arrow(2, 0), Edge::arrow(2, 1)});
  const auto over = detect_conditioning_distortions(collider, {{}, NodeSet::single(0)}, 1, 2);
  ASSERT_EQ(over.over_conditioning.size(), 1u);
  EXPECT_EQ(path_to_string(collider, over.over_conditioning[0]), "3->1<-2");
}

TEST(Confounding, LongerOverConditioningPath) {
  // 2 -> c1 <- m -> c2 <- 3 with c1, c2 conditioned and m marginalized
  std::vector<std::string> l{"2", "3", "c1", "c2", "m"};
  const auto g = build_graph(l, {{NodeSet::single(2) | NodeSet::single(3), NodeSet::single(0)}, NodeSet::single(1) | NodeSet::single(4)},
                             {Edge::arrow(0, 2), Edge::arrow(4, 2), Edge::arrow(4, 3), Edge::arrow(1, 3), Edge::arrow(1, 0)});
  const auto r = detect_conditioning_distortions(g, {NodeSet::single(4), NodeSet::single(2) | NodeSet::single(3)}, 0, 1);
  ASSERT_EQ(r.over_conditioning.size(), 1u);
  EXPECT_EQ(path_to_string(g, r.over_conditioning[0]), "3->c2<-m->c1<-2");
}

TEST(Randomization, RemovesDirectConfoundingOfTreatment) {
  std::mt19937_64 rng(37);
  std::uniform_int_distribution<std::uint64_t> sub(0, 127);
  for (int rep = 0; rep < 500; ++rep) {
    const auto g = rgraph::testing::random_regression_graph(rng, 7, 4, 0.5, 0.2);
    const NodeId treatment = static_cast<NodeId>(rep % 7);
    const auto r = randomize(g, treatment);
    EXPECT_TRUE(r.parents(treatment).empty());
    EXPECT_TRUE(r.dashed(treatment).empty());
    const NodeSet m = NodeSet(sub(rng)) - NodeSet::single(treatment);
    const auto sg = summary_graph(r, {m, {}});
    const auto t = sg.id_of(g.label(treatment));
    for (const Edge& e : detect_direct_confounding(sg)) {
      EXPECT_NE(e.from, t);
      EXPECT_NE(e.to, t);
    }
  }
}
