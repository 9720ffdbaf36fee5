#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "rgraph/edge_matrix.hpp"
#include "rgraph/error.hpp"
#include "rgraph/graph.hpp"
#include "rgraph/separation.hpp"

namespace rgraph {

struct TransformSpec {
  NodeSet marginalize;
  NodeSet condition;

  void validate(std::size_t n) const {
    if (marginalize.intersects(condition)) {
      throw Error(ErrorCode::InvalidTransform, "a node cannot be both marginalized and conditioned on");
    }
    if (!(marginalize | condition).subset_of(NodeSet::range(n))) {
      throw Error(ErrorCode::InvalidTransform, "transform names a node outside the graph");
    }
  }
};

/// How a path moves from one node to the next.
enum class Link { Dashed, Full, Forward, Backward };  // Forward: a -> b, Backward: a <- b

struct GraphPath {
  std::vector<NodeId> nodes;
  std::vector<Link> links;  // links[i] joins nodes[i] and nodes[i + 1]

  friend bool operator==(const GraphPath&, const GraphPath&) = default;
};

inline std::string path_to_string(const MixedGraph& g, const GraphPath& p) {
  std::string s;
  for (std::size_t i = 0; i < p.nodes.size(); ++i) {
    if (i) {
      switch (p.links[i - 1]) {
        case Link::Dashed: s += "-"; break;
        case Link::Full: s += "="; break;
        case Link::Forward: s += "->"; break;
        case Link::Backward: s += "<-"; break;
      }
    }
    s += g.label(p.nodes[i]);
  }
  return s;
}

/// Marginalizes a single node in place: every pair of edges meeting at `u`
/// without two arrowheads induces an edge between the outer nodes that keeps
/// their end marks (x <- u <- y gives x <- y, x <- u -> y gives x - - y,
/// x - - u -> y gives x - - y, x = u -> y gives x -> y, x = u = y gives x = y).
/// Collision Vs at `u` induce nothing.
inline void eliminate_node(MixedGraph& g, NodeId u) {
  std::vector<detail::Step> steps;
  detail::steps_from(g, u, steps);
  using detail::Mark;
  for (std::size_t s = 0; s < steps.size(); ++s) {
    for (std::size_t t = s + 1; t < steps.size(); ++t) {
      const auto& x = steps[s];
      const auto& y = steps[t];
      if (x.to == y.to) continue;
      if (x.at_from == Mark::Head && y.at_from == Mark::Head) continue;
      detail::add_marked(g, x.to, x.at_to, y.to, y.at_to);
    }
  }
  g.isolate(u);
}

namespace detail {

/// Nodes reaching `s` along arrows and full lines.
inline NodeSet anterior(const MixedGraph& g, NodeSet s) {
  NodeSet seen = s, frontier = s;
  while (!frontier.empty()) {
    NodeSet next;
    for (NodeId v : frontier) next |= g.parents(v) | g.full(v);
    frontier = next - seen;
    seen |= next;
  }
  return seen;
}

inline Link link_of(const Step& s) {
  if (s.at_from == Mark::Head && s.at_to == Mark::Head) return Link::Dashed;
  if (s.at_from == Mark::Tail && s.at_to == Mark::Tail) return Link::Full;
  return s.at_to == Mark::Head ? Link::Forward : Link::Backward;
}

inline std::vector<std::string> labels_of(const MixedGraph& g, NodeSet s) {
  std::vector<std::string> out;
  for (NodeId i : s) out.push_back(g.label(i));
  return out;
}

}  // namespace detail

/// Graph over the nodes outside M and C that implies, for every query on
/// them, exactly what `g` implies with C added to the conditioning set.
///
/// Without conditioning the nodes of M are eliminated one by one in
/// increasing id order; an arrow and a dashed line landing on one pair form a
/// double edge. With conditioning the result is built pairwise: two remaining
/// nodes are joined iff no set of remaining nodes separates them given C, and
/// an end is a tail iff that node is anterior to the other end or to C.
inline SummaryGraph summary_graph(const MixedGraph& g, const TransformSpec& t) {
  t.validate(g.size());
  const NodeSet keep = g.all() - t.marginalize - t.condition;
  auto marg = detail::labels_of(g, t.marginalize);
  auto cond = detail::labels_of(g, t.condition);
  if (t.condition.empty()) {
    MixedGraph h = g;
    for (NodeId u : t.marginalize) eliminate_node(h, u);
    return SummaryGraph(h.induced_subgraph(keep), std::move(marg), std::move(cond));
  }
  if (g.has_kind(EdgeKind::Double)) {
    throw Error(ErrorCode::InvalidTransform, "conditioning is supported on regression graphs only");
  }
  MixedGraph h = g;
  for (NodeId i = 0; i < g.size(); ++i) h.isolate(i);
  for (NodeId i : keep) {
    for (NodeId k : keep) {
      if (k <= i) continue;
      const NodeSet pair = NodeSet::single(i) | NodeSet::single(k);
      const NodeSet z = (detail::anterior(g, pair | t.condition) & keep) - pair;
      if (rg_separate(g, {NodeSet::single(i), NodeSet::single(k), z | t.condition}).implied_independent) continue;
      const bool tail_i = detail::anterior(g, NodeSet::single(k) | t.condition).contains(i);
      const bool tail_k = detail::anterior(g, NodeSet::single(i) | t.condition).contains(k);
      using detail::Mark;
      detail::add_marked(h, i, tail_i ? Mark::Tail : Mark::Head, k, tail_k ? Mark::Tail : Mark::Head);
    }
  }
  return SummaryGraph(h.induced_subgraph(keep), std::move(marg), std::move(cond));
}

/// Double edges regressor -> response (plus dashed), the unmeasured-confounder
/// signature. Only meaningful after marginalizing alone.
inline std::vector<Edge> detect_direct_confounding(const SummaryGraph& sg) {
  if (!sg.conditioned().empty()) {
    throw Error(ErrorCode::ConditioningPresent, "direct confounding is read off graphs obtained by marginalizing only");
  }
  std::vector<Edge> out;
  for (const Edge& e : sg.edges()) {
    if (e.kind == EdgeKind::Double) out.push_back(e);
  }
  return out;
}

/// Paths Y - o - ... - o - T and Y - o - ... - o <- T whose inner nodes all
/// lie in blocks strictly between those of Y and T. Requires Y <- T.
inline std::vector<GraphPath> detect_indirect_confounding(const MixedGraph& sg, NodeId response, NodeId regressor) {
  if (response >= sg.size() || regressor >= sg.size() || !sg.has_arrow(regressor, response)) {
    throw Error(ErrorCode::EdgeAbsent, "no arrow from the regressor to the response");
  }
  NodeSet intermediate;
  for (NodeId v = 0; v < sg.size(); ++v) {
    if (sg.block(v) > sg.block(response) && sg.block(v) < sg.block(regressor)) intermediate.insert(v);
  }
  std::vector<GraphPath> out;
  GraphPath cur{{response}, {}};
  NodeSet on_path = NodeSet::single(response);
  std::function<void(NodeId)> walk = [&](NodeId v) {
    if (v != response) {
      if (sg.has_dashed(v, regressor)) {
        GraphPath p = cur;
        p.nodes.push_back(regressor);
        p.links.push_back(Link::Dashed);
        out.push_back(std::move(p));
      }
      if (sg.has_arrow(regressor, v)) {
        GraphPath p = cur;
        p.nodes.push_back(regressor);
        p.links.push_back(Link::Backward);
        out.push_back(std::move(p));
      }
    }
    for (NodeId w : (sg.dashed(v) & intermediate) - on_path) {
      cur.nodes.push_back(w);
      cur.links.push_back(Link::Dashed);
      on_path.insert(w);
      walk(w);
      on_path.erase(w);
      cur.nodes.pop_back();
      cur.links.pop_back();
    }
  };
  walk(response);
  return out;
}

struct DistortionReport {
  std::vector<Edge> direct_confounding;
  std::vector<GraphPath> indirect_confounding;  // paths in the summary graph
  std::vector<NodeId> under_conditioning;       // ignored intermediates (ids of g)
  std::vector<GraphPath> over_conditioning;     // activated collision paths in g
};

/// Under-conditioning: marginalized nodes on a directed path regressor -> ... -> response.
/// Over-conditioning: paths regressor ... response whose inner colliders are all
/// conditioned on and whose inner non-colliders are all marginalized, with at
/// least one collider (2 -> [c] <- 3, or 2 -> [c] <- (m) -> [c] <- 3).
inline DistortionReport detect_conditioning_distortions(const MixedGraph& g, const TransformSpec& t,
                                                        NodeId response, NodeId regressor) {
  t.validate(g.size());
  if (response >= g.size() || regressor >= g.size() || response == regressor) {
    throw Error(ErrorCode::InvalidQuery, "response and regressor must be two distinct nodes");
  }
  DistortionReport r;
  const NodeSet between = g.descendants(NodeSet::single(regressor)) & g.ancestors(NodeSet::single(response));
  for (NodeId u : t.marginalize & between) {
    if (u != response && u != regressor) r.under_conditioning.push_back(u);
  }

  const NodeSet inner_ok = t.marginalize | t.condition;
  GraphPath cur{{regressor}, {}};
  NodeSet on_path = NodeSet::single(regressor);
  using detail::Mark;
  std::function<void(NodeId, Mark, bool)> walk = [&](NodeId v, Mark arrived, bool any_collider) {
    std::vector<detail::Step> steps;
    detail::steps_from(g, v, steps);
    for (const auto& s : steps) {
      bool collider = false;
      if (v != regressor) {
        collider = arrived == Mark::Head && s.at_from == Mark::Head;
        if (collider ? !t.condition.contains(v) : !t.marginalize.contains(v)) continue;
      }
      if (s.to == response) {
        if (v == regressor || !(any_collider || collider)) continue;
        GraphPath p = cur;
        p.nodes.push_back(response);
        p.links.push_back(detail::link_of(s));
        if (std::find(r.over_conditioning.begin(), r.over_conditioning.end(), p) == r.over_conditioning.end()) {
          r.over_conditioning.push_back(std::move(p));
        }
        continue;
      }
      if (on_path.contains(s.to) || !inner_ok.contains(s.to)) continue;
      cur.nodes.push_back(s.to);
      cur.links.push_back(detail::link_of(s));
      on_path.insert(s.to);
      walk(s.to, s.at_to, any_collider || collider);
      on_path.erase(s.to);
      cur.nodes.pop_back();
      cur.links.pop_back();
    }
  };
  walk(regressor, Mark::Tail, false);
  return r;
}

/// All four distortion kinds for one response/regressor pair. Direct
/// confounding is only reported when nothing is conditioned on; indirect
/// confounding only when the summary graph keeps regressor -> response.
/// Path node ids of indirect confounding refer to the summary graph.
inline DistortionReport distortion_report(const MixedGraph& g, const TransformSpec& t, NodeId response,
                                          NodeId regressor) {
  DistortionReport r = detect_conditioning_distortions(g, t, response, regressor);
  const SummaryGraph sg = summary_graph(g, t);
  if (t.condition.empty()) r.direct_confounding = detect_direct_confounding(sg);
  auto y = sg.find(g.label(response));
  auto x = sg.find(g.label(regressor));
  if (y && x && sg.has_arrow(*x, *y)) r.indirect_confounding = detect_indirect_confounding(sg, *y, *x);
  return r;
}

/// Randomized allocation of `treatment`: every arrow into it and every dashed
/// line at it is removed.
inline RegressionGraph randomize(const RegressionGraph& g, NodeId treatment) {
  std::vector<Edge> kept;
  for (const Edge& e : g.edges()) {
    const bool into = e.kind == EdgeKind::Arrow && e.to == treatment;
    const bool dashed = e.kind == EdgeKind::Dashed && (e.from == treatment || e.to == treatment);
    if (!into && !dashed) kept.push_back(e);
  }
  std::vector<Scale> scales;
  for (NodeId i = 0; i < g.size(); ++i) scales.push_back(g.scale(i));
  return build_graph(g.labels(), g.order(), kept, scales);
}

}  // namespace rgraph
