#pragma once

#include <algorithm>
#include <functional>
#include <set>
#include <tuple>
#include <vector>

#include "rgraph/error.hpp"
#include "rgraph/graph.hpp"

namespace rgraph {

/// A collision V as (inner, outer pair), ignoring which collision pattern realizes it.
struct CollisionV {
  NodeId inner = 0;
  NodeId outer_a = 0;
  NodeId outer_b = 0;
  friend auto operator<=>(const CollisionV&, const CollisionV&) = default;
};

/// Node ids refer to the first graph's numbering.
struct EquivalenceReport {
  bool equivalent = false;
  std::vector<NodePair> skeleton_diff;
  std::vector<CollisionV> collision_diff;
  /// No pair is ordered one way by the first graph's blocks and the other way
  /// by the second's. Informational only.
  bool orders_compatible = true;
};

inline std::set<CollisionV> collision_vs(const MixedGraph& g) {
  std::set<CollisionV> out;
  for (const auto& v : enumerate_vs(g)) {
    if (v.kind == VKind::Collision) out.insert({v.inner, v.outer_a, v.outer_b});
  }
  return out;
}

/// `g` renumbered so that its ids follow `labels`.
inline MixedGraph relabel_to(const MixedGraph& g, const std::vector<std::string>& labels) {
  if (labels.size() != g.size()) throw Error(ErrorCode::NodeSetMismatch, "graphs have different node counts");
  std::vector<NodeId> perm(g.size());  // old id -> new id
  std::vector<bool> used(g.size(), false);
  for (NodeId j = 0; j < labels.size(); ++j) {
    auto id = g.find(labels[j]);
    if (!id || used[*id]) throw Error(ErrorCode::NodeSetMismatch, "node '" + labels[j] + "' missing in second graph");
    used[*id] = true;
    perm[*id] = j;
  }
  std::vector<int> blocks(g.size());
  for (NodeId i = 0; i < g.size(); ++i) blocks[perm[i]] = g.block(i);
  MixedGraph out(labels, blocks, g.num_response_blocks());
  for (NodeId i = 0; i < g.size(); ++i) out.set_scale(perm[i], g.scale(i));
  for (const Edge& e : g.edges()) out.add_edge({perm[e.from], perm[e.to], e.kind});
  return out;
}

namespace detail {

inline bool block_orders_compatible(const MixedGraph& g1, const MixedGraph& g2) {
  for (NodeId i = 0; i < g1.size(); ++i) {
    for (NodeId k = 0; k < g1.size(); ++k) {
      if (g1.block(i) < g1.block(k) && g2.block(i) > g2.block(k)) return false;
    }
  }
  return true;
}

}  // namespace detail

/// Same skeleton and same collision Vs. The graphs must share their labels.
inline EquivalenceReport markov_equivalent(const MixedGraph& g1, const MixedGraph& g2) {
  const MixedGraph h = relabel_to(g2, g1.labels());
  EquivalenceReport r;
  const auto s1 = skeleton(g1), s2 = skeleton(h);
  std::set_symmetric_difference(s1.begin(), s1.end(), s2.begin(), s2.end(), std::back_inserter(r.skeleton_diff));
  const auto c1 = collision_vs(g1), c2 = collision_vs(h);
  std::set_symmetric_difference(c1.begin(), c1.end(), c2.begin(), c2.end(), std::back_inserter(r.collision_diff));
  r.equivalent = r.skeleton_diff.empty() && r.collision_diff.empty();
  r.orders_compatible = detail::block_orders_compatible(g1, h);
  return r;
}

/// Pure subclasses that admit a Markov-equivalent member on g's skeleton.
/// The DAG case searches orientations of the skeleton exhaustively (with
/// pruning on the Vs), which is exponential in the number of edges.
inline std::vector<Subclass> equivalent_subclass_members(const MixedGraph& g) {
  std::vector<Subclass> out;
  const auto vs = enumerate_vs(g);
  bool any_collision = false, any_transmitting = false;
  for (const auto& v : vs) (v.kind == VKind::Collision ? any_collision : any_transmitting) = true;

  // orientation search: orient[e] true means pair.a -> pair.b
  const auto pairs = skeleton(g);
  const std::size_t m = pairs.size();
  auto edge_index = [&](NodeId x, NodeId y) {
    NodePair p = NodePair::of(x, y);
    return static_cast<std::size_t>(std::lower_bound(pairs.begin(), pairs.end(), p) - pairs.begin());
  };
  struct VRef {
    std::size_t ea, eb;
    NodeId inner, a, b;
    bool collision;
  };
  std::vector<std::vector<VRef>> by_edge(m);
  for (const auto& v : vs) {
    VRef r{edge_index(v.outer_a, v.inner), edge_index(v.outer_b, v.inner), v.inner, v.outer_a, v.outer_b,
           v.kind == VKind::Collision};
    by_edge[std::max(r.ea, r.eb)].push_back(r);
  }
  std::vector<bool> orient(m, false);
  auto into = [&](std::size_t e, NodeId node) {
    // true iff edge e points into `node`
    return orient[e] ? pairs[e].b == node : pairs[e].a == node;
  };
  std::function<bool(std::size_t)> search = [&](std::size_t e) -> bool {
    if (e == m) {
      MixedGraph d(g.labels(), std::vector<int>(g.size(), 0), 0);
      for (std::size_t k = 0; k < m; ++k) {
        if (orient[k]) d.add_arrow(pairs[k].a, pairs[k].b);
        else d.add_arrow(pairs[k].b, pairs[k].a);
      }
      return d.is_acyclic();
    }
    for (bool o : {true, false}) {
      orient[e] = o;
      bool ok = true;
      for (const auto& r : by_edge[e]) {
        const bool collide = into(r.ea, r.inner) && into(r.eb, r.inner);
        if (collide != r.collision) {
          ok = false;
          break;
        }
      }
      if (ok && search(e + 1)) return true;
    }
    return false;
  };
  if (search(0)) out.push_back(Subclass::DAG);
  if (!any_collision) out.push_back(Subclass::ConcentrationGraph);
  if (!any_transmitting) out.push_back(Subclass::CovarianceGraph);
  return out;
}

}  // namespace rgraph
