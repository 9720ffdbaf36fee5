#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rgraph/edge_matrix.hpp"
#include "rgraph/error.hpp"
#include "rgraph/graph.hpp"

namespace rgraph {

/// alpha _||_ beta | c ?
struct IndependenceQuery {
  NodeSet alpha;
  NodeSet beta;
  NodeSet c;

  void validate(std::size_t n) const {
    if (alpha.empty() || beta.empty()) throw Error(ErrorCode::InvalidQuery, "alpha and beta must be nonempty");
    if (alpha.intersects(beta) || alpha.intersects(c) || beta.intersects(c)) {
      throw Error(ErrorCode::InvalidQuery, "alpha, beta and c must be pairwise disjoint");
    }
    if (!(alpha | beta | c).subset_of(NodeSet::range(n))) {
      throw Error(ErrorCode::InvalidQuery, "query names a node outside the graph");
    }
  }
};

struct QueryVerdict {
  bool implied_independent = false;
  /// Connecting path (alpha end first) when not independent. For rg_separate
  /// it is a path in the graph closed over a without its first node.
  std::vector<NodeId> witness;
  /// One-line account of the verdict.
  std::string argument;
};

namespace detail {

/// Lexicographically smallest among the shortest paths from `from` to `to`
/// whose inner nodes avoid `blocked`.
inline std::optional<std::vector<NodeId>> shortest_path(const std::vector<NodeSet>& adj, NodeSet from,
                                                        NodeSet to, NodeSet blocked) {
  const std::size_t n = adj.size();
  constexpr int kInf = 1 << 30;
  std::vector<int> dist(n, kInf);
  std::vector<NodeId> frontier;
  for (NodeId t : to) {
    dist[t] = 0;
    frontier.push_back(t);
  }
  // distances to `to`, expanding only through unblocked nodes
  for (int d = 0; !frontier.empty(); ++d) {
    std::vector<NodeId> next;
    for (NodeId v : frontier) {
      if (d > 0 && blocked.contains(v)) continue;
      if (d > 0 && from.contains(v)) continue;
      for (NodeId u : adj[v]) {
        if (dist[u] == kInf) {
          dist[u] = d + 1;
          next.push_back(u);
        }
      }
    }
    frontier = std::move(next);
  }
  std::optional<NodeId> start;
  for (NodeId s : from) {
    if (dist[s] != kInf && (!start || dist[s] < dist[*start])) start = s;
  }
  if (!start) return std::nullopt;
  std::vector<NodeId> path{*start};
  NodeId v = *start;
  while (dist[v] > 0) {
    NodeId best = 0;
    bool found = false;
    for (NodeId u : adj[v]) {
      if (dist[u] != dist[v] - 1) continue;
      if (dist[u] > 0 && (blocked.contains(u) || from.contains(u))) continue;
      best = u;
      found = true;
      break;  // NodeSet iterates in increasing id order
    }
    if (!found) return std::nullopt;
    path.push_back(best);
    v = best;
  }
  return path;
}

inline std::string path_text(const MixedGraph& g, const std::vector<NodeId>& path) {
  std::string s;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) s += '-';
    s += g.label(path[i]);
  }
  return s;
}

inline bool only_kinds(const MixedGraph& g, bool arrows, bool dashed, bool full) {
  if (!arrows && (g.has_kind(EdgeKind::Arrow) || g.has_kind(EdgeKind::Double))) return false;
  if (!dashed && (g.has_kind(EdgeKind::Dashed) || g.has_kind(EdgeKind::Double))) return false;
  if (!full && g.has_kind(EdgeKind::Full)) return false;
  return true;
}

inline QueryVerdict undirected_separation(const MixedGraph& g, const std::vector<NodeSet>& adj,
                                          const IndependenceQuery& q) {
  QueryVerdict v;
  if (auto path = shortest_path(adj, q.alpha, q.beta, q.c)) {
    v.implied_independent = false;
    v.witness = *path;
    v.argument = "connecting path " + path_text(g, *path);
  } else {
    v.implied_independent = true;
    v.argument = "every path between alpha and beta meets c";
  }
  return v;
}

}  // namespace detail

/// Separation in a graph of full lines only: independent iff removing c
/// disconnects alpha from beta.
inline QueryVerdict separate_concentration(const MixedGraph& g, const IndependenceQuery& q) {
  q.validate(g.size());
  if (!detail::only_kinds(g, false, false, true)) {
    throw Error(ErrorCode::SubclassMismatch, "separate_concentration needs a graph of full lines only");
  }
  std::vector<NodeSet> adj(g.size());
  for (NodeId i = 0; i < g.size(); ++i) adj[i] = g.full(i);
  return detail::undirected_separation(g, adj, q);
}

/// Undirected graph of the ancestral set of `keep`, parents of common
/// children joined and orientation dropped.
inline std::vector<NodeSet> moral_ancestral_graph(const MixedGraph& g, NodeSet keep) {
  const NodeSet anc = g.ancestors(keep);
  std::vector<NodeSet> adj(g.size());
  for (NodeId v : anc) {
    const NodeSet pa = g.parents(v) & anc;
    for (NodeId p : pa) {
      adj[v].insert(p);
      adj[p].insert(v);
      adj[p] |= pa - NodeSet::single(p);
    }
  }
  return adj;
}

/// d-separation on an arrows-only graph by moralizing the ancestral set.
inline QueryVerdict d_separate(const MixedGraph& g, const IndependenceQuery& q) {
  q.validate(g.size());
  if (!detail::only_kinds(g, true, false, false) || !g.is_acyclic()) {
    throw Error(ErrorCode::SubclassMismatch, "d_separate needs an acyclic graph of arrows only");
  }
  return detail::undirected_separation(g, moral_ancestral_graph(g, q.alpha | q.beta | q.c), q);
}

/// Separation for regression and summary graphs through the induced edge
/// matrix: independent iff the alpha-by-beta block of P_{a|b} is zero with
/// a = alpha | m, b = beta | c. A nonzero block is the dependence reading
/// for traceable distributions.
inline QueryVerdict rg_separate(const MixedGraph& g, const IndependenceQuery& q) {
  q.validate(g.size());
  const NodePartition p = NodePartition::from_query(g.size(), q.alpha, q.beta, q.c);
  QueryVerdict v;
  for (NodeId i : q.alpha) {
    detail::InducedRow row = detail::induced_row(g, i, p.a() - NodeSet::single(i), p.b());
    const NodeSet hit = row.nonzero & q.beta;
    if (hit.empty()) continue;
    const NodeId j = hit.first();
    v.implied_independent = false;
    // path i *-> x <-> ... <-> y <-* j in the closed graph
    if (row.closed.adjacent(i, j)) {
      v.witness = {i, j};
    } else {
      std::vector<NodeSet> adj(g.size());
      const NodeSet b = p.b();
      const NodeSet start = (row.closed.children(i) | row.closed.dashed(i)) & b;
      const NodeSet ends = row.closed.children(j) | row.closed.dashed(j);
      for (NodeId x : b) adj[x] = row.closed.dashed(x) & b;
      auto chain = detail::shortest_path(adj, start - NodeSet::single(j), ends & row.reach,
                                         NodeSet::single(j));
      v.witness = {i};
      if (chain) v.witness.insert(v.witness.end(), chain->begin(), chain->end());
      v.witness.push_back(j);
    }
    v.argument = "P[" + g.label(i) + "," + g.label(j) + "] != 0 via " + detail::path_text(g, v.witness);
    return v;
  }
  v.implied_independent = true;
  v.argument = "P_{alpha|beta.c} is zero";
  return v;
}

}  // namespace rgraph
