#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "rgraph/error.hpp"
#include "rgraph/graph.hpp"
#include "rgraph/node_set.hpp"

namespace rgraph {

/// Square 0/1 matrix with unit diagonal. Row = response, column = regressor:
/// an arrow k -> i sets (i, k); undirected kinds set both (i, k) and (k, i).
class EdgeMatrix {
 public:
  EdgeMatrix() = default;
  explicit EdgeMatrix(std::size_t n) : rows_(n) {
    if (n > kMaxNodes) throw Error(ErrorCode::TooManyNodes, "edge matrices are limited to 64 nodes");
    for (NodeId i = 0; i < n; ++i) rows_[i].insert(i);
  }

  static EdgeMatrix identity(std::size_t n) { return EdgeMatrix(n); }

  std::size_t dim() const { return rows_.size(); }
  bool at(NodeId i, NodeId k) const { return rows_.at(i).contains(k); }
  void set(NodeId i, NodeId k) { rows_.at(i).insert(k); }
  NodeSet row(NodeId i) const { return rows_.at(i); }

  NodeSet column(NodeId k) const {
    NodeSet c;
    for (NodeId i = 0; i < dim(); ++i) {
      if (rows_[i].contains(k)) c.insert(i);
    }
    return c;
  }

  EdgeMatrix transposed() const {
    EdgeMatrix t(dim());
    for (NodeId i = 0; i < dim(); ++i) {
      for (NodeId k : rows_[i]) t.set(k, i);
    }
    return t;
  }

  /// Indicator sum: entrywise or.
  friend EdgeMatrix operator+(const EdgeMatrix& a, const EdgeMatrix& b) {
    EdgeMatrix out = a;
    for (NodeId i = 0; i < a.dim(); ++i) out.rows_[i] |= b.rows_.at(i);
    return out;
  }

  /// Indicator product: (a b)(i, k) = 1 iff some j has a(i, j) = b(j, k) = 1.
  friend EdgeMatrix operator*(const EdgeMatrix& a, const EdgeMatrix& b) {
    EdgeMatrix out(a.dim());
    for (NodeId i = 0; i < a.dim(); ++i) {
      NodeSet r;
      for (NodeId j : a.rows_[i]) r |= b.rows_.at(j);
      out.rows_[i] = r;
    }
    return out;
  }

  friend bool operator==(const EdgeMatrix&, const EdgeMatrix&) = default;

  /// 0/1 grid, one row per line.
  std::string to_string() const {
    std::string s;
    for (NodeId i = 0; i < dim(); ++i) {
      for (NodeId k = 0; k < dim(); ++k) {
        if (k) s += ' ';
        s += at(i, k) ? '1' : '0';
      }
      s += '\n';
    }
    return s;
  }

 private:
  std::vector<NodeSet> rows_;
};

inline EdgeMatrix to_edge_matrix(const MixedGraph& g) {
  EdgeMatrix m(g.size());
  for (NodeId i = 0; i < g.size(); ++i) {
    for (NodeId k : g.parents(i) | g.dashed(i) | g.full(i)) m.set(i, k);
  }
  return m;
}

/// Inverse of to_edge_matrix for regression graphs: asymmetric entries are
/// arrows, symmetric ones are dashed within a response block and full within
/// the context.
inline RegressionGraph from_edge_matrix(const EdgeMatrix& m, std::vector<std::string> labels,
                                        const BlockOrder& order) {
  std::vector<int> block = detail::block_labels(labels.size(), order);
  const int ctx = static_cast<int>(order.blocks.size());
  std::vector<Edge> edges;
  for (NodeId i = 0; i < m.dim(); ++i) {
    for (NodeId k : m.row(i)) {
      if (k == i) continue;
      if (m.at(k, i)) {
        if (k < i) continue;
        edges.push_back(block[i] == ctx ? Edge::full(i, k) : Edge::dashed(i, k));
      } else {
        edges.push_back(Edge::arrow(k, i));
      }
    }
  }
  return build_graph(std::move(labels), order, edges);
}

/// Boolean-semiring closure: adds (i, k) whenever a chain
/// i <- x1 <- ... <- xr <- k of ones exists with every inner x in `over`.
/// Warshall's recursion restricted to pivots in `over`; idempotent and
/// monotone, and closing over s then t equals closing over s | t.
inline EdgeMatrix indicator_closure(EdgeMatrix m, NodeSet over) {
  for (NodeId x : over) {
    if (x >= m.dim()) continue;
    const NodeSet via = m.row(x);
    for (NodeId i = 0; i < m.dim(); ++i) {
      if (i != x && m.at(i, x)) {
        for (NodeId k : via) m.set(i, k);
      }
    }
  }
  return m;
}

namespace detail {

enum class Mark { Tail, Head };

struct Step {
  NodeId to;
  Mark at_from;
  Mark at_to;
};

/// Every edge end leaving `v`, each component of a double edge separately.
inline void steps_from(const MixedGraph& g, NodeId v, std::vector<Step>& out) {
  out.clear();
  for (NodeId k : g.children(v)) out.push_back({k, Mark::Tail, Mark::Head});
  for (NodeId k : g.parents(v)) out.push_back({k, Mark::Head, Mark::Tail});
  for (NodeId k : g.dashed(v)) out.push_back({k, Mark::Head, Mark::Head});
  for (NodeId k : g.full(v)) out.push_back({k, Mark::Tail, Mark::Tail});
}

inline void add_marked(MixedGraph& g, NodeId i, Mark mi, NodeId k, Mark mk) {
  if (mi == Mark::Tail && mk == Mark::Head) {
    g.add_arrow(i, k);
  } else if (mi == Mark::Head && mk == Mark::Tail) {
    g.add_arrow(k, i);
  } else if (mi == Mark::Head) {
    g.add_dashed(i, k);
  } else {
    g.add_full(i, k);
  }
}

}  // namespace detail

/// Closure of a mixed graph over `over`: every pair outside `over` joined by
/// a path whose inner nodes all lie in `over` and are never met head-to-head
/// gets the edge carrying that path's end marks. Nodes of `over` are left
/// isolated; node ids are unchanged. This is marginalization of `over`.
inline MixedGraph close_over(const MixedGraph& g, NodeSet over) {
  const std::size_t n = g.size();
  MixedGraph out = g;
  for (NodeId i = 0; i < n; ++i) out.isolate(i);
  std::vector<detail::Step> steps;
  // visited[first mark][node][arrival mark]
  std::vector<std::array<std::array<bool, 2>, 2>> visited;
  std::vector<std::array<NodeId, 3>> queue;  // first mark, node, arrival mark
  for (NodeId i = 0; i < n; ++i) {
    if (over.contains(i)) continue;
    visited.assign(n, {{{false, false}, {false, false}}});
    queue.clear();
    detail::steps_from(g, i, steps);
    for (const auto& s : steps) {
      auto& v = visited[s.to][static_cast<int>(s.at_from)][static_cast<int>(s.at_to)];
      if (!v) {
        v = true;
        queue.push_back({static_cast<NodeId>(s.at_from), s.to, static_cast<NodeId>(s.at_to)});
      }
    }
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const auto [first, v, arrival] = queue[q];
      if (v == i) continue;
      if (!over.contains(v)) {
        detail::add_marked(out, i, static_cast<detail::Mark>(first), v, static_cast<detail::Mark>(arrival));
        continue;
      }
      detail::steps_from(g, v, steps);
      for (const auto& s : steps) {
        if (arrival == static_cast<NodeId>(detail::Mark::Head) && s.at_from == detail::Mark::Head) continue;
        auto& seen = visited[s.to][first][static_cast<int>(s.at_to)];
        if (!seen) {
          seen = true;
          queue.push_back({first, s.to, static_cast<NodeId>(s.at_to)});
        }
      }
    }
  }
  return out;
}

/// Four disjoint sets covering the nodes; a = alpha | m, b = beta | c.
struct NodePartition {
  NodeSet alpha, beta, c, m;

  NodeSet a() const { return alpha | m; }
  NodeSet b() const { return beta | c; }

  /// alpha, beta and c given; m is everything else.
  static NodePartition from_query(std::size_t n, NodeSet alpha, NodeSet beta, NodeSet c) {
    return {alpha, beta, c, NodeSet::range(n) - alpha - beta - c};
  }

  void validate(std::size_t n) const {
    const NodeSet all = NodeSet::range(n);
    const bool disjoint = !alpha.intersects(beta) && !alpha.intersects(c) && !alpha.intersects(m) &&
                          !beta.intersects(c) && !beta.intersects(m) && !c.intersects(m);
    if (!disjoint || (alpha | beta | c | m) != all) {
      throw Error(ErrorCode::InvalidQuery, "alpha, beta, c, m must partition the node set");
    }
  }
};

/// Structural pattern of the least-squares coefficients of Y_a on Y_b:
/// entry (i, j) is one iff the coefficient can be nonzero for some
/// distribution generated over the graph.
struct InducedMatrix {
  NodeSet rows;
  NodeSet cols;
  std::vector<NodeSet> entries;  // indexed by node id, nonzero columns of that row

  bool at(NodeId i, NodeId j) const { return rows.contains(i) && entries.at(i).contains(j); }

  /// The submatrix for rows `alpha`, columns `beta`.
  bool all_zero(NodeSet alpha, NodeSet beta) const {
    for (NodeId i : alpha & rows) {
      if (entries[i].intersects(beta)) return false;
    }
    return true;
  }
};

namespace detail {

/// Nonzero columns of row i of the induced matrix, plus the closed graph
/// used to find them. `a_rest` = a without i.
struct InducedRow {
  NodeSet nonzero;
  MixedGraph closed;
  NodeSet reach;  // nodes of b reached from i by arrowheads and dashed chains
};

inline InducedRow induced_row(const MixedGraph& g, NodeId i, NodeSet a_rest, NodeSet b) {
  InducedRow r;
  r.closed = close_over(g, a_rest);
  const MixedGraph& h = r.closed;
  // Conditioning on b: inner nodes of a connecting path inside b must be
  // colliders, so the path is i *-> x <-> ... <-> y <-* j.
  EdgeMatrix dash(g.size());
  for (NodeId x : b) {
    for (NodeId y : h.dashed(x) & b) dash.set(x, y);
  }
  dash = indicator_closure(dash, b);
  NodeSet start = (h.children(i) | h.dashed(i)) & b;
  for (NodeId x : start) r.reach |= dash.row(x);
  r.reach |= start;
  for (NodeId j : b) {
    bool hit = h.adjacent(i, j);
    if (!hit) {
      for (NodeId y : r.reach) {
        if (y != j && h.heads_at(y).contains(j)) {
          hit = true;
          break;
        }
      }
    }
    if (hit) r.nonzero.insert(j);
  }
  return r;
}

}  // namespace detail

/// Induced matrix restricted to the given rows (a subset of a).
inline InducedMatrix induced_rows(const MixedGraph& g, const NodePartition& p, NodeSet rows) {
  p.validate(g.size());
  InducedMatrix out{rows, p.b(), std::vector<NodeSet>(g.size())};
  for (NodeId i : rows) out.entries[i] = detail::induced_row(g, i, p.a() - NodeSet::single(i), p.b()).nonzero;
  return out;
}

/// Full induced matrix P_{a|b}: marginalize a without the row node, then
/// condition on b.
inline InducedMatrix induced_edge_matrix(const MixedGraph& g, const NodePartition& p) {
  return induced_rows(g, p, p.a());
}

/// True iff the alpha-by-beta submatrix has no ones.
inline bool zero_test(const InducedMatrix& pm, NodeSet alpha, NodeSet beta) {
  return pm.all_zero(alpha, beta);
}

}  // namespace rgraph
