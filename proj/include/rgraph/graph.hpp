#pragma once

#include <algorithm>
#include <compare>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rgraph/error.hpp"
#include "rgraph/node_set.hpp"

namespace rgraph {

/// Arrow and Double are ordered (from = regressor, to = response); the
/// undirected kinds are stored with from < to.
enum class EdgeKind { Arrow, Dashed, Full, Double };

constexpr std::string_view kind_name(EdgeKind k) {
  switch (k) {
    case EdgeKind::Arrow: return "arrow";
    case EdgeKind::Dashed: return "dashed";
    case EdgeKind::Full: return "full";
    case EdgeKind::Double: return "double";
  }
  return "?";
}

struct Edge {
  NodeId from = 0;
  NodeId to = 0;
  EdgeKind kind = EdgeKind::Arrow;

  static Edge arrow(NodeId regressor, NodeId response) { return {regressor, response, EdgeKind::Arrow}; }
  static Edge dashed(NodeId a, NodeId b) { return {std::min(a, b), std::max(a, b), EdgeKind::Dashed}; }
  static Edge full(NodeId a, NodeId b) { return {std::min(a, b), std::max(a, b), EdgeKind::Full}; }
  static Edge double_edge(NodeId regressor, NodeId response) {
    return {regressor, response, EdgeKind::Double};
  }

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Unordered node pair with a < b.
struct NodePair {
  NodeId a = 0;
  NodeId b = 0;

  static NodePair of(NodeId x, NodeId y) { return {std::min(x, y), std::max(x, y)}; }
  friend auto operator<=>(const NodePair&, const NodePair&) = default;
};

/// How a variable is measured; only affects rendering.
enum class Scale { Unspecified, Discrete, Continuous };

/// Response blocks ordered from the future (index 0) to the past, then the
/// context block. Arrows point from later blocks to earlier ones.
struct BlockOrder {
  std::vector<NodeSet> blocks;
  NodeSet context;
};

/// Graph over typed edges with a block label per node. Common storage for
/// regression graphs and summary graphs.
class MixedGraph {
 public:
  MixedGraph() = default;

  /// `block[i]` in [0, num_response_blocks]; num_response_blocks denotes the context.
  MixedGraph(std::vector<std::string> labels, std::vector<int> block, int num_response_blocks)
      : labels_(std::move(labels)),
        block_(std::move(block)),
        scales_(labels_.size(), Scale::Unspecified),
        n_resp_(num_response_blocks),
        pa_(labels_.size()),
        ch_(labels_.size()),
        dash_(labels_.size()),
        full_(labels_.size()) {
    if (labels_.size() > kMaxNodes) {
      throw Error(ErrorCode::TooManyNodes,
                  "graphs are limited to " + std::to_string(kMaxNodes) + " nodes");
    }
  }

  std::size_t size() const { return labels_.size(); }
  NodeSet all() const { return NodeSet::range(size()); }

  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(NodeId i) const { return labels_.at(i); }

  std::optional<NodeId> find(std::string_view label) const {
    for (NodeId i = 0; i < labels_.size(); ++i) {
      if (labels_[i] == label) return i;
    }
    return std::nullopt;
  }

  NodeId id_of(std::string_view label) const {
    if (auto id = find(label)) return *id;
    throw Error(ErrorCode::UnknownNode, "unknown node '" + std::string(label) + "'");
  }

  int block(NodeId i) const { return block_.at(i); }
  int num_response_blocks() const { return n_resp_; }
  bool in_context(NodeId i) const { return block_.at(i) == n_resp_; }

  BlockOrder order() const {
    BlockOrder o;
    o.blocks.resize(static_cast<std::size_t>(n_resp_));
    for (NodeId i = 0; i < size(); ++i) {
      if (in_context(i)) {
        o.context.insert(i);
      } else {
        o.blocks[static_cast<std::size_t>(block_[i])].insert(i);
      }
    }
    return o;
  }

  Scale scale(NodeId i) const { return scales_.at(i); }
  void set_scale(NodeId i, Scale s) { scales_.at(i) = s; }

  NodeSet parents(NodeId i) const { return pa_.at(i); }
  NodeSet children(NodeId i) const { return ch_.at(i); }
  NodeSet dashed(NodeId i) const { return dash_.at(i); }
  NodeSet full(NodeId i) const { return full_.at(i); }
  NodeSet neighbors(NodeId i) const { return pa_[i] | ch_[i] | dash_[i] | full_[i]; }

  bool has_arrow(NodeId from, NodeId to) const { return pa_.at(to).contains(from); }
  bool has_dashed(NodeId a, NodeId b) const { return dash_.at(a).contains(b); }
  bool has_full(NodeId a, NodeId b) const { return full_.at(a).contains(b); }
  bool has_double(NodeId from, NodeId to) const { return has_arrow(from, to) && has_dashed(from, to); }
  bool adjacent(NodeId a, NodeId b) const { return neighbors(a).contains(b); }

  /// Nodes with an arrowhead at `i`: parents and dashed neighbours.
  NodeSet heads_at(NodeId i) const { return pa_[i] | dash_[i]; }

  bool has_kind(EdgeKind k) const {
    for (NodeId i = 0; i < size(); ++i) {
      switch (k) {
        case EdgeKind::Arrow:
          if (!(pa_[i] - dash_[i]).empty()) return true;
          break;
        case EdgeKind::Dashed:
          if (!(dash_[i] - pa_[i] - ch_[i]).empty()) return true;
          break;
        case EdgeKind::Full:
          if (!full_[i].empty()) return true;
          break;
        case EdgeKind::Double:
          if (!(pa_[i] & dash_[i]).empty()) return true;
          break;
      }
    }
    return false;
  }

  /// Edges in canonical order; an arrow superposed on a dashed line is one Double.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (NodeId i = 0; i < size(); ++i) {
      for (NodeId k : pa_[i]) {
        out.push_back({k, i, dash_[i].contains(k) ? EdgeKind::Double : EdgeKind::Arrow});
      }
      for (NodeId k : dash_[i]) {
        if (k > i && !pa_[i].contains(k) && !ch_[i].contains(k)) out.push_back(Edge::dashed(i, k));
      }
      for (NodeId k : full_[i]) {
        if (k > i) out.push_back(Edge::full(i, k));
      }
    }
    std::sort(out.begin(), out.end(), [](const Edge& x, const Edge& y) {
      auto kx = NodePair::of(x.from, x.to), ky = NodePair::of(y.from, y.to);
      if (kx != ky) return kx < ky;
      return x < y;
    });
    return out;
  }

  std::size_t edge_count() const { return edges().size(); }

  void add_arrow(NodeId from, NodeId to) {
    pa_.at(to).insert(from);
    ch_.at(from).insert(to);
  }
  void add_dashed(NodeId a, NodeId b) {
    dash_.at(a).insert(b);
    dash_.at(b).insert(a);
  }
  void add_full(NodeId a, NodeId b) {
    full_.at(a).insert(b);
    full_.at(b).insert(a);
  }
  void add_edge(const Edge& e) {
    switch (e.kind) {
      case EdgeKind::Arrow: add_arrow(e.from, e.to); break;
      case EdgeKind::Dashed: add_dashed(e.from, e.to); break;
      case EdgeKind::Full: add_full(e.from, e.to); break;
      case EdgeKind::Double:
        add_arrow(e.from, e.to);
        add_dashed(e.from, e.to);
        break;
    }
  }
  void remove_pair(NodeId a, NodeId b) {
    pa_[a].erase(b);
    pa_[b].erase(a);
    ch_[a].erase(b);
    ch_[b].erase(a);
    dash_[a].erase(b);
    dash_[b].erase(a);
    full_[a].erase(b);
    full_[b].erase(a);
  }
  void isolate(NodeId u) {
    for (NodeId k : neighbors(u)) remove_pair(u, k);
  }

  /// `s` together with every node that has a directed path into `s`.
  NodeSet ancestors(NodeSet s) const {
    NodeSet seen = s, frontier = s;
    while (!frontier.empty()) {
      NodeSet next;
      for (NodeId v : frontier) next |= pa_[v];
      frontier = next - seen;
      seen |= next;
    }
    return seen;
  }

  NodeSet descendants(NodeSet s) const {
    NodeSet seen = s, frontier = s;
    while (!frontier.empty()) {
      NodeSet next;
      for (NodeId v : frontier) next |= ch_[v];
      frontier = next - seen;
      seen |= next;
    }
    return seen;
  }

  bool is_acyclic() const {
    NodeSet done;
    bool progress = true;
    while (progress) {
      progress = false;
      for (NodeId i = 0; i < size(); ++i) {
        if (!done.contains(i) && pa_[i].subset_of(done)) {
          done.insert(i);
          progress = true;
        }
      }
    }
    return done == all();
  }

  /// Same labels, blocks and edges (scales ignored).
  bool same_structure(const MixedGraph& o) const {
    return labels_ == o.labels_ && block_ == o.block_ && n_resp_ == o.n_resp_ && pa_ == o.pa_ &&
           dash_ == o.dash_ && full_ == o.full_;
  }

  /// Copy restricted to `keep`, ids renumbered densely in increasing order.
  /// Empty response blocks are dropped; the context stays last.
  MixedGraph induced_subgraph(NodeSet keep) const {
    std::vector<NodeId> old_of = keep.to_vector();
    std::vector<int> new_of(size(), -1);
    for (std::size_t j = 0; j < old_of.size(); ++j) new_of[old_of[j]] = static_cast<int>(j);

    std::vector<int> used_blocks;
    for (NodeId i : keep) {
      if (!in_context(i)) used_blocks.push_back(block_[i]);
    }
    std::sort(used_blocks.begin(), used_blocks.end());
    used_blocks.erase(std::unique(used_blocks.begin(), used_blocks.end()), used_blocks.end());
    auto remap_block = [&](int b) {
      if (b == n_resp_) return static_cast<int>(used_blocks.size());
      return static_cast<int>(std::lower_bound(used_blocks.begin(), used_blocks.end(), b) -
                              used_blocks.begin());
    };

    std::vector<std::string> labels;
    std::vector<int> blocks;
    for (NodeId i : old_of) {
      labels.push_back(labels_[i]);
      blocks.push_back(remap_block(block_[i]));
    }
    MixedGraph out(std::move(labels), std::move(blocks), static_cast<int>(used_blocks.size()));
    for (std::size_t j = 0; j < old_of.size(); ++j) {
      NodeId i = old_of[j];
      NodeId nj = static_cast<NodeId>(j);
      out.scales_[nj] = scales_[i];
      for (NodeId k : pa_[i] & keep) out.add_arrow(static_cast<NodeId>(new_of[k]), nj);
      for (NodeId k : dash_[i] & keep) out.dash_[nj].insert(static_cast<NodeId>(new_of[k]));
      for (NodeId k : full_[i] & keep) out.full_[nj].insert(static_cast<NodeId>(new_of[k]));
    }
    return out;
  }

 private:
  std::vector<std::string> labels_;
  std::vector<int> block_;
  std::vector<Scale> scales_;
  int n_resp_ = 0;
  std::vector<NodeSet> pa_, ch_, dash_, full_;
};

class RegressionGraph;
RegressionGraph build_graph(std::vector<std::string> labels, const BlockOrder& order,
                            const std::vector<Edge>& edges, const std::vector<Scale>& scales = {});

/// A MixedGraph that satisfies every regression-graph invariant. Only
/// build_graph creates one.
class RegressionGraph : public MixedGraph {
 public:
  RegressionGraph() = default;

 private:
  explicit RegressionGraph(MixedGraph g) : MixedGraph(std::move(g)) {}
  friend RegressionGraph build_graph(std::vector<std::string>, const BlockOrder&,
                                     const std::vector<Edge>&, const std::vector<Scale>&);
};

/// Graph induced on the remaining nodes after marginalizing and conditioning.
/// Double edges may appear; surviving nodes keep their original blocks.
class SummaryGraph : public MixedGraph {
 public:
  SummaryGraph() = default;
  SummaryGraph(MixedGraph g, std::vector<std::string> marginalized, std::vector<std::string> conditioned)
      : MixedGraph(std::move(g)),
        marginalized_(std::move(marginalized)),
        conditioned_(std::move(conditioned)) {}

  const std::vector<std::string>& marginalized() const { return marginalized_; }
  const std::vector<std::string>& conditioned() const { return conditioned_; }

 private:
  std::vector<std::string> marginalized_;
  std::vector<std::string> conditioned_;
};

namespace detail {

inline std::string pair_text(const std::vector<std::string>& labels, NodeId a, NodeId b) {
  auto name = [&](NodeId i) { return i < labels.size() ? labels[i] : std::to_string(i); };
  return name(a) + "," + name(b);
}

inline std::vector<int> block_labels(std::size_t n, const BlockOrder& order) {
  std::vector<int> block(n, -1);
  auto assign = [&](NodeSet s, int b) {
    for (NodeId i : s) {
      if (i >= n) throw Error(ErrorCode::InvalidOrder, "block order names node id " + std::to_string(i));
      if (block[i] != -1) {
        throw Error(ErrorCode::InvalidOrder, "node id " + std::to_string(i) + " appears in two blocks");
      }
      block[i] = b;
    }
  };
  for (std::size_t j = 0; j < order.blocks.size(); ++j) {
    if (order.blocks[j].empty()) throw Error(ErrorCode::InvalidOrder, "empty response block");
    assign(order.blocks[j], static_cast<int>(j));
  }
  assign(order.context, static_cast<int>(order.blocks.size()));
  for (std::size_t i = 0; i < n; ++i) {
    if (block[i] == -1) {
      throw Error(ErrorCode::InvalidOrder, "node id " + std::to_string(i) + " is in no block");
    }
  }
  return block;
}

}  // namespace detail

/// Validates and assembles a regression graph.
inline RegressionGraph build_graph(std::vector<std::string> labels, const BlockOrder& order,
                                   const std::vector<Edge>& edges, const std::vector<Scale>& scales) {
  const std::size_t n = labels.size();
  if (n > kMaxNodes) {
    throw Error(ErrorCode::TooManyNodes, "graphs are limited to " + std::to_string(kMaxNodes) + " nodes");
  }
  {
    std::unordered_set<std::string> seen;
    for (const auto& l : labels) {
      if (l.empty()) throw Error(ErrorCode::DuplicateLabel, "empty node label");
      if (!seen.insert(l).second) throw Error(ErrorCode::DuplicateLabel, "duplicate node label '" + l + "'");
    }
  }
  std::vector<int> block = detail::block_labels(n, order);
  const int ctx = static_cast<int>(order.blocks.size());
  const auto copy = labels;
  MixedGraph g(std::move(labels), block, ctx);
  for (std::size_t i = 0; i < scales.size() && i < n; ++i) g.set_scale(static_cast<NodeId>(i), scales[i]);

  for (const Edge& e : edges) {
    if (e.from >= n || e.to >= n) throw Error(ErrorCode::UnknownNode, "edge endpoint out of range");
    const std::string where = detail::pair_text(copy, e.from, e.to);
    if (e.from == e.to) throw Error(ErrorCode::SelfLoop, "self-loop at " + copy[e.from]);
    if (g.adjacent(e.from, e.to)) throw Error(ErrorCode::DuplicateEdge, "second edge on pair " + where);
    const int bf = block[e.from], bt = block[e.to];
    switch (e.kind) {
      case EdgeKind::Double:
        throw Error(ErrorCode::DoubleEdgeNotAllowed, "double edge " + where + " in a regression graph");
      case EdgeKind::Arrow:
        if (bf == bt) {
          throw Error(ErrorCode::WrongEdgeKindForBlock, "arrow " + where + " within one block");
        }
        if (bt == ctx || bf < bt) {
          throw Error(ErrorCode::CyclicOrArrowIntoPast, "arrow " + where + " points into the past");
        }
        break;
      case EdgeKind::Dashed:
        if (bf != bt || bf == ctx) {
          throw Error(ErrorCode::WrongEdgeKindForBlock,
                      "dashed line " + where + " must join two responses of one block");
        }
        break;
      case EdgeKind::Full:
        if (bf != ctx || bt != ctx) {
          throw Error(ErrorCode::WrongEdgeKindForBlock, "full line " + where + " must join two context nodes");
        }
        break;
    }
    g.add_edge(e);
  }
  return RegressionGraph(std::move(g));
}

inline RegressionGraph build_graph(const MixedGraph& g) {
  std::vector<Scale> scales;
  for (NodeId i = 0; i < g.size(); ++i) scales.push_back(g.scale(i));
  return build_graph(g.labels(), g.order(), g.edges(), scales);
}

/// Finds a block order under which `edges` form a regression graph, if any.
/// Full-line nodes form the context; dashed components become blocks ordered
/// by the arrows; the earliest admissible position is used for each block.
/// Isolated nodes join the context.
inline std::optional<BlockOrder> derive_block_order(std::size_t n, const std::vector<Edge>& edges) {
  if (n > kMaxNodes) return std::nullopt;
  NodeSet context, touched;
  std::vector<NodeSet> dash(n), pa(n);
  for (const Edge& e : edges) {
    if (e.from >= n || e.to >= n || e.from == e.to) return std::nullopt;
    touched.insert(e.from);
    touched.insert(e.to);
    switch (e.kind) {
      case EdgeKind::Full:
        context.insert(e.from);
        context.insert(e.to);
        break;
      case EdgeKind::Dashed:
        dash[e.from].insert(e.to);
        dash[e.to].insert(e.from);
        break;
      case EdgeKind::Arrow: pa[e.to].insert(e.from); break;
      case EdgeKind::Double: return std::nullopt;
    }
  }
  context |= NodeSet::range(n) - touched;
  for (NodeId i = 0; i < n; ++i) {
    if (context.contains(i) && (!pa[i].empty() || !dash[i].empty())) return std::nullopt;
  }
  // dashed components
  std::vector<int> comp(n, -1);
  std::vector<NodeSet> comps;
  for (NodeId i = 0; i < n; ++i) {
    if (context.contains(i) || comp[i] != -1) continue;
    NodeSet c = NodeSet::single(i), frontier = c;
    while (!frontier.empty()) {
      NodeSet next;
      for (NodeId v : frontier) next |= dash[v];
      frontier = next - c;
      c |= next;
    }
    for (NodeId v : c) comp[v] = static_cast<int>(comps.size());
    comps.push_back(c);
  }
  // arrows inside a component are impossible
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId k : pa[i]) {
      if (comp[i] != -1 && comp[i] == comp[k]) return std::nullopt;
    }
  }
  // order components so that regressors come after responses: repeatedly
  // take components none of whose members has a child in a remaining one.
  std::vector<NodeSet> past_first;
  std::vector<bool> placed(comps.size(), false);
  for (std::size_t round = 0; round < comps.size(); ++round) {
    bool found = false;
    for (std::size_t c = 0; c < comps.size() && !found; ++c) {
      if (placed[c]) continue;
      bool ready = true;
      for (NodeId v : comps[c]) {
        for (NodeId p : pa[v]) {
          if (!context.contains(p) && !placed[static_cast<std::size_t>(comp[p])]) ready = false;
        }
      }
      if (ready) {
        placed[c] = true;
        past_first.push_back(comps[c]);
        found = true;
      }
    }
    if (!found) return std::nullopt;
  }
  BlockOrder order;
  order.blocks.assign(past_first.rbegin(), past_first.rend());
  order.context = context;
  return order;
}

/// Pairs joined by at least one edge.
inline std::vector<NodePair> skeleton(const MixedGraph& g) {
  std::vector<NodePair> out;
  for (NodeId i = 0; i < g.size(); ++i) {
    for (NodeId k : g.neighbors(i)) {
      if (k > i) out.push_back({i, k});
    }
  }
  return out;
}

enum class VKind { Collision, Transmitting };

/// The edge of a V as seen from its inner node.
enum class EdgeEnd { ArrowIntoInner, ArrowOutOfInner, Dashed, Full, Double };

struct VConfiguration {
  NodeId inner = 0;
  NodeId outer_a = 0;  // outer_a < outer_b
  NodeId outer_b = 0;
  VKind kind = VKind::Transmitting;
  EdgeEnd end_a = EdgeEnd::Full;
  EdgeEnd end_b = EdgeEnd::Full;

  friend auto operator<=>(const VConfiguration&, const VConfiguration&) = default;
};

namespace detail {

inline EdgeEnd end_at(const MixedGraph& g, NodeId outer, NodeId inner) {
  if (g.has_dashed(outer, inner) && (g.has_arrow(outer, inner) || g.has_arrow(inner, outer))) {
    return EdgeEnd::Double;
  }
  if (g.has_arrow(outer, inner)) return EdgeEnd::ArrowIntoInner;
  if (g.has_arrow(inner, outer)) return EdgeEnd::ArrowOutOfInner;
  if (g.has_dashed(outer, inner)) return EdgeEnd::Dashed;
  return EdgeEnd::Full;
}

inline bool head_at_inner(EdgeEnd e) {
  return e == EdgeEnd::ArrowIntoInner || e == EdgeEnd::Dashed || e == EdgeEnd::Double;
}

}  // namespace detail

/// Every V: uncoupled outer pair, both coupled to the inner node. Collision
/// iff both edges have an arrowhead (or dashed end) at the inner node.
inline std::vector<VConfiguration> enumerate_vs(const MixedGraph& g) {
  std::vector<VConfiguration> out;
  for (NodeId v = 0; v < g.size(); ++v) {
    const NodeSet nb = g.neighbors(v);
    for (NodeId a : nb) {
      for (NodeId b : nb) {
        if (b <= a || g.adjacent(a, b)) continue;
        VConfiguration vc{v, a, b, VKind::Transmitting, detail::end_at(g, a, v), detail::end_at(g, b, v)};
        if (detail::head_at_inner(vc.end_a) && detail::head_at_inner(vc.end_b)) vc.kind = VKind::Collision;
        out.push_back(vc);
      }
    }
  }
  return out;
}

enum class Subclass { DAG, ConcentrationGraph, CovarianceGraph, GeneralRegressionGraph };

constexpr std::string_view subclass_name(Subclass s) {
  switch (s) {
    case Subclass::DAG: return "DAG";
    case Subclass::ConcentrationGraph: return "ConcentrationGraph";
    case Subclass::CovarianceGraph: return "CovarianceGraph";
    case Subclass::GeneralRegressionGraph: return "GeneralRegressionGraph";
  }
  return "?";
}

/// An edgeless graph is reported as a DAG.
inline Subclass classify_subclass(const MixedGraph& g) {
  const bool arrows = g.has_kind(EdgeKind::Arrow) || g.has_kind(EdgeKind::Double);
  const bool dashed = g.has_kind(EdgeKind::Dashed) || g.has_kind(EdgeKind::Double);
  const bool full = g.has_kind(EdgeKind::Full);
  if (!dashed && !full) return Subclass::DAG;
  if (!arrows && !dashed) return Subclass::ConcentrationGraph;
  if (!arrows && !full) return Subclass::CovarianceGraph;
  return Subclass::GeneralRegressionGraph;
}

}  // namespace rgraph
