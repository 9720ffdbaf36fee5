#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "rgraph/rgraph.hpp"

namespace rgraph::testing {

inline std::vector<std::string> numbered_labels(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::to_string(i + 1));
  return out;
}

/// Graph with the given blocks (block[i] == n_resp means context) and, for
/// every pair flagged in `pairs`, the edge kind the blocks dictate.
inline MixedGraph graph_from_blocks(const std::vector<int>& block, int n_resp, std::uint64_t pairs) {
  const std::size_t n = block.size();
  MixedGraph g(numbered_labels(n), block, n_resp);
  std::size_t bit = 0;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId k = i + 1; k < n; ++k, ++bit) {
      if (!((pairs >> bit) & 1u)) continue;
      if (block[i] == block[k]) {
        if (block[i] == n_resp) {
          g.add_full(i, k);
        } else {
          g.add_dashed(i, k);
        }
      } else if (block[i] > block[k]) {
        g.add_arrow(i, k);
      } else {
        g.add_arrow(k, i);
      }
    }
  }
  return g;
}

/// Integer key of the edge set: five states per pair.
inline std::uint64_t edge_code(const MixedGraph& g, const std::vector<NodeId>& perm) {
  const std::size_t n = g.size();
  std::vector<NodeId> inv(n);
  for (NodeId i = 0; i < n; ++i) inv[perm[i]] = i;
  std::uint64_t code = 0;
  for (NodeId a = 0; a < n; ++a) {
    for (NodeId b = a + 1; b < n; ++b) {
      const NodeId i = inv[a], k = inv[b];
      std::uint64_t s = 0;
      if (g.has_arrow(i, k)) s = 1;
      else if (g.has_arrow(k, i)) s = 2;
      else if (g.has_dashed(i, k)) s = 3;
      else if (g.has_full(i, k)) s = 4;
      code = code * 5 + s;
    }
  }
  return code;
}

inline std::uint64_t canonical_code(const MixedGraph& g) {
  std::vector<NodeId> perm(g.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::uint64_t best = ~std::uint64_t{0};
  do {
    best = std::min(best, edge_code(g, perm));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Every regression graph on n nodes with distinct edge sets (or one per
/// isomorphism class), each with a block order realizing it.
inline std::vector<MixedGraph> all_regression_graphs(std::size_t n, bool up_to_isomorphism) {
  std::vector<MixedGraph> out;
  std::unordered_set<std::uint64_t> labeled, seen;
  std::vector<NodeId> identity(n);
  std::iota(identity.begin(), identity.end(), 0);
  const std::size_t npairs = n * (n - 1) / 2;
  std::vector<int> block(n);
  // block labels: -1 = context, else response block index; keep surjective labelings only
  std::function<void(std::size_t)> assign = [&](std::size_t i) {
    if (i == n) {
      int max_block = -1;
      for (int b : block) max_block = std::max(max_block, b);
      std::vector<bool> used(static_cast<std::size_t>(max_block + 1), false);
      for (int b : block) {
        if (b >= 0) used[static_cast<std::size_t>(b)] = true;
      }
      if (std::find(used.begin(), used.end(), false) != used.end()) return;
      const int n_resp = max_block + 1;
      std::vector<int> bl(block);
      for (int& b : bl) {
        if (b < 0) b = n_resp;
      }
      for (std::uint64_t pairs = 0; pairs < (std::uint64_t{1} << npairs); ++pairs) {
        MixedGraph g = graph_from_blocks(bl, n_resp, pairs);
        if (!labeled.insert(edge_code(g, identity)).second) continue;
        if (!up_to_isomorphism || seen.insert(canonical_code(g)).second) out.push_back(std::move(g));
      }
      return;
    }
    for (int b = -1; b < static_cast<int>(n); ++b) {
      block[i] = b;
      assign(i + 1);
    }
  };
  if (n == 0) return out;
  assign(0);
  return out;
}

/// Every DAG on n labeled nodes, as arrows-only graphs.
inline std::vector<MixedGraph> all_dags(std::size_t n) {
  std::vector<MixedGraph> out;
  const std::size_t npairs = n * (n - 1) / 2;
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId k = i + 1; k < n; ++k) pairs.emplace_back(i, k);
  }
  std::uint64_t total = 1;
  for (std::size_t p = 0; p < npairs; ++p) total *= 3;
  for (std::uint64_t code = 0; code < total; ++code) {
    MixedGraph g(numbered_labels(n), std::vector<int>(n, 0), 0);
    std::uint64_t c = code;
    for (const auto& [i, k] : pairs) {
      const auto s = c % 3;
      c /= 3;
      if (s == 1) g.add_arrow(i, k);
      if (s == 2) g.add_arrow(k, i);
    }
    if (g.is_acyclic()) out.push_back(std::move(g));
  }
  return out;
}

/// Random regression graph: each node goes to the context with probability
/// `p_context`, otherwise to one of `blocks` response blocks; each admissible
/// pair is joined with probability `p_edge`.
inline RegressionGraph random_regression_graph(std::mt19937_64& rng, std::size_t n, int blocks, double p_edge,
                                               double p_context = 0.3) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, blocks - 1);
  std::vector<int> raw(n);
  for (auto& b : raw) b = u(rng) < p_context ? -1 : pick(rng);
  std::vector<int> used;
  for (int b : raw) {
    if (b >= 0) used.push_back(b);
  }
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  const int n_resp = static_cast<int>(used.size());
  std::vector<int> block(n);
  for (std::size_t i = 0; i < n; ++i) {
    block[i] = raw[i] < 0 ? n_resp
                          : static_cast<int>(std::lower_bound(used.begin(), used.end(), raw[i]) - used.begin());
  }
  std::uint64_t pairs = 0;
  for (std::size_t bit = 0; bit < n * (n - 1) / 2; ++bit) {
    if (u(rng) < p_edge) pairs |= std::uint64_t{1} << bit;
  }
  return build_graph(graph_from_blocks(block, n_resp, pairs));
}

/// Reference separation by enumerating simple paths. A path connects given
/// c when every inner node met head-to-head is in c or an ancestor of c, and
/// every other inner node is outside c. Each component of a double edge
/// counts as its own edge.
inline bool path_separated(const MixedGraph& g, NodeSet alpha, NodeSet beta, NodeSet c) {
  const NodeSet anc = g.ancestors(c);
  struct Hop {
    NodeId to;
    bool head_here, head_there;
  };
  std::vector<std::vector<Hop>> hops(g.size());
  for (NodeId v = 0; v < g.size(); ++v) {
    for (NodeId k : g.children(v)) hops[v].push_back({k, false, true});
    for (NodeId k : g.parents(v)) hops[v].push_back({k, true, false});
    for (NodeId k : g.dashed(v)) hops[v].push_back({k, true, true});
    for (NodeId k : g.full(v)) hops[v].push_back({k, false, false});
  }
  NodeSet on_path;
  std::function<bool(NodeId, bool)> reach = [&](NodeId v, bool arrived_head) -> bool {
    for (const Hop& h : hops[v]) {
      if (on_path.contains(h.to)) continue;
      const bool collider = arrived_head && h.head_here;
      if (!alpha.contains(v)) {
        if (collider ? !anc.contains(v) : c.contains(v)) continue;
      }
      if (beta.contains(h.to)) return true;
      on_path.insert(h.to);
      const bool found = reach(h.to, h.head_there);
      on_path.erase(h.to);
      if (found) return true;
    }
    return false;
  };
  for (NodeId a : alpha) {
    on_path = NodeSet::single(a);
    if (reach(a, false)) return false;
  }
  return true;
}

/// All (alpha, beta, c) with alpha, beta nonempty and disjoint, over `nodes`.
/// alpha's smallest member is below beta's so each unordered pair appears once.
inline std::vector<IndependenceQuery> all_queries(NodeSet nodes) {
  std::vector<IndependenceQuery> out;
  const auto v = nodes.to_vector();
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < v.size(); ++i) total *= 4;
  for (std::uint64_t code = 0; code < total; ++code) {
    IndependenceQuery q;
    std::uint64_t c = code;
    for (NodeId x : v) {
      switch (c % 4) {
        case 1: q.alpha.insert(x); break;
        case 2: q.beta.insert(x); break;
        case 3: q.c.insert(x); break;
        default: break;
      }
      c /= 4;
    }
    if (q.alpha.empty() || q.beta.empty() || q.alpha.first() > q.beta.first()) continue;
    out.push_back(q);
  }
  return out;
}

/// Single-node alpha and beta with every conditioning set on `nodes`.
inline std::vector<IndependenceQuery> pairwise_queries(NodeSet nodes) {
  std::vector<IndependenceQuery> out;
  for (NodeId i : nodes) {
    for (NodeId k : nodes) {
      if (k <= i) continue;
      const auto rest = (nodes - NodeSet::single(i) - NodeSet::single(k)).to_vector();
      for (std::uint64_t m = 0; m < (std::uint64_t{1} << rest.size()); ++m) {
        NodeSet c;
        for (std::size_t b = 0; b < rest.size(); ++b) {
          if ((m >> b) & 1u) c.insert(rest[b]);
        }
        out.push_back({NodeSet::single(i), NodeSet::single(k), c});
      }
    }
  }
  return out;
}

/// Every split of `nodes` into marginalized, conditioned and kept.
inline std::vector<TransformSpec> all_transform_specs(NodeSet nodes) {
  std::vector<TransformSpec> out;
  const auto v = nodes.to_vector();
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < v.size(); ++i) total *= 3;
  for (std::uint64_t code = 0; code < total; ++code) {
    TransformSpec t;
    std::uint64_t c = code;
    for (NodeId x : v) {
      if (c % 3 == 1) t.marginalize.insert(x);
      if (c % 3 == 2) t.condition.insert(x);
      c /= 3;
    }
    out.push_back(t);
  }
  return out;
}

inline std::vector<int> block_vector(const MixedGraph& g) {
  std::vector<int> out;
  for (NodeId i = 0; i < g.size(); ++i) out.push_back(g.in_context(i) ? -1 : g.block(i));
  return out;
}

inline std::string fixture_path(const std::string& name) { return std::string(RGRAPH_FIXTURE_DIR) + "/" + name; }

inline std::string read_fixture(const std::string& name) {
  std::FILE* f = std::fopen(fixture_path(name).c_str(), "rb");
  if (!f) throw std::runtime_error("missing fixture " + name);
  std::string s;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) s.append(buf, got);
  std::fclose(f);
  return s;
}

inline RegressionGraph load_fixture(const std::string& name) { return parse_regression_graph(read_fixture(name)); }

}  // namespace rgraph::testing

namespace rgraph::testing {

/// Queries on the summary graph whose answer differs from the generating
/// graph's answer with the conditioned nodes added to c.
inline std::size_t margin_mismatches(const MixedGraph& g, const TransformSpec& t, bool pairwise_only) {
  const SummaryGraph sg = summary_graph(g, t);
  const auto kept = (g.all() - t.marginalize - t.condition).to_vector();  // summary id -> g id
  auto lift = [&](NodeSet s) {
    NodeSet out;
    for (NodeId i : s) out.insert(kept[i]);
    return out;
  };
  std::size_t bad = 0;
  for (const auto& q : pairwise_only ? pairwise_queries(sg.all()) : all_queries(sg.all())) {
    const bool in_sg = rg_separate(sg, q).implied_independent;
    const bool in_g = rg_separate(g, {lift(q.alpha), lift(q.beta), lift(q.c) | t.condition}).implied_independent;
    bad += in_sg != in_g;
  }
  return bad;
}

}  // namespace rgraph::testing
