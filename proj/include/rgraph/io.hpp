#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rgraph/error.hpp"
#include "rgraph/graph.hpp"
#include "rgraph/separation.hpp"

// Graph file grammar, one statement per line, `#` starts a comment:
//
//   graph regression | graph summary        (optional, first statement)
//   node <label> block=<k|context> [scale=discrete|continuous]
//   edge <a> -> <b> [kind=double]
//   edge <a> -- <b> kind=dashed|full|double
//   marginalized <label>...                 (summary graphs only)
//   conditioned <label>...                  (summary graphs only)
//
// Response blocks are numbered from the outcome side: block=1 holds the
// primary responses, larger numbers lie further in the past.

namespace rgraph {

using ParsedGraph = std::variant<RegressionGraph, SummaryGraph>;

inline const MixedGraph& as_mixed(const ParsedGraph& p) {
  return std::visit([](const auto& g) -> const MixedGraph& { return g; }, p);
}

namespace detail {

struct Token {
  std::string text;
  std::size_t col;  // 1-based
};

inline std::vector<Token> tokenize_line(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == '#') break;
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) && line[j] != '#') ++j;
    out.push_back({std::string(line.substr(i, j - i)), i + 1});
    i = j;
  }
  return out;
}

inline bool valid_label(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  });
}

struct NodeDecl {
  std::string label;
  int block;  // -1 = context
  Scale scale;
  std::size_t line, col;
};

struct EdgeDecl {
  std::string a, b;
  bool arrow;
  EdgeKind kind;
  std::size_t line, col_a, col_b, col_op;
};

struct LabelList {
  std::vector<std::string> labels;
  std::size_t line;
};

inline std::pair<std::string, std::string> split_attr(const Token& t, std::size_t line) {
  const auto eq = t.text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == t.text.size()) {
    throw SyntaxError(line, t.col, "expected key=value, got '" + t.text + "'");
  }
  return {t.text.substr(0, eq), t.text.substr(eq + 1)};
}

inline const Token& expect_label(const std::vector<Token>& toks, std::size_t i, std::size_t line,
                                 std::size_t end_col) {
  if (i >= toks.size()) throw SyntaxError(line, end_col, "expected a node label");
  if (!valid_label(toks[i].text)) throw SyntaxError(line, toks[i].col, "invalid node label '" + toks[i].text + "'");
  return toks[i];
}

inline NodeId resolve(const std::map<std::string, NodeId>& ids, const std::string& label, std::size_t line,
                      std::size_t col) {
  auto it = ids.find(label);
  if (it == ids.end()) {
    throw Error(ErrorCode::UnknownNode,
                "line " + std::to_string(line) + ", col " + std::to_string(col) + ": unknown node '" + label + "'");
  }
  return it->second;
}

}  // namespace detail

/// Parses a graph file. Grammar errors raise SyntaxError with the position of
/// the offending token; structural errors come from build_graph.
inline ParsedGraph parse_graph(std::string_view text) {
  bool summary = false;
  bool seen_statement = false;
  std::vector<detail::NodeDecl> nodes;
  std::vector<detail::EdgeDecl> edges;
  std::vector<detail::LabelList> marg, cond;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    const auto toks = detail::tokenize_line(line);
    if (toks.empty()) continue;
    const std::size_t end_col = line.size() + 1;
    const std::string& kw = toks[0].text;

    if (kw == "graph") {
      if (seen_statement) throw SyntaxError(line_no, toks[0].col, "'graph' must be the first statement");
      if (toks.size() != 2) throw SyntaxError(line_no, toks.size() < 2 ? end_col : toks[2].col, "expected 'graph regression' or 'graph summary'");
      if (toks[1].text == "summary") {
        summary = true;
      } else if (toks[1].text != "regression") {
        throw SyntaxError(line_no, toks[1].col, "unknown graph type '" + toks[1].text + "'");
      }
    } else if (kw == "node") {
      const auto& lab = detail::expect_label(toks, 1, line_no, end_col);
      detail::NodeDecl d{lab.text, -2, Scale::Unspecified, line_no, lab.col};
      for (std::size_t i = 2; i < toks.size(); ++i) {
        auto [key, value] = detail::split_attr(toks[i], line_no);
        if (key == "block") {
          if (value == "context") {
            d.block = -1;
          } else {
            if (!std::all_of(value.begin(), value.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }) ||
                value.size() > 6 || std::stoi(value) < 1) {
              throw SyntaxError(line_no, toks[i].col, "block must be a positive integer or 'context'");
            }
            d.block = std::stoi(value);
          }
        } else if (key == "scale") {
          if (value == "discrete") {
            d.scale = Scale::Discrete;
          } else if (value == "continuous") {
            d.scale = Scale::Continuous;
          } else {
            throw SyntaxError(line_no, toks[i].col, "scale must be 'discrete' or 'continuous'");
          }
        } else {
          throw SyntaxError(line_no, toks[i].col, "unknown node attribute '" + key + "'");
        }
      }
      if (d.block == -2) throw SyntaxError(line_no, end_col, "node '" + d.label + "' needs block=");
      nodes.push_back(std::move(d));
    } else if (kw == "edge") {
      const auto& a = detail::expect_label(toks, 1, line_no, end_col);
      if (toks.size() < 3) throw SyntaxError(line_no, end_col, "expected '->' or '--'");
      const auto& op = toks[2];
      if (op.text != "->" && op.text != "--") throw SyntaxError(line_no, op.col, "expected '->' or '--', got '" + op.text + "'");
      const auto& b = detail::expect_label(toks, 3, line_no, end_col);
      detail::EdgeDecl e{a.text, b.text, op.text == "->", EdgeKind::Arrow, line_no, a.col, b.col, op.col};
      bool kind_given = false;
      for (std::size_t i = 4; i < toks.size(); ++i) {
        auto [key, value] = detail::split_attr(toks[i], line_no);
        if (key != "kind") throw SyntaxError(line_no, toks[i].col, "unknown edge attribute '" + key + "'");
        if (value == "double") {
          e.kind = EdgeKind::Double;
        } else if (value == "dashed" && !e.arrow) {
          e.kind = EdgeKind::Dashed;
        } else if (value == "full" && !e.arrow) {
          e.kind = EdgeKind::Full;
        } else {
          throw SyntaxError(line_no, toks[i].col, "kind '" + value + "' does not fit '" + op.text + "'");
        }
        kind_given = true;
      }
      if (!e.arrow && !kind_given) throw SyntaxError(line_no, end_col, "'--' needs kind=dashed|full|double");
      if (e.a == e.b) {
        throw Error(ErrorCode::SelfLoop, "line " + std::to_string(line_no) + ", col " + std::to_string(b.col) +
                                             ": self-loop at '" + e.a + "'");
      }
      edges.push_back(std::move(e));
    } else if (kw == "marginalized" || kw == "conditioned") {
      if (!summary) throw SyntaxError(line_no, toks[0].col, "'" + kw + "' is only allowed in summary graphs");
      detail::LabelList l{{}, line_no};
      for (std::size_t i = 1; i < toks.size(); ++i) l.labels.push_back(detail::expect_label(toks, i, line_no, end_col).text);
      (kw == "marginalized" ? marg : cond).push_back(std::move(l));
    } else {
      throw SyntaxError(line_no, toks[0].col, "unknown keyword '" + kw + "'");
    }
    seen_statement = true;
  }

  // response block numbers in increasing order become 0, 1, ...
  std::vector<int> numbers;
  for (const auto& d : nodes) {
    if (d.block >= 0) numbers.push_back(d.block);
  }
  std::sort(numbers.begin(), numbers.end());
  numbers.erase(std::unique(numbers.begin(), numbers.end()), numbers.end());
  const int ctx = static_cast<int>(numbers.size());

  std::vector<std::string> labels;
  std::vector<int> block;
  std::vector<Scale> scales;
  std::map<std::string, NodeId> ids;
  for (const auto& d : nodes) {
    if (!ids.emplace(d.label, static_cast<NodeId>(labels.size())).second) {
      throw Error(ErrorCode::DuplicateLabel, "line " + std::to_string(d.line) + ", col " + std::to_string(d.col) +
                                                 ": duplicate node label '" + d.label + "'");
    }
    labels.push_back(d.label);
    block.push_back(d.block < 0 ? ctx
                                : static_cast<int>(std::lower_bound(numbers.begin(), numbers.end(), d.block) -
                                                   numbers.begin()));
    scales.push_back(d.scale);
  }
  if (labels.size() > kMaxNodes) throw Error(ErrorCode::TooManyNodes, "graphs are limited to 64 nodes");

  std::vector<Edge> resolved;
  for (const auto& e : edges) {
    NodeId a = detail::resolve(ids, e.a, e.line, e.col_a);
    NodeId b = detail::resolve(ids, e.b, e.line, e.col_b);
    if (e.arrow) {
      resolved.push_back({a, b, e.kind});
    } else if (e.kind == EdgeKind::Double) {
      if (block[a] == block[b]) {
        throw SyntaxError(e.line, e.col_op, "double edge within one block needs a direction; write '" + e.a + " -> " + e.b + " kind=double'");
      }
      resolved.push_back(block[a] > block[b] ? Edge{a, b, EdgeKind::Double} : Edge{b, a, EdgeKind::Double});
    } else {
      resolved.push_back({std::min(a, b), std::max(a, b), e.kind});
    }
  }

  if (!summary) {
    BlockOrder order;
    order.blocks.resize(numbers.size());
    for (NodeId i = 0; i < labels.size(); ++i) {
      if (block[i] == ctx) {
        order.context.insert(i);
      } else {
        order.blocks[static_cast<std::size_t>(block[i])].insert(i);
      }
    }
    return build_graph(std::move(labels), order, resolved, scales);
  }

  std::vector<std::string> m_labels, c_labels;
  for (const auto& l : marg) m_labels.insert(m_labels.end(), l.labels.begin(), l.labels.end());
  for (const auto& l : cond) c_labels.insert(c_labels.end(), l.labels.begin(), l.labels.end());
  MixedGraph g(std::move(labels), std::move(block), ctx);
  for (NodeId i = 0; i < g.size(); ++i) g.set_scale(i, scales[i]);
  for (std::size_t k = 0; k < resolved.size(); ++k) {
    const Edge& e = resolved[k];
    if (g.adjacent(e.from, e.to)) {
      throw Error(ErrorCode::DuplicateEdge, "line " + std::to_string(edges[k].line) + ": second edge on pair " +
                                                g.label(e.from) + "," + g.label(e.to));
    }
    g.add_edge(e);
  }
  return SummaryGraph(std::move(g), std::move(m_labels), std::move(c_labels));
}

/// Parses a file that must describe a regression graph.
inline RegressionGraph parse_regression_graph(std::string_view text) {
  ParsedGraph p = parse_graph(text);
  if (auto* g = std::get_if<RegressionGraph>(&p)) return std::move(*g);
  throw Error(ErrorCode::SubclassMismatch, "expected a regression graph, got a summary graph");
}

namespace detail {

inline std::string write_graph(const MixedGraph& g, bool summary, const std::vector<std::string>& marg,
                               const std::vector<std::string>& cond) {
  std::string s = summary ? "graph summary\n" : "graph regression\n";
  auto list = [&](const char* kw, const std::vector<std::string>& l) {
    if (l.empty()) return;
    s += kw;
    for (const auto& x : l) s += " " + x;
    s += "\n";
  };
  list("marginalized", marg);
  list("conditioned", cond);
  for (NodeId i = 0; i < g.size(); ++i) {
    s += "node " + g.label(i) + " block=";
    s += g.in_context(i) ? std::string("context") : std::to_string(g.block(i) + 1);
    if (g.scale(i) == Scale::Discrete) s += " scale=discrete";
    if (g.scale(i) == Scale::Continuous) s += " scale=continuous";
    s += "\n";
  }
  for (const Edge& e : g.edges()) {
    const std::string a = g.label(e.from), b = g.label(e.to);
    switch (e.kind) {
      case EdgeKind::Arrow: s += "edge " + a + " -> " + b + "\n"; break;
      case EdgeKind::Double: s += "edge " + a + " -> " + b + " kind=double\n"; break;
      case EdgeKind::Dashed: s += "edge " + a + " -- " + b + " kind=dashed\n"; break;
      case EdgeKind::Full: s += "edge " + a + " -- " + b + " kind=full\n"; break;
    }
  }
  return s;
}

}  // namespace detail

inline std::string serialize(const RegressionGraph& g) { return detail::write_graph(g, false, {}, {}); }

inline std::string serialize(const SummaryGraph& g) {
  return detail::write_graph(g, true, g.marginalized(), g.conditioned());
}

inline std::string serialize(const ParsedGraph& p) {
  return std::visit([](const auto& g) { return serialize(g); }, p);
}

/// Graphviz rendering. Blocks become clusters (context last); discrete
/// nodes are filled dots, continuous ones open circles. A double edge is
/// drawn as an arrow plus a parallel dashed line.
inline std::string export_dot(const MixedGraph& g) {
  auto q = [](const std::string& s) { return "\"" + s + "\""; };
  std::string s = "digraph G {\n  rankdir=RL;\n";
  const BlockOrder order = g.order();
  auto cluster = [&](NodeSet nodes, const std::string& name, const std::string& label) {
    if (nodes.empty()) return;
    s += "  subgraph cluster_" + name + " {\n    label=" + q(label) + ";\n";
    for (NodeId i : nodes) {
      s += "    " + q(g.label(i));
      switch (g.scale(i)) {
        case Scale::Discrete: s += " [shape=circle, style=filled, fillcolor=black, fontcolor=white]"; break;
        case Scale::Continuous: s += " [shape=circle]"; break;
        case Scale::Unspecified: break;
      }
      s += ";\n";
    }
    s += "  }\n";
  };
  for (std::size_t j = 0; j < order.blocks.size(); ++j) {
    cluster(order.blocks[j], std::to_string(j + 1), "block " + std::to_string(j + 1));
  }
  cluster(order.context, "context", "context");
  for (const Edge& e : g.edges()) {
    const std::string a = q(g.label(e.from)), b = q(g.label(e.to));
    switch (e.kind) {
      case EdgeKind::Arrow: s += "  " + a + " -> " + b + ";\n"; break;
      case EdgeKind::Dashed: s += "  " + a + " -> " + b + " [dir=none, style=dashed];\n"; break;
      case EdgeKind::Full: s += "  " + a + " -> " + b + " [dir=none];\n"; break;
      case EdgeKind::Double:
        s += "  " + a + " -> " + b + ";\n";
        s += "  " + a + " -> " + b + " [dir=none, style=dashed];\n";
        break;
    }
  }
  s += "}\n";
  return s;
}

/// Parses `alpha | beta | c` (c may be empty or omitted); labels within a
/// part are separated by commas or spaces.
inline IndependenceQuery parse_query(const MixedGraph& g, std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '|') {
      parts.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  if (parts.size() < 2 || parts.size() > 3) {
    throw Error(ErrorCode::InvalidQuery, "a query reads 'alpha | beta | c'");
  }
  auto set_of = [&](std::string_view part) {
    NodeSet s;
    std::size_t i = 0;
    while (i < part.size()) {
      if (part[i] == ',' || std::isspace(static_cast<unsigned char>(part[i]))) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < part.size() && part[j] != ',' && !std::isspace(static_cast<unsigned char>(part[j]))) ++j;
      s.insert(g.id_of(part.substr(i, j - i)));
      i = j;
    }
    return s;
  };
  IndependenceQuery q{set_of(parts[0]), set_of(parts[1]), parts.size() == 3 ? set_of(parts[2]) : NodeSet{}};
  q.validate(g.size());
  return q;
}

inline std::string query_to_string(const MixedGraph& g, const IndependenceQuery& q) {
  auto list = [&](NodeSet s) {
    std::string out;
    for (NodeId i : s) {
      if (!out.empty()) out += ',';
      out += g.label(i);
    }
    return out;
  };
  return list(q.alpha) + " | " + list(q.beta) + " | " + list(q.c);
}

}  // namespace rgraph
