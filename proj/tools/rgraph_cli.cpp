#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rgraph/rgraph.hpp"

using namespace rgraph;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

NodeSet labels_to_set(const MixedGraph& g, const std::string& text) {
  NodeSet s;
  std::string cur;
  for (char ch : text + ",") {
    if (ch == ',' || ch == ' ') {
      if (!cur.empty()) s.insert(g.id_of(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  return s;
}

std::string edge_text(const MixedGraph& g, const Edge& e) {
  switch (e.kind) {
    case EdgeKind::Arrow: return g.label(e.from) + "->" + g.label(e.to);
    case EdgeKind::Dashed: return g.label(e.from) + "--" + g.label(e.to);
    case EdgeKind::Full: return g.label(e.from) + "==" + g.label(e.to);
    case EdgeKind::Double: return g.label(e.from) + "->" + g.label(e.to) + "+dashed";
  }
  return {};
}

template <class T, class F>
std::string join(const std::vector<T>& items, F f) {
  std::string out;
  for (const auto& x : items) {
    if (!out.empty()) out += ';';
    out += f(x);
  }
  return out;
}

QueryVerdict answer(const MixedGraph& g, const IndependenceQuery& q, const std::string& method) {
  if (method == "dsep") return d_separate(g, q);
  if (method == "concentration") return separate_concentration(g, q);
  return rg_separate(g, q);
}

struct Options {
  bool verbose = false;
  std::string file, file2, query, batch, method = "edge-matrix";
  std::string nodes, marginalize, condition, response, regressor;
  int reps = 20;
  std::uint64_t seed = 1;
  double tol = 1e-10;
};

int cmd_validate(const Options& o) {
  const ParsedGraph p = parse_graph(read_file(o.file));
  const MixedGraph& g = as_mixed(p);
  std::cout << "valid=true\n";
  std::cout << "kind=" << (std::holds_alternative<RegressionGraph>(p) ? "regression" : "summary") << "\n";
  std::cout << "nodes=" << g.size() << "\n";
  std::cout << "edges=" << g.edges().size() << "\n";
  std::cout << "subclass=" << subclass_name(classify_subclass(g)) << "\n";
  return 0;
}

int cmd_query(const Options& o) {
  const ParsedGraph p = parse_graph(read_file(o.file));
  const MixedGraph& g = as_mixed(p);
  auto run = [&](const std::string& text, bool batch) {
    const IndependenceQuery q = parse_query(g, text);
    const QueryVerdict v = answer(g, q, o.method);
    if (batch) std::cout << "query=" << query_to_string(g, q) << " ";
    std::cout << "independent=" << (v.implied_independent ? "true" : "false") << "\n";
    if (o.verbose) std::cerr << query_to_string(g, q) << ": " << v.argument << "\n";
  };
  if (!o.batch.empty()) {
    std::istringstream in(read_file(o.batch));
    std::string line;
    while (std::getline(in, line)) {
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      run(line, true);
    }
    return 0;
  }
  if (o.query.empty()) throw CLI::ValidationError("query", "give a query or --batch");
  run(o.query, false);
  return 0;
}

int cmd_equiv(const Options& o) {
  const ParsedGraph p1 = parse_graph(read_file(o.file));
  const ParsedGraph p2 = parse_graph(read_file(o.file2));
  const MixedGraph& g = as_mixed(p1);
  const EquivalenceReport r = markov_equivalent(g, as_mixed(p2));
  std::cout << "equivalent=" << (r.equivalent ? "true" : "false") << "\n";
  std::cout << "skeleton_diff=" << join(r.skeleton_diff, [&](const NodePair& e) {
    return g.label(e.a) + "," + g.label(e.b);
  }) << "\n";
  std::cout << "collision_diff=" << join(r.collision_diff, [&](const CollisionV& v) {
    return g.label(v.outer_a) + ">" + g.label(v.inner) + "<" + g.label(v.outer_b);
  }) << "\n";
  std::cout << "orders_compatible=" << (r.orders_compatible ? "true" : "false") << "\n";
  return 0;
}

int cmd_transform(const Options& o, bool conditioning) {
  const ParsedGraph p = parse_graph(read_file(o.file));
  const MixedGraph& g = as_mixed(p);
  TransformSpec t;
  if (conditioning) {
    t.condition = labels_to_set(g, o.nodes);
    t.marginalize = labels_to_set(g, o.marginalize);
  } else {
    t.marginalize = labels_to_set(g, o.nodes);
  }
  const SummaryGraph sg = summary_graph(g, t);
  std::cout << serialize(sg);
  if (o.verbose) {
    std::cerr << "kept " << sg.size() << " of " << g.size() << " nodes, " << sg.edges().size() << " edges\n";
  }
  return 0;
}

int cmd_confounding(const Options& o) {
  const ParsedGraph p = parse_graph(read_file(o.file));
  const MixedGraph& g = as_mixed(p);
  TransformSpec t{labels_to_set(g, o.marginalize), labels_to_set(g, o.condition)};
  const NodeId y = g.id_of(o.response);
  const NodeId x = g.id_of(o.regressor);
  const DistortionReport r = distortion_report(g, t, y, x);
  const SummaryGraph sg = summary_graph(g, t);
  std::cout << "direct=" << join(r.direct_confounding, [&](const Edge& e) { return edge_text(sg, e); }) << "\n";
  std::cout << "indirect=" << join(r.indirect_confounding, [&](const GraphPath& p) { return path_to_string(sg, p); })
            << "\n";
  std::cout << "under=" << join(r.under_conditioning, [&](NodeId u) { return g.label(u); }) << "\n";
  std::cout << "over=" << join(r.over_conditioning, [&](const GraphPath& p) { return path_to_string(g, p); }) << "\n";
  return 0;
}

/// Samples Gaussian systems over the graph and compares every pairwise query
/// with the partial correlation it predicts to vanish or not.
int cmd_oracle(const Options& o) {
  const RegressionGraph g = parse_regression_graph(read_file(o.file));
  const std::size_t n = g.size();
  std::vector<IndependenceQuery> queries;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId k = i + 1; k < n; ++k) {
      const NodeSet rest = g.all() - NodeSet::single(i) - NodeSet::single(k);
      if (n <= 10) {
        // every subset of rest, enumerated as bit patterns over its members
        const auto members = rest.to_vector();
        for (std::uint64_t m = 0; m < (std::uint64_t{1} << members.size()); ++m) {
          NodeSet c;
          for (std::size_t b = 0; b < members.size(); ++b) {
            if ((m >> b) & 1u) c.insert(members[b]);
          }
          queries.push_back({NodeSet::single(i), NodeSet::single(k), c});
        }
      } else {
        queries.push_back({NodeSet::single(i), NodeSet::single(k), {}});
        queries.push_back({NodeSet::single(i), NodeSet::single(k), rest});
      }
    }
  }
  std::vector<bool> implied(queries.size());
  std::size_t n_implied = 0;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    implied[q] = rg_separate(g, queries[q]).implied_independent;
    n_implied += implied[q];
  }
  double worst_implied = 0;
  std::vector<double> best_dependent(queries.size(), 0.0);
  for (int r = 0; r < o.reps; ++r) {
    const Matrix sigma = sample_system(g, o.seed + static_cast<std::uint64_t>(r)).covariance();
    for (std::size_t q = 0; q < queries.size(); ++q) {
      const double v = max_abs_cond_corr(sigma, queries[q].alpha, queries[q].beta, queries[q].c);
      if (implied[q]) {
        worst_implied = std::max(worst_implied, v);
      } else {
        best_dependent[q] = std::max(best_dependent[q], v);
      }
    }
  }
  std::size_t violations = 0, undetected = 0;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    if (implied[q]) continue;
    if (best_dependent[q] <= 1e-6) {
      ++undetected;
      if (o.verbose) std::cerr << "no dependence seen for " << query_to_string(g, queries[q]) << "\n";
    }
  }
  if (worst_implied >= o.tol) ++violations;
  std::cout << "queries=" << queries.size() << "\n";
  std::cout << "implied_independences=" << n_implied << "\n";
  std::cout << "max_abs_partial_corr_implied=" << worst_implied << "\n";
  std::cout << "soundness=" << (violations == 0 ? "pass" : "fail") << "\n";
  std::cout << "undetected_dependences=" << undetected << "\n";
  return violations == 0 ? 0 : 1;
}

int cmd_export(const Options& o) {
  const ParsedGraph p = parse_graph(read_file(o.file));
  std::cout << export_dot(as_mixed(p));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regression graphs: validation, separation queries, equivalence, transforms"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_flag("-v,--verbose", o.verbose, "human-readable details on stderr");

  auto* validate = app.add_subcommand("validate", "check a graph file");
  validate->add_option("graph", o.file)->required()->check(CLI::ExistingFile);

  auto* query = app.add_subcommand("query", "answer 'alpha | beta | c' queries");
  query->add_option("graph", o.file)->required()->check(CLI::ExistingFile);
  query->add_option("query", o.query, "e.g. \"Zb | V | A,B,U\"");
  query->add_option("--batch", o.batch, "file with one query per line")->check(CLI::ExistingFile);
  query->add_option("--method", o.method, "separation criterion")
      ->check(CLI::IsMember({"edge-matrix", "dsep", "concentration"}));

  auto* equiv = app.add_subcommand("equiv", "Markov equivalence of two graphs");
  equiv->add_option("first", o.file)->required()->check(CLI::ExistingFile);
  equiv->add_option("second", o.file2)->required()->check(CLI::ExistingFile);

  auto* marg = app.add_subcommand("marginalize", "summary graph after marginalizing");
  marg->add_option("graph", o.file)->required()->check(CLI::ExistingFile);
  marg->add_option("nodes", o.nodes, "comma-separated labels")->required();

  auto* cond = app.add_subcommand("condition", "summary graph after conditioning");
  cond->add_option("graph", o.file)->required()->check(CLI::ExistingFile);
  cond->add_option("nodes", o.nodes, "comma-separated labels")->required();
  cond->add_option("--marginalize", o.marginalize, "labels to marginalize as well");

  auto* conf = app.add_subcommand("confounding", "distortions of one dependence");
  conf->add_option("graph", o.file)->required()->check(CLI::ExistingFile);
  conf->add_option("--marginalize", o.marginalize);
  conf->add_option("--condition", o.condition);
  conf->add_option("--response", o.response)->required();
  conf->add_option("--regressor", o.regressor)->required();

  auto* oracle = app.add_subcommand("oracle", "check pairwise verdicts on sampled Gaussian systems");
  oracle->add_option("--graph", o.file)->required()->check(CLI::ExistingFile);
  oracle->add_option("--reps", o.reps)->check(CLI::PositiveNumber);
  oracle->add_option("--seed", o.seed);
  oracle->add_option("--tol", o.tol)->check(CLI::PositiveNumber);

  auto* exp = app.add_subcommand("export", "Graphviz DOT rendering");
  exp->add_option("graph", o.file)->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (validate->parsed()) return cmd_validate(o);
    if (query->parsed()) return cmd_query(o);
    if (equiv->parsed()) return cmd_equiv(o);
    if (marg->parsed()) return cmd_transform(o, false);
    if (cond->parsed()) return cmd_transform(o, true);
    if (conf->parsed()) return cmd_confounding(o);
    if (oracle->parsed()) return cmd_oracle(o);
    if (exp->parsed()) return cmd_export(o);
  } catch (const Error& e) {
    std::cout << "error=" << e.name() << "\n";
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 2;
}
