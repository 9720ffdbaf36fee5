#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "rgraph/error.hpp"
#include "rgraph/graph.hpp"

namespace rgraph {

using Matrix = Eigen::MatrixXd;

namespace detail {

inline std::vector<int> indices(NodeSet s) {
  std::vector<int> out;
  for (NodeId i : s) out.push_back(static_cast<int>(i));
  return out;
}

inline Matrix sub(const Matrix& m, const std::vector<int>& r, const std::vector<int>& c) {
  Matrix out(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(c.size()));
  for (std::size_t a = 0; a < r.size(); ++a) {
    for (std::size_t b = 0; b < c.size(); ++b) out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = m(r[a], c[b]);
  }
  return out;
}

/// Solves block * X = rhs for a symmetric positive-definite block.
inline Matrix spd_solve(const Matrix& block, const Matrix& rhs, ErrorCode on_fail) {
  if (block.rows() == 0) return Matrix::Zero(0, rhs.cols());
  Eigen::LLT<Matrix> llt(block);
  if (llt.info() != Eigen::Success) throw Error(on_fail, "block is not positive definite");
  const double lo = llt.matrixL().toDenseMatrix().diagonal().minCoeff();
  const double hi = llt.matrixL().toDenseMatrix().diagonal().maxCoeff();
  if (lo <= 0 || hi / lo > 1e8) throw Error(on_fail, "block is numerically singular");
  return llt.solve(rhs);
}

}  // namespace detail

/// Conditional covariance sigma_{ik|given}: Schur complement of the given block.
inline double cond_cov(const Matrix& sigma, NodeId i, NodeId k, NodeSet given) {
  const auto g = detail::indices(given);
  if (g.empty()) return sigma(i, k);
  const Matrix sgg = detail::sub(sigma, g, g);
  const Matrix sgk = detail::sub(sigma, g, {static_cast<int>(k)});
  const Matrix sig = detail::sub(sigma, {static_cast<int>(i)}, g);
  const Matrix x = detail::spd_solve(sgg, sgk, ErrorCode::SingularConditioningBlock);
  return sigma(i, k) - (sig * x)(0, 0);
}

/// Concentration of (i, k) in the margin without `over`:
/// K_rr - K_ro K_oo^{-1} K_or, read at (i, k).
inline double marg_con(const Matrix& conc, NodeId i, NodeId k, NodeSet over) {
  const auto o = detail::indices(over);
  if (o.empty()) return conc(i, k);
  const Matrix koo = detail::sub(conc, o, o);
  const Matrix kok = detail::sub(conc, o, {static_cast<int>(k)});
  const Matrix kio = detail::sub(conc, {static_cast<int>(i)}, o);
  const Matrix x = detail::spd_solve(koo, kok, ErrorCode::SingularMarginalizedBlock);
  return conc(i, k) - (kio * x)(0, 0);
}

/// Population least-squares coefficient of `regressor` when `response` is
/// regressed on `regressor` and `given`: sigma_{rx|given} / sigma_{xx|given}.
inline double regress_coeff(const Matrix& sigma, NodeId response, NodeId regressor, NodeSet given) {
  return cond_cov(sigma, response, regressor, given) / cond_cov(sigma, regressor, regressor, given);
}

inline double partial_corr(const Matrix& sigma, NodeId i, NodeId k, NodeSet given) {
  const double ik = cond_cov(sigma, i, k, given);
  const double ii = cond_cov(sigma, i, i, given);
  const double kk = cond_cov(sigma, k, k, given);
  return ik / std::sqrt(ii * kk);
}

/// Largest |conditional correlation| between a member of alpha and one of
/// beta given c; zero iff alpha _||_ beta | c for a Gaussian.
inline double max_abs_cond_corr(const Matrix& sigma, NodeSet alpha, NodeSet beta, NodeSet c) {
  double worst = 0;
  for (NodeId i : alpha) {
    for (NodeId k : beta) worst = std::max(worst, std::abs(partial_corr(sigma, i, k, c)));
  }
  return worst;
}

/// Linear system generated over a regression graph:
/// Y_g = B Y_past + e_g per response block, context ~ N(0, K^{-1}).
struct GaussianSystem {
  MixedGraph graph;
  Matrix coeffs;                 // coeffs(i, k) = coefficient of k -> i
  Matrix residual_cov;           // block diagonal; context block = K^{-1}
  Matrix context_concentration;  // full n x n, nonzero only on context rows/cols

  /// Sigma = (I - B)^{-1} W (I - B)^{-T}.
  Matrix covariance() const {
    const auto n = coeffs.rows();
    const Matrix a = Matrix::Identity(n, n) - coeffs;
    const Matrix ainv = a.inverse();
    return ainv * residual_cov * ainv.transpose();
  }
};

namespace detail {

/// Symmetric positive-definite matrix on `nodes` with off-diagonal support
/// exactly on `adj`; diagonal in [0.5, 1.5], correlation magnitudes in
/// [0.1, 0.6] times a shrink factor that halves on repeated failure.
inline Matrix sparse_spd(std::mt19937_64& rng, std::size_t n, NodeSet nodes, const std::vector<NodeSet>& adj) {
  std::uniform_real_distribution<double> var(0.5, 1.5), mag(0.1, 0.6), coin(0.0, 1.0);
  const auto idx = indices(nodes);
  double shrink = 1.0;
  for (int attempt = 0;; ++attempt) {
    if (attempt > 0 && attempt % 100 == 0) shrink /= 2;
    Matrix r = Matrix::Identity(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t a = 0; a < idx.size(); ++a) {
      for (std::size_t b = a + 1; b < idx.size(); ++b) {
        if (!adj[static_cast<std::size_t>(idx[a])].contains(static_cast<NodeId>(idx[b]))) continue;
        const double v = shrink * mag(rng) * (coin(rng) < 0.5 ? -1 : 1);
        r(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v;
        r(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = v;
      }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(r, Eigen::EigenvaluesOnly);
    if (idx.empty() || es.eigenvalues().minCoeff() > 0.05) {
      Matrix out = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
      std::vector<double> sd;
      for (std::size_t a = 0; a < idx.size(); ++a) sd.push_back(std::sqrt(var(rng)));
      for (std::size_t a = 0; a < idx.size(); ++a) {
        for (std::size_t b = 0; b < idx.size(); ++b) {
          out(idx[a], idx[b]) = sd[a] * sd[b] * r(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        }
      }
      return out;
    }
  }
}

}  // namespace detail

/// Random parameters for a regression graph, deterministic in `seed`.
/// Coefficients have magnitude in [0.3, 1.0] with random sign; residual
/// covariances and the context concentration carry nonzeros exactly on the
/// dashed and full lines. Draws whose covariance has condition number 1e6 or
/// more are rejected.
inline GaussianSystem sample_system(const MixedGraph& g, std::uint64_t seed) {
  if (g.has_kind(EdgeKind::Double)) {
    throw Error(ErrorCode::SubclassMismatch, "Gaussian systems are generated over regression graphs");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(0.3, 1.0), coin(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(g.size());
  const BlockOrder order = g.order();
  std::vector<NodeSet> dash(g.size()), full(g.size());
  for (NodeId i = 0; i < g.size(); ++i) {
    dash[i] = g.dashed(i);
    full[i] = g.full(i);
  }
  for (;;) {
    GaussianSystem s{g, Matrix::Zero(n, n), Matrix::Zero(n, n), Matrix::Zero(n, n)};
    for (NodeId i = 0; i < g.size(); ++i) {
      for (NodeId k : g.parents(i)) s.coeffs(i, k) = mag(rng) * (coin(rng) < 0.5 ? -1 : 1);
    }
    for (NodeSet block : order.blocks) s.residual_cov += detail::sparse_spd(rng, g.size(), block, dash);
    if (!order.context.empty()) {
      s.context_concentration = detail::sparse_spd(rng, g.size(), order.context, full);
      const auto c = detail::indices(order.context);
      const Matrix kc = detail::sub(s.context_concentration, c, c);
      const Matrix wc = kc.inverse();
      for (std::size_t a = 0; a < c.size(); ++a) {
        for (std::size_t b = 0; b < c.size(); ++b) {
          s.residual_cov(c[a], c[b]) = wc(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        }
      }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(s.covariance(), Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    if (lo > 0 && hi / lo < 1e6) return s;
  }
}

/// Exact distribution of binary variables; bit i of the index is X_i.
struct JointTable {
  std::size_t n = 0;
  std::vector<double> probs;

  /// P(X_s = bits of `value` on s), summing out the rest.
  double marginal(NodeSet s, std::uint64_t value) const {
    double total = 0;
    const std::uint64_t mask = s.bits();
    for (std::uint64_t x = 0; x < probs.size(); ++x) {
      if ((x & mask) == (value & mask)) total += probs[x];
    }
    return total;
  }
};

/// Joint table by the chain rule. conditionals[v][cfg] = P(X_v = 1 | parents),
/// where bit j of cfg is the value of the j-th parent in increasing id order.
inline JointTable dag_binary_table(const MixedGraph& dag, const std::vector<std::vector<double>>& conditionals) {
  if (dag.size() > 5) throw Error(ErrorCode::TooManyNodes, "binary tables are limited to 5 variables");
  if (dag.has_kind(EdgeKind::Dashed) || dag.has_kind(EdgeKind::Full) || dag.has_kind(EdgeKind::Double)) {
    throw Error(ErrorCode::SubclassMismatch, "binary tables are generated over DAGs");
  }
  if (conditionals.size() != dag.size()) throw Error(ErrorCode::InvalidQuery, "one conditional table per node");
  for (NodeId v = 0; v < dag.size(); ++v) {
    if (conditionals[v].size() != (std::size_t{1} << dag.parents(v).size())) {
      throw Error(ErrorCode::InvalidQuery, "conditional table of " + dag.label(v) + " has the wrong size");
    }
  }
  JointTable t{dag.size(), std::vector<double>(std::size_t{1} << dag.size(), 1.0)};
  for (std::uint64_t x = 0; x < t.probs.size(); ++x) {
    for (NodeId v = 0; v < dag.size(); ++v) {
      std::uint64_t cfg = 0;
      int j = 0;
      for (NodeId p : dag.parents(v)) cfg |= ((x >> p) & 1u) << j++;
      const double p1 = conditionals[v][cfg];
      t.probs[x] *= ((x >> v) & 1u) ? p1 : 1 - p1;
    }
  }
  return t;
}

/// max |P(a,b,c) P(c) - P(a,c) P(b,c)| over all assignments; zero iff a _||_ b | c.
inline double ci_discrepancy(const JointTable& t, NodeSet a, NodeSet b, NodeSet c) {
  const NodeSet abc = a | b | c;
  double worst = 0;
  for (std::uint64_t x = 0; x < t.probs.size(); ++x) {
    if ((x & ~abc.bits()) != 0) continue;
    const double pabc = t.marginal(abc, x);
    const double pc = t.marginal(c, x);
    const double pac = t.marginal(a | c, x);
    const double pbc = t.marginal(b | c, x);
    worst = std::max(worst, std::abs(pabc * pc - pac * pbc));
  }
  return worst;
}

inline bool table_independent(const JointTable& t, NodeSet a, NodeSet b, NodeSet c, double tol = 1e-12) {
  return ci_discrepancy(t, a, b, c) < tol;
}

/// Which of the pairwise and joint statements about i, h, k hold, and
/// whether the combination implications hold for this distribution.
struct CombinationReport {
  bool i_h = false;          // i _||_ h
  bool i_k = false;          // i _||_ k
  bool i_hk = false;         // i _||_ (h, k)
  bool i_h_given_k = false;  // i _||_ h | k
  bool i_k_given_h = false;  // i _||_ k | h
  bool upward_holds = true;    // (i_h and i_k) => i_hk
  bool downward_holds = true;  // (i_h_given_k and i_k_given_h) => i_hk
};

namespace detail {

template <class Indep>
CombinationReport combine(NodeId i, NodeId h, NodeId k, Indep indep) {
  const NodeSet si = NodeSet::single(i), sh = NodeSet::single(h), sk = NodeSet::single(k);
  CombinationReport r;
  r.i_h = indep(si, sh, NodeSet{});
  r.i_k = indep(si, sk, NodeSet{});
  r.i_hk = indep(si, sh | sk, NodeSet{});
  r.i_h_given_k = indep(si, sh, sk);
  r.i_k_given_h = indep(si, sk, sh);
  r.upward_holds = !(r.i_h && r.i_k) || r.i_hk;
  r.downward_holds = !(r.i_h_given_k && r.i_k_given_h) || r.i_hk;
  return r;
}

inline void require_distinct(NodeId i, NodeId h, NodeId k) {
  if (i == h || i == k || h == k) throw Error(ErrorCode::InvalidQuery, "three distinct variables are needed");
}

}  // namespace detail

inline CombinationReport check_combination_properties(const Matrix& sigma, NodeId i, NodeId h, NodeId k,
                                                      double tol = 1e-10) {
  detail::require_distinct(i, h, k);
  return detail::combine(i, h, k, [&](NodeSet a, NodeSet b, NodeSet c) {
    return max_abs_cond_corr(sigma, a, b, c) < tol;
  });
}

inline CombinationReport check_combination_properties(const GaussianSystem& s, NodeId i, NodeId h, NodeId k,
                                                      double tol = 1e-10) {
  return check_combination_properties(s.covariance(), i, h, k, tol);
}

inline CombinationReport check_combination_properties(const JointTable& t, NodeId i, NodeId h, NodeId k,
                                                      double tol = 1e-12) {
  detail::require_distinct(i, h, k);
  return detail::combine(i, h, k, [&](NodeSet a, NodeSet b, NodeSet c) { return table_independent(t, a, b, c, tol); });
}

/// For i and k both dependent on `inner`: at most one of i _||_ k and
/// i _||_ k | inner may hold. `distance` is how far the pair of statements is
/// from holding jointly (the larger of the two discrepancies).
struct TransitivityReport {
  bool marginal_independent = false;
  bool conditional_independent = false;
  bool violated = false;
  double distance = 0;
};

inline TransitivityReport check_singleton_transitivity(const Matrix& sigma, NodeId i, NodeId k, NodeId inner,
                                                       double tol = 1e-10) {
  detail::require_distinct(i, k, inner);
  if (std::abs(partial_corr(sigma, i, inner, {})) <= tol || std::abs(partial_corr(sigma, k, inner, {})) <= tol) {
    throw Error(ErrorCode::PreconditionDependenceTooWeak, "both variables must depend on the inner one");
  }
  TransitivityReport r;
  const double marg = std::abs(partial_corr(sigma, i, k, {}));
  const double cond = std::abs(partial_corr(sigma, i, k, NodeSet::single(inner)));
  r.marginal_independent = marg < tol;
  r.conditional_independent = cond < tol;
  r.violated = r.marginal_independent && r.conditional_independent;
  r.distance = std::max(marg, cond);
  return r;
}

inline TransitivityReport check_singleton_transitivity(const GaussianSystem& s, NodeId i, NodeId k, NodeId inner,
                                                       double tol = 1e-10) {
  return check_singleton_transitivity(s.covariance(), i, k, inner, tol);
}

inline TransitivityReport check_singleton_transitivity(const JointTable& t, NodeId i, NodeId k, NodeId inner,
                                                       double tol = 1e-12) {
  detail::require_distinct(i, k, inner);
  const NodeSet si = NodeSet::single(i), sk = NodeSet::single(k), sv = NodeSet::single(inner);
  if (ci_discrepancy(t, si, sv, {}) <= tol || ci_discrepancy(t, sk, sv, {}) <= tol) {
    throw Error(ErrorCode::PreconditionDependenceTooWeak, "both variables must depend on the inner one");
  }
  TransitivityReport r;
  const double marg = ci_discrepancy(t, si, sk, {});
  const double cond = ci_discrepancy(t, si, sk, sv);
  r.marginal_independent = marg < tol;
  r.conditional_independent = cond < tol;
  r.violated = r.marginal_independent && r.conditional_independent;
  r.distance = std::max(marg, cond);
  return r;
}

}  // namespace rgraph
