#include "nbwalk/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace nbwalk {

namespace {

std::vector<std::vector<std::size_t>> support_lists(const Matrix& P) {
  const auto m = static_cast<std::size_t>(P.rows());
  std::vector<std::vector<std::size_t>> out(m);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      if (P(a, b) > 0.0) out[a].push_back(b);
    }
  }
  return out;
}

// Iterative Tarjan; returns the component id of every state.
std::vector<std::size_t> strongly_connected(const std::vector<std::vector<std::size_t>>& adj,
                                            std::size_t& count) {
  const std::size_t m = adj.size();
  constexpr std::size_t unset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> order(m, unset), low(m, 0), comp(m, unset);
  std::vector<bool> on_stack(m, false);
  std::vector<std::size_t> stack;
  std::vector<std::pair<std::size_t, std::size_t>> frames;
  std::size_t next_order = 0;
  count = 0;

  for (std::size_t root = 0; root < m; ++root) {
    if (order[root] != unset) continue;
    frames.emplace_back(root, 0);
    order[root] = low[root] = next_order++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      auto& [v, pos] = frames.back();
      if (pos < adj[v].size()) {
        const std::size_t w = adj[v][pos++];
        if (order[w] == unset) {
          order[w] = low[w] = next_order++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], order[w]);
        }
        continue;
      }
      const std::size_t done = v;
      frames.pop_back();
      if (!frames.empty()) {
        const std::size_t parent = frames.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
      if (low[done] == order[done]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = count;
        } while (w != done);
        ++count;
      }
    }
  }
  return comp;
}

Matrix restrict(const Matrix& P, const std::vector<std::size_t>& states) {
  const auto m = static_cast<Eigen::Index>(states.size());
  Matrix out(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) out(a, b) = P(states[a], states[b]);
  }
  return out;
}

Vector restrict(const Vector& v, const std::vector<std::size_t>& states) {
  Vector out(static_cast<Eigen::Index>(states.size()));
  for (std::size_t a = 0; a < states.size(); ++a) out[a] = v[states[a]];
  return out;
}

// Stationary law of an irreducible stochastic matrix.
Vector irreducible_stationary(const Matrix& P) {
  const auto m = P.rows();
  if (m == 1) return Vector::Ones(1);
  Matrix A = P.transpose() - Matrix::Identity(m, m);
  A.row(m - 1).setOnes();
  Vector b = Vector::Zero(m);
  b[m - 1] = 1.0;
  Vector pi = A.partialPivLu().solve(b);
  if (!pi.allFinite()) throw OracleError("stationary solve is singular");
  return pi;
}

// sigma^2 of g under an irreducible chain (P, pi).
double irreducible_variance(const Matrix& P, const Vector& pi, const Vector& g) {
  const auto m = P.rows();
  const Vector centered = g.array() - pi.dot(g);
  Matrix M = Matrix::Identity(m, m) - P + Vector::Ones(m) * pi.transpose();
  Eigen::PartialPivLU<Matrix> lu(M);
  const Vector y = lu.solve(centered);
  if (!y.allFinite() || (M * y - centered).cwiseAbs().maxCoeff() > 1e-8) {
    throw OracleError("fundamental matrix solve is singular; chain is not ergodic");
  }
  const Vector weighted = pi.cwiseProduct(centered);
  const double s = 2.0 * weighted.dot(y) - weighted.dot(centered);
  if (s < -1e-10) throw OracleError("negative asymptotic variance " + std::to_string(s));
  return std::max(0.0, s);
}

double chain_variance(const Matrix& P, const Vector& pi, const StateClasses& classes,
                      const Vector& g) {
  if (g.size() != P.rows()) throw OracleError("function size does not match the chain");
  if (classes.size() == 1 && classes.front().size() == static_cast<std::size_t>(P.rows())) {
    return irreducible_variance(P, pi, g);
  }
  const double mean = pi.dot(g);
  double total = 0.0;
  for (const auto& states : classes) {
    const Vector pc = restrict(pi, states);
    const double mass = pc.sum();
    if (mass <= 0.0) continue;
    const Vector piv = pc / mass;
    const Vector gc = restrict(g, states);
    if (std::abs(piv.dot(gc) - mean) > kInequalitySlack) {
      return std::numeric_limits<double>::infinity();
    }
    total += mass * irreducible_variance(restrict(P, states), piv, gc);
  }
  return total;
}

void check_gamma(const Vector& gamma) {
  for (Eigen::Index i = 0; i < gamma.size(); ++i) {
    if (!(gamma[i] > 0.0) || gamma[i] > 1.0 + kIdentityTolerance) {
      throw OracleError("leaving rate gamma(" + std::to_string(i) + ") = " +
                        std::to_string(gamma[i]) + " is outside (0,1]");
    }
  }
}

void check_node_guard(const Graph& g) {
  if (g.node_count() > kMaxOracleNodes) {
    throw OracleError("graph has " + std::to_string(g.node_count()) +
                      " nodes; the exact oracle is limited to " + std::to_string(kMaxOracleNodes));
  }
}

AugmentedChain new_augmented(std::size_t n, std::vector<EdgeState> omega) {
  if (omega.size() > kMaxOracleEdgeStates) {
    throw OracleError("augmented space has " + std::to_string(omega.size()) +
                      " states; the exact oracle is limited to " +
                      std::to_string(kMaxOracleEdgeStates));
  }
  AugmentedChain aug;
  aug.node_count = n;
  aug.omega = std::move(omega);
  for (std::size_t a = 0; a < aug.omega.size(); ++a) {
    aug.index.emplace(std::pair{aug.omega[a].from, aug.omega[a].to}, a);
  }
  const auto m = static_cast<Eigen::Index>(aug.omega.size());
  aug.P = Matrix::Zero(m, m);
  return aug;
}

void solve_augmented(AugmentedChain& aug, const Vector& reference) {
  auto st = stationary_distribution(aug.P, reference);
  aug.pi = std::move(st.pi);
  aug.irreducible = st.irreducible;
  aug.classes = std::move(st.classes);
}

}  // namespace

StateClasses closed_classes(const Matrix& P) {
  const auto adj = support_lists(P);
  std::size_t count = 0;
  const auto comp = strongly_connected(adj, count);
  std::vector<bool> closed(count, true);
  for (std::size_t a = 0; a < adj.size(); ++a) {
    for (std::size_t b : adj[a]) {
      if (comp[a] != comp[b]) closed[comp[a]] = false;
    }
  }
  std::vector<std::vector<std::size_t>> members(count);
  for (std::size_t a = 0; a < adj.size(); ++a) members[comp[a]].push_back(a);
  StateClasses out;
  for (std::size_t c = 0; c < count; ++c) {
    if (closed[c]) out.push_back(std::move(members[c]));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Stationary stationary_distribution(const Matrix& P, const std::optional<Vector>& reference) {
  if (P.rows() != P.cols() || P.rows() == 0) throw OracleError("transition matrix must be square");
  Stationary out;
  out.classes = closed_classes(P);
  const auto m = static_cast<std::size_t>(P.rows());
  out.irreducible = out.classes.size() == 1 && out.classes.front().size() == m;
  if (out.irreducible) {
    out.pi = irreducible_stationary(P);
    return out;
  }
  if (out.classes.size() > 1 && !reference) {
    throw OracleError("chain has " + std::to_string(out.classes.size()) +
                      " closed classes and no reference measure to weight them");
  }
  std::vector<double> mass(out.classes.size(), 1.0);
  if (out.classes.size() > 1) {
    double total = 0.0;
    for (std::size_t c = 0; c < out.classes.size(); ++c) {
      mass[c] = restrict(*reference, out.classes[c]).sum();
      total += mass[c];
    }
    if (!(total > 0.0)) throw OracleError("reference measure puts no mass on any closed class");
    for (double& x : mass) x /= total;
  }
  out.pi = Vector::Zero(P.rows());
  for (std::size_t c = 0; c < out.classes.size(); ++c) {
    const auto& states = out.classes[c];
    const Vector pc = irreducible_stationary(restrict(P, states));
    for (std::size_t a = 0; a < states.size(); ++a) out.pi[states[a]] = mass[c] * pc[a];
  }
  return out;
}

ChainMatrix make_chain(Matrix P, const std::optional<Vector>& reference) {
  auto st = stationary_distribution(P, reference);
  return {std::move(P), std::move(st.pi), st.irreducible, std::move(st.classes)};
}

ChainMatrix build_transition_matrix(const Graph& g, WalkerKind kind, const GenericKernel* kernel) {
  check_node_guard(g);
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Matrix P = Matrix::Zero(n, n);
  switch (kind) {
    case WalkerKind::SRW:
      for (NodeId i = 0; i < g.node_count(); ++i) {
        for (NodeId j : g.neighbors(i)) P(i, j) = 1.0 / g.degree(i);
      }
      break;
    case WalkerKind::MHRW:
      for (NodeId i = 0; i < g.node_count(); ++i) {
        double moved = 0.0;
        for (NodeId j : g.neighbors(i)) {
          P(i, j) = std::min(1.0 / g.degree(i), 1.0 / g.degree(j));
          moved += P(i, j);
        }
        P(i, i) = 1.0 - moved;
      }
      break;
    case WalkerKind::GENERIC_MH: {
      if (!kernel) throw OracleError("generic MH matrix needs a kernel");
      const auto& target = kernel->target;
      if (target.size() != g.node_count()) {
        throw OracleError("target distribution size does not match the graph");
      }
      for (NodeId i = 0; i < g.node_count(); ++i) {
        if (!(target.weight(i) > 0.0)) {
          throw OracleError("the exact oracle needs a strictly positive target");
        }
      }
      for (NodeId i = 0; i < g.node_count(); ++i) {
        double moved = 0.0;
        for (NodeId j : g.neighbors(i)) {
          const double q = kernel->proposal.probability(g, i, j);
          const double back = kernel->proposal.probability(g, j, i);
          P(i, j) = std::min(q, back * target.weight(j) / target.weight(i));
          moved += P(i, j);
        }
        P(i, i) = 1.0 - moved;
      }
      break;
    }
    default:
      throw OracleError("no node-level transition matrix for walker kind " +
                        std::string(to_string(kind)));
  }
  return make_chain(std::move(P));
}

GenericKernel mhrw_da_kernel(const Graph& g) {
  return GenericKernel{TargetDistribution::uniform(g), ProposalRule::simple_random_walk(),
                       EdgeProposalRule::non_backtracking()};
}

EmbeddedChain embedded_chain(const ChainMatrix& base) {
  const auto n = base.P.rows();
  Vector gamma = Vector::Ones(n) - base.P.diagonal();
  check_gamma(gamma);
  Matrix Pt = base.P;
  for (Eigen::Index i = 0; i < n; ++i) {
    Pt(i, i) = 0.0;
    Pt.row(i) /= gamma[i];
  }
  return {make_chain(std::move(Pt)), std::move(gamma)};
}

std::optional<std::size_t> AugmentedChain::index_of(NodeId i, NodeId j) const {
  auto it = index.find({i, j});
  if (it == index.end()) return std::nullopt;
  return it->second;
}

double delayed_acceptance(const Graph& g, const Matrix& mh, const EdgeProposalRule& edge,
                          NodeId i, NodeId j, NodeId k) {
  if (k == i) return 1.0;
  const double forward = edge.probability(g, i, j, k);
  const double pjk = mh(j, k);
  if (!(forward > 0.0) || !(pjk > 0.0)) return 0.0;
  const double pji = mh(j, i);
  const double t = pjk * pjk * edge.probability(g, k, j, i) / (pji * pji * forward);
  return std::min(1.0, t);
}

AugmentedChain build_augmented_chain(const Graph& g, AugmentedKind kind,
                                     const GenericKernel* kernel) {
  check_node_guard(g);
  if (kind == AugmentedKind::NBRW) {
    const ChainMatrix base = build_transition_matrix(g, WalkerKind::SRW);
    std::vector<EdgeState> omega;
    for (NodeId i = 0; i < g.node_count(); ++i) {
      for (NodeId j : g.neighbors(i)) omega.push_back({i, j});
    }
    AugmentedChain aug = new_augmented(g.node_count(), std::move(omega));
    Vector reference(static_cast<Eigen::Index>(aug.omega.size()));
    for (std::size_t a = 0; a < aug.omega.size(); ++a) {
      const auto [i, j] = aug.omega[a];
      reference[a] = base.pi[i] * base.P(i, j);
      const auto d = g.degree(j);
      if (d == 1) {
        aug.P(a, *aug.index_of(j, i)) = 1.0;
        continue;
      }
      for (NodeId k : g.neighbors(j)) {
        if (k != i) aug.P(a, *aug.index_of(j, k)) = 1.0 / (d - 1);
      }
    }
    solve_augmented(aug, reference);
    return aug;
  }

  const GenericKernel fallback = kernel ? GenericKernel(*kernel) : mhrw_da_kernel(g);
  if (!fallback.edge_proposal) throw OracleError("delayed acceptance needs an edge proposal");
  const EdgeProposalRule& edge = *fallback.edge_proposal;
  const ChainMatrix base = build_transition_matrix(g, WalkerKind::GENERIC_MH, &fallback);
  const EmbeddedChain emb = embedded_chain(base);
  const Matrix& Pt = emb.chain.P;

  std::vector<EdgeState> omega;
  for (NodeId i = 0; i < g.node_count(); ++i) {
    for (NodeId j : g.neighbors(i)) {
      if (Pt(i, j) > 0.0) omega.push_back({i, j});
    }
  }
  AugmentedChain aug = new_augmented(g.node_count(), std::move(omega));
  Vector reference(static_cast<Eigen::Index>(aug.omega.size()));
  for (std::size_t a = 0; a < aug.omega.size(); ++a) {
    const auto [i, j] = aug.omega[a];
    reference[a] = emb.chain.pi[i] * Pt(i, j);
    const auto back = aug.index_of(j, i);
    if (!back) throw OracleError("embedded chain support is not symmetric");
    // Mass of the accepted backtrack that ends up going back after all.
    double returned = edge.probability(g, i, j, i);
    for (NodeId k : g.neighbors(j)) {
      if (k == i) continue;
      const double q = edge.probability(g, i, j, k);
      const double accept = delayed_acceptance(g, base.P, edge, i, j, k);
      returned += q * (1.0 - accept);
      if (auto b = aug.index_of(j, k)) aug.P(a, *b) = Pt(j, k) + Pt(j, i) * q * accept;
    }
    aug.P(a, *back) = Pt(j, i) * returned;
  }
  solve_augmented(aug, reference);
  return aug;
}

AugmentedChain mhda_time_chain(const AugmentedChain& embedded, const Vector& gamma) {
  check_gamma(gamma);
  AugmentedChain aug = new_augmented(embedded.node_count, embedded.omega);
  Vector reference(static_cast<Eigen::Index>(aug.omega.size()));
  for (std::size_t a = 0; a < aug.omega.size(); ++a) {
    const double rate = gamma[aug.omega[a].to];
    aug.P.row(a) = rate * embedded.P.row(a);
    aug.P(a, a) += 1.0 - rate;
    reference[a] = embedded.pi[a] / rate;
  }
  solve_augmented(aug, reference);
  return aug;
}

Vector node_marginal(const AugmentedChain& chain) {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(chain.node_count));
  for (std::size_t a = 0; a < chain.omega.size(); ++a) out[chain.omega[a].to] += chain.pi[a];
  return out;
}

Vector lift(const AugmentedChain& chain, const Vector& f) {
  if (static_cast<std::size_t>(f.size()) != chain.node_count) {
    throw OracleError("function size does not match the node count");
  }
  Vector out(static_cast<Eigen::Index>(chain.omega.size()));
  for (std::size_t a = 0; a < chain.omega.size(); ++a) out[a] = f[chain.omega[a].to];
  return out;
}

NealReport check_neal_conditions(const Matrix& base, const AugmentedChain& aug) {
  std::vector<std::vector<std::size_t>> leaving(aug.node_count);
  for (std::size_t a = 0; a < aug.omega.size(); ++a) leaving[aug.omega[a].from].push_back(a);

  NealReport report;
  for (std::size_t a = 0; a < aug.omega.size(); ++a) {
    const auto [i, j] = aug.omega[a];
    const auto ji = aug.index_of(j, i);
    for (std::size_t b : leaving[j]) {
      const NodeId k = aug.omega[b].to;
      if (k == i) continue;
      const auto kj = aug.index_of(k, j);
      if (!ji || !kj) throw OracleError("augmented space is not closed under reversal");
      const double lhs = base(j, i) * aug.P(a, b);
      const double rhs = base(j, k) * aug.P(*kj, *ji);
      report.balance = std::max(report.balance, std::abs(lhs - rhs));
      report.inequality = std::max(report.inequality, base(j, k) - aug.P(a, b));
      ++report.pairs;
    }
  }
  return report;
}

ReciprocityReport check_acceptance_reciprocity(const Graph& g, const Matrix& mh,
                                               const EdgeProposalRule& edge) {
  ReciprocityReport report;
  for (NodeId j = 0; j < g.node_count(); ++j) {
    for (NodeId i : g.neighbors(j)) {
      for (NodeId k : g.neighbors(j)) {
        if (k == i || !(mh(j, i) > 0.0) || !(mh(j, k) > 0.0)) continue;
        const double q_forward = edge.probability(g, i, j, k);
        const double q_reverse = edge.probability(g, k, j, i);
        if (!(q_forward > 0.0) || !(q_reverse > 0.0)) continue;
        const double forward = delayed_acceptance(g, mh, edge, i, j, k);
        const double reverse = delayed_acceptance(g, mh, edge, k, j, i);
        const double t = mh(j, k) * mh(j, k) * q_reverse / (mh(j, i) * mh(j, i) * q_forward);
        report.residual = std::max(report.residual, std::abs(forward - t * reverse));
        report.min_acceptance = std::min(report.min_acceptance, forward);
        report.max_acceptance = std::max(report.max_acceptance, forward);
        ++report.pairs;
      }
    }
  }
  return report;
}

double acceptance_function_residual() {
  // A' is min{1, x} of the reverse ratio T(e_kj,e_ji); as a function of the
  // forward ratio T(e_ij,e_jk) = 1/x it reads F(x) = min{1, 1/x}.
  auto F = [](double x) { return std::min(1.0, 1.0 / x); };
  double worst = 0.0;
  for (int e = -60; e <= 60; ++e) {
    const double x = std::pow(10.0, e / 10.0);
    worst = std::max(worst, std::abs(F(x) - F(1.0 / x) / x));
  }
  return worst;
}

double detailed_balance_residual(const Matrix& P, const Vector& pi) {
  double worst = 0.0;
  for (Eigen::Index a = 0; a < P.rows(); ++a) {
    for (Eigen::Index b = a + 1; b < P.cols(); ++b) {
      worst = std::max(worst, std::abs(pi[a] * P(a, b) - pi[b] * P(b, a)));
    }
  }
  return worst;
}

double row_sum_residual(const Matrix& P) {
  return (P.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

double stationarity_residual(const Matrix& P, const Vector& pi) {
  return (P.transpose() * pi - pi).cwiseAbs().maxCoeff();
}

double asymptotic_variance(const ChainMatrix& chain, const Vector& f) {
  return chain_variance(chain.P, chain.pi, chain.classes, f);
}

double asymptotic_variance(const AugmentedChain& chain, const Vector& f) {
  return chain_variance(chain.P, chain.pi, chain.classes, lift(chain, f));
}

double truncated_asymptotic_variance(const ChainMatrix& chain, const Vector& f, std::size_t lags) {
  if (!chain.irreducible) throw OracleError("truncated covariance sum needs an irreducible chain");
  const Vector centered = f.array() - chain.pi.dot(f);
  const Vector weighted = chain.pi.cwiseProduct(centered);
  double total = weighted.dot(centered);
  Vector v = centered;
  for (std::size_t k = 1; k <= lags; ++k) {
    v = chain.P * v;
    total += 2.0 * weighted.dot(v);
  }
  return total;
}

namespace {

Vector reweighted_function(const Vector& pi, const Vector& f, const Vector& u) {
  if (u.size() != f.size() || pi.size() != f.size()) {
    throw OracleError("re-weighting vectors have mismatched sizes");
  }
  const Vector un = u / u.sum();
  const double target_mean = un.dot(f);
  Vector h(f.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    if (!(pi[i] > 0.0)) throw OracleError("re-weighting needs pi > 0 on every node");
    h[i] = un[i] / pi[i] * (f[i] - target_mean);
  }
  return h;
}

VarianceReport semi_markov_report(const Vector& pi_tilde, const Vector& gamma, const Vector& f,
                                  const std::function<double(const Vector&)>& embedded_variance) {
  check_gamma(gamma);
  if (pi_tilde.size() != gamma.size() || f.size() != gamma.size()) {
    throw OracleError("semi-Markov inputs have mismatched sizes");
  }
  const Vector pi = semi_markov_stationary(pi_tilde, gamma);
  const double mean = pi.dot(f);
  const Vector centered = f.array() - mean;
  const Vector h = centered.cwiseQuotient(gamma);
  const double mean_holding = pi_tilde.dot(gamma.cwiseInverse());

  VarianceReport report;
  report.gamma_vec = gamma;
  report.Gamma = embedded_variance(h) / (mean_holding * mean_holding);
  double inner = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double var_xi = (1.0 - gamma[i]) / (gamma[i] * gamma[i]);
    inner += pi[i] * var_xi * centered[i] * centered[i] * gamma[i];
  }
  report.Delta = pi.dot(gamma) * inner;
  report.sigma2 = report.Gamma + report.Delta;
  report.per_time_step = report.sigma2 * mean_holding;
  return report;
}

}  // namespace

double reweighted_asymptotic_variance(const ChainMatrix& chain, const Vector& f, const Vector& u) {
  return asymptotic_variance(chain, reweighted_function(chain.pi, f, u));
}

double reweighted_asymptotic_variance(const AugmentedChain& chain, const Vector& f,
                                      const Vector& u) {
  return asymptotic_variance(chain, reweighted_function(node_marginal(chain), f, u));
}

VarianceReport semi_markov_asymptotic_variance(const ChainMatrix& embedded, const Vector& gamma,
                                               const Vector& f) {
  return semi_markov_report(embedded.pi, gamma, f,
                            [&](const Vector& h) { return asymptotic_variance(embedded, h); });
}

VarianceReport semi_markov_asymptotic_variance(const AugmentedChain& embedded,
                                               const Vector& gamma, const Vector& f) {
  return semi_markov_report(node_marginal(embedded), gamma, f,
                            [&](const Vector& h) { return asymptotic_variance(embedded, h); });
}

Vector semi_markov_stationary(const Vector& pi_tilde, const Vector& gamma) {
  check_gamma(gamma);
  Vector pi = pi_tilde.cwiseQuotient(gamma);
  return pi / pi.sum();
}

}  // namespace nbwalk

namespace nbwalk {

namespace {

CheckResult at_most(std::string name, double value, double tolerance) {
  return {std::move(name), value, tolerance, "<=", value <= tolerance};
}

CheckResult above(std::string name, double value, double threshold) {
  return {std::move(name), value, threshold, ">", value > threshold};
}

double max_abs_diff(const Vector& a, const Vector& b) { return (a - b).cwiseAbs().maxCoeff(); }

double relative_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

std::vector<std::string> oracle_check_groups() {
  return {"stationarity", "balance", "neal", "reciprocity", "variance"};
}

std::vector<CheckResult> run_oracle_checks(const Graph& g, const std::vector<std::string>& groups) {
  auto wants = [&](std::string_view name) {
    return std::find(groups.begin(), groups.end(), name) != groups.end();
  };
  for (const auto& name : groups) {
    const auto known = oracle_check_groups();
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw OracleError("unknown oracle check group '" + name + "'");
    }
  }
  if (!is_connected(g)) throw OracleError("oracle checks need a connected graph");

  const auto n = static_cast<Eigen::Index>(g.node_count());
  const ChainMatrix srw = build_transition_matrix(g, WalkerKind::SRW);
  const ChainMatrix mhrw = build_transition_matrix(g, WalkerKind::MHRW);
  const EmbeddedChain emb = embedded_chain(mhrw);
  const AugmentedChain nbrw = build_augmented_chain(g, AugmentedKind::NBRW);
  const AugmentedChain mhda = build_augmented_chain(g, AugmentedKind::MHDA);
  const AugmentedChain mhda_time = mhda_time_chain(mhda, emb.gamma);

  Vector degree_law(n);
  for (NodeId v = 0; v < g.node_count(); ++v) degree_law[v] = g.degree(v) / (2.0 * g.edge_count());
  const Vector uniform = Vector::Constant(n, 1.0 / static_cast<double>(n));

  std::vector<CheckResult> out;
  if (wants("stationarity")) {
    double rows = 0.0;
    for (const Matrix* P : {&srw.P, &mhrw.P, &emb.chain.P, &nbrw.P, &mhda.P, &mhda_time.P}) {
      rows = std::max(rows, row_sum_residual(*P));
    }
    out.push_back(at_most("row_sums", rows, kIdentityTolerance));
    double fixed_point = 0.0, mass = 0.0;
    for (auto [P, pi] : {std::pair{&srw.P, &srw.pi}, {&mhrw.P, &mhrw.pi}, {&emb.chain.P, &emb.chain.pi},
                         {&nbrw.P, &nbrw.pi}, {&mhda.P, &mhda.pi}, {&mhda_time.P, &mhda_time.pi}}) {
      fixed_point = std::max(fixed_point, stationarity_residual(*P, *pi));
      mass = std::max(mass, std::abs(pi->sum() - 1.0));
    }
    out.push_back(at_most("stationary_fixed_point", fixed_point, kStationaryTolerance));
    out.push_back(at_most("stationary_mass", mass, kIdentityTolerance));
    out.push_back(at_most("srw_degree_law", max_abs_diff(srw.pi, degree_law), kStationaryTolerance));
    out.push_back(at_most("mhrw_uniform", max_abs_diff(mhrw.pi, uniform), kStationaryTolerance));
    const Vector edge_uniform =
        Vector::Constant(static_cast<Eigen::Index>(nbrw.omega.size()), 0.5 / g.edge_count());
    out.push_back(at_most("nbrw_edge_uniform", max_abs_diff(nbrw.pi, edge_uniform),
                          kStationaryTolerance));
    out.push_back(at_most("nbrw_node_marginal", max_abs_diff(node_marginal(nbrw), degree_law),
                          kStationaryTolerance));
    out.push_back(at_most("mh_semi_markov_marginal",
                          max_abs_diff(semi_markov_stationary(emb.chain.pi, emb.gamma), uniform),
                          kStationaryTolerance));
    Vector flow(static_cast<Eigen::Index>(mhda.omega.size()));
    for (std::size_t a = 0; a < mhda.omega.size(); ++a) {
      const auto [i, j] = mhda.omega[a];
      flow[a] = emb.chain.pi[i] * emb.chain.P(i, j);
    }
    out.push_back(at_most("mhda_edge_flow", max_abs_diff(mhda.pi, flow), kStationaryTolerance));
    out.push_back(at_most("mhda_semi_markov_marginal",
                          max_abs_diff(semi_markov_stationary(node_marginal(mhda), emb.gamma), uniform),
                          kStationaryTolerance));
    out.push_back(at_most("mhda_time_marginal", max_abs_diff(node_marginal(mhda_time), uniform),
                          kStationaryTolerance));
  }
  if (wants("balance")) {
    out.push_back(at_most("srw_detailed_balance", detailed_balance_residual(srw.P, srw.pi),
                          kIdentityTolerance));
    out.push_back(at_most("mhrw_detailed_balance", detailed_balance_residual(mhrw.P, mhrw.pi),
                          kIdentityTolerance));
    out.push_back(above("nbrw_nonreversible", detailed_balance_residual(nbrw.P, nbrw.pi), 1e-6));
    out.push_back(above("mhda_nonreversible", detailed_balance_residual(mhda.P, mhda.pi), 1e-6));
  }
  if (wants("neal")) {
    const NealReport nb = check_neal_conditions(srw.P, nbrw);
    const NealReport da = check_neal_conditions(emb.chain.P, mhda);
    out.push_back(at_most("nbrw_balance", nb.balance, kIdentityTolerance));
    out.push_back(at_most("nbrw_inequality", nb.inequality, kIdentityTolerance));
    out.push_back(at_most("mhda_balance", da.balance, kIdentityTolerance));
    out.push_back(at_most("mhda_inequality", da.inequality, kIdentityTolerance));
  }
  if (wants("reciprocity")) {
    const ReciprocityReport rec =
        check_acceptance_reciprocity(g, mhrw.P, EdgeProposalRule::non_backtracking());
    out.push_back(at_most("acceptance_reciprocity", rec.residual, kIdentityTolerance));
    const double outside = std::max({0.0, -rec.min_acceptance, rec.max_acceptance - 1.0});
    out.push_back(at_most("acceptance_range", outside, 0.0));
    out.push_back(at_most("acceptance_function", acceptance_function_residual(),
                          kIdentityTolerance));
  }
  if (wants("variance")) {
    double rw_gap = -std::numeric_limits<double>::infinity();
    double mh_gap = -std::numeric_limits<double>::infinity();
    double dual_mh = 0.0, dual_mhda = 0.0;
    for (const auto& [d, count] : degree_histogram(g)) {
      Vector f(n);
      for (NodeId v = 0; v < g.node_count(); ++v) f[v] = g.degree(v) == d ? 1.0 : 0.0;
      rw_gap = std::max(rw_gap, reweighted_asymptotic_variance(nbrw, f, uniform) -
                                    reweighted_asymptotic_variance(srw, f, uniform));
      const VarianceReport base = semi_markov_asymptotic_variance(emb.chain, emb.gamma, f);
      const VarianceReport improved = semi_markov_asymptotic_variance(mhda, emb.gamma, f);
      mh_gap = std::max(mh_gap, improved.sigma2 - base.sigma2);
      dual_mh = std::max(dual_mh, relative_gap(base.per_time_step, asymptotic_variance(mhrw, f)));
      if (std::isfinite(improved.sigma2)) {
        dual_mhda = std::max(dual_mhda,
                             relative_gap(improved.per_time_step, asymptotic_variance(mhda_time, f)));
      }
    }
    out.push_back(at_most("reweighted_variance_order", rw_gap, kInequalitySlack));
    out.push_back(at_most("semi_markov_variance_order", mh_gap, kInequalitySlack));
    out.push_back(at_most("mh_semi_markov_dual_route", dual_mh, kInequalitySlack));
    out.push_back(at_most("mhda_semi_markov_dual_route", dual_mhda, kInequalitySlack));
  }
  return out;
}

}  // namespace nbwalk
