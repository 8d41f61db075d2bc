#include <cmath>
#include <limits>

#include "doctest.h"
#include "fixtures.hpp"
#include "laws.hpp"
#include "nbwalk/oracle.hpp"

using namespace nbwalk;

namespace {

Vector degree_indicator(const Graph& g, std::uint32_t d) {
  Vector f(static_cast<Eigen::Index>(g.node_count()));
  for (NodeId v = 0; v < g.node_count(); ++v) f[v] = g.degree(v) == d ? 1.0 : 0.0;
  return f;
}

// Var_pi(f) + 2 sum_k Cov(f(X_0), f(X_k)) by explicit matrix powers.
double brute_force_variance(const Matrix& P, const Vector& pi, const Vector& f, int lags) {
  const double mean = pi.dot(f);
  const Vector centered = f.array() - mean;
  double total = pi.dot(centered.cwiseProduct(centered));
  Vector pk = centered;
  for (int k = 1; k <= lags; ++k) {
    pk = P * pk;
    total += 2.0 * pi.dot(centered.cwiseProduct(pk));
  }
  return total;
}

}  // namespace

TEST_CASE("SRW on the star has the degree law") {
  const ChainMatrix srw = build_transition_matrix(fixtures::star(), WalkerKind::SRW);
  CHECK(srw.irreducible);
  CHECK(srw.pi[0] == doctest::Approx(0.5).epsilon(1e-12));
  for (int leaf = 1; leaf <= 3; ++leaf) CHECK(srw.pi[leaf] == doctest::Approx(1.0 / 6).epsilon(1e-12));
}

TEST_CASE("built matrices match the independent closed-form rows") {
  for (const auto& [name, g] : fixtures::small_fixtures()) {
    const ChainMatrix srw = build_transition_matrix(g, WalkerKind::SRW);
    const ChainMatrix mhrw = build_transition_matrix(g, WalkerKind::MHRW);
    for (NodeId v = 0; v < g.node_count(); ++v) {
      const auto a = fixtures::one_step_row(g, WalkerKind::SRW, std::nullopt, v);
      const auto b = fixtures::one_step_row(g, WalkerKind::MHRW, std::nullopt, v);
      for (NodeId u = 0; u < g.node_count(); ++u) {
        CHECK(srw.P(v, u) == doctest::Approx(a[u]).epsilon(1e-14));
        CHECK(mhrw.P(v, u) == doctest::Approx(b[u]).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("augmented chains match the closed-form rows") {
  for (const auto& [name, g] : fixtures::small_fixtures()) {
    const AugmentedChain nbrw = build_augmented_chain(g, AugmentedKind::NBRW);
    CHECK(nbrw.omega.size() == 2 * g.edge_count());
    for (std::size_t a = 0; a < nbrw.omega.size(); ++a) {
      const auto [i, j] = nbrw.omega[a];
      const auto row = fixtures::one_step_row(g, WalkerKind::NBRW, i, j);
      for (NodeId k = 0; k < g.node_count(); ++k) {
        const auto b = nbrw.index_of(j, k);
        CHECK((b ? nbrw.P(a, *b) : 0.0) == doctest::Approx(row[k]).epsilon(1e-14));
      }
    }

    // The MHRW-DA walker seen at every step: staying plus the embedded moves.
    const ChainMatrix mhrw = build_transition_matrix(g, WalkerKind::MHRW);
    const EmbeddedChain emb = embedded_chain(mhrw);
    const AugmentedChain time =
        mhda_time_chain(build_augmented_chain(g, AugmentedKind::MHDA), emb.gamma);
    for (std::size_t a = 0; a < time.omega.size(); ++a) {
      const auto [i, j] = time.omega[a];
      const auto row = fixtures::one_step_row(g, WalkerKind::MHRW_DA, i, j);
      for (NodeId k = 0; k < g.node_count(); ++k) {
        const double p = k == j ? time.P(a, a) : (time.index_of(j, k) ? time.P(a, *time.index_of(j, k)) : 0.0);
        CHECK(p == doctest::Approx(row[k]).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("second-stage acceptance example and same-edge return") {
  const Graph g = Graph::from_edges(
      6, std::vector<std::pair<NodeId, NodeId>>{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {3, 5}});
  const ChainMatrix mhrw = build_transition_matrix(g, WalkerKind::MHRW);
  const auto nb = EdgeProposalRule::non_backtracking();
  CHECK(delayed_acceptance(g, mhrw.P, nb, 1, 2, 3) == doctest::Approx(4.0 / 9).epsilon(1e-15));
  CHECK(delayed_acceptance(g, mhrw.P, nb, 1, 2, 1) == 1.0);
  CHECK(delayed_acceptance(g, mhrw.P, nb, 3, 2, 1) == 1.0);
}

TEST_CASE("i.i.d. chain variance is the plain variance") {
  Vector pi(4);
  pi << 0.1, 0.2, 0.3, 0.4;
  Matrix P(4, 4);
  for (int r = 0; r < 4; ++r) P.row(r) = pi.transpose();
  const ChainMatrix chain = make_chain(P);
  Vector f(4);
  f << 1.0, -2.0, 0.5, 3.0;
  const double mean = pi.dot(f);
  const double var = pi.dot((f.array() - mean).square().matrix());
  CHECK(asymptotic_variance(chain, f) == doctest::Approx(var).epsilon(1e-12));
  CHECK(truncated_asymptotic_variance(chain, f, 10) == doctest::Approx(var).epsilon(1e-12));
}

TEST_CASE("constant functions have zero variance") {
  for (const auto& [name, g] : fixtures::small_fixtures()) {
    const auto n = static_cast<Eigen::Index>(g.node_count());
    const Vector one = Vector::Ones(n);
    const ChainMatrix mhrw = build_transition_matrix(g, WalkerKind::MHRW);
    CHECK(std::abs(asymptotic_variance(mhrw, one)) < 1e-12);
    CHECK(std::abs(asymptotic_variance(build_augmented_chain(g, AugmentedKind::NBRW), one)) < 1e-12);
    const EmbeddedChain emb = embedded_chain(mhrw);
    CHECK(std::abs(semi_markov_asymptotic_variance(emb.chain, emb.gamma, one).sigma2) < 1e-12);
  }
}

TEST_CASE("fundamental matrix agrees with explicit lag sums") {
  for (const Graph& g : fixtures::random_family(5, 404)) {
    const ChainMatrix mhrw = build_transition_matrix(g, WalkerKind::MHRW);
    const ChainMatrix srw = build_transition_matrix(g, WalkerKind::SRW);
    for (const auto& [d, count] : degree_histogram(g)) {
      const Vector f = degree_indicator(g, d);
      const double exact = asymptotic_variance(mhrw, f);
      CHECK(exact == doctest::Approx(brute_force_variance(mhrw.P, mhrw.pi, f, 4000)).epsilon(1e-9));
      CHECK(truncated_asymptotic_variance(mhrw, f) == doctest::Approx(exact).epsilon(1e-9));
      // Lazy version keeps bipartite SRW chains aperiodic.
      const ChainMatrix lazy = make_chain(0.5 * (srw.P + Matrix::Identity(srw.P.rows(), srw.P.cols())));
      CHECK(asymptotic_variance(lazy, f) ==
            doctest::Approx(brute_force_variance(lazy.P, lazy.pi, f, 4000)).epsilon(1e-9));
    }
  }
}

TEST_CASE("no holding means no sojourn term") {
  // On a regular graph MHRW never rejects, so gamma = 1 and Delta vanishes.
  const Graph ring = fixtures::cycle(7);
  const ChainMatrix mhrw = build_transition_matrix(ring, WalkerKind::MHRW);
  const EmbeddedChain emb = embedded_chain(mhrw);
  CHECK((emb.gamma.array() - 1.0).abs().maxCoeff() < 1e-15);
  Vector f = Vector::Zero(7);
  f[0] = 1.0;
  f[3] = -1.0;
  const VarianceReport r = semi_markov_asymptotic_variance(emb.chain, emb.gamma, f);
  CHECK(r.Delta == doctest::Approx(0.0));
  CHECK(r.Gamma == doctest::Approx(asymptotic_variance(mhrw, f)).epsilon(1e-12));
  CHECK(r.per_time_step == doctest::Approx(r.sigma2).epsilon(1e-12));
}

TEST_CASE("semi-Markov stationary law with constant rates") {
  Vector pi(3);
  pi << 0.2, 0.3, 0.5;
  const Vector same = semi_markov_stationary(pi, Vector::Constant(3, 0.4));
  CHECK((same - pi).cwiseAbs().maxCoeff() < 1e-15);
  Vector gamma(3);
  gamma << 1.0, 0.5, 0.25;
  const Vector slow = semi_markov_stationary(pi, gamma);
  CHECK(slow.sum() == doctest::Approx(1.0));
  CHECK(slow[2] / slow[0] == doctest::Approx(0.5 / 0.25 / (0.2 / 1.0)));
  CHECK_THROWS_AS(semi_markov_stationary(pi, Vector::Constant(3, 0.0)), OracleError);
}

TEST_CASE("NBRW on the triangle rotates with zero variance") {
  const Graph tri = fixtures::triangle();
  const AugmentedChain nbrw = build_augmented_chain(tri, AugmentedKind::NBRW);
  CHECK_FALSE(nbrw.irreducible);
  CHECK(nbrw.classes.size() == 2);
  const ChainMatrix srw = build_transition_matrix(tri, WalkerKind::SRW);
  const Vector u = Vector::Constant(3, 1.0 / 3);
  Vector f(3);
  f << 1.0, 0.0, 0.0;
  const double base = reweighted_asymptotic_variance(srw, f, u);
  const double improved = reweighted_asymptotic_variance(nbrw, f, u);
  CHECK(std::isfinite(improved));
  CHECK(improved <= base + kInequalitySlack);
  // Deterministic rotation: partial sums of a centred indicator stay bounded.
  CHECK(improved == doctest::Approx(0.0));
}

TEST_CASE("reducible chain: classes, weights and diverging means") {
  Matrix P = Matrix::Zero(4, 4);
  P(0, 1) = P(1, 0) = 1.0;
  P(2, 3) = P(3, 2) = 1.0;
  CHECK(closed_classes(P) == StateClasses{{0, 1}, {2, 3}});
  CHECK_THROWS_AS(stationary_distribution(P), OracleError);
  Vector ref(4);
  ref << 0.1, 0.3, 0.2, 0.4;
  const Stationary st = stationary_distribution(P, ref);
  CHECK_FALSE(st.irreducible);
  CHECK(st.pi[0] == doctest::Approx(0.2));
  CHECK(st.pi[3] == doctest::Approx(0.3));

  const ChainMatrix chain = make_chain(P, ref);
  Vector equal_means(4);
  equal_means << 1.0, 0.0, 1.0, 0.0;
  CHECK(std::isfinite(asymptotic_variance(chain, equal_means)));
  Vector split(4);
  split << 1.0, 1.0, 0.0, 0.0;
  CHECK(asymptotic_variance(chain, split) == std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(truncated_asymptotic_variance(chain, equal_means, 5), OracleError);

  Matrix transient = Matrix::Zero(3, 3);
  transient(0, 1) = 1.0;
  transient(1, 2) = transient(2, 1) = 1.0;
  CHECK(closed_classes(transient) == StateClasses{{1, 2}});
}

TEST_CASE("size guards") {
  CHECK_THROWS_AS(build_transition_matrix(fixtures::path(static_cast<NodeId>(kMaxOracleNodes + 1)),
                                          WalkerKind::SRW),
                  OracleError);
  // 80 nodes fit the node guard, but K80 has 6320 directed edge states.
  CHECK_THROWS_AS(build_augmented_chain(fixtures::complete(80), AugmentedKind::NBRW), OracleError);
  CHECK_THROWS_AS(build_transition_matrix(fixtures::house(), WalkerKind::GENERIC_MH), OracleError);
  CHECK_THROWS_AS(run_oracle_checks(fixtures::house(), {"bogus"}), OracleError);
}

TEST_CASE("generic kernels build the same node chain as MHRW") {
  const Graph g = fixtures::lollipop();
  const GenericKernel kernel = mhrw_da_kernel(g);
  const ChainMatrix generic = build_transition_matrix(g, WalkerKind::GENERIC_MH, &kernel);
  const ChainMatrix mhrw = build_transition_matrix(g, WalkerKind::MHRW);
  CHECK((generic.P - mhrw.P).cwiseAbs().maxCoeff() < 1e-15);
  const AugmentedChain a = build_augmented_chain(g, AugmentedKind::MHDA, &kernel);
  const AugmentedChain b = build_augmented_chain(g, AugmentedKind::MHDA);
  CHECK((a.P - b.P).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("all oracle checks pass on fixtures and a random family") {
  std::vector<Graph> graphs;
  for (auto& f : fixtures::small_fixtures()) graphs.push_back(f.graph);
  for (auto& g : fixtures::random_family(10, 8)) graphs.push_back(g);
  for (const Graph& g : graphs) {
    for (const CheckResult& c : run_oracle_checks(g, oracle_check_groups())) {
      INFO(c.name, " = ", c.value, " (", c.comparison, " ", c.tolerance, ")");
      CHECK(c.pass);
    }
  }
}

TEST_CASE("acceptance reciprocity and the acceptance function") {
  CHECK(acceptance_function_residual() < kIdentityTolerance);
  const Graph g = fixtures::preferential_attachment(200, 5);
  const ChainMatrix mhrw = build_transition_matrix(g, WalkerKind::MHRW);
  const ReciprocityReport r =
      check_acceptance_reciprocity(g, mhrw.P, EdgeProposalRule::non_backtracking());
  CHECK(r.pairs > 0);
  CHECK(r.residual < kIdentityTolerance);
  CHECK(r.min_acceptance > 0.0);
  CHECK(r.max_acceptance <= 1.0);
}
