#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "nbwalk/estimators.hpp"
#include "nbwalk/oracle.hpp"
#include "nbwalk/random.hpp"
#include "nbwalk/walkers.hpp"

using namespace nbwalk;

namespace {

EstimatorAccumulator accumulate(const NodeFunction& f, const NodeFunction& w,
                                const std::vector<NodeId>& xs) {
  EstimatorAccumulator acc(f, w);
  acc.add_all(xs);
  return acc;
}

std::vector<NodeId> walk(const Graph& g, WalkerKind kind, std::uint64_t t, std::uint64_t seed) {
  RandomSource rng(seed);
  Walker w(g, {0, std::nullopt, kind});
  std::vector<NodeId> xs;
  xs.reserve(t);
  for (std::uint64_t s = 0; s < t; ++s) xs.push_back(w.step(rng));
  return xs;
}

}  // namespace

TEST_CASE("plain mean examples") {
  const Graph tri = fixtures::triangle();
  const std::vector<NodeId> xs{0, 1, 2};
  CHECK(plain_mean(accumulate(NodeFunction::constant(2.5), NodeFunction::constant(1), xs)) == 2.5);
  CHECK(plain_mean(accumulate(NodeFunction::indicator(0), NodeFunction::constant(1), xs)) ==
        doctest::Approx(1.0 / 3));
  EstimatorAccumulator empty(NodeFunction::constant(1), NodeFunction::constant(1));
  CHECK_THROWS_AS(plain_mean(empty), EstimatorError);
  CHECK_THROWS_AS(ratio_estimate(empty), EstimatorError);
  CHECK_THROWS_AS(semi_markov_estimate(empty), EstimatorError);
}

TEST_CASE("ratio estimate at a single node and under weight scaling") {
  const Graph g = fixtures::house();
  const std::vector<NodeId> stuck(50, 4);
  const auto f = NodeFunction::degree_pdf(g, g.degree(4));
  CHECK(ratio_estimate(accumulate(f, NodeFunction::inverse_degree(g), stuck)) == 1.0);

  const auto xs = walk(g, WalkerKind::SRW, 10000, 3);
  for (std::uint32_t d = 1; d <= g.max_degree(); ++d) {
    const auto fd = NodeFunction::degree_pdf(g, d);
    const double base = ratio_estimate(accumulate(fd, NodeFunction::inverse_degree(g), xs));
    for (double c : {0.5, 3.0, 1024.0}) {
      CHECK(ratio_estimate(accumulate(fd, NodeFunction::inverse_degree(g, c), xs)) == doctest::Approx(base).epsilon(1e-12));
    }
  }
}

TEST_CASE("sojourn pairs from the worked trajectory") {
  const NodeId j = 0, i = 1, k = 2;
  const std::vector<NodeId> xs{j, j, j, i, i, j, k};
  const auto seg = segment_sojourns(xs);
  CHECK(seg.closed == std::vector<Sojourn>{{j, 3}, {i, 2}, {j, 1}});
  REQUIRE(seg.open_tail.has_value());
  CHECK(*seg.open_tail == Sojourn{k, 1});

  const auto f = NodeFunction::from_values({0.25, 2.0, 7.0});
  const auto acc = accumulate(f, NodeFunction::constant(1), xs);
  CHECK(acc.closed_runs() == 3);
  CHECK(acc.closed_length() == 6);
  CHECK(acc.open_length() == 1);
  CHECK(semi_markov_estimate(acc) == doctest::Approx((3 * 0.25 + 2 * 2.0 + 1 * 0.25) / 6));

  CHECK(segment_sojourns(std::vector<NodeId>{}).closed.empty());
  CHECK_FALSE(segment_sojourns(std::vector<NodeId>{}).open_tail.has_value());
}

TEST_CASE("semi-Markov estimate of a constant and equality with the plain mean") {
  const Graph g = fixtures::lollipop();
  const auto xs = walk(g, WalkerKind::MHRW, 20000, 8);
  auto constant = accumulate(NodeFunction::constant(4.0), NodeFunction::constant(1), xs);
  constant.close_run();
  CHECK(semi_markov_estimate(constant) == 4.0);

  for (std::uint32_t d = 1; d <= g.max_degree(); ++d) {
    auto acc = accumulate(NodeFunction::degree_pdf(g, d), NodeFunction::constant(1), xs);
    acc.close_run();
    CHECK(acc.closed_length() == acc.count());
    CHECK(semi_markov_estimate(acc) == doctest::Approx(plain_mean(acc)).epsilon(1e-14));
  }
}

TEST_CASE("merging keeps the sums and invalidates the pairs") {
  const Graph g = fixtures::house();
  const auto f = NodeFunction::degree_pdf(g, 2);
  const auto a = walk(g, WalkerKind::SRW, 500, 1);
  const auto b = walk(g, WalkerKind::SRW, 700, 2);
  auto left = accumulate(f, NodeFunction::inverse_degree(g), a);
  const auto right = accumulate(f, NodeFunction::inverse_degree(g), b);
  std::vector<NodeId> joined = a;
  joined.insert(joined.end(), b.begin(), b.end());
  const auto whole = accumulate(f, NodeFunction::inverse_degree(g), joined);
  left.merge(right);
  CHECK(left.count() == 1200);
  CHECK(plain_mean(left) == doctest::Approx(plain_mean(whole)).epsilon(1e-14));
  CHECK(ratio_estimate(left) == doctest::Approx(ratio_estimate(whole)).epsilon(1e-14));
  CHECK_FALSE(left.pairs_valid());
  CHECK_THROWS_AS(semi_markov_estimate(left), EstimatorError);
}

TEST_CASE("node functions carry finite bounds") {
  CHECK_THROWS_AS(NodeFunction::from_values({1.0, INFINITY}), EstimatorError);
  CHECK_THROWS_AS(NodeFunction::inverse_degree(fixtures::star(), 0.0), EstimatorError);
  CHECK(NodeFunction::from_values({-3.0, 2.0}).bound() == 3.0);
  const Graph g = fixtures::star();
  CHECK(NodeFunction::degree_ccdf(g, 1)(0) == 1.0);
  CHECK(NodeFunction::degree_ccdf(g, 1)(1) == 0.0);
}

TEST_CASE("degree estimates: pdf sums to one and ccdf is the tail") {
  for (const Graph& g : fixtures::random_family(6, 21)) {
    for (auto kind : {WalkerKind::SRW, WalkerKind::MHRW}) {
      const auto xs = walk(g, kind, 3000, 5);
      for (auto weighting : {Weighting::Plain, Weighting::Ratio}) {
        const auto est = degree_distribution_estimate(g, xs, weighting);
        double total = 0.0;
        for (const auto& e : est) total += e.pdf;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
        for (std::size_t a = 0; a < est.size(); ++a) {
          double tail = 0.0;
          for (std::size_t b = a + 1; b < est.size(); ++b) tail += est[b].pdf;
          CHECK(est[a].ccdf == doctest::Approx(tail).epsilon(1e-14));
        }
      }
    }
  }
}

TEST_CASE("degree estimates agree with the single-function accumulators") {
  const Graph g = fixtures::lollipop();
  const auto xs = walk(g, WalkerKind::NBRW, 5000, 4);
  const auto ratio = degree_distribution_estimate(g, xs, Weighting::Ratio);
  const auto plain = degree_distribution_estimate(g, xs, Weighting::Plain);
  for (std::size_t a = 0; a < ratio.size(); ++a) {
    const auto d = ratio[a].degree;
    const auto pdf = accumulate(NodeFunction::degree_pdf(g, d), NodeFunction::inverse_degree(g), xs);
    const auto ccdf = accumulate(NodeFunction::degree_ccdf(g, d), NodeFunction::inverse_degree(g), xs);
    CHECK(ratio[a].pdf == doctest::Approx(ratio_estimate(pdf)).epsilon(1e-13));
    CHECK(ratio[a].ccdf == doctest::Approx(ratio_estimate(ccdf)).epsilon(1e-12));
    CHECK(plain[a].pdf == doctest::Approx(plain_mean(pdf)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(degree_distribution_estimate(g, std::vector<NodeId>{}, Weighting::Plain),
                  EstimatorError);
}

TEST_CASE("star estimates converge to three quarters leaves") {
  const Graph star = fixtures::star();
  const std::uint64_t t = 1000000;
  const auto leaf = NodeFunction::degree_pdf(star, 1);
  const auto mh = accumulate(leaf, NodeFunction::constant(1), walk(star, WalkerKind::MHRW, t, 31));
  CHECK(std::abs(plain_mean(mh) - 0.75) < 0.005);
  const auto srw =
      accumulate(leaf, NodeFunction::inverse_degree(star), walk(star, WalkerKind::SRW, t, 32));
  CHECK(std::abs(ratio_estimate(srw) - 0.75) < 0.005);
  const auto nb = degree_distribution_estimate(star, walk(star, WalkerKind::NBRW, t, 33),
                                               Weighting::Ratio);
  REQUIRE(nb.size() == 2);
  CHECK(nb[0].pdf == doctest::Approx(0.75).epsilon(0.005));
  CHECK(nb[1].pdf == doctest::Approx(0.25).epsilon(0.005));
}

TEST_CASE("estimates at t = 10^6 sit within five exact standard deviations") {
  const std::uint64_t t = 1000000;
  for (const auto& named : {fixtures::Named{"house", fixtures::house()},
                            fixtures::Named{"lollipop", fixtures::lollipop()}}) {
    const Graph& g = named.graph;
    const auto n = static_cast<Eigen::Index>(g.node_count());
    const Vector uniform = Vector::Constant(n, 1.0 / n);
    const ChainMatrix srw = build_transition_matrix(g, WalkerKind::SRW);
    const ChainMatrix mhrw = build_transition_matrix(g, WalkerKind::MHRW);
    const EmbeddedChain emb = embedded_chain(mhrw);
    const AugmentedChain nbrw = build_augmented_chain(g, AugmentedKind::NBRW);
    const AugmentedChain mhda = build_augmented_chain(g, AugmentedKind::MHDA);
    const auto truth = degree_distribution(g);

    std::uint64_t seed = 500;
    for (auto kind : {WalkerKind::SRW, WalkerKind::NBRW, WalkerKind::MHRW, WalkerKind::MHRW_DA}) {
      const auto xs = walk(g, kind, t, ++seed);
      const bool ratio = !targets_uniform(kind);
      const auto est =
          degree_distribution_estimate(g, xs, ratio ? Weighting::Ratio : Weighting::Plain);
      for (std::size_t a = 0; a < truth.size(); ++a) {
        Vector f(n);
        for (NodeId v = 0; v < g.node_count(); ++v) f[v] = g.degree(v) == truth[a].degree;
        double sigma2 = 0.0;
        switch (kind) {
          case WalkerKind::SRW: sigma2 = reweighted_asymptotic_variance(srw, f, uniform); break;
          case WalkerKind::NBRW: sigma2 = reweighted_asymptotic_variance(nbrw, f, uniform); break;
          case WalkerKind::MHRW: sigma2 = asymptotic_variance(mhrw, f); break;
          default:
            sigma2 = semi_markov_asymptotic_variance(mhda, emb.gamma, f).per_time_step;
        }
        INFO(named.name, " ", to_string(kind), " degree ", truth[a].degree);
        REQUIRE(sigma2 > 0.0);
        CHECK(std::abs(est[a].pdf - truth[a].pdf) < 5.0 * std::sqrt(sigma2 / t));
      }
    }
  }
}

TEST_CASE("estimate CSV layout") {
  const std::vector<DegreeEstimate> est{{1, 0.75, 0.25}, {3, 0.25, 0.0}};
  std::ostringstream both, pdf, ccdf;
  write_estimate_csv(both, est, {"nbrw", 100, 9});
  write_estimate_csv(pdf, est, {"nbrw", 100, 9}, Metric::Pdf);
  write_estimate_csv(ccdf, est, {"nbrw", 100, 9}, Metric::Ccdf);
  CHECK(both.str().rfind("# walker=nbrw t=100 seed=9\ndegree,pdf_est,ccdf_est\n1,", 0) == 0);
  CHECK(pdf.str().find("degree,pdf_est\n") != std::string::npos);
  CHECK(pdf.str().find("ccdf_est") == std::string::npos);
  CHECK(ccdf.str().find("degree,ccdf_est\n1,0.25\n3,0\n") != std::string::npos);
  std::istringstream lines(both.str());
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) rows += !line.empty() && line[0] != '#';
  CHECK(rows == 3);
}
