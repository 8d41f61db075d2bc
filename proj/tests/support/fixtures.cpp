#include "fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <set>

#include <unistd.h>

namespace fixtures {

namespace {

Graph build(NodeId n, const std::vector<std::pair<NodeId, NodeId>>& edges) {
  return Graph::from_edges(n, edges);
}

}  // namespace

Graph star(NodeId leaves) {
  std::vector<std::pair<NodeId, NodeId>> e;
  for (NodeId v = 1; v <= leaves; ++v) e.emplace_back(0, v);
  return build(leaves + 1, e);
}

Graph path(NodeId n) {
  std::vector<std::pair<NodeId, NodeId>> e;
  for (NodeId v = 0; v + 1 < n; ++v) e.emplace_back(v, v + 1);
  return build(n, e);
}

Graph triangle() { return cycle(3); }

Graph cycle(NodeId n) {
  std::vector<std::pair<NodeId, NodeId>> e;
  for (NodeId v = 0; v < n; ++v) e.emplace_back(v, (v + 1) % n);
  return build(n, e);
}

Graph house() {
  return build(6, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 4}, {1, 4}, {4, 5}});
}

Graph lollipop() {
  return build(6, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}, {3, 4}, {4, 5}});
}

Graph complete(NodeId n) {
  std::vector<std::pair<NodeId, NodeId>> e;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) e.emplace_back(u, v);
  }
  return build(n, e);
}

Graph random_connected(NodeId n, double p, nbwalk::RandomSource& rng) {
  std::set<std::pair<NodeId, NodeId>> edges;
  for (NodeId v = 1; v < n; ++v) {
    const auto u = static_cast<NodeId>(rng.below(v));
    edges.emplace(u, v);
  }
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (rng.uniform() < p) edges.emplace(u, v);
    }
  }
  return build(n, {edges.begin(), edges.end()});
}

std::vector<Graph> random_family(std::size_t count, std::uint64_t seed) {
  nbwalk::RandomSource rng(seed);
  std::vector<Graph> out;
  for (std::size_t k = 0; k < count; ++k) {
    const auto n = static_cast<NodeId>(5 + rng.below(26));
    const double p = 0.05 + 0.25 * rng.uniform();
    out.push_back(random_connected(n, p, rng));
  }
  return out;
}

Graph preferential_attachment(NodeId n, std::uint64_t seed) {
  nbwalk::RandomSource rng(seed);
  std::vector<std::pair<NodeId, NodeId>> edges{{0, 1}, {1, 2}, {2, 0}};
  // Every edge endpoint appears once here, so a uniform pick is degree-biased.
  std::vector<NodeId> ends{0, 1, 1, 2, 2, 0};
  for (NodeId v = 3; v < n; ++v) {
    const double u = rng.uniform();
    const int m = u < 0.4 ? 1 : (u < 0.6 ? 2 : 3);
    std::set<NodeId> picked;
    while (static_cast<int>(picked.size()) < std::min<int>(m, static_cast<int>(v))) {
      picked.insert(ends[rng.below(ends.size())]);
    }
    for (NodeId t : picked) {
      edges.emplace_back(t, v);
      ends.push_back(t);
      ends.push_back(v);
    }
  }
  return build(n, edges);
}

std::vector<Named> small_fixtures() {
  return {{"star", star()},
          {"path", path()},
          {"triangle", triangle()},
          {"house", house()},
          {"lollipop", lollipop()}};
}

std::string write_temp(const std::string& stem, const std::string& text) {
  static std::atomic<int> counter{0};
  const auto dir = std::filesystem::temp_directory_path() / "nbwalk-tests";
  std::filesystem::create_directories(dir);
  const auto file = dir / (stem + "-" + std::to_string(::getpid()) + "-" +
                           std::to_string(counter.fetch_add(1)));
  std::ofstream(file) << text;
  return file.string();
}

}  // namespace fixtures
