#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nbwalk/graph.hpp"
#include "nbwalk/random.hpp"

namespace fixtures {

using nbwalk::Graph;
using nbwalk::NodeId;

/// Center 0 with leaves 1..leaves.
Graph star(NodeId leaves = 3);
/// 0-1-...-(n-1)
Graph path(NodeId n = 3);
Graph triangle();
Graph cycle(NodeId n);
/// Square 0-1-2-3 with roof node 4 on edge 0-1 and a tail 4-5.
Graph house();
/// K4 on 0..3 plus the path 3-4-5.
Graph lollipop();
Graph complete(NodeId n);

/// Spanning tree plus extra edges with probability p; always connected.
Graph random_connected(NodeId n, double p, nbwalk::RandomSource& rng);
/// 20 graphs with n in [5,30] from a fixed seed.
std::vector<Graph> random_family(std::size_t count = 20, std::uint64_t seed = 20240601);

/// Preferential attachment where each new node brings m in {1,2,3} edges with
/// probabilities 0.4, 0.2, 0.4. Heavy-tailed, sparse, connected.
Graph preferential_attachment(NodeId n, std::uint64_t seed);

struct Named {
  std::string name;
  Graph graph;
};
/// star, path, triangle, house, lollipop
std::vector<Named> small_fixtures();

/// Writes text to a fresh file under the system temp directory.
std::string write_temp(const std::string& stem, const std::string& text);

}  // namespace fixtures
