#include "nbwalk/graph.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

namespace nbwalk {

Graph::Graph(std::vector<std::uint64_t> offsets, std::vector<NodeId> targets,
             std::vector<Label> labels)
    : offsets_(std::move(offsets)), targets_(std::move(targets)), labels_(std::move(labels)) {
  const std::size_t n = labels_.size();
  if (offsets_.size() != n + 1 || offsets_.front() != 0 || offsets_.back() != targets_.size()) {
    throw GraphError("adjacency offsets do not match node/arc counts");
  }
  if (n > std::numeric_limits<NodeId>::max()) {
    throw GraphError("too many nodes for 32-bit node ids");
  }
  for (NodeId v = 0; v < n; ++v) {
    if (offsets_[v + 1] < offsets_[v]) {
      throw GraphError("adjacency offsets are not monotone");
    }
    auto nb = neighbors(v);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (nb[k] >= n) {
        throw GraphError("neighbor id out of range at node " + std::to_string(v));
      }
      if (nb[k] == v) {
        throw GraphError("self-loop at node " + std::to_string(v));
      }
      if (k > 0 && nb[k] <= nb[k - 1]) {
        throw GraphError("neighbor list of node " + std::to_string(v) +
                         " is not strictly increasing");
      }
    }
    max_degree_ = std::max(max_degree_, degree(v));
  }
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId u : neighbors(v)) {
      if (!neighbor_position(u, v)) {
        throw GraphError("adjacency is not symmetric between " + std::to_string(v) + " and " +
                         std::to_string(u));
      }
    }
  }
  index_.reserve(n);
  for (NodeId v = 0; v < n; ++v) {
    if (!index_.emplace(labels_[v], v).second) {
      throw GraphError("duplicate node label " + std::to_string(labels_[v]));
    }
  }
}

Graph Graph::from_edges(std::size_t node_count,
                        std::span<const std::pair<NodeId, NodeId>> edges) {
  std::vector<std::pair<NodeId, NodeId>> arcs;
  arcs.reserve(edges.size() * 2);
  for (auto [u, v] : edges) {
    if (u >= node_count || v >= node_count) {
      throw GraphError("edge endpoint out of range");
    }
    if (u == v) continue;
    arcs.emplace_back(u, v);
    arcs.emplace_back(v, u);
  }
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());

  std::vector<std::uint64_t> offsets(node_count + 1, 0);
  std::vector<NodeId> targets;
  targets.reserve(arcs.size());
  for (auto [u, v] : arcs) {
    ++offsets[u + 1];
    targets.push_back(v);
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<Label> labels(node_count);
  std::iota(labels.begin(), labels.end(), Label{0});
  return Graph(std::move(offsets), std::move(targets), std::move(labels));
}

std::optional<std::size_t> Graph::neighbor_position(NodeId v, NodeId u) const noexcept {
  auto nb = neighbors(v);
  auto it = std::lower_bound(nb.begin(), nb.end(), u);
  if (it == nb.end() || *it != u) return std::nullopt;
  return static_cast<std::size_t>(it - nb.begin());
}

std::optional<NodeId> Graph::find(Label label) const {
  auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Components connected_components(const Graph& g) {
  constexpr auto unseen = std::numeric_limits<std::uint32_t>::max();
  const std::size_t n = g.node_count();
  Components out;
  out.component_of.assign(n, unseen);
  std::vector<NodeId> stack;
  for (NodeId root = 0; root < n; ++root) {
    if (out.component_of[root] != unseen) continue;
    const auto id = static_cast<std::uint32_t>(out.sizes.size());
    out.sizes.push_back(0);
    out.component_of[root] = id;
    stack.push_back(root);
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      ++out.sizes[id];
      for (NodeId u : g.neighbors(v)) {
        if (out.component_of[u] == unseen) {
          out.component_of[u] = id;
          stack.push_back(u);
        }
      }
    }
  }
  return out;
}

bool is_connected(const Graph& g) {
  return g.node_count() > 0 && connected_components(g).sizes.size() == 1;
}

Graph largest_connected_component(const Graph& g) {
  const Components comps = connected_components(g);
  if (comps.sizes.empty()) {
    throw GraphError("graph has no nodes");
  }
  std::vector<Label> min_label(comps.sizes.size(), std::numeric_limits<Label>::max());
  for (NodeId v = 0; v < g.node_count(); ++v) {
    auto& m = min_label[comps.component_of[v]];
    m = std::min(m, g.label(v));
  }
  std::uint32_t best = 0;
  for (std::uint32_t c = 1; c < comps.sizes.size(); ++c) {
    if (comps.sizes[c] > comps.sizes[best] ||
        (comps.sizes[c] == comps.sizes[best] && min_label[c] < min_label[best])) {
      best = c;
    }
  }
  if (comps.sizes[best] < 3) {
    throw GraphError("largest connected component has fewer than 3 nodes");
  }
  if (comps.sizes.size() == 1) {
    return g;
  }

  constexpr auto absent = std::numeric_limits<NodeId>::max();
  std::vector<NodeId> remap(g.node_count(), absent);
  std::vector<Label> labels;
  labels.reserve(comps.sizes[best]);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (comps.component_of[v] == best) {
      remap[v] = static_cast<NodeId>(labels.size());
      labels.push_back(g.label(v));
    }
  }
  std::vector<std::uint64_t> offsets{0};
  std::vector<NodeId> targets;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (remap[v] == absent) continue;
    // Remapping is monotone, so neighbor lists stay sorted.
    for (NodeId u : g.neighbors(v)) targets.push_back(remap[u]);
    offsets.push_back(targets.size());
  }
  return Graph(std::move(offsets), std::move(targets), std::move(labels));
}

std::map<std::uint32_t, std::uint64_t> degree_histogram(const Graph& g) {
  std::map<std::uint32_t, std::uint64_t> hist;
  for (NodeId v = 0; v < g.node_count(); ++v) ++hist[g.degree(v)];
  return hist;
}

std::vector<DegreeTruth> degree_distribution(const Graph& g) {
  const auto hist = degree_histogram(g);
  const double n = static_cast<double>(g.node_count());
  std::vector<DegreeTruth> out;
  out.reserve(hist.size());
  for (auto [d, count] : hist) out.push_back({d, static_cast<double>(count) / n, 0.0});
  // Counts are integers, so the tail sums are exact before the final division.
  std::uint64_t tail = 0;
  auto it = hist.rbegin();
  for (auto o = out.rbegin(); o != out.rend(); ++o, ++it) {
    o->ccdf = static_cast<double>(tail) / n;
    tail += it->second;
  }
  return out;
}

}  // namespace nbwalk
