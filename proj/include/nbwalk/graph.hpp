#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace nbwalk {

using NodeId = std::uint32_t;
using Label = std::uint64_t;

class GraphError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Simple undirected graph in compressed adjacency form.
///
/// Node ids are compact (0..n-1). Every neighbor list is sorted and free of
/// duplicates and self-loops, and adjacency is symmetric. The original file
/// label of each node is kept so results can be reported in input terms.
/// Instances are immutable once built and may be shared across threads.
class Graph {
public:
  Graph() = default;

  /// Builds a graph from CSR arrays. Throws GraphError if any adjacency
  /// invariant is violated.
  Graph(std::vector<std::uint64_t> offsets, std::vector<NodeId> targets,
        std::vector<Label> labels);

  /// Builds a graph from an undirected edge list over compact ids 0..n-1.
  /// Duplicates and self-loops are dropped.
  static Graph from_edges(std::size_t node_count,
                          std::span<const std::pair<NodeId, NodeId>> edges);

  std::size_t node_count() const noexcept { return labels_.size(); }
  std::size_t edge_count() const noexcept { return targets_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId v) const noexcept {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }
  std::uint32_t degree(NodeId v) const noexcept {
    return static_cast<std::uint32_t>(offsets_[v + 1] - offsets_[v]);
  }
  std::uint32_t max_degree() const noexcept { return max_degree_; }

  /// Position of `u` inside the sorted neighbor list of `v`.
  std::optional<std::size_t> neighbor_position(NodeId v, NodeId u) const noexcept;
  bool has_edge(NodeId u, NodeId v) const noexcept {
    return neighbor_position(u, v).has_value();
  }

  Label label(NodeId v) const noexcept { return labels_[v]; }
  std::optional<NodeId> find(Label label) const;

  const std::vector<std::uint64_t>& offsets() const noexcept { return offsets_; }
  const std::vector<NodeId>& targets() const noexcept { return targets_; }
  const std::vector<Label>& labels() const noexcept { return labels_; }

  bool operator==(const Graph& other) const {
    return offsets_ == other.offsets_ && targets_ == other.targets_ &&
           labels_ == other.labels_;
  }

private:
  std::vector<std::uint64_t> offsets_{0};
  std::vector<NodeId> targets_;
  std::vector<Label> labels_;
  std::unordered_map<Label, NodeId> index_;
  std::uint32_t max_degree_ = 0;
};

/// Component id per node (0..k-1, numbered by smallest member) and sizes.
struct Components {
  std::vector<std::uint32_t> component_of;
  std::vector<std::size_t> sizes;
};

Components connected_components(const Graph& g);

bool is_connected(const Graph& g);

/// Induced subgraph on the largest connected component, re-compacted in the
/// original id order. Ties go to the component holding the smallest original
/// label. Throws GraphError if the component has fewer than three nodes.
Graph largest_connected_component(const Graph& g);

/// Degree -> number of nodes with that degree.
std::map<std::uint32_t, std::uint64_t> degree_histogram(const Graph& g);

/// Exact Pr{D = d} and Pr{D > d} for every degree present in the graph.
struct DegreeTruth {
  std::uint32_t degree;
  double pdf;
  double ccdf;
};
std::vector<DegreeTruth> degree_distribution(const Graph& g);

}  // namespace nbwalk
