#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"
#include "nbwalk/graph.hpp"

namespace nbwalk {

class ParseError : public GraphError {
public:
  ParseError(std::size_t line, const std::string& message);
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

struct LoadOptions {
  /// Add the reverse of every arc before de-duplication. With this off the
  /// input must already list both directions of every edge.
  bool symmetrize = true;
};

/// Reads a SNAP-style edge list: one "u v" pair per line, tab or space
/// separated, '#' lines are comments. Labels are compacted in first-seen
/// order; self-loops and duplicate edges are dropped.
Graph load_edge_list(std::istream& in, LoadOptions options = {});
Graph load_edge_list_file(const std::filesystem::path& path, LoadOptions options = {});

/// Loads a graph file and keeps its largest connected component.
Graph load_lcc(const std::filesystem::path& path);

/// Writes each undirected edge once as "label_u<TAB>label_v".
void write_edge_list(std::ostream& out, const Graph& g);

// Canonical cache format: magic, {n, |E|}, offsets, targets, labels. Little endian.
void write_binary(std::ostream& out, const Graph& g);
Graph read_binary(std::istream& in);

void to_json(nlohmann::json& j, const Graph& g);
void from_json(const nlohmann::json& j, Graph& g);

}  // namespace nbwalk
