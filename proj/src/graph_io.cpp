#include "nbwalk/graph_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace nbwalk {

ParseError::ParseError(std::size_t line, const std::string& message)
    : GraphError("line " + std::to_string(line) + ": " + message), line_(line) {}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

// Splits on runs of blanks; at most `max` tokens are kept, the count is exact.
std::size_t tokenize(std::string_view line, std::array<std::string_view, 3>& out) {
  std::size_t count = 0;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    if (i == line.size()) break;
    std::size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    if (count < out.size()) out[count] = line.substr(i, j - i);
    ++count;
    i = j;
  }
  return count;
}

Label parse_label(std::string_view token, std::size_t line_no) {
  Label value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError(line_no, "expected a non-negative integer node label, got '" +
                                  std::string(token) + "'");
  }
  return value;
}

}  // namespace

Graph load_edge_list(std::istream& in, LoadOptions options) {
  std::unordered_map<Label, NodeId> index;
  std::vector<Label> labels;
  std::vector<std::pair<NodeId, NodeId>> arcs;

  auto intern = [&](Label l) {
    auto [it, inserted] = index.emplace(l, static_cast<NodeId>(labels.size()));
    if (inserted) labels.push_back(l);
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  std::array<std::string_view, 3> tokens;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    auto first = std::find_if_not(view.begin(), view.end(), is_space);
    if (first == view.end() || *first == '#') continue;
    const std::size_t count = tokenize(view, tokens);
    if (count != 2) {
      throw ParseError(line_no, "expected 2 fields, found " + std::to_string(count));
    }
    const NodeId u = intern(parse_label(tokens[0], line_no));
    const NodeId v = intern(parse_label(tokens[1], line_no));
    if (u == v) continue;
    arcs.emplace_back(u, v);
    if (options.symmetrize) arcs.emplace_back(v, u);
  }
  if (in.bad()) {
    throw GraphError("read error after line " + std::to_string(line_no));
  }
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
  if (arcs.empty()) {
    throw GraphError("edge list contains no edges");
  }
  if (!options.symmetrize) {
    for (auto [u, v] : arcs) {
      if (!std::binary_search(arcs.begin(), arcs.end(), std::pair{v, u})) {
        throw GraphError("arc " + std::to_string(labels[u]) + " -> " + std::to_string(labels[v]) +
                         " has no reverse and symmetrization is off");
      }
    }
  }

  std::vector<std::uint64_t> offsets(labels.size() + 1, 0);
  std::vector<NodeId> targets;
  targets.reserve(arcs.size());
  for (auto [u, v] : arcs) {
    ++offsets[u + 1];
    targets.push_back(v);
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  return Graph(std::move(offsets), std::move(targets), std::move(labels));
}

Graph load_edge_list_file(const std::filesystem::path& path, LoadOptions options) {
  std::ifstream in(path);
  if (!in) {
    throw GraphError("cannot open graph file " + path.string());
  }
  if (path.extension() == ".bin") {
    in.close();
    std::ifstream bin(path, std::ios::binary);
    return read_binary(bin);
  }
  return load_edge_list(in, options);
}

Graph load_lcc(const std::filesystem::path& path) {
  return largest_connected_component(load_edge_list_file(path));
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# Nodes: " << g.node_count() << " Edges: " << g.edge_count() << '\n';
  for (NodeId u = 0; u < g.node_count(); ++u) {
    for (NodeId v : g.neighbors(u)) {
      if (u < v) out << g.label(u) << '\t' << g.label(v) << '\n';
    }
  }
}

namespace {

constexpr std::array<char, 8> kMagic{'N', 'B', 'W', 'G', 'R', 'A', 'P', 'H'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "binary graph cache assumes a little-endian host");

template <class T>
void put(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
void put_array(std::ostream& out, const std::vector<T>& values) {
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(T)));
}

template <class T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw GraphError("truncated binary graph");
  return value;
}

template <class T>
std::vector<T> get_array(std::istream& in, std::uint64_t count) {
  std::vector<T> values(count);
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(count * sizeof(T)));
  if (!in) throw GraphError("truncated binary graph");
  return values;
}

}  // namespace

void write_binary(std::ostream& out, const Graph& g) {
  out.write(kMagic.data(), kMagic.size());
  put(out, kVersion);
  put(out, static_cast<std::uint64_t>(g.node_count()));
  put(out, static_cast<std::uint64_t>(g.edge_count()));
  put_array(out, g.offsets());
  put_array(out, g.targets());
  put_array(out, g.labels());
}

Graph read_binary(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw GraphError("not a binary graph file");
  if (get<std::uint32_t>(in) != kVersion) throw GraphError("unsupported binary graph version");
  const auto n = get<std::uint64_t>(in);
  const auto m = get<std::uint64_t>(in);
  auto offsets = get_array<std::uint64_t>(in, n + 1);
  auto targets = get_array<NodeId>(in, 2 * m);
  auto labels = get_array<Label>(in, n);
  return Graph(std::move(offsets), std::move(targets), std::move(labels));
}

void to_json(nlohmann::json& j, const Graph& g) {
  j = nlohmann::json{{"n", g.node_count()},
                     {"edges", g.edge_count()},
                     {"offsets", g.offsets()},
                     {"targets", g.targets()},
                     {"labels", g.labels()}};
}

void from_json(const nlohmann::json& j, Graph& g) {
  auto offsets = j.at("offsets").get<std::vector<std::uint64_t>>();
  auto targets = j.at("targets").get<std::vector<NodeId>>();
  auto labels = j.at("labels").get<std::vector<Label>>();
  if (j.at("n").get<std::uint64_t>() != labels.size() ||
      j.at("edges").get<std::uint64_t>() * 2 != targets.size()) {
    throw GraphError("graph JSON header does not match its arrays");
  }
  g = Graph(std::move(offsets), std::move(targets), std::move(labels));
}

}  // namespace nbwalk
