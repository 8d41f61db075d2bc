#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nbwalk/graph.hpp"

namespace nbwalk {

class EstimatorError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bounded real function on nodes.
class NodeFunction {
public:
  NodeFunction(std::function<double(NodeId)> f, double bound, std::string name = "f");

  static NodeFunction constant(double c);
  static NodeFunction indicator(NodeId node);
  /// 1{d(i) = d}
  static NodeFunction degree_pdf(const Graph& g, std::uint32_t d);
  /// 1{d(i) > d}
  static NodeFunction degree_ccdf(const Graph& g, std::uint32_t d);
  /// Re-weighting w(i) = scale / d(i).
  static NodeFunction inverse_degree(const Graph& g, double scale = 1.0);
  static NodeFunction from_values(std::vector<double> values, std::string name = "f");

  double operator()(NodeId v) const { return f_(v); }
  double bound() const noexcept { return bound_; }
  const std::string& name() const noexcept { return name_; }

private:
  std::function<double(NodeId)> f_;
  double bound_;
  std::string name_;
};

/// Streaming sums for the plain, ratio and semi-Markov pair estimators of a
/// single function f. Memory is O(1) in the trajectory length.
class EstimatorAccumulator {
public:
  EstimatorAccumulator(NodeFunction f, NodeFunction w);

  void add(NodeId x);
  template <class Range>
  void add_all(const Range& xs) {
    for (NodeId x : xs) add(x);
  }

  /// Ends the current sojourn run so it counts as a closed pair.
  void close_run();

  /// Adds the plain and ratio sums of `other`. Pair statistics cannot be
  /// combined across chains, so afterwards semi_markov_estimate throws.
  void merge(const EstimatorAccumulator& other);

  std::uint64_t count() const noexcept { return count_; }
  double plain_sum() const noexcept { return plain_sum_; }
  double weighted_sum() const noexcept { return weighted_sum_; }
  double weight_sum() const noexcept { return weight_sum_; }

  std::uint64_t closed_runs() const noexcept { return closed_runs_; }
  std::uint64_t closed_length() const noexcept { return closed_length_; }
  double closed_sum() const noexcept { return closed_sum_; }
  std::uint64_t open_length() const noexcept { return open_length_; }
  bool pairs_valid() const noexcept { return pairs_valid_; }

private:
  NodeFunction f_;
  NodeFunction w_;
  std::uint64_t count_ = 0;
  double plain_sum_ = 0.0;
  double weighted_sum_ = 0.0;
  double weight_sum_ = 0.0;

  std::uint64_t closed_runs_ = 0;
  std::uint64_t closed_length_ = 0;
  double closed_sum_ = 0.0;
  NodeId open_node_ = 0;
  std::uint64_t open_length_ = 0;
  bool pairs_valid_ = true;
};

/// (1/t) sum f(X_s)
double plain_mean(const EstimatorAccumulator& acc);
/// sum w f / sum w
double ratio_estimate(const EstimatorAccumulator& acc);
/// sum xi_l f(X~_l) / sum xi_l over closed sojourn runs only.
double semi_markov_estimate(const EstimatorAccumulator& acc);

/// One maximal run of a trajectory at a single node.
struct Sojourn {
  NodeId node;
  std::uint64_t length;
  bool operator==(const Sojourn&) const = default;
};

struct Segmentation {
  std::vector<Sojourn> closed;
  std::optional<Sojourn> open_tail;
};

Segmentation segment_sojourns(std::span<const NodeId> trajectory);

enum class Weighting { Plain, Ratio };

struct DegreeEstimate {
  std::uint32_t degree;
  double pdf;
  double ccdf;
};

/// Degree-binned sample counts; yields pdf and ccdf estimates for every degree
/// of the graph from one pass. Ratio mode uses w(i) = 1/d(i).
class DegreeDistributionAccumulator {
public:
  explicit DegreeDistributionAccumulator(const Graph& g);

  void add(NodeId x) { ++counts_[graph_->degree(x)]; ++total_; }
  void clear();

  std::uint64_t count() const noexcept { return total_; }

  /// One entry per degree present in the graph, ascending. The ccdf entries
  /// are tail sums of the returned pdf entries.
  std::vector<DegreeEstimate> estimate(Weighting weighting) const;

private:
  const Graph* graph_;
  std::vector<std::uint32_t> degrees_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

std::vector<DegreeEstimate> degree_distribution_estimate(const Graph& g,
                                                         std::span<const NodeId> trajectory,
                                                         Weighting weighting);

/// Which degree-distribution quantities an output carries.
enum class Metric { Pdf, Ccdf, Both };

struct EstimateMetadata {
  std::string walker;
  std::uint64_t t = 0;
  std::uint64_t seed = 0;
};

/// CSV with a '#' metadata header and columns degree,pdf_est,ccdf_est; a
/// single-metric file drops the other estimate column.
void write_estimate_csv(std::ostream& out, std::span<const DegreeEstimate> estimates,
                        const EstimateMetadata& meta, Metric metric = Metric::Both);

}  // namespace nbwalk
