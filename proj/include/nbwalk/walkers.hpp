#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "nbwalk/graph.hpp"
#include "nbwalk/random.hpp"

namespace nbwalk {

enum class WalkerKind { SRW, NBRW, MHRW, MHRW_DA, GENERIC_MH, GENERIC_MHDA };

std::string_view to_string(WalkerKind kind);
/// Accepts "srw", "nbrw", "mhrw", "mhrw-da", "generic-mh", "generic-mhda"
/// (case-insensitive, '_' and '-' interchangeable).
WalkerKind parse_walker_kind(std::string_view name);

/// Walkers whose target law is uniform over nodes.
bool targets_uniform(WalkerKind kind);

/// Position of a walker. `previous` is empty until the first actual move;
/// rejected proposals leave it untouched.
struct WalkerState {
  NodeId current = 0;
  std::optional<NodeId> previous;
  WalkerKind kind = WalkerKind::SRW;

  bool operator==(const WalkerState&) const = default;
};

class WalkerError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Unnormalized node weights. Only ratios are ever evaluated.
class TargetDistribution {
public:
  explicit TargetDistribution(std::vector<double> weights);

  static TargetDistribution uniform(const Graph& g);
  static TargetDistribution degree_proportional(const Graph& g);

  double weight(NodeId v) const noexcept { return weights_[v]; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return weights_.size(); }

private:
  std::vector<double> weights_;
};

/// A proposal draw with the forward density Q(i,j) and reverse density Q(j,i).
struct Proposal {
  NodeId candidate;
  double forward;
  double reverse;
};

/// Node-level proposal kernel Q. Supported on N(i) plus possibly i itself.
class ProposalRule {
public:
  using Sampler = std::function<NodeId(const Graph&, NodeId from, RandomSource&)>;
  using Density = std::function<double(const Graph&, NodeId from, NodeId to)>;

  ProposalRule(Sampler sampler, Density density)
      : sampler_(std::move(sampler)), density_(std::move(density)) {}

  /// Q(i,j) = 1/d(i) on neighbors.
  static ProposalRule simple_random_walk();

  Proposal propose(const Graph& g, NodeId from, RandomSource& rng) const;
  double probability(const Graph& g, NodeId from, NodeId to) const {
    return density_(g, from, to);
  }

private:
  Sampler sampler_;
  Density density_;
};

/// Edge-level proposal kernel Q'(e_ij, e_jk): given the walker came from i
/// and sits at j, draws the next node k. Callers supply a proper stochastic
/// kernel; only the non-backtracking default is built in.
class EdgeProposalRule {
public:
  using Sampler = std::function<NodeId(const Graph&, NodeId prev, NodeId cur, RandomSource&)>;
  using Density = std::function<double(const Graph&, NodeId prev, NodeId cur, NodeId next)>;

  EdgeProposalRule(Sampler sampler, Density density)
      : sampler_(std::move(sampler)), density_(std::move(density)) {}

  /// Uniform over N(j) \ {i}; forced return when d(j) = 1.
  static EdgeProposalRule non_backtracking();

  NodeId sample(const Graph& g, NodeId prev, NodeId cur, RandomSource& rng) const {
    return sampler_(g, prev, cur, rng);
  }
  double probability(const Graph& g, NodeId prev, NodeId cur, NodeId next) const {
    return density_(g, prev, cur, next);
  }

private:
  Sampler sampler_;
  Density density_;
};

/// Target plus proposal kernels for the generic MH / MHDA walkers.
struct GenericKernel {
  TargetDistribution target;
  ProposalRule proposal;
  std::optional<EdgeProposalRule> edge_proposal;
};

/// Checks that Q(i,j) > 0 iff Q(j,i) > 0 on every edge, and, when present,
/// that Q'(e_ij,e_jk) > 0 iff Q'(e_kj,e_ji) > 0 on every length-two path.
/// Throws WalkerError on the first inconsistency.
std::shared_ptr<const GenericKernel> make_generic_kernel(
    const Graph& g, TargetDistribution target, ProposalRule proposal,
    std::optional<EdgeProposalRule> edge_proposal = std::nullopt);

/// Uniform draw from N(cur) \ {prev}; `prev` must be a neighbor and d(cur) >= 2.
NodeId uniform_neighbor_except(const Graph& g, NodeId cur, NodeId prev, RandomSource& rng);

WalkerState srw_step(const Graph& g, const WalkerState& s, RandomSource& rng);
WalkerState nbrw_step(const Graph& g, const WalkerState& s, RandomSource& rng);
WalkerState mhrw_step(const Graph& g, const WalkerState& s, RandomSource& rng);
WalkerState mhrw_da_step(const Graph& g, const WalkerState& s, RandomSource& rng);

// The generic steps trust their kernels; validate once with make_generic_kernel.
WalkerState generic_mh_step(const Graph& g, const WalkerState& s, const TargetDistribution& target,
                            const ProposalRule& proposal, RandomSource& rng);
WalkerState generic_mhda_step(const Graph& g, const WalkerState& s,
                              const TargetDistribution& target, const ProposalRule& proposal,
                              const EdgeProposalRule& edge_proposal, RandomSource& rng);

/// Any walker kind behind one interface. Holds a reference to the graph,
/// which must outlive it.
class Walker {
public:
  Walker(const Graph& g, WalkerState start,
         std::shared_ptr<const GenericKernel> kernel = nullptr);

  const WalkerState& state() const noexcept { return state_; }
  void reset(WalkerState s) { state_ = s; }

  NodeId step(RandomSource& rng);

private:
  const Graph* graph_;
  WalkerState state_;
  std::shared_ptr<const GenericKernel> kernel_;
};

}  // namespace nbwalk
