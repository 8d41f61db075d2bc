#include "nbwalk/walkers.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <string>

namespace nbwalk {

std::string_view to_string(WalkerKind kind) {
  switch (kind) {
    case WalkerKind::SRW: return "srw";
    case WalkerKind::NBRW: return "nbrw";
    case WalkerKind::MHRW: return "mhrw";
    case WalkerKind::MHRW_DA: return "mhrw-da";
    case WalkerKind::GENERIC_MH: return "generic-mh";
    case WalkerKind::GENERIC_MHDA: return "generic-mhda";
  }
  return "unknown";
}

WalkerKind parse_walker_kind(std::string_view name) {
  std::string key;
  for (char c : name) {
    key.push_back(c == '_' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  for (auto kind : {WalkerKind::SRW, WalkerKind::NBRW, WalkerKind::MHRW, WalkerKind::MHRW_DA,
                    WalkerKind::GENERIC_MH, WalkerKind::GENERIC_MHDA}) {
    if (key == to_string(kind)) return kind;
  }
  if (key == "srw-rw") return WalkerKind::SRW;
  if (key == "nbrw-rw") return WalkerKind::NBRW;
  throw WalkerError("unknown walker kind '" + std::string(name) + "'");
}

bool targets_uniform(WalkerKind kind) {
  return kind == WalkerKind::MHRW || kind == WalkerKind::MHRW_DA;
}

TargetDistribution::TargetDistribution(std::vector<double> weights) : weights_(std::move(weights)) {
  bool any_positive = false;
  for (double w : weights_) {
    if (!(w >= 0.0) || w == std::numeric_limits<double>::infinity()) {
      throw WalkerError("target weights must be finite and non-negative");
    }
    any_positive = any_positive || w > 0.0;
  }
  if (!any_positive) throw WalkerError("target distribution needs a positive weight");
}

TargetDistribution TargetDistribution::uniform(const Graph& g) {
  return TargetDistribution(std::vector<double>(g.node_count(), 1.0));
}

TargetDistribution TargetDistribution::degree_proportional(const Graph& g) {
  std::vector<double> w(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) w[v] = g.degree(v);
  return TargetDistribution(std::move(w));
}

ProposalRule ProposalRule::simple_random_walk() {
  return ProposalRule(
      [](const Graph& g, NodeId from, RandomSource& rng) {
        auto nb = g.neighbors(from);
        return nb[rng.below(nb.size())];
      },
      [](const Graph& g, NodeId from, NodeId to) {
        return g.has_edge(from, to) ? 1.0 / g.degree(from) : 0.0;
      });
}

Proposal ProposalRule::propose(const Graph& g, NodeId from, RandomSource& rng) const {
  const NodeId to = sampler_(g, from, rng);
  return {to, density_(g, from, to), density_(g, to, from)};
}

EdgeProposalRule EdgeProposalRule::non_backtracking() {
  return EdgeProposalRule(
      [](const Graph& g, NodeId prev, NodeId cur, RandomSource& rng) {
        if (g.degree(cur) == 1) return prev;
        return uniform_neighbor_except(g, cur, prev, rng);
      },
      [](const Graph& g, NodeId prev, NodeId cur, NodeId next) {
        if (!g.has_edge(cur, next) || !g.has_edge(prev, cur)) return 0.0;
        const auto d = g.degree(cur);
        if (d == 1) return next == prev ? 1.0 : 0.0;
        return next == prev ? 0.0 : 1.0 / (d - 1);
      });
}

std::shared_ptr<const GenericKernel> make_generic_kernel(
    const Graph& g, TargetDistribution target, ProposalRule proposal,
    std::optional<EdgeProposalRule> edge_proposal) {
  if (target.size() != g.node_count()) {
    throw WalkerError("target distribution size does not match the graph");
  }
  for (NodeId i = 0; i < g.node_count(); ++i) {
    for (NodeId j : g.neighbors(i)) {
      if ((proposal.probability(g, i, j) > 0.0) != (proposal.probability(g, j, i) > 0.0)) {
        throw WalkerError("proposal support is not symmetric on edge (" +
                          std::to_string(g.label(i)) + ", " + std::to_string(g.label(j)) + ")");
      }
    }
  }
  if (edge_proposal) {
    for (NodeId j = 0; j < g.node_count(); ++j) {
      for (NodeId i : g.neighbors(j)) {
        for (NodeId k : g.neighbors(j)) {
          const bool forward = edge_proposal->probability(g, i, j, k) > 0.0;
          const bool reverse = edge_proposal->probability(g, k, j, i) > 0.0;
          if (forward != reverse) {
            throw WalkerError("edge proposal support is not symmetric at path (" +
                              std::to_string(g.label(i)) + ", " + std::to_string(g.label(j)) +
                              ", " + std::to_string(g.label(k)) + ")");
          }
        }
      }
    }
  }
  return std::make_shared<const GenericKernel>(
      GenericKernel{std::move(target), std::move(proposal), std::move(edge_proposal)});
}

NodeId uniform_neighbor_except(const Graph& g, NodeId cur, NodeId prev, RandomSource& rng) {
  auto nb = g.neighbors(cur);
  const auto skip = g.neighbor_position(cur, prev);
  if (!skip || nb.size() < 2) {
    throw WalkerError("uniform_neighbor_except needs a neighbor to exclude and one to keep");
  }
  std::size_t k = rng.below(nb.size() - 1);
  if (k >= *skip) ++k;
  return nb[k];
}

WalkerState srw_step(const Graph& g, const WalkerState& s, RandomSource& rng) {
  auto nb = g.neighbors(s.current);
  return {nb[rng.below(nb.size())], s.current, s.kind};
}

WalkerState nbrw_step(const Graph& g, const WalkerState& s, RandomSource& rng) {
  const NodeId cur = s.current;
  if (!s.previous) return srw_step(g, s, rng);
  if (g.degree(cur) == 1) return {*s.previous, cur, s.kind};
  return {uniform_neighbor_except(g, cur, *s.previous, rng), cur, s.kind};
}

WalkerState mhrw_step(const Graph& g, const WalkerState& s, RandomSource& rng) {
  const NodeId cur = s.current;
  auto nb = g.neighbors(cur);
  const NodeId j = nb[rng.below(nb.size())];
  const double accept = static_cast<double>(g.degree(cur)) / g.degree(j);
  if (rng.uniform() < accept) return {j, cur, s.kind};
  return s;
}

WalkerState mhrw_da_step(const Graph& g, const WalkerState& s, RandomSource& rng) {
  const NodeId cur = s.current;
  const double dc = g.degree(cur);
  auto nb = g.neighbors(cur);
  const NodeId i = nb[rng.below(nb.size())];
  if (!(rng.uniform() < dc / g.degree(i))) return s;
  if (s.previous != i || g.degree(cur) == 1) return {i, cur, s.kind};

  // Delayed acceptance: the accepted move backtracks, so try once more to go elsewhere.
  const NodeId k = uniform_neighbor_except(g, cur, i, rng);
  const double forward = dc / g.degree(k);
  const double backward = g.degree(i) / dc;
  const double accept = std::min(1.0, forward * forward) * std::max(1.0, backward * backward);
  if (rng.uniform() < accept) return {k, cur, s.kind};
  return {i, cur, s.kind};
}

namespace {

// MH transition probability P(i,j) = min{Q(i,j), Q(j,i) pi(j)/pi(i)} for j != i.
double mh_move_probability(const Graph& g, const TargetDistribution& target,
                           const ProposalRule& proposal, NodeId i, NodeId j) {
  const double forward = proposal.probability(g, i, j);
  if (target.weight(i) == 0.0) return forward;
  return std::min(forward, proposal.probability(g, j, i) * target.weight(j) / target.weight(i));
}

// First MH stage shared by both generic walkers; returns the accepted target
// or nothing when the walker stays put.
std::optional<NodeId> mh_first_stage(const Graph& g, const WalkerState& s,
                                     const TargetDistribution& target,
                                     const ProposalRule& proposal, RandomSource& rng) {
  const NodeId i = s.current;
  const Proposal p = proposal.propose(g, i, rng);
  if (!(p.forward > 0.0)) {
    throw WalkerError("proposal drew node " + std::to_string(g.label(p.candidate)) +
                      " with zero proposal mass");
  }
  if (p.candidate == i) return std::nullopt;
  if (!(p.reverse > 0.0)) {
    throw WalkerError("proposal has no reverse mass for the drawn move");
  }
  const double wi = target.weight(i);
  const double ratio = wi == 0.0 ? 1.0 : target.weight(p.candidate) * p.reverse / (wi * p.forward);
  if (rng.uniform() < std::min(1.0, ratio)) return p.candidate;
  return std::nullopt;
}

}  // namespace

WalkerState generic_mh_step(const Graph& g, const WalkerState& s, const TargetDistribution& target,
                            const ProposalRule& proposal, RandomSource& rng) {
  if (auto j = mh_first_stage(g, s, target, proposal, rng)) return {*j, s.current, s.kind};
  return s;
}

WalkerState generic_mhda_step(const Graph& g, const WalkerState& s,
                              const TargetDistribution& target, const ProposalRule& proposal,
                              const EdgeProposalRule& edge_proposal, RandomSource& rng) {
  const NodeId cur = s.current;
  const auto accepted = mh_first_stage(g, s, target, proposal, rng);
  if (!accepted) return s;
  if (!s.previous || *accepted != *s.previous) return {*accepted, cur, s.kind};

  const NodeId prev = *s.previous;
  const NodeId k = edge_proposal.sample(g, prev, cur, rng);
  const double forward = edge_proposal.probability(g, prev, cur, k);
  if (!(forward > 0.0)) {
    throw WalkerError("edge proposal drew a move with zero mass");
  }
  if (k == prev) return {prev, cur, s.kind};
  const double reverse = edge_proposal.probability(g, k, cur, prev);
  const double to_next = mh_move_probability(g, target, proposal, cur, k);
  const double to_prev = mh_move_probability(g, target, proposal, cur, prev);
  const double ratio = (to_next * to_next * reverse) / (to_prev * to_prev * forward);
  if (rng.uniform() < std::min(1.0, ratio)) return {k, cur, s.kind};
  return {prev, cur, s.kind};
}

Walker::Walker(const Graph& g, WalkerState start, std::shared_ptr<const GenericKernel> kernel)
    : graph_(&g), state_(start), kernel_(std::move(kernel)) {
  if (start.current >= g.node_count()) throw WalkerError("start node out of range");
  if (start.previous && !g.has_edge(*start.previous, start.current)) {
    throw WalkerError("previous node must be a neighbor of the start node");
  }
  const bool generic =
      start.kind == WalkerKind::GENERIC_MH || start.kind == WalkerKind::GENERIC_MHDA;
  if (generic && !kernel_) throw WalkerError("generic walkers need a kernel");
  if (start.kind == WalkerKind::GENERIC_MHDA && !kernel_->edge_proposal) {
    throw WalkerError("generic MHDA needs an edge proposal rule");
  }
}

NodeId Walker::step(RandomSource& rng) {
  const Graph& g = *graph_;
  switch (state_.kind) {
    case WalkerKind::SRW: state_ = srw_step(g, state_, rng); break;
    case WalkerKind::NBRW: state_ = nbrw_step(g, state_, rng); break;
    case WalkerKind::MHRW: state_ = mhrw_step(g, state_, rng); break;
    case WalkerKind::MHRW_DA: state_ = mhrw_da_step(g, state_, rng); break;
    case WalkerKind::GENERIC_MH:
      state_ = generic_mh_step(g, state_, kernel_->target, kernel_->proposal, rng);
      break;
    case WalkerKind::GENERIC_MHDA:
      state_ = generic_mhda_step(g, state_, kernel_->target, kernel_->proposal,
                                 *kernel_->edge_proposal, rng);
      break;
  }
  return state_.current;
}

}  // namespace nbwalk
