#include "nbwalk/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace nbwalk {

NodeFunction::NodeFunction(std::function<double(NodeId)> f, double bound, std::string name)
    : f_(std::move(f)), bound_(bound), name_(std::move(name)) {
  if (!f_) throw EstimatorError("node function is empty");
  if (!(bound_ >= 0.0) || !std::isfinite(bound_)) {
    throw EstimatorError("node functions must carry a finite bound");
  }
}

NodeFunction NodeFunction::constant(double c) {
  return NodeFunction([c](NodeId) { return c; }, std::abs(c), "constant");
}

NodeFunction NodeFunction::indicator(NodeId node) {
  return NodeFunction([node](NodeId v) { return v == node ? 1.0 : 0.0; }, 1.0,
                      "1{i=" + std::to_string(node) + "}");
}

NodeFunction NodeFunction::degree_pdf(const Graph& g, std::uint32_t d) {
  return NodeFunction([&g, d](NodeId v) { return g.degree(v) == d ? 1.0 : 0.0; }, 1.0,
                      "1{d(i)=" + std::to_string(d) + "}");
}

NodeFunction NodeFunction::degree_ccdf(const Graph& g, std::uint32_t d) {
  return NodeFunction([&g, d](NodeId v) { return g.degree(v) > d ? 1.0 : 0.0; }, 1.0,
                      "1{d(i)>" + std::to_string(d) + "}");
}

NodeFunction NodeFunction::inverse_degree(const Graph& g, double scale) {
  if (!(scale > 0.0)) throw EstimatorError("weight scale must be positive");
  return NodeFunction([&g, scale](NodeId v) { return scale / g.degree(v); }, scale, "w");
}

NodeFunction NodeFunction::from_values(std::vector<double> values, std::string name) {
  double bound = 0.0;
  for (double x : values) {
    if (!std::isfinite(x)) throw EstimatorError("node function values must be finite");
    bound = std::max(bound, std::abs(x));
  }
  return NodeFunction([values = std::move(values)](NodeId v) { return values.at(v); }, bound,
                      std::move(name));
}

EstimatorAccumulator::EstimatorAccumulator(NodeFunction f, NodeFunction w)
    : f_(std::move(f)), w_(std::move(w)) {}

void EstimatorAccumulator::add(NodeId x) {
  const double fx = f_(x);
  const double wx = w_(x);
  ++count_;
  plain_sum_ += fx;
  weighted_sum_ += wx * fx;
  weight_sum_ += wx;

  if (open_length_ > 0 && x != open_node_) close_run();
  open_node_ = x;
  ++open_length_;
}

void EstimatorAccumulator::close_run() {
  if (open_length_ == 0) return;
  ++closed_runs_;
  closed_length_ += open_length_;
  closed_sum_ += static_cast<double>(open_length_) * f_(open_node_);
  open_length_ = 0;
}

void EstimatorAccumulator::merge(const EstimatorAccumulator& other) {
  count_ += other.count_;
  plain_sum_ += other.plain_sum_;
  weighted_sum_ += other.weighted_sum_;
  weight_sum_ += other.weight_sum_;
  pairs_valid_ = false;
}

double plain_mean(const EstimatorAccumulator& acc) {
  if (acc.count() == 0) throw EstimatorError("plain mean of an empty trajectory");
  return acc.plain_sum() / static_cast<double>(acc.count());
}

double ratio_estimate(const EstimatorAccumulator& acc) {
  if (acc.count() == 0) throw EstimatorError("ratio estimate of an empty trajectory");
  return acc.weighted_sum() / acc.weight_sum();
}

double semi_markov_estimate(const EstimatorAccumulator& acc) {
  if (!acc.pairs_valid()) {
    throw EstimatorError("sojourn pairs are undefined after merging accumulators");
  }
  if (acc.closed_runs() == 0) throw EstimatorError("no closed sojourn runs");
  return acc.closed_sum() / static_cast<double>(acc.closed_length());
}

Segmentation segment_sojourns(std::span<const NodeId> trajectory) {
  Segmentation out;
  std::size_t s = 0;
  while (s < trajectory.size()) {
    std::size_t e = s + 1;
    while (e < trajectory.size() && trajectory[e] == trajectory[s]) ++e;
    const Sojourn run{trajectory[s], e - s};
    if (e == trajectory.size()) {
      out.open_tail = run;
    } else {
      out.closed.push_back(run);
    }
    s = e;
  }
  return out;
}

DegreeDistributionAccumulator::DegreeDistributionAccumulator(const Graph& g)
    : graph_(&g), counts_(g.max_degree() + 1, 0) {
  for (const auto& [d, count] : degree_histogram(g)) degrees_.push_back(d);
}

void DegreeDistributionAccumulator::clear() {
  std::fill(counts_.begin(), counts_.end(), 0);
  total_ = 0;
}

std::vector<DegreeEstimate> DegreeDistributionAccumulator::estimate(Weighting weighting) const {
  if (total_ == 0) throw EstimatorError("degree estimate from an empty trajectory");
  std::vector<DegreeEstimate> out;
  out.reserve(degrees_.size());
  if (weighting == Weighting::Plain) {
    const double t = static_cast<double>(total_);
    for (auto d : degrees_) out.push_back({d, static_cast<double>(counts_[d]) / t, 0.0});
  } else {
    // Sum over samples of 1{d(X)=d}/d(X) is count[d]/d; the shared sum of w is their total.
    double weight_total = 0.0;
    for (auto d : degrees_) {
      const double w = static_cast<double>(counts_[d]) / d;
      out.push_back({d, w, 0.0});
      weight_total += w;
    }
    for (auto& e : out) e.pdf /= weight_total;
  }
  double tail = 0.0;
  for (auto it = out.rbegin(); it != out.rend(); ++it) {
    it->ccdf = tail;
    tail += it->pdf;
  }
  return out;
}

std::vector<DegreeEstimate> degree_distribution_estimate(const Graph& g,
                                                         std::span<const NodeId> trajectory,
                                                         Weighting weighting) {
  DegreeDistributionAccumulator acc(g);
  for (NodeId x : trajectory) acc.add(x);
  return acc.estimate(weighting);
}

void write_estimate_csv(std::ostream& out, std::span<const DegreeEstimate> estimates,
                        const EstimateMetadata& meta, Metric metric) {
  const bool pdf = metric != Metric::Ccdf;
  const bool ccdf = metric != Metric::Pdf;
  out << "# walker=" << meta.walker << " t=" << meta.t << " seed=" << meta.seed << '\n';
  out << "degree" << (pdf ? ",pdf_est" : "") << (ccdf ? ",ccdf_est" : "") << '\n';
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& e : estimates) {
    out << e.degree;
    if (pdf) out << ',' << e.pdf;
    if (ccdf) out << ',' << e.ccdf;
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace nbwalk
