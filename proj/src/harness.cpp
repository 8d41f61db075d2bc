#include "nbwalk/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>

#include "nbwalk/graph_io.hpp"

namespace nbwalk {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string normalized(std::string_view name) {
  std::string key;
  for (char c : name) {
    key.push_back(c == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return key;
}

bool is_builtin(WalkerKind kind) {
  return kind == WalkerKind::SRW || kind == WalkerKind::NBRW || kind == WalkerKind::MHRW ||
         kind == WalkerKind::MHRW_DA;
}

}  // namespace

std::string_view to_string(StartRule rule) {
  switch (rule) {
    case StartRule::Stationary: return "stationary";
    case StartRule::NonStationary: return "non_stationary";
    case StartRule::Uniform: return "uniform";
    case StartRule::DegreeProportional: return "degree_proportional";
    case StartRule::Fixed: return "fixed";
  }
  return "unknown";
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::Pdf: return "pdf";
    case Metric::Ccdf: return "ccdf";
    case Metric::Both: return "both";
  }
  return "unknown";
}

StartRule parse_start_rule(std::string_view name) {
  const auto key = normalized(name);
  for (auto rule : {StartRule::Stationary, StartRule::NonStationary, StartRule::Uniform,
                    StartRule::DegreeProportional, StartRule::Fixed}) {
    if (key == to_string(rule)) return rule;
  }
  throw HarnessError("unknown start rule '" + std::string(name) + "'");
}

Metric parse_metric(std::string_view name) {
  const auto key = normalized(name);
  for (auto metric : {Metric::Pdf, Metric::Ccdf, Metric::Both}) {
    if (key == to_string(metric)) return metric;
  }
  throw HarnessError("unknown metric '" + std::string(name) + "'");
}

void ExperimentSpec::validate() const {
  if (walkers.empty()) throw HarnessError("experiment lists no walkers");
  std::set<WalkerKind> seen;
  for (auto kind : walkers) {
    if (!is_builtin(kind)) {
      throw HarnessError("experiments support srw, nbrw, mhrw and mhrw-da, not " +
                         std::string(to_string(kind)));
    }
    if (!seen.insert(kind).second) {
      throw HarnessError("walker " + std::string(to_string(kind)) + " listed twice");
    }
  }
  if (sample_count < 1) throw HarnessError("sample_count must be at least 1");
  if (replications < 1) throw HarnessError("replications must be at least 1");
  if (start_rule == StartRule::Fixed && !fixed_node) {
    throw HarnessError("start_rule 'fixed' needs fixed_node");
  }
  for (auto c : checkpoints) {
    if (c < 1 || c > sample_count) {
      throw HarnessError("checkpoint " + std::to_string(c) + " is outside [1, sample_count]");
    }
  }
}

std::vector<std::uint64_t> ExperimentSpec::resolved_checkpoints() const {
  std::vector<std::uint64_t> out = checkpoints;
  if (out.empty()) out = log_grid(100, sample_count);
  out.push_back(sample_count);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void to_json(nlohmann::json& j, const ExperimentSpec& spec) {
  j = nlohmann::json::object();
  j["graph_path"] = spec.graph_path;
  auto& walkers = j["walkers"] = nlohmann::json::array();
  for (auto kind : spec.walkers) walkers.push_back(std::string(to_string(kind)));
  j["sample_count"] = spec.sample_count;
  j["checkpoints"] = spec.checkpoints;
  j["replications"] = spec.replications;
  j["start_rule"] = std::string(to_string(spec.start_rule));
  if (spec.fixed_node) j["fixed_node"] = *spec.fixed_node;
  j["burn_in"] = spec.burn_in;
  j["metric"] = std::string(to_string(spec.metric));
  j["base_seed"] = spec.base_seed;
  j["output_path"] = spec.output_path;
  j["workers"] = spec.workers;
}

void from_json(const nlohmann::json& j, ExperimentSpec& spec) {
  static const std::set<std::string> known = {
      "graph_path", "walkers",  "walker",      "sample_count", "checkpoints", "replications",
      "start_rule", "fixed_node", "burn_in",   "metric",       "base_seed",   "output_path",
      "workers"};
  if (!j.is_object()) throw HarnessError("experiment spec must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw HarnessError("unknown experiment field '" + key + "'");
  }
  spec = ExperimentSpec{};
  spec.graph_path = j.value("graph_path", std::string{});
  if (j.contains("walkers") && j.contains("walker")) {
    throw HarnessError("give either 'walker' or 'walkers', not both");
  }
  if (j.contains("walkers")) {
    for (const auto& name : j.at("walkers")) {
      spec.walkers.push_back(parse_walker_kind(name.get<std::string>()));
    }
  } else if (j.contains("walker")) {
    spec.walkers.push_back(parse_walker_kind(j.at("walker").get<std::string>()));
  }
  spec.sample_count = j.value("sample_count", spec.sample_count);
  spec.checkpoints = j.value("checkpoints", spec.checkpoints);
  spec.replications = j.value("replications", spec.replications);
  if (j.contains("start_rule")) spec.start_rule = parse_start_rule(j.at("start_rule").get<std::string>());
  if (j.contains("fixed_node")) spec.fixed_node = j.at("fixed_node").get<Label>();
  spec.burn_in = j.value("burn_in", spec.burn_in);
  if (j.contains("metric")) spec.metric = parse_metric(j.at("metric").get<std::string>());
  spec.base_seed = j.value("base_seed", spec.base_seed);
  spec.output_path = j.value("output_path", spec.output_path);
  spec.workers = j.value("workers", spec.workers);
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw HarnessError("cannot open experiment spec " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw HarnessError("experiment spec " + path + ": " + e.what());
  }
  auto spec = j.get<ExperimentSpec>();
  const std::filesystem::path graph(spec.graph_path);
  if (!spec.graph_path.empty() && graph.is_relative()) {
    spec.graph_path = (std::filesystem::path(path).parent_path() / graph).string();
  }
  spec.validate();
  return spec;
}

std::vector<std::uint64_t> log_grid(std::uint64_t lo, std::uint64_t hi) {
  std::vector<std::uint64_t> out;
  if (lo < 1 || lo > hi) return out;
  const double top = std::log10(static_cast<double>(hi)) + 1e-9;
  for (double e = std::log10(static_cast<double>(lo)); e <= top; e += 0.5) {
    const auto t = static_cast<std::uint64_t>(std::llround(std::pow(10.0, e)));
    if (t <= hi && (out.empty() || out.back() != t)) out.push_back(t);
  }
  return out;
}

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("NBWALK_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

std::vector<double> degree_weights(const Graph& g) {
  std::vector<double> w(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) w[v] = g.degree(v);
  return w;
}

}  // namespace

StartSampler::StartSampler(const Graph& g) : graph_(&g), by_degree_(degree_weights(g)) {}

WalkerState StartSampler::draw(WalkerKind kind, StartRule rule, RandomSource& rng,
                               std::optional<NodeId> fixed) const {
  const Graph& g = *graph_;
  auto uniform_node = [&] { return static_cast<NodeId>(rng.below(g.node_count())); };
  auto degree_node = [&] { return static_cast<NodeId>(by_degree_.sample(rng)); };
  const bool mh = targets_uniform(kind);

  WalkerState s{0, std::nullopt, kind};
  switch (rule) {
    case StartRule::Stationary:
      if (!mh) {
        s.current = degree_node();
        if (kind == WalkerKind::NBRW) {
          auto nb = g.neighbors(s.current);
          s.previous = nb[rng.below(nb.size())];
        }
      } else {
        s.current = uniform_node();
        if (kind == WalkerKind::MHRW_DA) {
          // Accepting neighbor i with probability min{1, d(j)/d(i)} leaves it
          // with weight proportional to min{1/d(i), 1/d(j)}.
          auto nb = g.neighbors(s.current);
          const double dj = g.degree(s.current);
          for (;;) {
            const NodeId i = nb[rng.below(nb.size())];
            if (rng.uniform() < dj / g.degree(i)) {
              s.previous = i;
              break;
            }
          }
        }
      }
      break;
    case StartRule::NonStationary: s.current = mh ? degree_node() : uniform_node(); break;
    case StartRule::Uniform: s.current = uniform_node(); break;
    case StartRule::DegreeProportional: s.current = degree_node(); break;
    case StartRule::Fixed:
      if (!fixed || *fixed >= g.node_count()) throw HarnessError("fixed start node is missing");
      s.current = *fixed;
      break;
  }
  return s;
}

std::vector<double> walker_stationary(const Graph& g, WalkerKind kind) {
  if (!is_builtin(kind)) throw HarnessError("no closed-form stationary law for generic walkers");
  std::vector<double> pi(g.node_count());
  if (targets_uniform(kind)) {
    std::fill(pi.begin(), pi.end(), 1.0 / g.node_count());
  } else {
    const double total = 2.0 * g.edge_count();
    for (NodeId v = 0; v < g.node_count(); ++v) pi[v] = g.degree(v) / total;
  }
  return pi;
}

std::vector<std::vector<DegreeEstimate>> replicate_walk(const Graph& g, const StartSampler& starts,
                                                        WalkerKind kind, StartRule rule,
                                                        std::optional<NodeId> fixed,
                                                        std::uint64_t burn_in,
                                                        std::span<const std::uint64_t> checkpoints,
                                                        std::uint64_t seed) {
  if (checkpoints.empty()) throw HarnessError("no checkpoints to report");
  RandomSource rng(seed);
  Walker walker(g, starts.draw(kind, rule, rng, fixed));
  for (std::uint64_t s = 0; s < burn_in; ++s) walker.step(rng);

  const Weighting weighting = targets_uniform(kind) ? Weighting::Plain : Weighting::Ratio;
  DegreeDistributionAccumulator acc(g);
  std::vector<std::vector<DegreeEstimate>> out;
  out.reserve(checkpoints.size());
  std::size_t next = 0;
  const std::uint64_t t = checkpoints.back();
  for (std::uint64_t s = 1; s <= t; ++s) {
    acc.add(walker.step(rng));
    while (next < checkpoints.size() && checkpoints[next] == s) {
      out.push_back(acc.estimate(weighting));
      ++next;
    }
  }
  return out;
}

std::vector<double> nrmse(std::span<const double> truth,
                          const std::vector<std::vector<double>>& estimates) {
  if (estimates.empty()) throw HarnessError("NRMSE needs at least one replication");
  std::vector<double> sq(truth.size(), 0.0);
  for (const auto& est : estimates) {
    if (est.size() != truth.size()) throw HarnessError("estimate length does not match truth");
    for (std::size_t k = 0; k < truth.size(); ++k) {
      const double e = est[k] - truth[k];
      sq[k] += e * e;
    }
  }
  std::vector<double> out(truth.size());
  const double r = static_cast<double>(estimates.size());
  for (std::size_t k = 0; k < truth.size(); ++k) {
    out[k] = truth[k] > 0.0 ? std::sqrt(sq[k] / r) / truth[k]
                            : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

double averaged_nrmse(std::span<const double> truth, std::span<const double> per_entry) {
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    if (truth[k] > 0.0) {
      total += per_entry[k];
      ++count;
    }
  }
  if (count == 0) throw HarnessError("no entry has positive truth");
  return total / static_cast<double>(count);
}

CostSaving cost_saving(std::span<const std::uint64_t> grid, std::span<const double> baseline,
                       std::span<const double> improved) {
  if (grid.size() != baseline.size() || grid.size() != improved.size()) {
    throw HarnessError("cost curves must share one grid");
  }
  std::vector<double> envelope(improved.begin(), improved.end());
  for (std::size_t k = 1; k < envelope.size(); ++k) {
    envelope[k] = std::min(envelope[k], envelope[k - 1]);
  }

  CostSaving out;
  out.total = grid.size();
  double sum = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double y = baseline[k];
    if (!(y > 0.0)) continue;
    std::size_t j = 0;
    while (j < envelope.size() && !(envelope[j] <= y)) ++j;
    if (j == envelope.size()) continue;
    double t;
    if (envelope[j] == y) {
      t = static_cast<double>(grid[j]);
    } else if (j == 0 || !(envelope[j] > 0.0)) {
      continue;
    } else {
      const double x0 = std::log(static_cast<double>(grid[j - 1]));
      const double x1 = std::log(static_cast<double>(grid[j]));
      const double y0 = std::log(envelope[j - 1]);
      const double y1 = std::log(envelope[j]);
      t = std::exp(x0 + (std::log(y) - y0) * (x1 - x0) / (y1 - y0));
    }
    sum += 1.0 - t / static_cast<double>(grid[k]);
    ++out.covered;
  }
  if (out.covered > 0) out.saving = sum / static_cast<double>(out.covered);
  return out;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw HarnessError("distributions have different supports");
  double total = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) total += std::abs(p[k] - q[k]);
  return 0.5 * total;
}

double empirical_distribution_check(const Graph& g, WalkerKind kind, std::uint64_t steps,
                                    std::uint64_t seed, std::span<const double> exact) {
  if (steps == 0) throw HarnessError("empirical check needs at least one step");
  RandomSource rng(seed);
  StartSampler starts(g);
  Walker walker(g, starts.draw(kind, StartRule::Stationary, rng));
  std::vector<std::uint64_t> visits(g.node_count(), 0);
  for (std::uint64_t s = 0; s < steps; ++s) ++visits[walker.step(rng)];
  std::vector<double> freq(g.node_count());
  for (std::size_t v = 0; v < freq.size(); ++v) {
    freq[v] = static_cast<double>(visits[v]) / static_cast<double>(steps);
  }
  return total_variation(freq, exact);
}

std::optional<WalkerKind> baseline_of(WalkerKind improved) {
  if (improved == WalkerKind::NBRW) return WalkerKind::SRW;
  if (improved == WalkerKind::MHRW_DA) return WalkerKind::MHRW;
  return std::nullopt;
}

const WalkerCurve* ExperimentResult::curve(WalkerKind kind) const {
  for (const auto& c : curves) {
    if (c.walker == kind) return &c;
  }
  return nullptr;
}

ExperimentResult run_experiment(const Graph& input, const ExperimentSpec& spec) {
  spec.validate();
  const auto start = Clock::now();
  const Graph g = largest_connected_component(input);
  const StartSampler starts(g);

  std::optional<NodeId> fixed;
  if (spec.start_rule == StartRule::Fixed) {
    fixed = g.find(*spec.fixed_node);
    if (!fixed) {
      throw HarnessError("fixed_node " + std::to_string(*spec.fixed_node) +
                         " is not in the largest connected component");
    }
  }

  ExperimentResult result;
  result.node_count = g.node_count();
  result.edge_count = g.edge_count();
  result.checkpoints = spec.resolved_checkpoints();
  result.replications = spec.replications;
  result.workers = resolve_workers(spec.workers);
  for (const auto& d : degree_distribution(g)) {
    result.degrees.push_back(d.degree);
    result.truth_pdf.push_back(d.pdf);
    result.truth_ccdf.push_back(d.ccdf);
  }

  for (auto kind : spec.walkers) {
    const auto walker_start = Clock::now();
    const auto stream = static_cast<std::uint64_t>(kind) + 1;
    auto runs = run_replications(spec.replications, result.workers, [&](std::size_t r) {
      return replicate_walk(g, starts, kind, spec.start_rule, fixed, spec.burn_in,
                            result.checkpoints, derive_seed(spec.base_seed, stream, r));
    });

    WalkerCurve curve{kind, {}, {}, {}, {}, 0.0};
    const std::size_t D = result.degrees.size();
    std::vector<std::vector<double>> pdf(runs.size(), std::vector<double>(D));
    std::vector<std::vector<double>> ccdf(runs.size(), std::vector<double>(D));
    for (std::size_t c = 0; c < result.checkpoints.size(); ++c) {
      for (std::size_t r = 0; r < runs.size(); ++r) {
        for (std::size_t k = 0; k < D; ++k) {
          pdf[r][k] = runs[r][c][k].pdf;
          ccdf[r][k] = runs[r][c][k].ccdf;
        }
      }
      curve.nrmse_pdf.push_back(nrmse(result.truth_pdf, pdf));
      curve.nrmse_ccdf.push_back(nrmse(result.truth_ccdf, ccdf));
      curve.averaged_pdf.push_back(averaged_nrmse(result.truth_pdf, curve.nrmse_pdf.back()));
      curve.averaged_ccdf.push_back(averaged_nrmse(result.truth_ccdf, curve.nrmse_ccdf.back()));
    }
    curve.seconds = seconds_since(walker_start);
    result.curves.push_back(std::move(curve));
  }

  for (const auto& improved : result.curves) {
    const auto base_kind = baseline_of(improved.walker);
    if (!base_kind) continue;
    const WalkerCurve* base = result.curve(*base_kind);
    if (!base) continue;
    if (spec.metric != Metric::Ccdf) {
      result.savings.push_back({*base_kind, improved.walker, Metric::Pdf,
                                cost_saving(result.checkpoints, base->averaged_pdf,
                                            improved.averaged_pdf)});
    }
    if (spec.metric != Metric::Pdf) {
      result.savings.push_back({*base_kind, improved.walker, Metric::Ccdf,
                                cost_saving(result.checkpoints, base->averaged_ccdf,
                                            improved.averaged_ccdf)});
    }
  }
  result.seconds = seconds_since(start);
  return result;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  return run_experiment(load_lcc(spec.graph_path), spec);
}

void write_result_csv(std::ostream& out, const ExperimentResult& result, Metric metric) {
  if (metric == Metric::Both) throw HarnessError("write one metric per CSV");
  const bool pdf = metric == Metric::Pdf;
  const auto& truth = pdf ? result.truth_pdf : result.truth_ccdf;
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "walker,t,degree,truth,nrmse,ratio_vs_baseline\n";
  for (const auto& curve : result.curves) {
    const auto base_kind = baseline_of(curve.walker);
    const WalkerCurve* base = base_kind ? result.curve(*base_kind) : nullptr;
    const auto& table = pdf ? curve.nrmse_pdf : curve.nrmse_ccdf;
    for (std::size_t c = 0; c < result.checkpoints.size(); ++c) {
      for (std::size_t k = 0; k < result.degrees.size(); ++k) {
        if (!(truth[k] > 0.0)) continue;
        const double e = table[c][k];
        out << to_string(curve.walker) << ',' << result.checkpoints[c] << ','
            << result.degrees[k] << ',' << truth[k] << ',' << e << ',';
        if (base) {
          const double b = (pdf ? base->nrmse_pdf : base->nrmse_ccdf)[c][k];
          if (b > 0.0 && e > 0.0) out << b / e;
        }
        out << '\n';
      }
    }
  }
  out.precision(old_precision);
}

nlohmann::json summary_json(const ExperimentResult& result, const ExperimentSpec& spec) {
  nlohmann::json j;
  j["spec"] = spec;
  j["graph"] = {{"nodes", result.node_count}, {"edges", result.edge_count}};
  j["replications"] = result.replications;
  j["checkpoints"] = result.checkpoints;
  j["workers"] = result.workers;
  auto& seeds = j["seeds"] = nlohmann::json::object();
  auto& walkers = j["walkers"] = nlohmann::json::object();
  auto& timings = j["timings"] = nlohmann::json::object();
  for (const auto& curve : result.curves) {
    const std::string name(to_string(curve.walker));
    seeds[name] = {{"base_seed", spec.base_seed},
                   {"stream", static_cast<std::uint64_t>(curve.walker) + 1},
                   {"scheme", "derive_seed(base_seed, stream, replication)"}};
    walkers[name] = {{"averaged_nrmse_pdf", curve.averaged_pdf},
                     {"averaged_nrmse_ccdf", curve.averaged_ccdf}};
    timings[name + "_seconds"] = curve.seconds;
  }
  timings["total_seconds"] = result.seconds;
  auto& savings = j["cost_savings"] = nlohmann::json::array();
  for (const auto& s : result.savings) {
    savings.push_back({{"baseline", std::string(to_string(s.baseline))},
                       {"improved", std::string(to_string(s.improved))},
                       {"metric", std::string(to_string(s.metric))},
                       {"saving", s.saving.saving},
                       {"covered", s.saving.covered},
                       {"total", s.saving.total}});
  }
  return j;
}

void write_outputs(const ExperimentResult& result, const ExperimentSpec& spec) {
  if (spec.output_path.empty()) throw HarnessError("experiment spec has no output_path");
  auto write_csv = [&](Metric metric, const char* suffix) {
    const std::string path = spec.output_path + suffix;
    std::ofstream out(path);
    if (!out) throw HarnessError("cannot write " + path);
    write_result_csv(out, result, metric);
  };
  if (spec.metric != Metric::Ccdf) write_csv(Metric::Pdf, "_pdf.csv");
  if (spec.metric != Metric::Pdf) write_csv(Metric::Ccdf, "_ccdf.csv");
  const std::string path = spec.output_path + ".json";
  std::ofstream out(path);
  if (!out) throw HarnessError("cannot write " + path);
  out << summary_json(result, spec).dump(2) << '\n';
}

}  // namespace nbwalk
