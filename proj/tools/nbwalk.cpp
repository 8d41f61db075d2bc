#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nbwalk/estimators.hpp"
#include "nbwalk/graph.hpp"
#include "nbwalk/graph_io.hpp"
#include "nbwalk/harness.hpp"
#include "nbwalk/oracle.hpp"
#include "nbwalk/random.hpp"
#include "nbwalk/walkers.hpp"

using namespace nbwalk;
using nlohmann::json;

namespace {

std::vector<std::string> split_groups(const std::string& text) {
  if (text == "all") return oracle_check_groups();
  std::vector<std::string> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

json check_json(const CheckResult& c) {
  json j = {{"name", c.name}, {"tolerance", c.tolerance}, {"comparison", c.comparison},
            {"pass", c.pass}};
  if (std::isfinite(c.value)) {
    j["max_residual"] = c.value;
  } else {
    j["max_residual"] = c.value > 0 ? "inf" : "-inf";
  }
  return j;
}

json report_json(const std::string& graph, const Graph& g, const std::vector<CheckResult>& checks) {
  json j;
  j["graph"] = graph;
  j["nodes"] = g.node_count();
  j["edges"] = g.edge_count();
  auto& list = j["checks"] = json::array();
  bool all = true;
  for (const auto& c : checks) {
    list.push_back(check_json(c));
    all = all && c.pass;
  }
  j["pass"] = all;
  return j;
}

int cmd_stats(const std::string& path) {
  const Graph raw = load_edge_list_file(path);
  const Graph lcc = largest_connected_component(raw);
  json j;
  j["graph"] = path;
  j["nodes"] = raw.node_count();
  j["edges"] = raw.edge_count();
  j["lcc_nodes"] = lcc.node_count();
  j["lcc_edges"] = lcc.edge_count();
  j["lcc_max_degree"] = lcc.max_degree();
  auto& hist = j["lcc_degree_histogram"] = json::object();
  for (const auto& [d, count] : degree_histogram(lcc)) hist[std::to_string(d)] = count;
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_walk(const std::string& path, const std::string& kind_name, std::uint64_t steps,
             std::uint64_t seed, const std::string& start_name, bool tsv) {
  const Graph g = load_lcc(path);
  const WalkerKind kind = parse_walker_kind(kind_name);
  if (kind == WalkerKind::GENERIC_MH || kind == WalkerKind::GENERIC_MHDA) {
    throw WalkerError("the walk command runs srw, nbrw, mhrw and mhrw-da");
  }
  RandomSource rng(seed);
  const StartSampler starts(g);
  Walker walker(g, starts.draw(kind, parse_start_rule(start_name), rng));
  std::ostream& out = std::cout;
  if (tsv) out << "step\tcurrent\tprevious\n";
  auto emit = [&](std::uint64_t step) {
    const auto& s = walker.state();
    if (!tsv) {
      out << s.current << '\n';
      return;
    }
    out << step << '\t' << s.current << '\t';
    if (s.previous) out << *s.previous;
    out << '\n';
  };
  emit(0);
  for (std::uint64_t s = 1; s <= steps; ++s) {
    walker.step(rng);
    emit(s);
  }
  return 0;
}

int cmd_estimate(const std::string& path, const std::string& kind_name, std::uint64_t t,
                 const std::string& metric_name, std::uint64_t seed, const std::string& start_name,
                 std::uint64_t burn_in) {
  const Graph g = load_lcc(path);
  const WalkerKind kind = parse_walker_kind(kind_name);
  const StartSampler starts(g);
  const std::vector<std::uint64_t> checkpoints{t};
  const auto estimates = replicate_walk(g, starts, kind, parse_start_rule(start_name),
                                        std::nullopt, burn_in, checkpoints, seed);
  write_estimate_csv(std::cout, estimates.back(), {std::string(to_string(kind)), t, seed},
                     parse_metric(metric_name));
  return 0;
}

int cmd_nrmse(const std::string& spec_path, const std::string& output, unsigned workers) {
  ExperimentSpec spec = load_spec(spec_path);
  if (!output.empty()) spec.output_path = output;
  if (workers > 0) spec.workers = workers;
  const ExperimentResult result = run_experiment(spec);
  if (!spec.output_path.empty()) write_outputs(result, spec);
  std::cout << summary_json(result, spec).dump(2) << '\n';
  return 0;
}

int cmd_oracle(const std::string& path, const std::string& checks, bool verify) {
  const Graph g = load_lcc(path);
  std::vector<std::string> groups = split_groups(checks);
  std::vector<CheckResult> results = run_oracle_checks(g, groups);
  if (verify) {
    std::uint64_t degree_sum = 0;
    for (NodeId v = 0; v < g.node_count(); ++v) degree_sum += g.degree(v);
    const double gap = std::abs(static_cast<double>(degree_sum) - 2.0 * g.edge_count());
    results.insert(results.begin(), {"degree_sum", gap, 0.0, "<=", gap == 0.0});
  }
  const json report = report_json(path, g, results);
  std::cout << report.dump(2) << '\n';
  return verify && !report["pass"].get<bool>() ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-walk graph sampling toolkit"};
  app.require_subcommand(1);

  std::string graph, kind = "nbrw", start = "stationary", metric = "both", checks = "all";
  std::string spec_path, output;
  std::uint64_t steps = 10, t = 10000, seed = 1, burn_in = 0;
  unsigned workers = 0;
  bool tsv = false;

  auto* stats = app.add_subcommand("stats", "Graph and LCC summary as JSON");
  stats->add_option("graph", graph, "Edge list")->required();

  auto* walk = app.add_subcommand("walk", "Dump one trajectory (compact node ids)");
  walk->add_option("graph", graph, "Edge list")->required();
  walk->add_option("--kind", kind, "srw, nbrw, mhrw or mhrw-da")->capture_default_str();
  walk->add_option("--steps", steps, "Number of steps")->capture_default_str();
  walk->add_option("--seed", seed, "Random seed")->capture_default_str();
  walk->add_option("--start", start, "Start rule")->capture_default_str();
  walk->add_flag("--tsv", tsv, "Write step, current, previous columns");

  auto* estimate = app.add_subcommand("estimate", "Degree distribution estimate as CSV");
  estimate->add_option("graph", graph, "Edge list")->required();
  estimate->add_option("--kind", kind, "srw, nbrw, mhrw or mhrw-da")->capture_default_str();
  estimate->add_option("--t", t, "Number of samples")->capture_default_str();
  estimate->add_option("--metric", metric, "pdf, ccdf or both")->capture_default_str();
  estimate->add_option("--seed", seed, "Random seed")->capture_default_str();
  estimate->add_option("--start", start, "Start rule")->capture_default_str();
  estimate->add_option("--burn-in", burn_in, "Steps dropped before sampling")->capture_default_str();

  auto* nrmse_cmd = app.add_subcommand("nrmse", "Run a replicated NRMSE experiment");
  nrmse_cmd->add_option("spec", spec_path, "Experiment spec (JSON)")->required();
  nrmse_cmd->add_option("--output", output, "Override the spec's output_path");
  nrmse_cmd->add_option("--workers", workers, "Override the worker count");

  auto* oracle = app.add_subcommand("oracle", "Exact-chain checks as a JSON report");
  oracle->add_option("graph", graph, "Edge list")->required();
  oracle->add_option("--checks", checks, "all or a comma list of groups")->capture_default_str();

  auto* verify = app.add_subcommand("verify", "Like oracle with all checks; exit 1 on failure");
  verify->add_option("graph", graph, "Edge list")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*stats) return cmd_stats(graph);
    if (*walk) return cmd_walk(graph, kind, steps, seed, start, tsv);
    if (*estimate) return cmd_estimate(graph, kind, t, metric, seed, start, burn_in);
    if (*nrmse_cmd) return cmd_nrmse(spec_path, output, workers);
    if (*oracle) return cmd_oracle(graph, checks, false);
    if (*verify) return cmd_oracle(graph, "all", true);
  } catch (const std::exception& e) {
    std::cerr << "nbwalk: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
