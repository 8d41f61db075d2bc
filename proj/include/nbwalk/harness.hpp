#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "json.hpp"

#include "nbwalk/estimators.hpp"
#include "nbwalk/graph.hpp"
#include "nbwalk/random.hpp"
#include "nbwalk/walkers.hpp"

namespace nbwalk {

class HarnessError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// NonStationary starts each walker from the other family's stationary law:
/// uniform for SRW/NBRW, degree-proportional for MHRW/MHRW-DA.
enum class StartRule { Stationary, NonStationary, Uniform, DegreeProportional, Fixed };

std::string_view to_string(StartRule rule);
std::string_view to_string(Metric metric);
StartRule parse_start_rule(std::string_view name);
Metric parse_metric(std::string_view name);

/// Declarative experiment. The JSON form uses the same field names; "walker"
/// (a single kind) is accepted in place of "walkers".
struct ExperimentSpec {
  std::string graph_path;
  std::vector<WalkerKind> walkers;
  std::uint64_t sample_count = 10000;
  /// Prefix lengths at which NRMSE is also reported. Empty means the
  /// half-decade grid 10^2, 10^2.5, ... up to sample_count.
  std::vector<std::uint64_t> checkpoints;
  std::uint64_t replications = 1000;
  StartRule start_rule = StartRule::Stationary;
  std::optional<Label> fixed_node;
  std::uint64_t burn_in = 0;
  Metric metric = Metric::Both;
  std::uint64_t base_seed = 1;
  std::string output_path;
  /// 0 picks NBWALK_WORKERS or the hardware concurrency.
  unsigned workers = 0;

  /// Throws HarnessError on inconsistent settings.
  void validate() const;
  /// Sorted checkpoint list ending in sample_count.
  std::vector<std::uint64_t> resolved_checkpoints() const;
};

void to_json(nlohmann::json& j, const ExperimentSpec& spec);
void from_json(const nlohmann::json& j, ExperimentSpec& spec);
/// Reads and validates a spec file. A relative graph_path is taken relative
/// to the spec file's directory.
ExperimentSpec load_spec(const std::string& path);

/// 10^2, 10^2.5, ..., 10^5 rounded to integers.
std::vector<std::uint64_t> log_grid(std::uint64_t lo = 100, std::uint64_t hi = 100000);

unsigned resolve_workers(unsigned requested);

/// Runs work(0..count-1) on a pool of threads and returns the results in index
/// order, so the output never depends on scheduling. The first exception
/// thrown by any task is rethrown after all threads join.
template <class Work>
auto run_replications(std::size_t count, unsigned workers, Work&& work)
    -> std::vector<std::invoke_result_t<Work&, std::size_t>> {
  using Result = std::invoke_result_t<Work&, std::size_t>;
  std::vector<std::optional<Result>> slots(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto loop = [&] {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= count) return;
      try {
        slots[r].emplace(work(r));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
      }
    }
  };
  const unsigned threads =
      static_cast<unsigned>(std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(count, 1)));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < threads; ++w) pool.emplace_back(loop);
  loop();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  std::vector<Result> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// Draws initial walker states for each start rule.
class StartSampler {
public:
  explicit StartSampler(const Graph& g);

  /// Stationary: SRW/NBRW pick a node with probability d(i)/2|E| and NBRW
  /// also a uniform previous neighbor; MHRW/MHRW-DA pick a uniform node and
  /// MHRW-DA a previous neighbor i with probability proportional to
  /// min{1/d(i), 1/d(j)}. Uniform and DegreeProportional give no previous.
  WalkerState draw(WalkerKind kind, StartRule rule, RandomSource& rng,
                   std::optional<NodeId> fixed = std::nullopt) const;

private:
  const Graph* graph_;
  AliasTable by_degree_;
};

/// Exact stationary node law of a built-in walker: d(i)/2|E| or uniform.
std::vector<double> walker_stationary(const Graph& g, WalkerKind kind);

/// Degree-distribution estimates from X_{B+1..B+t} of one walk, one vector
/// per checkpoint. SRW/NBRW use the ratio estimator, MHRW/MHRW-DA the plain mean.
std::vector<std::vector<DegreeEstimate>> replicate_walk(const Graph& g, const StartSampler& starts,
                                                        WalkerKind kind, StartRule rule,
                                                        std::optional<NodeId> fixed,
                                                        std::uint64_t burn_in,
                                                        std::span<const std::uint64_t> checkpoints,
                                                        std::uint64_t seed);

/// sqrt(mean_r (x_r - x)^2) / x per entry; NaN where x = 0.
std::vector<double> nrmse(std::span<const double> truth,
                          const std::vector<std::vector<double>>& estimates);
/// Unweighted mean over entries with positive truth.
double averaged_nrmse(std::span<const double> truth, std::span<const double> per_entry);

struct CostSaving {
  double saving = 0.0;  ///< mean of 1 - t_improved/t_baseline over covered points
  std::size_t covered = 0;
  std::size_t total = 0;
};

/// Curves are (sample count, averaged NRMSE) on a shared increasing grid. The
/// improved curve is made monotone by a running minimum and inverted by
/// log-log linear interpolation; baseline points outside its range are
/// reported as uncovered.
CostSaving cost_saving(std::span<const std::uint64_t> grid, std::span<const double> baseline,
                       std::span<const double> improved);

/// 1/2 sum |p - q|
double total_variation(std::span<const double> p, std::span<const double> q);
/// TV distance between visit frequencies over `steps` steps and `exact`.
double empirical_distribution_check(const Graph& g, WalkerKind kind, std::uint64_t steps,
                                    std::uint64_t seed, std::span<const double> exact);

/// Walker pairs compared in outputs: SRW vs NBRW and MHRW vs MHRW-DA.
std::optional<WalkerKind> baseline_of(WalkerKind improved);

struct WalkerCurve {
  WalkerKind walker;
  /// [checkpoint][degree index]
  std::vector<std::vector<double>> nrmse_pdf;
  std::vector<std::vector<double>> nrmse_ccdf;
  std::vector<double> averaged_pdf;
  std::vector<double> averaged_ccdf;
  double seconds = 0.0;
};

struct SavingReport {
  WalkerKind baseline;
  WalkerKind improved;
  Metric metric;
  CostSaving saving;
};

struct ExperimentResult {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  std::vector<std::uint64_t> checkpoints;
  std::vector<std::uint32_t> degrees;
  std::vector<double> truth_pdf;
  std::vector<double> truth_ccdf;
  std::vector<WalkerCurve> curves;
  std::vector<SavingReport> savings;
  std::uint64_t replications = 0;
  unsigned workers = 0;
  double seconds = 0.0;

  const WalkerCurve* curve(WalkerKind kind) const;
};

/// Runs the spec on an already loaded graph (its LCC is taken again, which
/// is a no-op for a connected graph).
ExperimentResult run_experiment(const Graph& g, const ExperimentSpec& spec);
/// Loads spec.graph_path, takes the LCC and runs.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// walker,t,degree,truth,nrmse,ratio_vs_baseline for one metric. Degrees with
/// zero truth are omitted; the ratio column is empty unless the row's walker
/// has its baseline in the result and both NRMSEs are positive.
void write_result_csv(std::ostream& out, const ExperimentResult& result, Metric metric);
nlohmann::json summary_json(const ExperimentResult& result, const ExperimentSpec& spec);
/// <output_path>_pdf.csv and/or <output_path>_ccdf.csv plus <output_path>.json.
void write_outputs(const ExperimentResult& result, const ExperimentSpec& spec);

}  // namespace nbwalk
