#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nbwalk/graph.hpp"
#include "nbwalk/walkers.hpp"

namespace nbwalk {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class OracleError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kIdentityTolerance = 1e-12;
inline constexpr double kStationaryTolerance = 1e-10;
inline constexpr double kInequalitySlack = 1e-9;
inline constexpr std::size_t kMaxOracleNodes = 2000;
inline constexpr std::size_t kMaxOracleEdgeStates = 5000;

using StateClasses = std::vector<std::vector<std::size_t>>;

/// Closed communicating classes of the support graph {P > 0}, each sorted,
/// ordered by smallest member. Transient states belong to none of them.
StateClasses closed_classes(const Matrix& P);

struct Stationary {
  Vector pi;
  bool irreducible = true;
  StateClasses classes;
};

/// Stationary law of P. An irreducible chain has exactly one. A chain with
/// several closed classes has a family of them; `reference` then picks the
/// member that gives each class the reference mass it holds. Without a
/// reference a reducible chain throws OracleError.
Stationary stationary_distribution(const Matrix& P, const std::optional<Vector>& reference = {});

/// Dense chain on an ordered state list.
struct ChainMatrix {
  Matrix P;
  Vector pi;
  bool irreducible = true;
  StateClasses classes;
};

ChainMatrix make_chain(Matrix P, const std::optional<Vector>& reference = {});

/// Node-level matrix for SRW, MHRW or GENERIC_MH (the latter needs `kernel`).
ChainMatrix build_transition_matrix(const Graph& g, WalkerKind kind,
                                    const GenericKernel* kernel = nullptr);

/// Uniform target, SRW proposal and non-backtracking edge proposal: the kernel
/// under which the generic walkers coincide with MHRW and MHRW-DA.
GenericKernel mhrw_da_kernel(const Graph& g);

/// Jump chain of an MH chain with its per-node leaving rates gamma = 1 - P(i,i).
struct EmbeddedChain {
  ChainMatrix chain;
  Vector gamma;
};

EmbeddedChain embedded_chain(const ChainMatrix& base);

struct EdgeState {
  NodeId from;
  NodeId to;
  bool operator==(const EdgeState&) const = default;
};

/// Chain over directed-edge states e_ij with P(i,j) > 0 of some node chain.
struct AugmentedChain {
  std::size_t node_count = 0;
  std::vector<EdgeState> omega;
  std::map<std::pair<NodeId, NodeId>, std::size_t> index;
  Matrix P;
  Vector pi;
  bool irreducible = true;
  StateClasses classes;

  std::optional<std::size_t> index_of(NodeId i, NodeId j) const;
};

enum class AugmentedKind { NBRW, MHDA };

/// NBRW chain built on SRW, or the delayed-acceptance chain built on the
/// embedded jump chain of generic MH. MHDA uses `kernel` (which must carry an
/// edge proposal) or MHRW-DA's kernel when null.
AugmentedChain build_augmented_chain(const Graph& g, AugmentedKind kind,
                                     const GenericKernel* kernel = nullptr);

/// The delayed-acceptance process observed at every time step: from e_ij it
/// stays with probability 1 - gamma(j), otherwise jumps as the embedded chain.
AugmentedChain mhda_time_chain(const AugmentedChain& embedded, const Vector& gamma);

/// sum_i pi(e_ij) per node j.
Vector node_marginal(const AugmentedChain& chain);
/// g(e_ij) = f(j)
Vector lift(const AugmentedChain& chain, const Vector& f);

struct NealReport {
  double balance = 0.0;
  double inequality = 0.0;
  std::size_t pairs = 0;
};

/// Max over e_ij, e_jk in the augmented space with i != k of
/// |P(j,i)P'(e_ij,e_jk) - P(j,k)P'(e_kj,e_ji)| and max(0, P(j,k) - P'(e_ij,e_jk)).
NealReport check_neal_conditions(const Matrix& base, const AugmentedChain& aug);

/// Second-stage acceptance A'(e_ij, e_jk) for the delayed-acceptance chain.
double delayed_acceptance(const Graph& g, const Matrix& mh, const EdgeProposalRule& edge,
                          NodeId i, NodeId j, NodeId k);

struct ReciprocityReport {
  double residual = 0.0;
  double min_acceptance = 1.0;
  double max_acceptance = 0.0;
  std::size_t pairs = 0;
};

/// |A'(e_ij,e_jk) - T(e_kj,e_ji) A'(e_kj,e_ji)| over all admissible paths i-j-k, i != k.
ReciprocityReport check_acceptance_reciprocity(const Graph& g, const Matrix& mh,
                                               const EdgeProposalRule& edge);

/// max |F(x) - F(1/x)/x| on a log grid over [1e-6, 1e6], where F maps the
/// forward ratio T(e_ij,e_jk) to A'(e_ij,e_jk) = min{1, 1/T(e_ij,e_jk)}.
double acceptance_function_residual();

double detailed_balance_residual(const Matrix& P, const Vector& pi);
double row_sum_residual(const Matrix& P);
/// max_j |(pi P - pi)_j|
double stationarity_residual(const Matrix& P, const Vector& pi);

/// Exact sigma^2(f) from the fundamental matrix. On a reducible chain the
/// result is the class-weighted sum when every class has the same mean of f,
/// and +inf otherwise.
double asymptotic_variance(const ChainMatrix& chain, const Vector& f);
/// Lifted with g(e_ij) = f(j).
double asymptotic_variance(const AugmentedChain& chain, const Vector& f);

/// Var_pi(f) + 2 sum_{k=1..K} Cov_pi(f(X_0), f(X_k)); irreducible chains only.
double truncated_asymptotic_variance(const ChainMatrix& chain, const Vector& f,
                                     std::size_t lags = 10000);

/// Variance of the ratio estimator targeting u: sigma^2(h) with
/// h = (u/pi)(f - E_u f).
double reweighted_asymptotic_variance(const ChainMatrix& chain, const Vector& f, const Vector& u);
double reweighted_asymptotic_variance(const AugmentedChain& chain, const Vector& f,
                                      const Vector& u);

struct VarianceReport {
  double sigma2 = 0.0;  ///< Gamma + Delta, per embedded step
  Vector gamma_vec;
  double Gamma = 0.0;
  double Delta = 0.0;
  double per_time_step = 0.0;  ///< sigma2 * E_pitilde(1/gamma)
};

/// Semi-Markov variance of the pair estimator driven by the embedded chain
/// (node level for MH, augmented for MHDA) with geometric sojourns of rate gamma.
VarianceReport semi_markov_asymptotic_variance(const ChainMatrix& embedded, const Vector& gamma,
                                               const Vector& f);
VarianceReport semi_markov_asymptotic_variance(const AugmentedChain& embedded,
                                               const Vector& gamma, const Vector& f);

/// pi(i) proportional to pitilde(i)/gamma(i).
Vector semi_markov_stationary(const Vector& pi_tilde, const Vector& gamma);

/// One named check: passes when `value` is within `tolerance` in the stated
/// direction ("<=" for residuals, ">" for required violations).
struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  std::string comparison = "<=";
  bool pass = false;
};

/// Check groups: "stationarity", "balance", "neal", "reciprocity", "variance".
std::vector<std::string> oracle_check_groups();

/// Runs the exact identities and inequalities of the requested groups on g,
/// which must be connected and within the oracle size guards.
std::vector<CheckResult> run_oracle_checks(const Graph& g, const std::vector<std::string>& groups);

}  // namespace nbwalk
