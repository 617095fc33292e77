#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace chromalign {

/// How each outer iteration moves from the current coupling T to the entropic
/// OT solution S of the linearised problem.
enum class GwStep {
  /// T <- S (the classic entropic GW fixed-point update).
  kFull,
  /// T <- T + gamma (S - T) with gamma minimising the exact quadratic GW cost
  /// on [0, 1]. Monotone in the unregularised cost; avoids 2-cycles.
  kLineSearch,
};

struct GwOptions {
  double epsilon = 5e-3;
  std::size_t max_outer = 100;
  /// Outer loop stops once max|T_new - T| < tol.
  double tol = 1e-6;
  GwStep step = GwStep::kLineSearch;
  /// Run the outer loop at epsilon*100, epsilon*10, then epsilon, warm-starting
  /// each stage from the previous coupling.
  bool epsilon_schedule = false;
  /// Explicit epsilon stages; overrides `epsilon_schedule` when non-empty.
  std::vector<double> epsilon_stages;
  /// Extra starting couplings beyond the independent one (p q^T), each a
  /// seeded random permutation; the lowest-cost run wins.
  std::size_t restarts = 0;
  /// Round each run to a permutation, improve it by pairwise exchanges, and
  /// re-run the entropic iterations from that vertex. With PSD similarity
  /// matrices the objective is concave on the transport polytope, so minima
  /// sit at vertices and this escapes most poor local minima.
  bool refine_permutation = true;
  /// Additional seeded random permutations improved by pairwise exchange only
  /// (no Sinkhorn); the best vertex found seeds the final entropic polish.
  /// Each costs O(n^3) per pass, so the count actually used is capped at
  /// max(4, vertex_work / n^3).
  std::size_t vertex_restarts = 64;
  double vertex_work = 2.5e8;
  std::uint64_t seed = 0;
  std::size_t sinkhorn_max_iter = 2000;
  double sinkhorn_tol = 1e-8;
};

/// Transport plan with uniform marginals plus the regularisation that produced it.
struct Coupling {
  Eigen::MatrixXd plan;
  double epsilon = 0.0;
};

struct GwResult {
  Coupling coupling;
  /// sum_{ijkl} (C1_ik - C2_jl)^2 T_ij T_kl of the returned plan.
  double cost = 0.0;
  double matching_accuracy = 0.0;
  double marginal_error = 0.0;
  std::size_t outer_iterations = 0;  // summed over schedule stages of the winning start
  std::size_t starts = 1;
  std::size_t vertex_restarts = 0;  // after the work cap
  bool converged = false;
  bool used_log_domain = false;
};

/// Quadratic GW objective with square loss, for any nonnegative plan.
double gw_cost(const Eigen::MatrixXd& c1, const Eigen::MatrixXd& c2, const Eigen::MatrixXd& plan);

/// Vertex-level GW cost of the coupling P_{i, perm[i]} = 1/n.
double gw_permutation_cost(const Eigen::MatrixXd& c1, const Eigen::MatrixXd& c2,
                           const std::vector<Eigen::Index>& perm);

/// Greedy rounding of a plan to a permutation: repeatedly take the largest
/// remaining entry whose row and column are both free.
std::vector<Eigen::Index> round_to_permutation(const Eigen::MatrixXd& plan);

/// Pairwise-exchange local search on the permutation GW cost until no swap
/// improves it. Returns the number of swaps applied.
std::size_t improve_permutation(const Eigen::MatrixXd& c1, const Eigen::MatrixXd& c2,
                                std::vector<Eigen::Index>& perm);

/// Fraction of rows whose unique argmax is the diagonal entry. Ties count as
/// misses.
double matching_accuracy(const Eigen::MatrixXd& plan);

/// Entropic Gromov-Wasserstein between two symmetric similarity matrices with
/// uniform marginals. Alternates the GW gradient pseudo-cost
/// L(T) = C1^2 p 1^T + 1 q^T C2^2 - 2 C1 T C2 with a Sinkhorn solve of the
/// entropic OT subproblem. The returned plan is rounded onto the exact
/// marginals. Throws ArgumentError for n < 2 or epsilon <= 0 and SolverError if
/// Sinkhorn fails in both domains.
GwResult gromov_wasserstein(const Eigen::MatrixXd& c1, const Eigen::MatrixXd& c2,
                            const GwOptions& options = {});

}  // namespace chromalign
