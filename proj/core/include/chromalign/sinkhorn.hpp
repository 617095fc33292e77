#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace chromalign {

struct SinkhornOptions {
  double epsilon = 5e-3;
  std::size_t max_iter = 20000;
  /// Stop once the row marginal (the only inexact one after a column update)
  /// is within `tol` in max-abs.
  double tol = 1e-11;
};

struct SinkhornResult {
  Eigen::MatrixXd plan;
  Eigen::VectorXd f;  // dual potentials, usable as a warm start
  Eigen::VectorXd g;
  std::size_t iterations = 0;
  bool log_domain = false;
  bool converged = false;
  double marginal_error = 0.0;
};

/// Entropic OT: argmin <cost, P> - epsilon * H(P) s.t. P 1 = a, P^T 1 = b.
///
/// Runs in the scaling domain first. If the kernel underflows or an iterate
/// turns non-finite it retries once in the log domain; a second failure raises
/// SolverError carrying the iteration count. Optional warm-start potentials
/// (f, g) of matching size are honoured by the log-domain path and used to
/// seed the scalings otherwise.
SinkhornResult sinkhorn(const Eigen::MatrixXd& cost, const Eigen::VectorXd& a,
                        const Eigen::VectorXd& b, const SinkhornOptions& options,
                        const Eigen::VectorXd* warm_f = nullptr,
                        const Eigen::VectorXd* warm_g = nullptr);

/// Same problem solved directly with log-sum-exp updates.
SinkhornResult sinkhorn_log(const Eigen::MatrixXd& cost, const Eigen::VectorXd& a,
                            const Eigen::VectorXd& b, const SinkhornOptions& options,
                            const Eigen::VectorXd* warm_f = nullptr,
                            const Eigen::VectorXd* warm_g = nullptr);

/// Projects a nonnegative matrix onto the transport polytope U(a, b) by the
/// row-shrink / column-shrink / rank-one-fill rounding. Exact up to floating
/// point; leaves feasible inputs unchanged.
Eigen::MatrixXd round_to_marginals(const Eigen::MatrixXd& plan, const Eigen::VectorXd& a,
                                   const Eigen::VectorXd& b);

/// max(|P 1 - a|_inf, |P^T 1 - b|_inf)
double marginal_error(const Eigen::MatrixXd& plan, const Eigen::VectorXd& a,
                      const Eigen::VectorXd& b);

}  // namespace chromalign
