#include "chromalign/gromov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "chromalign/error.hpp"
#include "chromalign/sinkhorn.hpp"

namespace chromalign {
namespace {

struct StageOutcome {
  Eigen::MatrixXd plan;
  std::size_t iterations = 0;
  bool converged = false;
  bool log_domain = false;
};

class GwProblem {
 public:
  GwProblem(const Eigen::MatrixXd& c1, const Eigen::MatrixXd& c2)
      : c1_(c1), c2_(c2), p_(Eigen::VectorXd::Constant(c1.rows(), 1.0 / double(c1.rows()))),
        q_(Eigen::VectorXd::Constant(c2.rows(), 1.0 / double(c2.rows()))) {
    const Eigen::VectorXd r1 = c1_.cwiseAbs2() * p_;
    const Eigen::VectorXd r2 = c2_.cwiseAbs2() * q_;
    const_cost_ = r1 * Eigen::RowVectorXd::Ones(c2.rows()) +
                  Eigen::VectorXd::Ones(c1.rows()) * r2.transpose();
  }

  const Eigen::VectorXd& p() const { return p_; }
  const Eigen::VectorXd& q() const { return q_; }

  Eigen::MatrixXd pseudo_cost(const Eigen::MatrixXd& plan) const {
    return const_cost_ - 2.0 * (c1_ * plan * c2_);
  }

  // argmin over gamma in [0,1] of cost(T + gamma D) for the quadratic objective.
  double line_search(const Eigen::MatrixXd& plan, const Eigen::MatrixXd& dir) const {
    const Eigen::MatrixXd c1dc2 = c1_ * dir * c2_;
    const double quad = -2.0 * (c1dc2.cwiseProduct(dir)).sum();
    const double lin = -4.0 * (c1dc2.cwiseProduct(plan)).sum() + (const_cost_.cwiseProduct(dir)).sum();
    if (quad > 0.0) return std::clamp(-lin / (2.0 * quad), 0.0, 1.0);
    return quad + lin < 0.0 ? 1.0 : 0.0;
  }

  StageOutcome run_stage(Eigen::MatrixXd plan, double eps, const GwOptions& opt) const {
    SinkhornOptions sk;
    sk.epsilon = eps;
    sk.max_iter = opt.sinkhorn_max_iter;
    sk.tol = opt.sinkhorn_tol;

    StageOutcome out;
    Eigen::VectorXd f, g;
    bool have_warm = false;
    for (std::size_t it = 0; it < opt.max_outer; ++it) {
      const Eigen::MatrixXd cost = pseudo_cost(plan);
      SinkhornResult s = sinkhorn(cost, p_, q_, sk, have_warm ? &f : nullptr, have_warm ? &g : nullptr);
      out.log_domain = out.log_domain || s.log_domain;
      f = std::move(s.f);
      g = std::move(s.g);
      have_warm = true;

      Eigen::MatrixXd next;
      if (opt.step == GwStep::kFull) {
        next = std::move(s.plan);
      } else {
        const Eigen::MatrixXd dir = s.plan - plan;
        next = plan + line_search(plan, dir) * dir;
      }
      const double delta = (next - plan).cwiseAbs().maxCoeff();
      plan = std::move(next);
      out.iterations = it + 1;
      if (delta < opt.tol) {
        out.converged = true;
        break;
      }
    }
    out.plan = std::move(plan);
    return out;
  }

 private:
  const Eigen::MatrixXd& c1_;
  const Eigen::MatrixXd& c2_;
  Eigen::VectorXd p_;
  Eigen::VectorXd q_;
  Eigen::MatrixXd const_cost_;
};

Eigen::MatrixXd permutation_plan(const std::vector<Eigen::Index>& perm) {
  const auto n = static_cast<Eigen::Index>(perm.size());
  Eigen::MatrixXd plan = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) plan(i, perm[static_cast<std::size_t>(i)]) = 1.0 / double(n);
  return plan;
}

}  // namespace

double gw_permutation_cost(const Eigen::MatrixXd& c1, const Eigen::MatrixXd& c2,
                           const std::vector<Eigen::Index>& perm) {
  const auto n = static_cast<Eigen::Index>(perm.size());
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const double d = c1(i, k) - c2(perm[std::size_t(i)], perm[std::size_t(k)]);
      sum += d * d;
    }
  }
  return sum / double(n * n);
}

std::vector<Eigen::Index> round_to_permutation(const Eigen::MatrixXd& plan) {
  const Eigen::Index n = plan.rows();
  std::vector<std::pair<double, Eigen::Index>> entries;
  entries.reserve(static_cast<std::size_t>(n * n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) entries.emplace_back(plan(i, j), i * n + j);
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n), -1);
  std::vector<bool> col_used(static_cast<std::size_t>(n), false);
  Eigen::Index assigned = 0;
  for (const auto& [value, flat] : entries) {
    const Eigen::Index i = flat / n;
    const Eigen::Index j = flat % n;
    if (perm[std::size_t(i)] >= 0 || col_used[std::size_t(j)]) continue;
    perm[std::size_t(i)] = j;
    col_used[std::size_t(j)] = true;
    if (++assigned == n) break;
  }
  return perm;
}

std::size_t improve_permutation(const Eigen::MatrixXd& c1, const Eigen::MatrixXd& c2,
                                std::vector<Eigen::Index>& perm) {
  const auto n = static_cast<Eigen::Index>(perm.size());
  // b(i,k) = c2(perm i, perm k), kept in sync with the permutation.
  Eigen::MatrixXd b(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) b(i, k) = c2(perm[std::size_t(i)], perm[std::size_t(k)]);
  }
  auto sq = [](double x) { return x * x; };
  std::size_t swaps = 0;
  bool improved = true;
  while (improved) {
    improved = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        // Change in sum_{ik} (c1_ik - b_ik)^2 when rows/cols i and j of b swap.
        double delta = sq(c1(i, i) - b(j, j)) + sq(c1(j, j) - b(i, i)) - sq(c1(i, i) - b(i, i)) -
                       sq(c1(j, j) - b(j, j));
        for (Eigen::Index k = 0; k < n; ++k) {
          if (k == i || k == j) continue;
          delta += 2.0 * (sq(c1(i, k) - b(j, k)) + sq(c1(j, k) - b(i, k)) - sq(c1(i, k) - b(i, k)) -
                          sq(c1(j, k) - b(j, k)));
        }
        if (delta < -1e-14) {
          std::swap(perm[std::size_t(i)], perm[std::size_t(j)]);
          b.row(i).swap(b.row(j));
          b.col(i).swap(b.col(j));
          ++swaps;
          improved = true;
        }
      }
    }
  }
  return swaps;
}

double gw_cost(const Eigen::MatrixXd& c1, const Eigen::MatrixXd& c2, const Eigen::MatrixXd& plan) {
  const Eigen::VectorXd p = plan.rowwise().sum();
  const Eigen::VectorXd q = plan.colwise().sum().transpose();
  const double a = p.dot(c1.cwiseAbs2() * p);
  const double b = q.dot(c2.cwiseAbs2() * q);
  const double cross = (c1 * plan * c2.transpose()).cwiseProduct(plan).sum();
  // Clamp tiny negative round-off; the objective is a sum of squares.
  return std::max(0.0, a + b - 2.0 * cross);
}

double matching_accuracy(const Eigen::MatrixXd& plan) {
  const Eigen::Index n = plan.rows();
  if (n == 0) return 0.0;
  Eigen::Index hits = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i >= plan.cols()) break;
    const double diag = plan(i, i);
    bool unique_max = true;
    for (Eigen::Index j = 0; j < plan.cols(); ++j) {
      if (j != i && plan(i, j) >= diag) {
        unique_max = false;
        break;
      }
    }
    if (unique_max) ++hits;
  }
  return double(hits) / double(n);
}

GwResult gromov_wasserstein(const Eigen::MatrixXd& c1, const Eigen::MatrixXd& c2,
                            const GwOptions& options) {
  const Eigen::Index n = c1.rows();
  if (c1.cols() != n || c2.rows() != c2.cols()) throw ArgumentError("GW: similarity matrices must be square");
  if (c2.rows() != n) throw ArgumentError("GW: both spaces need the same number of points");
  if (n < 2) throw ArgumentError("GW: need at least 2 points");
  if (!(options.epsilon > 0.0)) throw ArgumentError("GW: epsilon must be positive");

  const GwProblem problem(c1, c2);
  const Eigen::MatrixXd independent = problem.p() * problem.q().transpose();

  std::vector<Eigen::MatrixXd> starts{independent};
  std::mt19937_64 rng(options.seed);
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  for (std::size_t r = 0; r < options.restarts; ++r) {
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    starts.push_back(permutation_plan(perm));
  }

  std::vector<double> schedule{options.epsilon};
  if (options.epsilon_schedule) schedule = {options.epsilon * 100.0, options.epsilon * 10.0, options.epsilon};
  if (!options.epsilon_stages.empty()) schedule = options.epsilon_stages;

  GwResult best;
  bool have_best = false;
  auto consider = [&](Eigen::MatrixXd plan, std::size_t iterations, bool converged, bool log_domain) {
    plan = round_to_marginals(plan, problem.p(), problem.q());
    const double cost = gw_cost(c1, c2, plan);
    if (!have_best || cost < best.cost) {
      best.coupling = Coupling{std::move(plan), options.epsilon};
      best.cost = cost;
      best.outer_iterations = iterations;
      best.converged = converged;
      best.used_log_domain = log_domain;
      have_best = true;
    }
  };

  std::vector<Eigen::Index> best_perm;
  double best_perm_cost = 0.0;
  auto offer_vertex = [&](std::vector<Eigen::Index> candidate) {
    improve_permutation(c1, c2, candidate);
    const double cost = gw_permutation_cost(c1, c2, candidate);
    if (best_perm.empty() || cost < best_perm_cost) {
      best_perm = std::move(candidate);
      best_perm_cost = cost;
    }
  };

  for (const auto& start : starts) {
    Eigen::MatrixXd plan = start;
    std::size_t iterations = 0;
    bool converged = false;
    bool log_domain = false;
    for (double eps : schedule) {
      StageOutcome stage = problem.run_stage(std::move(plan), eps, options);
      plan = std::move(stage.plan);
      iterations += stage.iterations;
      converged = stage.converged;
      log_domain = log_domain || stage.log_domain;
    }
    if (options.refine_permutation) offer_vertex(round_to_permutation(plan));
    consider(std::move(plan), iterations, converged, log_domain);
  }

  if (options.refine_permutation) {
    const double cube = double(n) * double(n) * double(n);
    const auto budget = static_cast<std::size_t>(std::max(4.0, options.vertex_work / cube));
    const std::size_t vertex_restarts = std::min(options.vertex_restarts, budget);
    best.vertex_restarts = vertex_restarts;
    for (std::size_t r = 0; r < vertex_restarts; ++r) {
      std::iota(perm.begin(), perm.end(), Eigen::Index{0});
      std::shuffle(perm.begin(), perm.end(), rng);
      offer_vertex(perm);
    }
    StageOutcome polish = problem.run_stage(permutation_plan(best_perm), options.epsilon, options);
    consider(std::move(polish.plan), polish.iterations, polish.converged, polish.log_domain);
  }
  best.starts = starts.size();
  best.matching_accuracy = matching_accuracy(best.coupling.plan);
  best.marginal_error = marginal_error(best.coupling.plan, problem.p(), problem.q());
  return best;
}

}  // namespace chromalign
