#include "chromalign/sinkhorn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chromalign/error.hpp"

namespace chromalign {
namespace {

// Scalings beyond exp(kAbsorbLog) are folded back into the potentials.
constexpr double kAbsorbLog = 30.0;
constexpr std::size_t kCheckEvery = 5;

bool all_positive_finite(const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0) || !std::isfinite(v[i])) return false;
  }
  return true;
}

// Initial potentials by c-transform so every row and column of the stabilised
// kernel has at least one entry equal to 1.
void init_potentials(const Eigen::MatrixXd& cost, Eigen::VectorXd& f, Eigen::VectorXd& g) {
  g = Eigen::VectorXd::Zero(cost.cols());
  f = cost.rowwise().minCoeff();
  for (Eigen::Index j = 0; j < cost.cols(); ++j) {
    g[j] = (cost.col(j) - f).minCoeff();
  }
}

void stabilised_kernel(const Eigen::MatrixXd& cost, const Eigen::VectorXd& f,
                       const Eigen::VectorXd& g, double eps, Eigen::MatrixXd& kernel) {
  kernel.resize(cost.rows(), cost.cols());
  for (Eigen::Index j = 0; j < cost.cols(); ++j) {
    for (Eigen::Index i = 0; i < cost.rows(); ++i) {
      kernel(i, j) = std::exp((f[i] + g[j] - cost(i, j)) / eps);
    }
  }
}

double log_sum_exp(const Eigen::Ref<const Eigen::ArrayXd>& x) {
  const double m = x.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((x - m).exp().sum());
}

bool warm_ok(const Eigen::VectorXd* v, Eigen::Index n) { return v != nullptr && v->size() == n; }

}  // namespace

SinkhornResult sinkhorn(const Eigen::MatrixXd& cost, const Eigen::VectorXd& a,
                        const Eigen::VectorXd& b, const SinkhornOptions& options,
                        const Eigen::VectorXd* warm_f, const Eigen::VectorXd* warm_g) {
  if (options.epsilon <= 0.0) throw ArgumentError("sinkhorn epsilon must be positive");
  if (cost.rows() != a.size() || cost.cols() != b.size()) {
    throw ArgumentError("sinkhorn: cost shape does not match marginals");
  }
  const double eps = options.epsilon;

  SinkhornResult res;
  if (warm_ok(warm_f, a.size()) && warm_ok(warm_g, b.size())) {
    res.f = *warm_f;
    res.g = *warm_g;
  } else {
    init_potentials(cost, res.f, res.g);
  }

  Eigen::MatrixXd kernel;
  stabilised_kernel(cost, res.f, res.g, eps, kernel);
  Eigen::VectorXd u = Eigen::VectorXd::Ones(a.size());
  Eigen::VectorXd v = Eigen::VectorXd::Ones(b.size());

  bool failed = false;
  std::size_t it = 0;
  while (it < options.max_iter) {
    ++it;
    u = a.cwiseQuotient(kernel * v);
    v = b.cwiseQuotient(kernel.transpose() * u);
    if (!all_positive_finite(u) || !all_positive_finite(v)) {
      failed = true;
      break;
    }
    const double spread = std::max(u.array().log().abs().maxCoeff(), v.array().log().abs().maxCoeff());
    if (spread > kAbsorbLog) {
      res.f += eps * u.array().log().matrix();
      res.g += eps * v.array().log().matrix();
      stabilised_kernel(cost, res.f, res.g, eps, kernel);
      u.setOnes();
      v.setOnes();
    }
    if (it % kCheckEvery == 0) {
      const double err = (u.cwiseProduct(kernel * v) - a).cwiseAbs().maxCoeff();
      if (err < options.tol) {
        res.converged = true;
        break;
      }
    }
  }

  if (failed) {
    try {
      return sinkhorn_log(cost, a, b, options, warm_f, warm_g);
    } catch (const SolverError& e) {
      throw SolverError(std::string("sinkhorn failed in scaling and log domain: ") + e.what(),
                        it + e.iterations());
    }
  }

  res.f += eps * u.array().log().matrix();
  res.g += eps * v.array().log().matrix();
  res.plan = u.asDiagonal() * kernel * v.asDiagonal();
  res.iterations = it;
  res.marginal_error = marginal_error(res.plan, a, b);
  return res;
}

SinkhornResult sinkhorn_log(const Eigen::MatrixXd& cost, const Eigen::VectorXd& a,
                            const Eigen::VectorXd& b, const SinkhornOptions& options,
                            const Eigen::VectorXd* warm_f, const Eigen::VectorXd* warm_g) {
  if (options.epsilon <= 0.0) throw ArgumentError("sinkhorn epsilon must be positive");
  const double eps = options.epsilon;
  const Eigen::Index n = cost.rows();
  const Eigen::Index m = cost.cols();
  const Eigen::ArrayXd log_a = a.array().log();
  const Eigen::ArrayXd log_b = b.array().log();

  SinkhornResult res;
  res.log_domain = true;
  if (warm_ok(warm_f, n) && warm_ok(warm_g, m)) {
    res.f = *warm_f;
    res.g = *warm_g;
  } else {
    init_potentials(cost, res.f, res.g);
  }

  Eigen::ArrayXd work;
  std::size_t it = 0;
  while (it < options.max_iter) {
    ++it;
    for (Eigen::Index i = 0; i < n; ++i) {
      work = (res.g.array() - cost.row(i).transpose().array()) / eps;
      res.f[i] = eps * (log_a[i] - log_sum_exp(work));
    }
    for (Eigen::Index j = 0; j < m; ++j) {
      work = (res.f.array() - cost.col(j).array()) / eps;
      res.g[j] = eps * (log_b[j] - log_sum_exp(work));
    }
    if (!res.f.allFinite() || !res.g.allFinite()) {
      throw SolverError("log-domain sinkhorn produced non-finite potentials", it);
    }
    if (it % kCheckEvery == 0) {
      double err = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        work = (res.f[i] + res.g.array() - cost.row(i).transpose().array()) / eps;
        err = std::max(err, std::abs(work.exp().sum() - a[i]));
      }
      if (err < options.tol) {
        res.converged = true;
        break;
      }
    }
  }
  res.plan.resize(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      res.plan(i, j) = std::exp((res.f[i] + res.g[j] - cost(i, j)) / eps);
    }
  }
  res.iterations = it;
  res.marginal_error = marginal_error(res.plan, a, b);
  return res;
}

Eigen::MatrixXd round_to_marginals(const Eigen::MatrixXd& plan, const Eigen::VectorXd& a,
                                   const Eigen::VectorXd& b) {
  Eigen::MatrixXd out = plan.cwiseMax(0.0);
  const Eigen::VectorXd rows = out.rowwise().sum();
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    if (rows[i] > a[i]) out.row(i) *= a[i] / rows[i];
  }
  const Eigen::VectorXd cols = out.colwise().sum().transpose();
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    if (cols[j] > b[j]) out.col(j) *= b[j] / cols[j];
  }
  const Eigen::VectorXd err_r = a - out.rowwise().sum();
  const Eigen::VectorXd err_c = b - out.colwise().sum().transpose();
  const double mass = err_r.sum();
  if (mass > 0.0) out += err_r * err_c.transpose() / mass;
  return out;
}

double marginal_error(const Eigen::MatrixXd& plan, const Eigen::VectorXd& a,
                      const Eigen::VectorXd& b) {
  const double er = (plan.rowwise().sum() - a).cwiseAbs().maxCoeff();
  const double ec = (plan.colwise().sum().transpose() - b).cwiseAbs().maxCoeff();
  return std::max(er, ec);
}

}  // namespace chromalign
