#include "chromalign/lmap.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <random>

#include "chromalign/error.hpp"

namespace chromalign {
namespace {

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

struct Standardizer {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;  // 1 for constant columns, which centre to zero

  static Standardizer fit(const Eigen::MatrixXd& X) {
    Standardizer s;
    const double n = double(X.rows());
    s.mean = X.colwise().mean();
    s.scale = ((X.rowwise() - s.mean).cwiseAbs2().colwise().sum() / n).cwiseSqrt();
    for (Eigen::Index j = 0; j < s.scale.size(); ++j) {
      if (!(s.scale(j) > 0.0)) s.scale(j) = 1.0;
    }
    return s;
  }

  Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const {
    return (X.rowwise() - mean).array().rowwise() / scale.array();
  }
};

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& M, const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(Eigen::Index(rows.size()), M.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(Eigen::Index(i)) = M.row(rows[i]);
  return out;
}

// Fits all three channels on standardised features; returns weights in
// standardised units plus the target means.
struct ChannelFits {
  Eigen::MatrixXd w;  // d x 3
  Eigen::RowVector3d y_mean;
};

ChannelFits fit_channels(const Eigen::MatrixXd& Xs, const Eigen::MatrixXd& Y, const LassoOptions& solver) {
  ChannelFits out;
  out.y_mean = Y.colwise().mean();
  out.w.resize(Xs.cols(), 3);
  for (Eigen::Index c = 0; c < 3; ++c) {
    const Eigen::VectorXd y = Y.col(c).array() - out.y_mean(c);
    out.w.col(c) = lasso_coordinate_descent(Xs, y, solver).w;
  }
  return out;
}

LmapFold run_fold(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const std::vector<Eigen::Index>& order,
                  std::size_t fold, std::size_t folds, const LassoOptions& solver) {
  const std::size_t n = order.size();
  const std::size_t begin = fold * n / folds;
  const std::size_t end = (fold + 1) * n / folds;
  std::vector<Eigen::Index> train, test;
  for (std::size_t i = 0; i < n; ++i) (i >= begin && i < end ? test : train).push_back(order[i]);

  const Eigen::MatrixXd Xtr = take_rows(X, train);
  const Eigen::MatrixXd Ytr = take_rows(Y, train);
  const Eigen::MatrixXd Xte = take_rows(X, test);
  const Eigen::MatrixXd Yte = take_rows(Y, test);

  const Standardizer st = Standardizer::fit(Xtr);
  const ChannelFits fits = fit_channels(st.apply(Xtr), Ytr, solver);
  const Eigen::MatrixXd pred_tr = (st.apply(Xtr) * fits.w).rowwise() + fits.y_mean;
  const Eigen::MatrixXd pred_te = (st.apply(Xte) * fits.w).rowwise() + fits.y_mean;

  LmapFold out;
  out.fold = fold;
  out.train_size = train.size();
  out.test_size = test.size();
  for (Eigen::Index c = 0; c < 3; ++c) {
    const double te = r_squared(Yte.col(c), pred_te.col(c));
    const double tr = r_squared(Ytr.col(c), pred_tr.col(c));
    out.degenerate[std::size_t(c)] = std::isnan(te);
    out.test_r2[std::size_t(c)] = std::isnan(te) ? 0.0 : te;
    out.train_r2[std::size_t(c)] = std::isnan(tr) ? 0.0 : tr;
  }
  return out;
}

}  // namespace

double lasso_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                       double alpha) {
  const double n = double(X.rows());
  return (y - X * w).squaredNorm() / (2.0 * n) + alpha * w.lpNorm<1>();
}

LassoFit lasso_coordinate_descent(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                  const LassoOptions& options) {
  if (X.rows() != y.size()) throw ArgumentError("lasso: X and y row counts differ");
  if (X.rows() == 0) throw ArgumentError("lasso: no rows");
  if (!(options.alpha >= 0.0)) throw ArgumentError("lasso: alpha must be >= 0");
  const double n = double(X.rows());
  const Eigen::Index d = X.cols();

  const Eigen::VectorXd col_sq = X.colwise().squaredNorm().transpose() / n;
  LassoFit fit;
  fit.w = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd residual = y;

  for (std::size_t sweep = 0; sweep < options.max_sweeps; ++sweep) {
    double max_step = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (!(col_sq(j) > 0.0)) continue;
      const double old = fit.w(j);
      const double rho = X.col(j).dot(residual) / n + col_sq(j) * old;
      const double updated = soft_threshold(rho, options.alpha) / col_sq(j);
      if (updated != old) {
        residual -= (updated - old) * X.col(j);
        fit.w(j) = updated;
        max_step = std::max(max_step, std::abs(updated - old) * std::sqrt(col_sq(j)));
      }
    }
    fit.sweeps = sweep + 1;
    if (max_step <= options.tol) {
      fit.converged = true;
      break;
    }
  }
  return fit;
}

double r_squared(const Eigen::VectorXd& truth, const Eigen::VectorXd& predicted) {
  const double mean = truth.mean();
  const double ss_tot = (truth.array() - mean).square().sum();
  if (!(ss_tot > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return 1.0 - (truth - predicted).squaredNorm() / ss_tot;
}

Eigen::MatrixXd MappingWeights::predict(const Eigen::MatrixXd& X) const {
  return (X * W).rowwise() + intercept.transpose();
}

LmapResult fit_lmap(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const LmapOptions& options) {
  const auto n = std::size_t(X.rows());
  if (Y.rows() != X.rows()) throw ArgumentError("lmap: X and Y row counts differ");
  if (Y.cols() != 3) throw ArgumentError("lmap: Y must have 3 columns");
  if (options.folds < 2) throw ArgumentError("lmap: folds must be >= 2");
  if (n < options.folds) throw ArgumentError("lmap: fewer rows than folds");
  if (!(options.alpha >= 0.0)) throw ArgumentError("lmap: alpha must be >= 0");

  LassoOptions solver = options.solver;
  solver.alpha = options.alpha;

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 rng(options.seed);
  std::shuffle(order.begin(), order.end(), rng);

  LmapResult result;
  result.folds.resize(options.folds);
  const std::size_t jobs = std::max<std::size_t>(1, options.jobs);
  for (std::size_t start = 0; start < options.folds; start += jobs) {
    std::vector<std::future<LmapFold>> batch;
    for (std::size_t f = start; f < std::min(options.folds, start + jobs); ++f) {
      batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                 [&, f] { return run_fold(X, Y, order, f, options.folds, solver); }));
    }
    for (std::size_t i = 0; i < batch.size(); ++i) result.folds[start + i] = batch[i].get();
  }

  double test_sum = 0.0, train_sum = 0.0;
  for (const auto& f : result.folds) {
    for (std::size_t c = 0; c < 3; ++c) {
      test_sum += f.test_r2[c];
      train_sum += f.train_r2[c];
      result.channel_score[c] += f.test_r2[c] / double(options.folds);
      if (f.degenerate[c]) ++result.degenerate_channels;
    }
  }
  result.score = test_sum / double(3 * options.folds);
  result.train_score = train_sum / double(3 * options.folds);

  const Standardizer st = Standardizer::fit(X);
  const ChannelFits full = fit_channels(st.apply(X), Y, solver);
  result.weights.alpha = options.alpha;
  result.weights.W = full.w.array().colwise() / st.scale.transpose().array();
  result.weights.intercept = full.y_mean.transpose() - (st.mean * result.weights.W).transpose();
  result.zero_weights = std::size_t((full.w.array() == 0.0).count());
  return result;
}

}  // namespace chromalign
