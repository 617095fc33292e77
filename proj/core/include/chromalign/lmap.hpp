#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace chromalign {

struct LassoOptions {
  double alpha = 1e-2;
  std::size_t max_sweeps = 100000;
  /// Stops when no coefficient moved by more than tol (scaled by its column norm) in a sweep.
  double tol = 1e-12;
};

struct LassoFit {
  Eigen::VectorXd w;
  std::size_t sweeps = 0;
  bool converged = false;
};

/// (1/2n) |y - X w|^2 + alpha |w|_1, no intercept.
double lasso_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                       double alpha);

/// Cyclic coordinate descent with soft thresholding on the objective above.
/// Columns with zero norm keep a zero coefficient. Callers centre X and y
/// when an intercept is wanted.
LassoFit lasso_coordinate_descent(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                  const LassoOptions& options = {});

/// 1 - SS_res / SS_tot around the mean of `truth`; NaN when SS_tot is zero.
double r_squared(const Eigen::VectorXd& truth, const Eigen::VectorXd& predicted);

/// Linear map from description embeddings to Lab, in the caller's feature units.
struct MappingWeights {
  Eigen::MatrixXd W;  // d x 3
  Eigen::Vector3d intercept = Eigen::Vector3d::Zero();
  double alpha = 0.0;

  Eigen::MatrixXd predict(const Eigen::MatrixXd& X) const;
};

struct LmapOptions {
  double alpha = 1e-2;
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  LassoOptions solver{};  // alpha here is ignored in favour of the field above
};

struct LmapFold {
  std::size_t fold = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::array<double, 3> test_r2{};
  std::array<double, 3> train_r2{};
  /// Channel whose held-out targets had zero variance; its R^2 is reported as 0.
  std::array<bool, 3> degenerate{};
};

struct LmapResult {
  MappingWeights weights;
  /// Mean held-out R^2 over folds and the three Lab channels.
  double score = 0.0;
  double train_score = 0.0;
  std::array<double, 3> channel_score{};
  std::vector<LmapFold> folds;
  std::size_t degenerate_channels = 0;
  std::size_t zero_weights = 0;
};

/// K-fold cross-validated Lasso per Lab channel on features standardised with
/// the training fold's mean and (population) standard deviation. Fold
/// membership comes from a seeded shuffle. The returned weights are refit on
/// all rows and mapped back to unstandardised units. Throws ArgumentError for
/// folds < 2, n < folds, alpha < 0 or mismatched row counts.
LmapResult fit_lmap(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const LmapOptions& options = {});

}  // namespace chromalign
