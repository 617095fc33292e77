#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace chromalign {

/// Pair counts behind Kendall's tau-b. n0 = n(n-1)/2, ties_x / ties_y count
/// pairs tied in one variable (joint ties included), ties_xy pairs tied in both.
struct KendallCounts {
  std::int64_t n0 = 0;
  std::int64_t ties_x = 0;
  std::int64_t ties_y = 0;
  std::int64_t ties_xy = 0;
  std::int64_t concordant_minus_discordant = 0;
};

/// O(n log n) counts (Knight's algorithm). Throws ArgumentError on length mismatch.
KendallCounts kendall_counts(std::span<const double> x, std::span<const double> y);

/// (nc - nd) / sqrt((n0 - ties_x)(n0 - ties_y)); NaN when either side is constant.
double kendall_tau_b(const KendallCounts& counts);
double kendall_tau_b(std::span<const double> x, std::span<const double> y);

/// Row-wise cosine similarity. Rows must be nonzero.
Eigen::MatrixXd cosine_similarity(const Eigen::MatrixXd& X);

/// Indices of rows with nonzero Euclidean norm.
std::vector<Eigen::Index> nonzero_rows(const Eigen::MatrixXd& X);

struct RsaResult {
  /// Mean over rows of tau-b between row i of both cosine matrices, diagonal removed.
  double score = 0.0;
  /// tau-b over the flattened upper triangles.
  double flattened_tau = 0.0;
  /// Original row index of each compared row; zero-norm rows are excluded.
  std::vector<Eigen::Index> kept_rows;
  std::vector<double> row_tau;  // NaN where a row is constant in either space
  std::size_t excluded_rows = 0;
  std::size_t undefined_rows = 0;
};

/// Throws ArgumentError for mismatched row counts or fewer than 3 usable rows.
RsaResult rsa(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y);

}  // namespace chromalign
