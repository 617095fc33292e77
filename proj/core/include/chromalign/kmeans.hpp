#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace chromalign {

struct KMeansOptions {
  std::size_t max_iter = 300;
  std::uint64_t seed = 0;
};

struct KMeansResult {
  std::vector<std::size_t> labels;
  Eigen::MatrixXd centroids;  // k x m
  double inertia = 0.0;
  /// Inertia after each assignment step; non-increasing.
  std::vector<double> inertia_history;
  std::size_t iterations = 0;
  bool converged = false;
  std::size_t reseeded = 0;  // empty clusters moved to the farthest point
};

/// k-means++ seeding then Lloyd iterations until the assignment stops changing
/// or `max_iter` is hit. A cluster that empties is re-seeded at the point
/// farthest from its current centroid. Bit-deterministic for a given seed.
/// Throws ArgumentError unless 1 <= k <= n.
KMeansResult kmeans(const Eigen::MatrixXd& points, std::size_t k, const KMeansOptions& options = {});

}  // namespace chromalign
