#include "chromalign/kmeans.hpp"

#include <limits>
#include <random>

#include "chromalign/error.hpp"

namespace chromalign {
namespace {

Eigen::MatrixXd seed_plus_plus(const Eigen::MatrixXd& points, std::size_t k, std::mt19937_64& rng) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd centroids(Eigen::Index(k), points.cols());
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  centroids.row(0) = points.row(first(rng));

  Eigen::VectorXd d2 = (points.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (std::size_t c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= d2(i);
        if (target < 0.0 && d2(i) > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = first(rng);  // all remaining points coincide with a centre
    }
    centroids.row(Eigen::Index(c)) = points.row(pick);
    d2 = d2.cwiseMin((points.rowwise() - centroids.row(Eigen::Index(c))).rowwise().squaredNorm());
  }
  return centroids;
}

// Returns inertia; fills labels and each point's squared distance.
double assign(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centroids, std::vector<std::size_t>& labels,
              Eigen::VectorXd& dist2) {
  double inertia = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
      const double d = (points.row(i) - centroids.row(c)).squaredNorm();
      if (d < best) {
        best = d;
        arg = std::size_t(c);
      }
    }
    labels[std::size_t(i)] = arg;
    dist2(i) = best;
    inertia += best;
  }
  return inertia;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& points, std::size_t k, const KMeansOptions& options) {
  const Eigen::Index n = points.rows();
  if (k < 1 || Eigen::Index(k) > n) throw ArgumentError("kmeans: need 1 <= k <= n");
  if (!points.allFinite()) throw ArgumentError("kmeans: non-finite input");

  std::mt19937_64 rng(options.seed);
  KMeansResult out;
  out.centroids = seed_plus_plus(points, k, rng);
  out.labels.assign(std::size_t(n), 0);
  Eigen::VectorXd dist2(n);
  out.inertia = assign(points, out.centroids, out.labels, dist2);
  out.inertia_history.push_back(out.inertia);

  std::vector<std::size_t> previous;
  for (std::size_t it = 0; it < options.max_iter; ++it) {
    // Update step.
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(Eigen::Index(k), points.cols());
    std::vector<std::size_t> counts(k, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(Eigen::Index(out.labels[std::size_t(i)])) += points.row(i);
      ++counts[out.labels[std::size_t(i)]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        out.centroids.row(Eigen::Index(c)) = sums.row(Eigen::Index(c)) / double(counts[c]);
        continue;
      }
      Eigen::Index far = 0;
      dist2.maxCoeff(&far);
      out.centroids.row(Eigen::Index(c)) = points.row(far);
      dist2(far) = 0.0;
      ++out.reseeded;
    }

    previous = out.labels;
    out.inertia = assign(points, out.centroids, out.labels, dist2);
    out.inertia_history.push_back(out.inertia);
    out.iterations = it + 1;
    if (out.labels == previous) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace chromalign
