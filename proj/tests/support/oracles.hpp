#pragma once

// Independent reference implementations used as test oracles. Each one is a
// direct, slow evaluation that shares no code with the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// sRGB (0..255) to CIELAB, D65/2deg, evaluated one channel at a time from the
/// IEC 61966-2-1 transfer function and the published XYZ primaries.
inline std::array<double, 3> srgb_to_lab(int r8, int g8, int b8) {
  auto linear = [](int v) {
    const double c = v / 255.0;
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
  };
  const double r = linear(r8), g = linear(g8), b = linear(b8);
  const double X = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  const double Y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double Z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
  auto f = [](double t) {
    const double delta = 6.0 / 29.0;
    return t > delta * delta * delta ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
  };
  const double fx = f(X / 0.95047), fy = f(Y / 1.00000), fz = f(Z / 1.08883);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

/// min over all n! permutation couplings of sum_{ik} (C1_ik - C2_{pi(i) pi(k)})^2 / n^2.
inline double brute_force_gw(const Eigen::MatrixXd& c1, const Eigen::MatrixXd& c2) {
  const int n = int(c1.rows());
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        const double d = c1(i, k) - c2(perm[std::size_t(i)], perm[std::size_t(k)]);
        s += d * d;
      }
    best = std::min(best, s / double(n * n));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Kendall tau-b by visiting every pair once.
inline double kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::int64_t concordant = 0, discordant = 0, tied_x = 0, tied_y = 0, pairs = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      ++pairs;
      const double dx = x[i] - x[j], dy = y[i] - y[j];
      if (dx == 0) ++tied_x;
      if (dy == 0) ++tied_y;
      if (dx == 0 || dy == 0) continue;
      ((dx > 0) == (dy > 0) ? concordant : discordant)++;
    }
  const std::int64_t ax = pairs - tied_x, ay = pairs - tied_y;
  if (ax == 0 || ay == 0) return std::numeric_limits<double>::quiet_NaN();
  return double(concordant - discordant) / std::sqrt(double(ax) * double(ay));
}

/// Exact Lasso minimiser of (1/2n)|y - Xw|^2 + alpha|w|_1 for small d: every
/// sign pattern s in {-1,0,1}^d gives a stationarity system on its support;
/// the minimum objective over sign-consistent solutions is the optimum.
inline double lasso_optimum(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double alpha,
                            Eigen::VectorXd* argmin = nullptr) {
  const int d = int(X.cols());
  const double n = double(X.rows());
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> s(std::size_t(d), -1);
  while (true) {
    std::vector<int> support;
    for (int j = 0; j < d; ++j)
      if (s[std::size_t(j)] != 0) support.push_back(j);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
    bool consistent = true;
    if (!support.empty()) {
      const int m = int(support.size());
      Eigen::MatrixXd A(X.rows(), m);
      Eigen::VectorXd sign(m);
      for (int k = 0; k < m; ++k) {
        A.col(k) = X.col(support[std::size_t(k)]);
        sign(k) = s[std::size_t(support[std::size_t(k)])];
      }
      const Eigen::VectorXd wa = (A.transpose() * A / n).ldlt().solve(A.transpose() * y / n - alpha * sign);
      for (int k = 0; k < m; ++k) {
        if (wa(k) * sign(k) <= 0) consistent = false;
        w(support[std::size_t(k)]) = wa(k);
      }
    }
    if (consistent) {
      const double obj = (y - X * w).squaredNorm() / (2 * n) + alpha * w.cwiseAbs().sum();
      if (obj < best) {
        best = obj;
        if (argmin) *argmin = w;
      }
    }
    int j = 0;
    while (j < d && s[std::size_t(j)] == 1) s[std::size_t(j++)] = -1;
    if (j == d) break;
    ++s[std::size_t(j)];
  }
  return best;
}

/// Expected reciprocal rank of a uniformly placed item among m: H_m / m.
inline double uniform_mrr(int m) {
  double h = 0.0;
  for (int i = 1; i <= m; ++i) h += 1.0 / i;
  return h / m;
}

/// Cosine similarity written entry by entry.
inline Eigen::MatrixXd cosine(const Eigen::MatrixXd& X) {
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) c(i, j) = X.row(i).dot(X.row(j)) / (X.row(i).norm() * X.row(j).norm());
  return c;
}

/// Uniformly random rotation of R^3 (QR of a Gaussian matrix, sign-fixed).
inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Matrix3d m;
  for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = g(rng);
  Eigen::HouseholderQR<Eigen::Matrix3d> qr(m);
  Eigen::Matrix3d q = qr.householderQ();
  if (q.determinant() < 0) q.col(0) *= -1;
  return q;
}

}  // namespace oracle
