#include "chromalign/rsa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "chromalign/error.hpp"

namespace chromalign {
namespace {

std::int64_t pairs_of(std::int64_t run) { return run * (run - 1) / 2; }

// Stable merge sort of `idx` by key, returning the number of inversions.
std::int64_t sort_counting_swaps(std::vector<std::size_t>& idx, std::span<const double> key) {
  std::vector<std::size_t> buffer(idx.size());
  std::int64_t swaps = 0;
  for (std::size_t width = 1; width < idx.size(); width *= 2) {
    for (std::size_t lo = 0; lo < idx.size(); lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, idx.size());
      const std::size_t hi = std::min(lo + 2 * width, idx.size());
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (key[idx[j]] < key[idx[i]]) {
          swaps += std::int64_t(mid - i);
          buffer[k++] = idx[j++];
        } else {
          buffer[k++] = idx[i++];
        }
      }
      while (i < mid) buffer[k++] = idx[i++];
      while (j < hi) buffer[k++] = idx[j++];
    }
    idx.swap(buffer);
  }
  return swaps;
}

}  // namespace

KendallCounts kendall_counts(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ArgumentError("kendall: length mismatch");
  const std::size_t n = x.size();
  KendallCounts c;
  c.n0 = pairs_of(std::int64_t(n));
  if (n < 2) return c;

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return x[a] != x[b] ? x[a] < x[b] : y[a] < y[b];
  });

  std::int64_t run_x = 1, run_xy = 1;
  for (std::size_t i = 1; i < n; ++i) {
    const bool same_x = x[idx[i]] == x[idx[i - 1]];
    const bool same_xy = same_x && y[idx[i]] == y[idx[i - 1]];
    if (same_x) {
      ++run_x;
    } else {
      c.ties_x += pairs_of(run_x);
      run_x = 1;
    }
    if (same_xy) {
      ++run_xy;
    } else {
      c.ties_xy += pairs_of(run_xy);
      run_xy = 1;
    }
  }
  c.ties_x += pairs_of(run_x);
  c.ties_xy += pairs_of(run_xy);

  const std::int64_t swaps = sort_counting_swaps(idx, y);

  std::int64_t run_y = 1;
  for (std::size_t i = 1; i < n; ++i) {
    if (y[idx[i]] == y[idx[i - 1]]) {
      ++run_y;
    } else {
      c.ties_y += pairs_of(run_y);
      run_y = 1;
    }
  }
  c.ties_y += pairs_of(run_y);

  c.concordant_minus_discordant = c.n0 - c.ties_x - c.ties_y + c.ties_xy - 2 * swaps;
  return c;
}

double kendall_tau_b(const KendallCounts& c) {
  const std::int64_t dx = c.n0 - c.ties_x;
  const std::int64_t dy = c.n0 - c.ties_y;
  if (dx == 0 || dy == 0) return std::numeric_limits<double>::quiet_NaN();
  return double(c.concordant_minus_discordant) / std::sqrt(double(dx) * double(dy));
}

double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  return kendall_tau_b(kendall_counts(x, y));
}

Eigen::MatrixXd cosine_similarity(const Eigen::MatrixXd& X) {
  const Eigen::VectorXd norms = X.rowwise().norm();
  for (Eigen::Index i = 0; i < norms.size(); ++i) {
    if (!(norms(i) > 0.0)) throw ArgumentError("cosine similarity: zero-norm row " + std::to_string(i));
  }
  const Eigen::MatrixXd unit = X.array().colwise() / norms.array();
  Eigen::MatrixXd c = unit * unit.transpose();
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    c(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < c.cols(); ++j) c(j, i) = c(i, j);
  }
  return c;
}

std::vector<Eigen::Index> nonzero_rows(const Eigen::MatrixXd& X) {
  std::vector<Eigen::Index> out;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    if (X.row(i).squaredNorm() > 0.0) out.push_back(i);
  }
  return out;
}

RsaResult rsa(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
  if (X.rows() != Y.rows()) throw ArgumentError("rsa: X and Y row counts differ");
  RsaResult out;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    if (X.row(i).squaredNorm() > 0.0 && Y.row(i).squaredNorm() > 0.0) out.kept_rows.push_back(i);
  }
  out.excluded_rows = std::size_t(X.rows()) - out.kept_rows.size();
  const auto n = Eigen::Index(out.kept_rows.size());
  if (n < 3) throw ArgumentError("rsa: need at least 3 rows with nonzero norm in both spaces");

  Eigen::MatrixXd xs(n, X.cols()), ys(n, Y.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    xs.row(i) = X.row(out.kept_rows[std::size_t(i)]);
    ys.row(i) = Y.row(out.kept_rows[std::size_t(i)]);
  }
  const Eigen::MatrixXd c1 = cosine_similarity(xs);
  const Eigen::MatrixXd c2 = cosine_similarity(ys);

  std::vector<double> a(std::size_t(n - 1)), b(std::size_t(n - 1));
  double sum = 0.0;
  std::size_t defined = 0;
  out.row_tau.reserve(std::size_t(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::size_t k = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      a[k] = c1(i, j);
      b[k] = c2(i, j);
      ++k;
    }
    const double tau = kendall_tau_b(a, b);
    out.row_tau.push_back(tau);
    if (std::isnan(tau)) {
      ++out.undefined_rows;
    } else {
      sum += tau;
      ++defined;
    }
  }
  out.score = defined > 0 ? sum / double(defined) : std::numeric_limits<double>::quiet_NaN();

  std::vector<double> ua, ub;
  ua.reserve(std::size_t(n * (n - 1) / 2));
  ub.reserve(ua.capacity());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      ua.push_back(c1(i, j));
      ub.push_back(c2(i, j));
    }
  }
  out.flattened_tau = kendall_tau_b(ua, ub);
  return out;
}

}  // namespace chromalign
