#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "chromalign/data.hpp"
#include "chromalign/gromov.hpp"
#include "chromalign/lmap.hpp"

namespace chromalign {

enum class AlignMethod { kLmap, kRsa, kGw };

std::string_view method_name(AlignMethod method);
/// Accepts "lmap", "rsa", "gw"; throws ArgumentError otherwise.
AlignMethod parse_method(std::string_view name);

/// One estimator run on one slice.
struct AlignmentReport {
  std::string method;
  std::string slice;
  std::optional<double> score;  // absent when the slice was skipped
  std::size_t n = 0;
  std::map<std::string, double> params;
  /// Scalar by-products (GW cost, flattened tau, excluded rows, ...).
  std::map<std::string, double> metrics;
  /// Per-fold or per-item values, in a stable order.
  std::vector<std::pair<std::string, double>> detail;
  std::vector<std::string> warnings;

  bool skipped() const noexcept { return !score.has_value(); }
};

/// {"method","slice","score","n","params","metrics","detail":[{"key","value"}],"warnings"}
/// with keys in a fixed order; non-finite numbers become null.
std::string to_json(const AlignmentReport& report);

/// Embedding rows as doubles.
Eigen::MatrixXd embedding_matrix(const EmbeddingMatrix& X);
/// n x 3 Lab rows.
Eigen::MatrixXd lab_matrix(const ColorMatrix& Y);

struct LmapAlignment {
  MappingWeights weights;
  AlignmentReport report;
};

LmapAlignment lmap_align(const JoinedData& data, const LmapOptions& options = {});
AlignmentReport rsa_align(const JoinedData& data);

struct GwAlignment {
  Coupling coupling;
  /// Original row index of each coupled point; zero-norm rows are dropped.
  std::vector<Eigen::Index> kept_rows;
  AlignmentReport report;
};

/// GW between the cosine similarity matrices of X and Y. Rows that are zero
/// in either space are excluded and counted. The report score is the matching
/// accuracy; `metrics` carries the GW cost and marginal error.
GwAlignment gw_align(const JoinedData& data, const GwOptions& options = {});

struct AlignParams {
  LmapOptions lmap{};
  GwOptions gw{};
  /// Slices with fewer joined rows are skipped with a warning.
  std::size_t floor = 20;
  std::size_t jobs = 1;
};

/// Runs one estimator per slice, independently and in parallel up to
/// `params.jobs`. Reports come back in slice order.
std::vector<AlignmentReport> align_slices(std::span<const ColorPair> pairs, const EmbeddingMatrix& embeddings,
                                          std::span<const CorpusSlice> slices, AlignMethod method,
                                          const AlignParams& params = {});

}  // namespace chromalign
