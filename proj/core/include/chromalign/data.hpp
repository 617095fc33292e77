#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "chromalign/colorspace.hpp"

namespace chromalign {

/// One crowdsourced (colour, description) record.
struct ColorPair {
  std::string id;
  Srgb color;
  std::string description;
  std::vector<std::string> pos_tags;  // empty when the row carried no tags

  friend bool operator==(const ColorPair&, const ColorPair&) = default;
};

struct RowError {
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct PairsReadResult {
  std::vector<ColorPair> pairs;
  std::vector<RowError> errors;
};

/// Parses one `id<TAB>#RRGGBB<TAB>description[<TAB>POS|POS|...]` row.
/// Throws FormatError describing the first problem found.
ColorPair parse_pair_row(std::string_view line);
std::string format_pair_row(const ColorPair& pair);

/// Reads every parseable row in file order. Malformed rows (and rows whose id
/// repeats an earlier one) are reported in `errors`; they never abort the read.
PairsReadResult read_pairs(std::istream& in);
PairsReadResult read_pairs(const std::filesystem::path& path);
void write_pairs(std::ostream& out, std::span<const ColorPair> pairs);
void write_pairs(const std::filesystem::path& path, std::span<const ColorPair> pairs);

/// n x d description embeddings, row-major float32, addressed by id.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  /// Validates: ids unique, values.size() == ids.size() * dim, all finite, dim > 0.
  EmbeddingMatrix(std::vector<std::string> ids, std::size_t dim, std::vector<float> values,
                  std::string metadata_json = {});

  std::size_t rows() const noexcept { return ids_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const std::vector<float>& values() const noexcept { return values_; }
  std::span<const float> row(std::size_t i) const;
  std::optional<std::size_t> index_of(std::string_view id) const;
  /// Free-form producer metadata (model, layer, pooling) as a JSON object text.
  const std::string& metadata_json() const noexcept { return metadata_; }

  /// Rows in the order given by `ids`; throws ArgumentError on unknown id.
  EmbeddingMatrix select(std::span<const std::string> ids) const;

  friend bool operator==(const EmbeddingMatrix& a, const EmbeddingMatrix& b);

 private:
  std::vector<std::string> ids_;
  std::size_t dim_ = 0;
  std::vector<float> values_;
  std::string metadata_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Binary layout: magic `EMBV1\n`, u32 little-endian header length, UTF-8 JSON
/// header {"n","d","ids"[,"meta"]}, then n*d little-endian float32 row-major.
inline constexpr std::string_view kEmbeddingMagic = "EMBV1\n";

std::string encode_embeddings(const EmbeddingMatrix& m);
EmbeddingMatrix decode_embeddings(std::string_view bytes);
void write_embeddings(const EmbeddingMatrix& m, const std::filesystem::path& path);
EmbeddingMatrix read_embeddings(const std::filesystem::path& path);

/// Interchange text format `id<TAB>v1<TAB>...<TAB>vd`, shortest round-trip floats.
void write_embeddings_tsv(const EmbeddingMatrix& m, const std::filesystem::path& path);
EmbeddingMatrix read_embeddings_tsv(const std::filesystem::path& path);

/// Dispatches on extension: `.tsv` reads the text format, anything else binary.
EmbeddingMatrix load_embeddings(const std::filesystem::path& path);

/// n x 3 Lab coordinates, row i paired with row i of an EmbeddingMatrix.
struct ColorMatrix {
  std::vector<std::string> ids;
  std::vector<LabPoint> values;

  std::size_t rows() const noexcept { return ids.size(); }
};

/// A named subset of corpus ids (a score bin, a cluster, a filter).
struct CorpusSlice {
  std::string name;
  std::vector<std::string> member_ids;
  std::string provenance;

  friend bool operator==(const CorpusSlice&, const CorpusSlice&) = default;
};

/// Slice files: `# name: ...`, `# provenance: ...`, then one id per line.
std::string format_slice(const CorpusSlice& slice);
void write_slice(const CorpusSlice& slice, const std::filesystem::path& path);
CorpusSlice read_slice(const std::filesystem::path& path);

struct JoinedData {
  EmbeddingMatrix X;
  ColorMatrix Y;
};

/// Pairs embedding rows with their colours (converted to Lab), preserving the
/// embedding row order. Extra pairs are ignored; an embedding id without a pair
/// raises JoinError listing every missing id.
JoinedData join(std::span<const ColorPair> pairs, const EmbeddingMatrix& embeddings);

/// Restricts a join to the ids in `keep`, preserving order.
JoinedData restrict_to(const JoinedData& data, std::span<const std::string> keep);

}  // namespace chromalign
