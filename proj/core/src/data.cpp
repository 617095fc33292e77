#include "chromalign/data.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unordered_set>

#include "chromalign/error.hpp"
#include "chromalign/text.hpp"
#include "json.hpp"

namespace chromalign {
namespace {

using json = nlohmann::ordered_json;

std::uint32_t load_u32_le(const char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(p[i]);
  return v;
}

void store_u32_le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

std::string float_to_text(float v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

// ---------------------------------------------------------------------------
// Pairs TSV

ColorPair parse_pair_row(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto fields = split(line, '\t');
  if (fields.size() < 3 || fields.size() > 4) {
    throw FormatError("expected 3 or 4 tab-separated fields, got " + std::to_string(fields.size()));
  }
  ColorPair pair;
  pair.id = std::string(fields[0]);
  if (trim(pair.id).empty()) throw FormatError("empty id");
  pair.color = parse_hex(fields[1]);
  pair.description = std::string(fields[2]);
  if (trim(pair.description).empty()) throw FormatError("empty description");
  if (fields.size() == 4 && !fields[3].empty()) {
    for (std::string_view tag : split(fields[3], '|')) {
      if (tag.empty()) throw FormatError("empty POS tag");
      pair.pos_tags.emplace_back(tag);
    }
    const std::size_t words = split_whitespace(pair.description).size();
    if (pair.pos_tags.size() != words) {
      throw FormatError("POS tag count " + std::to_string(pair.pos_tags.size()) +
                        " does not match word count " + std::to_string(words));
    }
  }
  return pair;
}

std::string format_pair_row(const ColorPair& pair) {
  std::string row = pair.id + '\t' + to_hex(pair.color) + '\t' + pair.description;
  if (!pair.pos_tags.empty()) {
    row += '\t';
    for (std::size_t i = 0; i < pair.pos_tags.size(); ++i) {
      if (i) row += '|';
      row += pair.pos_tags[i];
    }
  }
  return row;
}

PairsReadResult read_pairs(std::istream& in) {
  PairsReadResult result;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      ColorPair pair = parse_pair_row(line);
      if (!seen.insert(pair.id).second) {
        result.errors.push_back({lineno, "duplicate id '" + pair.id + "'"});
        continue;
      }
      result.pairs.push_back(std::move(pair));
    } catch (const FormatError& e) {
      result.errors.push_back({lineno, e.what()});
    }
  }
  if (in.bad()) throw IoError("read failure while parsing pairs");
  return result;
}

PairsReadResult read_pairs(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_pairs(in);
}

void write_pairs(std::ostream& out, std::span<const ColorPair> pairs) {
  for (const auto& p : pairs) out << format_pair_row(p) << '\n';
}

void write_pairs(const std::filesystem::path& path, std::span<const ColorPair> pairs) {
  auto out = open_out(path);
  write_pairs(out, pairs);
  if (!out) throw IoError("write failure: " + path.string());
}

// ---------------------------------------------------------------------------
// EmbeddingMatrix

EmbeddingMatrix::EmbeddingMatrix(std::vector<std::string> ids, std::size_t dim,
                                 std::vector<float> values, std::string metadata_json)
    : ids_(std::move(ids)), dim_(dim), values_(std::move(values)), metadata_(std::move(metadata_json)) {
  if (dim_ == 0) throw ArgumentError("embedding dim must be positive");
  if (values_.size() != ids_.size() * dim_) {
    throw ArgumentError("embedding values size " + std::to_string(values_.size()) +
                        " != rows*dim " + std::to_string(ids_.size() * dim_));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw ArgumentError("non-finite embedding value in row '" + ids_[i / dim_] + "'");
    }
  }
  index_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!index_.emplace(ids_[i], i).second) {
      throw ArgumentError("duplicate embedding id '" + ids_[i] + "'");
    }
  }
}

std::span<const float> EmbeddingMatrix::row(std::size_t i) const {
  return std::span<const float>(values_).subspan(i * dim_, dim_);
}

std::optional<std::size_t> EmbeddingMatrix::index_of(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

EmbeddingMatrix EmbeddingMatrix::select(std::span<const std::string> ids) const {
  std::vector<float> vals;
  vals.reserve(ids.size() * dim_);
  for (const auto& id : ids) {
    const auto idx = index_of(id);
    if (!idx) throw ArgumentError("unknown embedding id '" + id + "'");
    const auto r = row(*idx);
    vals.insert(vals.end(), r.begin(), r.end());
  }
  return EmbeddingMatrix(std::vector<std::string>(ids.begin(), ids.end()), dim_, std::move(vals),
                         metadata_);
}

bool operator==(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
  if (a.ids_ != b.ids_ || a.dim_ != b.dim_ || a.metadata_ != b.metadata_) return false;
  // bitwise, so that -0.0 vs 0.0 and NaN payloads would count as different
  return a.values_.size() == b.values_.size() &&
         std::memcmp(a.values_.data(), b.values_.data(), a.values_.size() * sizeof(float)) == 0;
}

std::string encode_embeddings(const EmbeddingMatrix& m) {
  json header{{"n", m.rows()}, {"d", m.dim()}, {"ids", m.ids()}};
  if (!m.metadata_json().empty()) header["meta"] = json::parse(m.metadata_json());
  const std::string header_text = header.dump();

  std::string out(kEmbeddingMagic);
  store_u32_le(out, static_cast<std::uint32_t>(header_text.size()));
  out += header_text;
  out.reserve(out.size() + m.values().size() * 4);
  for (float v : m.values()) store_u32_le(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

EmbeddingMatrix decode_embeddings(std::string_view bytes) {
  if (bytes.substr(0, kEmbeddingMagic.size()) != kEmbeddingMagic) {
    throw FormatError("magic: expected 'EMBV1\\n'");
  }
  bytes.remove_prefix(kEmbeddingMagic.size());
  if (bytes.size() < 4) throw FormatError("header_length: file ends before header length");
  const std::uint32_t header_len = load_u32_le(bytes.data());
  bytes.remove_prefix(4);
  if (bytes.size() < header_len) throw FormatError("header: shorter than declared header length");

  json header;
  try {
    header = json::parse(bytes.substr(0, header_len));
  } catch (const json::exception& e) {
    throw FormatError(std::string("header: invalid JSON: ") + e.what());
  }
  bytes.remove_prefix(header_len);

  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<std::string> ids;
  try {
    n = header.at("n").get<std::size_t>();
    d = header.at("d").get<std::size_t>();
    ids = header.at("ids").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("header: ") + e.what());
  }
  if (ids.size() != n) {
    throw FormatError("ids: header lists " + std::to_string(ids.size()) + " ids but n=" +
                      std::to_string(n));
  }
  const std::size_t expected = n * d * 4;
  if (bytes.size() < expected) throw FormatError("payload shorter than n·d·4");
  if (bytes.size() > expected) throw FormatError("payload longer than n·d·4");

  std::vector<float> values(n * d);
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = std::bit_cast<float>(load_u32_le(bytes.data() + 4 * i));
  }
  std::string meta;
  if (header.contains("meta")) meta = header["meta"].dump();
  try {
    return EmbeddingMatrix(std::move(ids), d, std::move(values), std::move(meta));
  } catch (const ArgumentError& e) {
    throw FormatError(std::string("values: ") + e.what());
  }
}

void write_embeddings(const EmbeddingMatrix& m, const std::filesystem::path& path) {
  const std::string bytes = encode_embeddings(m);
  auto out = open_out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failure: " + path.string());
}

EmbeddingMatrix read_embeddings(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure: " + path.string());
  return decode_embeddings(bytes);
}

void write_embeddings_tsv(const EmbeddingMatrix& m, const std::filesystem::path& path) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out << m.ids()[i];
    for (float v : m.row(i)) out << '\t' << float_to_text(v);
    out << '\n';
  }
  if (!out) throw IoError("write failure: " + path.string());
}

EmbeddingMatrix read_embeddings_tsv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<std::string> ids;
  std::vector<float> values;
  std::size_t dim = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() < 2) throw FormatError("line " + std::to_string(lineno) + ": no values");
    if (dim == 0) dim = fields.size() - 1;
    if (fields.size() - 1 != dim) {
      throw FormatError("line " + std::to_string(lineno) + ": expected " + std::to_string(dim) +
                        " values, got " + std::to_string(fields.size() - 1));
    }
    ids.emplace_back(fields[0]);
    for (std::size_t j = 1; j < fields.size(); ++j) {
      float v = 0.0f;
      const auto f = fields[j];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        throw FormatError("line " + std::to_string(lineno) + ": bad number '" + std::string(f) + "'");
      }
      values.push_back(v);
    }
  }
  if (ids.empty()) throw FormatError("embedding TSV is empty: " + path.string());
  try {
    return EmbeddingMatrix(std::move(ids), dim, std::move(values));
  } catch (const ArgumentError& e) {
    throw FormatError(e.what());
  }
}

EmbeddingMatrix load_embeddings(const std::filesystem::path& path) {
  if (path.extension() == ".tsv") return read_embeddings_tsv(path);
  return read_embeddings(path);
}

// ---------------------------------------------------------------------------
// Slices

std::string format_slice(const CorpusSlice& slice) {
  std::string out = "# name: " + slice.name + "\n# provenance: " + slice.provenance + "\n";
  for (const auto& id : slice.member_ids) out += id + "\n";
  return out;
}

void write_slice(const CorpusSlice& slice, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << format_slice(slice);
  if (!out) throw IoError("write failure: " + path.string());
}

CorpusSlice read_slice(const std::filesystem::path& path) {
  auto in = open_in(path);
  CorpusSlice slice;
  slice.name = path.stem().string();
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("# name: ", 0) == 0) {
      slice.name = line.substr(8);
    } else if (line.rfind("# provenance: ", 0) == 0) {
      slice.provenance = line.substr(14);
    } else if (!line.empty() && line[0] != '#') {
      slice.member_ids.push_back(line);
    }
  }
  return slice;
}

// ---------------------------------------------------------------------------
// join

JoinedData join(std::span<const ColorPair> pairs, const EmbeddingMatrix& embeddings) {
  std::unordered_map<std::string_view, const ColorPair*> by_id;
  by_id.reserve(pairs.size());
  for (const auto& p : pairs) by_id.emplace(p.id, &p);

  std::vector<std::string> missing;
  ColorMatrix y;
  y.ids = embeddings.ids();
  y.values.reserve(embeddings.rows());
  for (const auto& id : embeddings.ids()) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) {
      missing.push_back(id);
      continue;
    }
    y.values.push_back(srgb_to_lab(it->second->color));
  }
  if (!missing.empty()) {
    std::string msg = "embedding ids without a colour pair:";
    for (const auto& id : missing) msg += ' ' + id;
    throw JoinError(msg, std::move(missing));
  }
  return JoinedData{embeddings, std::move(y)};
}

JoinedData restrict_to(const JoinedData& data, std::span<const std::string> keep) {
  std::unordered_set<std::string_view> wanted(keep.begin(), keep.end());
  std::vector<std::string> ids;
  ColorMatrix y;
  for (std::size_t i = 0; i < data.Y.rows(); ++i) {
    if (wanted.count(data.Y.ids[i])) {
      ids.push_back(data.Y.ids[i]);
      y.ids.push_back(data.Y.ids[i]);
      y.values.push_back(data.Y.values[i]);
    }
  }
  return JoinedData{data.X.select(ids), std::move(y)};
}

}  // namespace chromalign
