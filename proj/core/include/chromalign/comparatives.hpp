#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chromalign/colorspace.hpp"
#include "chromalign/data.hpp"

namespace chromalign {

/// (reference colour points, comparative, target colour points): "reference is
/// <comparative> than target".
struct ComparativeTuple {
  std::string comparative;
  std::vector<LabPoint> reference;
  std::vector<LabPoint> target;
};

/// Trims, collapses inner whitespace to single spaces and uppercases. Throws
/// ArgumentError for an empty label.
std::string normalize_comparative(std::string_view label);

/// JSONL: {"comparative": str, "reference": [[L,a,b],...], "target": [[L,a,b],...]}.
/// Labels are normalised on read. Throws FormatError naming the line.
std::vector<ComparativeTuple> read_comparatives(std::istream& in);
std::vector<ComparativeTuple> read_comparatives(const std::filesystem::path& path);
void write_comparatives(std::ostream& out, std::span<const ComparativeTuple> tuples);

/// Distinct labels, sorted.
std::vector<std::string> comparative_labels(std::span<const ComparativeTuple> tuples);

struct RankedComparative {
  std::string comparative;
  double cost = 0.0;

  friend bool operator==(const RankedComparative&, const RankedComparative&) = default;
};

struct MatchedPair {
  std::string pair_id;
  std::string left_id;
  std::string right_id;
  /// Every distinct label, ascending cost, ties by label.
  std::vector<RankedComparative> ranking;

  const std::string& gold() const { return ranking.front().comparative; }
  friend bool operator==(const MatchedPair&, const MatchedPair&) = default;
};

/// cost(label) = min over the label's tuples of
/// mean_r dE(r, left) + mean_t dE(t, right).
std::vector<RankedComparative> rank_comparatives(const LabPoint& left, const LabPoint& right,
                                                 std::span<const ComparativeTuple> tuples);

/// Throws ArgumentError when `tuples` is empty or a tuple has an empty point set.
MatchedPair match_pair(const ColorPair& left, const ColorPair& right, std::span<const ComparativeTuple> tuples,
                       std::string pair_id = {});

/// `count` distinct ordered index pairs (i, j), i != j, drawn with `seed`.
/// Throws ArgumentError when fewer than `count` such pairs exist.
std::vector<std::pair<std::size_t, std::size_t>> sample_index_pairs(std::size_t n, std::size_t count,
                                                                    std::uint64_t seed);

/// match_pair over index pairs into `pairs`, ids "m<000001>", parallel up to `jobs`.
std::vector<MatchedPair> match_pairs(std::span<const ColorPair> pairs,
                                     std::span<const std::pair<std::size_t, std::size_t>> index_pairs,
                                     std::span<const ComparativeTuple> tuples, std::size_t jobs = 1);

/// JSONL {"pair_id","left_id","right_id","gold","ranking":[[label, cost],...]}.
std::vector<MatchedPair> read_matched(std::istream& in);
std::vector<MatchedPair> read_matched(const std::filesystem::path& path);
void write_matched(std::ostream& out, std::span<const MatchedPair> matched);

struct PromptSet {
  std::string prompt_id;
  std::vector<std::string> shots;
  std::string query;
  std::string mask_token;
  std::string gold;
  std::vector<std::string> candidates;
  /// The matched pair behind the query.
  std::string query_pair_id;
  std::string query_left_id;
  std::string query_right_id;

  std::size_t k() const noexcept { return shots.size() + 1; }
  friend bool operator==(const PromptSet&, const PromptSet&) = default;
};

struct PromptOptions {
  std::size_t k = 10;
  std::size_t count = 1000;
  std::uint64_t seed = 0;
  /// Must contain each of {left}, {comparative}, {right} exactly once.
  std::string template_text = "{left} is {comparative} than {right}";
  std::string mask_token = "[MASK]";
  /// Redraws allowed per prompt before giving up on a leak-free query.
  std::size_t max_draws = 100;
};

/// Substitutes the three placeholders of `template_text`.
std::string fill_template(std::string_view template_text, std::string_view left, std::string_view comparative,
                          std::string_view right);

/// Each prompt samples K matched pairs without replacement: K-1 filled shots
/// (gold lowercased) and one masked query. A sampled pair whose descriptions
/// contain its gold label (case-insensitive) or the mask token cannot be the
/// query; another sampled pair takes its place, or the draw is repeated.
/// `candidates` defaults to every label seen in the rankings.
/// Throws ArgumentError for K < 2 or fewer than K matched pairs, and
/// ValidationError for a matched pair id missing from `pairs` or when no
/// leak-free query is found within `max_draws`.
std::vector<PromptSet> build_prompts(std::span<const MatchedPair> matched, std::span<const ColorPair> pairs,
                                     const PromptOptions& options,
                                     std::span<const std::string> candidates = {});

/// JSONL {"prompt_id","k","shots","query","mask_token","gold","candidates","query_pair":{...}}.
std::vector<PromptSet> read_prompts(std::istream& in);
std::vector<PromptSet> read_prompts(const std::filesystem::path& path);
void write_prompts(std::ostream& out, std::span<const PromptSet> prompts);

struct PredictionRecord {
  std::string prompt_id;
  std::vector<std::string> ranking;
};

/// JSONL {"prompt_id","ranking":[...]}; labels normalised on read.
std::vector<PredictionRecord> read_predictions(std::istream& in);
std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path);
void write_predictions(std::ostream& out, std::span<const PredictionRecord> predictions);

struct PromptScore {
  std::string prompt_id;
  std::optional<std::size_t> rank;  // 1-based; absent when gold is missing or unpredicted
  bool predicted = false;
  double reciprocal_rank = 0.0;
};

struct SliceMrr {
  std::string slice;
  std::size_t prompts = 0;
  std::size_t missing = 0;
  std::optional<double> mrr;  // absent for a slice with no prompts
};

struct MrrReport {
  double mrr = 0.0;
  std::size_t prompts = 0;
  std::size_t predicted = 0;
  /// Predictions whose ranking lacks the gold label.
  std::size_t missing = 0;
  /// Prompts with no prediction record; they contribute 0 like `missing`.
  std::size_t unpredicted = 0;
  std::vector<PromptScore> per_prompt;  // prompt order
  std::vector<SliceMrr> slices;
};

/// Mean reciprocal rank of the gold label. A prompt belongs to a slice when
/// its query's left id is a slice member. Throws ValidationError for a
/// duplicate or unknown prompt_id, a ranking with repeated labels, or a label
/// outside the prompt's candidates.
MrrReport eval_mrr(std::span<const PromptSet> prompts, std::span<const PredictionRecord> predictions,
                   std::span<const CorpusSlice> slices = {});

/// Prompt ids whose gold was ranked first.
std::set<std::string> correct_prompt_ids(const MrrReport& report);

/// DOT digraph: one node per id appearing in `matched` (label = description,
/// `hexcolor` = its colour) and one edge per correct prompt, from the query's
/// left to right description, labelled with the gold comparative. Throws
/// ValidationError for a correct id that names no prompt or a node id missing
/// from `pairs`.
std::string comparative_graph(std::span<const MatchedPair> matched, std::span<const PromptSet> prompts,
                              const std::set<std::string>& correct_ids, std::span<const ColorPair> pairs);

}  // namespace chromalign
