#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "chromalign/data.hpp"

namespace chromalign {

/// Lemma -> concreteness rating in [1, 5]. Keys are stored lowercased.
class ConcretenessLexicon {
 public:
  ConcretenessLexicon() = default;
  /// Throws ArgumentError for ratings outside [1, 5].
  explicit ConcretenessLexicon(const std::map<std::string, double>& entries);

  /// TSV `lemma<TAB>score`. Lines starting with '#' and blank lines are skipped.
  /// A non-numeric first row is treated as a header.
  static ConcretenessLexicon load(const std::filesystem::path& path);

  /// Exact match, else retry after stripping one of -ing, -es, -ed, -s.
  std::optional<double> lookup(std::string_view token) const;
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::unordered_map<std::string, double> entries_;
};

struct SubjectivityEntry {
  double subjectivity = 0.0;
  /// Present for intensifiers such as "very"; scales the next scored word.
  std::optional<double> multiplier;
};

class SubjectivityLexicon {
 public:
  SubjectivityLexicon() = default;
  /// Throws ArgumentError for subjectivity outside [0, 1] or a non-positive multiplier.
  explicit SubjectivityLexicon(const std::map<std::string, SubjectivityEntry>& entries);

  /// TSV `word<TAB>subjectivity[<TAB>modifier_multiplier]`.
  static SubjectivityLexicon load(const std::filesystem::path& path);

  const SubjectivityEntry* find(std::string_view word) const;
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::unordered_map<std::string, SubjectivityEntry> entries_;
};

struct ConcretenessScore {
  std::optional<double> score;  // absent iff no token was found
  double covered_fraction = 0.0;
};

/// Mean lexicon rating over the tokens found in the lexicon.
ConcretenessScore concreteness(std::string_view description, const ConcretenessLexicon& lexicon);

/// Mean subjectivity of the words found in the lexicon. A run of modifier
/// words directly before a scored word multiplies that word's value and is not
/// scored itself; a modifier with no scored word after it counts as a plain
/// word. Result clamped to [0, 1]; 0 when nothing is covered.
double subjectivity(std::string_view description, const SubjectivityLexicon& lexicon);

using ColorWordSet = std::set<std::string>;

/// The eleven basic English colour terms plus common spelling and -ish variants.
const ColorWordSet& default_color_words();
/// One word per line; '#' comments allowed. Words are lowercased.
ColorWordSet load_color_words(const std::filesystem::path& path);

bool has_color_word(std::string_view description, const ColorWordSet& color_words);

struct ScoredDescription {
  std::string id;
  std::optional<double> concreteness;
  double subjectivity = 0.0;
  double covered_fraction = 0.0;
  bool has_color_word = false;
};

ScoredDescription score_description(const ColorPair& pair, const ConcretenessLexicon& concreteness_lex,
                                    const SubjectivityLexicon& subjectivity_lex,
                                    const ColorWordSet& color_words);

using PosPattern = std::vector<std::string>;

struct PosPatternCounts {
  /// Sorted by descending count, ties by pattern.
  std::vector<std::pair<PosPattern, std::size_t>> patterns;
  std::size_t untagged = 0;
};

PosPatternCounts pos_pattern_counts(std::span<const ColorPair> pairs);

struct VocabularyStats {
  std::size_t descriptions = 0;
  std::size_t tokens = 0;
  std::size_t vocabulary = 0;
  /// Most frequent tokens, descending count then lexicographic.
  std::vector<std::pair<std::string, std::size_t>> top_words;
};

VocabularyStats vocabulary_stats(std::span<const ColorPair> pairs, std::size_t top_k = 20);

/// k equal-width bins over [lo, hi]; bins are [lo + i w, lo + (i+1) w) except the
/// last, which is closed so `hi` lands in it. Slices are named
/// `<label>_bin<i>` and carry their bounds as provenance. Empty input yields
/// k empty slices. Throws ArgumentError for k == 0, lo >= hi, or a score outside
/// [lo, hi].
std::vector<CorpusSlice> uniform_bins(const std::map<std::string, double>& scores, std::size_t k,
                                      double lo, double hi, std::string_view label = "score");

}  // namespace chromalign
