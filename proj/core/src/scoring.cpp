#include "chromalign/scoring.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include "chromalign/error.hpp"
#include "chromalign/text.hpp"

namespace chromalign {
namespace {

constexpr std::string_view kLemmaSuffixes[] = {"ing", "es", "ed", "s"};

std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

template <typename RowFn>
void for_each_lexicon_row(const std::filesystem::path& path, RowFn&& fn) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open lexicon: " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line[0] == '#') continue;
    fn(lineno, split(line, '\t'));
  }
}

std::string lexicon_error(const std::filesystem::path& path, std::size_t lineno, std::string_view what) {
  return path.string() + ":" + std::to_string(lineno) + ": " + std::string(what);
}

}  // namespace

// ---------------------------------------------------------------------------
// Concreteness

ConcretenessLexicon::ConcretenessLexicon(const std::map<std::string, double>& entries) {
  for (const auto& [lemma, score] : entries) {
    if (!(score >= 1.0 && score <= 5.0)) {
      throw ArgumentError("concreteness for '" + lemma + "' outside [1,5]");
    }
    entries_[to_lower_ascii(lemma)] = score;
  }
}

ConcretenessLexicon ConcretenessLexicon::load(const std::filesystem::path& path) {
  std::map<std::string, double> entries;
  bool first = true;
  for_each_lexicon_row(path, [&](std::size_t lineno, const std::vector<std::string_view>& f) {
    const bool header_candidate = first;
    first = false;
    if (f.size() < 2) throw FormatError(lexicon_error(path, lineno, "expected lemma<TAB>score"));
    const auto score = parse_double(f[1]);
    if (!score) {
      if (header_candidate) return;
      throw FormatError(lexicon_error(path, lineno, "score is not a number"));
    }
    if (*score < 1.0 || *score > 5.0) throw FormatError(lexicon_error(path, lineno, "score outside [1,5]"));
    entries[std::string(trim(f[0]))] = *score;
  });
  return ConcretenessLexicon(entries);
}

std::optional<double> ConcretenessLexicon::lookup(std::string_view token) const {
  const std::string key = to_lower_ascii(token);
  if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  for (std::string_view suffix : kLemmaSuffixes) {
    if (key.size() > suffix.size() && key.ends_with(suffix)) {
      const auto it = entries_.find(key.substr(0, key.size() - suffix.size()));
      if (it != entries_.end()) return it->second;
    }
  }
  return std::nullopt;
}

ConcretenessScore concreteness(std::string_view description, const ConcretenessLexicon& lexicon) {
  const auto tokens = tokenize(description);
  ConcretenessScore out;
  if (tokens.empty()) return out;
  double sum = 0.0;
  std::size_t hits = 0;
  for (const auto& t : tokens) {
    if (const auto v = lexicon.lookup(t)) {
      sum += *v;
      ++hits;
    }
  }
  out.covered_fraction = double(hits) / double(tokens.size());
  if (hits > 0) out.score = sum / double(hits);
  return out;
}

// ---------------------------------------------------------------------------
// Subjectivity

SubjectivityLexicon::SubjectivityLexicon(const std::map<std::string, SubjectivityEntry>& entries) {
  for (const auto& [word, e] : entries) {
    if (!(e.subjectivity >= 0.0 && e.subjectivity <= 1.0)) {
      throw ArgumentError("subjectivity for '" + word + "' outside [0,1]");
    }
    if (e.multiplier && !(*e.multiplier > 0.0)) {
      throw ArgumentError("modifier multiplier for '" + word + "' must be positive");
    }
    entries_[to_lower_ascii(word)] = e;
  }
}

SubjectivityLexicon SubjectivityLexicon::load(const std::filesystem::path& path) {
  std::map<std::string, SubjectivityEntry> entries;
  bool first = true;
  for_each_lexicon_row(path, [&](std::size_t lineno, const std::vector<std::string_view>& f) {
    const bool header_candidate = first;
    first = false;
    if (f.size() < 2 || f.size() > 3) {
      throw FormatError(lexicon_error(path, lineno, "expected word<TAB>subjectivity[<TAB>multiplier]"));
    }
    const auto subj = parse_double(f[1]);
    if (!subj) {
      if (header_candidate) return;
      throw FormatError(lexicon_error(path, lineno, "subjectivity is not a number"));
    }
    if (*subj < 0.0 || *subj > 1.0) throw FormatError(lexicon_error(path, lineno, "subjectivity outside [0,1]"));
    SubjectivityEntry entry{*subj, std::nullopt};
    if (f.size() == 3 && !trim(f[2]).empty()) {
      const auto mult = parse_double(f[2]);
      if (!mult || *mult <= 0.0) throw FormatError(lexicon_error(path, lineno, "multiplier must be a positive number"));
      entry.multiplier = *mult;
    }
    entries[std::string(trim(f[0]))] = entry;
  });
  return SubjectivityLexicon(entries);
}

const SubjectivityEntry* SubjectivityLexicon::find(std::string_view word) const {
  const auto it = entries_.find(to_lower_ascii(word));
  return it == entries_.end() ? nullptr : &it->second;
}

double subjectivity(std::string_view description, const SubjectivityLexicon& lexicon) {
  const auto tokens = tokenize(description);
  double sum = 0.0;
  std::size_t scored = 0;
  double pending = 1.0;           // product of multipliers of the current modifier run
  std::vector<double> run_values;  // the run's own values, in case nothing follows it

  auto flush_run = [&] {
    for (double v : run_values) {
      sum += v;
      ++scored;
    }
    run_values.clear();
    pending = 1.0;
  };

  for (const auto& t : tokens) {
    const SubjectivityEntry* e = lexicon.find(t);
    if (e == nullptr) {
      flush_run();
      continue;
    }
    if (e->multiplier) {
      pending *= *e->multiplier;
      run_values.push_back(e->subjectivity);
      continue;
    }
    sum += e->subjectivity * pending;
    ++scored;
    run_values.clear();
    pending = 1.0;
  }
  flush_run();
  if (scored == 0) return 0.0;
  return std::clamp(sum / double(scored), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Colour words

const ColorWordSet& default_color_words() {
  static const ColorWordSet words{
      "black", "white", "red", "green", "yellow", "blue", "brown", "orange", "pink", "purple",
      "gray", "grey", "blackish", "whitish", "reddish", "greenish", "yellowish", "bluish",
      "blueish", "brownish", "orangish", "orangey", "pinkish", "purplish", "grayish", "greyish",
  };
  return words;
}

ColorWordSet load_color_words(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open colour word list: " + path.string());
  ColorWordSet out;
  std::string line;
  while (std::getline(in, line)) {
    const auto word = trim(line);
    if (word.empty() || word[0] == '#') continue;
    out.insert(to_lower_ascii(word));
  }
  if (out.empty()) throw FormatError("colour word list is empty: " + path.string());
  return out;
}

bool has_color_word(std::string_view description, const ColorWordSet& color_words) {
  for (const auto& t : tokenize(description)) {
    if (color_words.count(t)) return true;
  }
  return false;
}

ScoredDescription score_description(const ColorPair& pair, const ConcretenessLexicon& concreteness_lex,
                                    const SubjectivityLexicon& subjectivity_lex,
                                    const ColorWordSet& color_words) {
  const auto c = concreteness(pair.description, concreteness_lex);
  return ScoredDescription{pair.id, c.score, subjectivity(pair.description, subjectivity_lex),
                           c.covered_fraction, has_color_word(pair.description, color_words)};
}

// ---------------------------------------------------------------------------
// Corpus statistics

PosPatternCounts pos_pattern_counts(std::span<const ColorPair> pairs) {
  std::map<PosPattern, std::size_t> counts;
  PosPatternCounts out;
  for (const auto& p : pairs) {
    if (p.pos_tags.empty()) {
      ++out.untagged;
      continue;
    }
    ++counts[p.pos_tags];
  }
  out.patterns.assign(counts.begin(), counts.end());
  std::stable_sort(out.patterns.begin(), out.patterns.end(),
                   [](const auto& x, const auto& y) { return x.second > y.second; });
  return out;
}

VocabularyStats vocabulary_stats(std::span<const ColorPair> pairs, std::size_t top_k) {
  std::unordered_map<std::string, std::size_t> freq;
  VocabularyStats out;
  out.descriptions = pairs.size();
  for (const auto& p : pairs) {
    for (auto& t : tokenize(p.description)) {
      ++freq[std::move(t)];
      ++out.tokens;
    }
  }
  out.vocabulary = freq.size();
  std::vector<std::pair<std::string, std::size_t>> all(freq.begin(), freq.end());
  std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) {
    return x.second != y.second ? x.second > y.second : x.first < y.first;
  });
  if (all.size() > top_k) all.resize(top_k);
  out.top_words = std::move(all);
  return out;
}

std::vector<CorpusSlice> uniform_bins(const std::map<std::string, double>& scores, std::size_t k,
                                      double lo, double hi, std::string_view label) {
  if (k == 0) throw ArgumentError("uniform_bins: k must be >= 1");
  if (!(lo < hi)) throw ArgumentError("uniform_bins: need lo < hi");
  const double width = (hi - lo) / double(k);

  std::vector<CorpusSlice> slices(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double a = lo + width * double(i);
    const double b = i + 1 == k ? hi : lo + width * double(i + 1);
    slices[i].name = std::string(label) + "_bin" + std::to_string(i);
    slices[i].provenance = std::string(label) + " in [" + std::to_string(a) + ", " + std::to_string(b) +
                           (i + 1 == k ? "]" : ")");
  }
  for (const auto& [id, s] : scores) {
    if (!(s >= lo && s <= hi)) {
      throw ArgumentError("uniform_bins: score for '" + id + "' outside [lo,hi]");
    }
    auto idx = static_cast<std::size_t>(std::floor((s - lo) / (hi - lo) * double(k)));
    if (idx >= k) idx = k - 1;
    slices[idx].member_ids.push_back(id);
  }
  return slices;
}

}  // namespace chromalign
