#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "chromalign/error.hpp"
#include "chromalign/scoring.hpp"
#include "temp_dir.hpp"

using namespace chromalign;

TEST(Concreteness, MeanOverCoveredTokens) {
  const ConcretenessLexicon lex({{"banana", 5.0}, {"ripe", 3.6}});
  const auto s = concreteness("ripe banana", lex);
  ASSERT_TRUE(s.score);
  EXPECT_NEAR(*s.score, 4.3, 1e-12);
  EXPECT_DOUBLE_EQ(s.covered_fraction, 1.0);
}

TEST(Concreteness, PartialAndNoCoverage) {
  const ConcretenessLexicon lex({{"banana", 5.0}});
  const auto s = concreteness("Very ripe banana!", lex);
  EXPECT_NEAR(*s.score, 5.0, 1e-12);
  EXPECT_NEAR(s.covered_fraction, 1.0 / 3.0, 1e-12);
  const auto none = concreteness("vague feeling", lex);
  EXPECT_FALSE(none.score);
  EXPECT_EQ(none.covered_fraction, 0.0);
}

TEST(Concreteness, SuffixFallback) {
  const ConcretenessLexicon lex({{"banana", 5.0}, {"paint", 4.0}, {"box", 4.8}});
  EXPECT_EQ(lex.lookup("bananas"), 5.0);
  EXPECT_EQ(lex.lookup("painted"), 4.0);
  EXPECT_EQ(lex.lookup("painting"), 4.0);
  EXPECT_EQ(lex.lookup("boxes"), 4.8);
  EXPECT_EQ(lex.lookup("BANANA"), 5.0);
  EXPECT_FALSE(lex.lookup("s"));
}

TEST(Concreteness, LexiconValidation) {
  EXPECT_THROW(ConcretenessLexicon({{"x", 0.5}}), ArgumentError);
  TempDir dir;
  const auto p = dir.write("c.tsv", "word\trating\nsea\t4.5\n# comment\n\nsky\t4.0\n");
  EXPECT_EQ(ConcretenessLexicon::load(p).size(), 2u);
  const auto bad = dir.write("bad.tsv", "sea\t4.5\nsky\tlots\n");
  EXPECT_THROW(ConcretenessLexicon::load(bad), FormatError);
  EXPECT_THROW(ConcretenessLexicon::load(dir / "missing.tsv"), IoError);
}

TEST(Subjectivity, MeanAndModifiers) {
  const SubjectivityLexicon lex({{"lovely", {0.8, std::nullopt}},
                                 {"calm", {0.4, std::nullopt}},
                                 {"very", {0.3, 1.25}},
                                 {"slightly", {0.2, 0.5}}});
  EXPECT_NEAR(subjectivity("lovely calm sea", lex), 0.6, 1e-12);
  EXPECT_NEAR(subjectivity("slightly calm", lex), 0.2, 1e-12);
  EXPECT_NEAR(subjectivity("very very calm", lex), 0.625, 1e-12);
  EXPECT_DOUBLE_EQ(subjectivity("very lovely", lex), 1.0);
  EXPECT_NEAR(subjectivity("calm, very", lex), 0.35, 1e-12);
  EXPECT_NEAR(subjectivity("very sea calm", lex), 0.35, 1e-12);
  EXPECT_EQ(subjectivity("sea", lex), 0.0);
}

TEST(Subjectivity, LoadWithMultiplierColumn) {
  TempDir dir;
  const auto p = dir.write("s.tsv", "word\tsubjectivity\tmultiplier\nvery\t0.3\t1.3\ncalm\t0.4\n");
  const auto lex = SubjectivityLexicon::load(p);
  ASSERT_NE(lex.find("very"), nullptr);
  EXPECT_EQ(lex.find("very")->multiplier, 1.3);
  EXPECT_FALSE(lex.find("CALM")->multiplier);
  EXPECT_THROW(SubjectivityLexicon::load(dir.write("b.tsv", "very\t0.3\t-1\n")), FormatError);
  EXPECT_THROW(SubjectivityLexicon::load(dir.write("c.tsv", "calm\t1.5\n")), FormatError);
}

TEST(ColorWords, Detection) {
  EXPECT_TRUE(has_color_word("Reddish dusk", default_color_words()));
  EXPECT_TRUE(has_color_word("grey-ish? no, GREY.", default_color_words()));
  EXPECT_FALSE(has_color_word("redwood forest", default_color_words()));
  TempDir dir;
  const auto words = load_color_words(dir.write("w.txt", "# basic\nTeal\n\n"));
  EXPECT_EQ(words, (ColorWordSet{"teal"}));
  EXPECT_THROW(load_color_words(dir.write("e.txt", "# none\n")), FormatError);
}

TEST(CorpusStats, PosPatternsAndVocabulary) {
  const std::vector<ColorPair> pairs{{"a", {}, "dark sea", {"ADJ", "NOUN"}},
                                     {"b", {}, "pale sky", {"ADJ", "NOUN"}},
                                     {"c", {}, "sea", {"NOUN"}},
                                     {"d", {}, "sea sea", {}}};
  const auto pos = pos_pattern_counts(pairs);
  ASSERT_EQ(pos.patterns.size(), 2u);
  EXPECT_EQ(pos.patterns[0].first, (PosPattern{"ADJ", "NOUN"}));
  EXPECT_EQ(pos.patterns[0].second, 2u);
  EXPECT_EQ(pos.untagged, 1u);

  const auto v = vocabulary_stats(pairs, 2);
  EXPECT_EQ(v.descriptions, 4u);
  EXPECT_EQ(v.tokens, 7u);
  EXPECT_EQ(v.vocabulary, 4u);
  ASSERT_EQ(v.top_words.size(), 2u);
  EXPECT_EQ(v.top_words[0], (std::pair<std::string, std::size_t>{"sea", 4}));
  EXPECT_EQ(v.top_words[1].first, "dark");
}

TEST(UniformBins, DisjointCover) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::map<std::string, double> scores;
  for (int i = 0; i < 500; ++i) scores["id" + std::to_string(i)] = u(rng);
  scores["lo"] = 0.0;
  scores["hi"] = 1.0;
  for (std::size_t k : {1u, 2u, 5u, 10u}) {
    const auto bins = uniform_bins(scores, k, 0.0, 1.0, "subjectivity");
    ASSERT_EQ(bins.size(), k);
    std::set<std::string> seen;
    std::size_t total = 0;
    for (std::size_t i = 0; i < k; ++i) {
      EXPECT_EQ(bins[i].name, "subjectivity_bin" + std::to_string(i));
      for (const auto& id : bins[i].member_ids) {
        const double s = scores.at(id);
        EXPECT_GE(s, double(i) / double(k) - 1e-12);
        if (i + 1 < k) EXPECT_LT(s, double(i + 1) / double(k) + 1e-12);
        seen.insert(id);
      }
      total += bins[i].member_ids.size();
    }
    EXPECT_EQ(total, scores.size());
    EXPECT_EQ(seen.size(), scores.size());
  }
}

TEST(UniformBins, UpperBoundLandsInLastBin) {
  const auto bins = uniform_bins({{"top", 5.0}, {"bottom", 1.0}}, 4, 1.0, 5.0);
  EXPECT_EQ(bins[3].member_ids, (std::vector<std::string>{"top"}));
  EXPECT_EQ(bins[0].member_ids, (std::vector<std::string>{"bottom"}));
}

TEST(UniformBins, CountsFollowUniformDistribution) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::map<std::string, double> scores;
  for (int i = 0; i < 1000; ++i) scores["s" + std::to_string(i)] = u(rng);
  const auto bins = uniform_bins(scores, 5, 0.0, 1.0);
  // Binomial(1000, 0.2): mean 200, sd ~12.65, so 3 sd ~ 37.9.
  for (const auto& b : bins) {
    EXPECT_GT(double(b.member_ids.size()), 200.0 - 37.9);
    EXPECT_LT(double(b.member_ids.size()), 200.0 + 37.9);
  }
}

TEST(UniformBins, EdgeCases) {
  const auto empty = uniform_bins({}, 3, 0.0, 1.0);
  ASSERT_EQ(empty.size(), 3u);
  for (const auto& b : empty) EXPECT_TRUE(b.member_ids.empty());
  EXPECT_THROW(uniform_bins({}, 0, 0.0, 1.0), ArgumentError);
  EXPECT_THROW(uniform_bins({}, 2, 1.0, 1.0), ArgumentError);
  EXPECT_THROW(uniform_bins({{"x", 1.5}}, 2, 0.0, 1.0), ArgumentError);
}
