#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "chromalign/data.hpp"
#include "chromalign/error.hpp"
#include "temp_dir.hpp"

using namespace chromalign;

namespace {

std::string format_error(std::string_view line) {
  try {
    parse_pair_row(line);
  } catch (const FormatError& e) {
    return e.what();
  }
  return "";
}

EmbeddingMatrix small_matrix() {
  return EmbeddingMatrix({"a", "b"}, 3, {1.0f, -2.5f, 0.125f, 3.0f, 1e-8f, -0.0f});
}

}  // namespace

TEST(PairRow, ParsesWithAndWithoutTags) {
  const auto p = parse_pair_row("c1\t#1A2B3C\tmisty sea\tADJ|NOUN");
  EXPECT_EQ(p.id, "c1");
  EXPECT_EQ(p.color, (Srgb{0x1A, 0x2B, 0x3C}));
  EXPECT_EQ(p.description, "misty sea");
  EXPECT_EQ(p.pos_tags, (std::vector<std::string>{"ADJ", "NOUN"}));

  const auto q = parse_pair_row("c2\t#ffffff\tsnow\r");
  EXPECT_TRUE(q.pos_tags.empty());
  EXPECT_EQ(q.description, "snow");
}

TEST(PairRow, Errors) {
  EXPECT_NE(format_error("c1\t#1A2B3C").find("expected 3 or 4 tab-separated fields"), std::string::npos);
  EXPECT_NE(format_error("c1\t#1A2B3C\ta\tb\tc").find("expected 3 or 4"), std::string::npos);
  EXPECT_EQ(format_error("\t#1A2B3C\tsea"), "empty id");
  EXPECT_EQ(format_error("c1\t#1A2B3C\t  "), "empty description");
  EXPECT_NE(format_error("c1\t#1A2B3C\tmisty sea\tADJ").find("POS tag count"), std::string::npos);
  EXPECT_FALSE(format_error("c1\t#1A2B3G\tsea").empty());
}

TEST(PairsFile, BadRowIsReportedAndSkipped) {
  std::istringstream in("a\t#000000\tnight\nb\t#GGGGGG\tbroken\nc\t#FFFFFF\tsnow\n");
  const auto r = read_pairs(in);
  ASSERT_EQ(r.pairs.size(), 2u);
  EXPECT_EQ(r.pairs[0].id, "a");
  EXPECT_EQ(r.pairs[1].id, "c");
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_EQ(r.errors[0].line, 2u);
}

TEST(PairsFile, DuplicateIdIsAnError) {
  std::istringstream in("a\t#000000\tnight\na\t#FFFFFF\tsnow\n");
  const auto r = read_pairs(in);
  EXPECT_EQ(r.pairs.size(), 1u);
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_NE(r.errors[0].message.find("duplicate id"), std::string::npos);
}

TEST(PairsFile, WriteReadIsFixedPoint) {
  const std::string text = "a\t#0A0B0C\tdeep  night\tADJ|NOUN\nb\t#FFFFFF\tsnow\n";
  std::istringstream in(text);
  const auto r = read_pairs(in);
  std::ostringstream out;
  write_pairs(out, r.pairs);
  EXPECT_EQ(out.str(), text);
  std::istringstream again(out.str());
  EXPECT_EQ(read_pairs(again).pairs, r.pairs);
}

TEST(Embeddings, EncodedSizeIsHeaderPlusPayload) {
  const auto m = small_matrix();
  const auto bytes = encode_embeddings(m);
  ASSERT_GE(bytes.size(), 10u);
  EXPECT_EQ(bytes.substr(0, 6), "EMBV1\n");
  std::uint32_t header_len = 0;
  for (int i = 3; i >= 0; --i) header_len = (header_len << 8) | std::uint8_t(bytes[6 + std::size_t(i)]);
  EXPECT_EQ(bytes.size(), 6 + 4 + header_len + 24);
}

TEST(Embeddings, RoundTripIsBitExact) {
  const auto m = small_matrix();
  const auto back = decode_embeddings(encode_embeddings(m));
  EXPECT_EQ(back.ids(), m.ids());
  ASSERT_EQ(back.values().size(), m.values().size());
  EXPECT_EQ(std::memcmp(back.values().data(), m.values().data(), m.values().size() * 4), 0);
  EXPECT_TRUE(std::signbit(back.values()[5]));
}

TEST(Embeddings, MetadataSurvivesFile) {
  TempDir dir;
  EmbeddingMatrix m({"x"}, 2, {0.5f, 0.25f}, R"({"model":"toy","layer":3})");
  write_embeddings(m, dir / "m.emb");
  const auto back = read_embeddings(dir / "m.emb");
  EXPECT_EQ(back, m);
  EXPECT_NE(back.metadata_json().find("\"layer\":3"), std::string::npos);
}

TEST(Embeddings, TruncatedPayload) {
  auto bytes = encode_embeddings(small_matrix());
  bytes.pop_back();
  try {
    decode_embeddings(bytes);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_STREQ(e.what(), "payload shorter than n·d·4");
  }
  bytes += "xx";
  EXPECT_THROW(decode_embeddings(bytes), FormatError);
}

TEST(Embeddings, BadMagicAndHeader) {
  auto bytes = encode_embeddings(small_matrix());
  auto bad = bytes;
  bad[3] = '2';
  try {
    decode_embeddings(bad);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("magic", 0), 0u);
  }
  EXPECT_THROW(decode_embeddings(bytes.substr(0, 8)), FormatError);
  bad = bytes;
  bad[10] = '[';
  EXPECT_THROW(decode_embeddings(bad), FormatError);
}

TEST(Embeddings, Validation) {
  EXPECT_THROW(EmbeddingMatrix({"a", "a"}, 1, {1.0f, 2.0f}), ArgumentError);
  EXPECT_THROW(EmbeddingMatrix({"a"}, 2, {1.0f}), ArgumentError);
  EXPECT_THROW(EmbeddingMatrix({"a"}, 1, {std::numeric_limits<float>::quiet_NaN()}), ArgumentError);
  EXPECT_THROW(small_matrix().select(std::vector<std::string>{"zz"}), ArgumentError);
}

TEST(Embeddings, TsvRoundTripAndDispatch) {
  TempDir dir;
  const auto m = small_matrix();
  write_embeddings_tsv(m, dir / "m.tsv");
  EXPECT_EQ(load_embeddings(dir / "m.tsv").values(), m.values());
  write_embeddings(m, dir / "m.emb");
  EXPECT_EQ(load_embeddings(dir / "m.emb").values(), m.values());
}

TEST(Join, PreservesEmbeddingOrderAndIgnoresExtraPairs) {
  const std::vector<ColorPair> pairs{
      {"a", {255, 255, 255}, "snow", {}}, {"b", {0, 0, 0}, "night", {}}, {"c", {255, 0, 0}, "fire", {}}};
  const EmbeddingMatrix x({"b", "a"}, 1, {1.0f, 2.0f});
  const auto j = join(pairs, x);
  EXPECT_EQ(j.Y.ids, (std::vector<std::string>{"b", "a"}));
  EXPECT_NEAR(j.Y.values[0].L, 0.0, 1e-9);
  EXPECT_NEAR(j.Y.values[1].L, 100.0, 0.01);
}

TEST(Join, MissingPairListsIds) {
  const std::vector<ColorPair> pairs{{"a", {1, 2, 3}, "x", {}}};
  const EmbeddingMatrix x({"a", "zz", "yy"}, 1, {1.0f, 2.0f, 3.0f});
  try {
    join(pairs, x);
    FAIL();
  } catch (const JoinError& e) {
    EXPECT_EQ(e.missing_ids(), (std::vector<std::string>{"zz", "yy"}));
    EXPECT_NE(std::string(e.what()).find("zz"), std::string::npos);
  }
}

TEST(Join, RestrictKeepsOrder) {
  const std::vector<ColorPair> pairs{
      {"a", {1, 1, 1}, "x", {}}, {"b", {2, 2, 2}, "y", {}}, {"c", {3, 3, 3}, "z", {}}};
  const EmbeddingMatrix x({"a", "b", "c"}, 1, {1.0f, 2.0f, 3.0f});
  const auto j = join(pairs, x);
  const std::vector<std::string> keep{"c", "a", "nope"};
  const auto r = restrict_to(j, keep);
  EXPECT_EQ(r.Y.ids, (std::vector<std::string>{"a", "c"}));
  EXPECT_EQ(r.X.ids(), r.Y.ids);
  EXPECT_EQ(r.X.values(), (std::vector<float>{1.0f, 3.0f}));
}

TEST(Slice, FileRoundTrip) {
  TempDir dir;
  const CorpusSlice s{"subjectivity_bin2", {"id1", "id7", "id3"}, "subjectivity in [0.4, 0.6)"};
  write_slice(s, dir / "s.txt");
  EXPECT_EQ(read_slice(dir / "s.txt"), s);
  EXPECT_EQ(slurp(dir / "s.txt"), format_slice(s));
}
