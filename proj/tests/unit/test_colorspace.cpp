#include <gtest/gtest.h>

#include <random>

#include "chromalign/colorspace.hpp"
#include "chromalign/error.hpp"
#include "oracles.hpp"

using namespace chromalign;

TEST(Colorspace, WhiteAndBlack) {
  const auto w = srgb_to_lab({255, 255, 255});
  EXPECT_NEAR(w.L, 100.0, 0.01);
  EXPECT_NEAR(w.a, 0.0, 0.01);
  EXPECT_NEAR(w.b, 0.0, 0.01);
  const auto k = srgb_to_lab({0, 0, 0});
  EXPECT_NEAR(k.L, 0.0, 0.01);
  EXPECT_NEAR(k.a, 0.0, 0.01);
  EXPECT_NEAR(k.b, 0.0, 0.01);
}

TEST(Colorspace, MidGreyMatchesScalarEvaluation) {
  const auto lab = srgb_to_lab({119, 119, 119});
  const auto want = oracle::srgb_to_lab(119, 119, 119);
  EXPECT_NEAR(lab.L, want[0], 1e-9);
  EXPECT_NEAR(lab.a, want[1], 1e-9);
  EXPECT_NEAR(lab.b, want[2], 1e-9);
  EXPECT_NEAR(lab.L, 50.0, 0.5);
}

TEST(Colorspace, RandomColoursMatchScalarEvaluation) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> c(0, 255);
  for (int i = 0; i < 2000; ++i) {
    const int r = c(rng), g = c(rng), b = c(rng);
    const auto lab = srgb_to_lab({r, g, b});
    const auto want = oracle::srgb_to_lab(r, g, b);
    ASSERT_NEAR(lab.L, want[0], 1e-9);
    ASSERT_NEAR(lab.a, want[1], 1e-9);
    ASSERT_NEAR(lab.b, want[2], 1e-9);
    ASSERT_GE(lab.L, 0.0);
    ASSERT_LE(lab.L, 100.0 + 1e-9);
  }
}

TEST(Colorspace, GreysAreNeutral) {
  for (int v = 0; v <= 255; ++v) {
    const auto lab = srgb_to_lab({v, v, v});
    ASSERT_LT(std::abs(lab.a), 0.05) << v;
    ASSERT_LT(std::abs(lab.b), 0.05) << v;
  }
}

TEST(Colorspace, OutOfRangeChannelIsDomainError) {
  EXPECT_THROW(srgb_to_lab({256, 0, 0}), DomainError);
  EXPECT_THROW(srgb_to_lab({0, -1, 0}), DomainError);
}

TEST(Colorspace, DeltaE) {
  const LabPoint p{50, 0, 0}, q{50, 3, 4};
  EXPECT_EQ(delta_e(p, q), 5.0);
  EXPECT_EQ(delta_e(p, p), 0.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-100, 100);
  for (int i = 0; i < 1000; ++i) {
    const LabPoint a{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng)}, c{u(rng), u(rng), u(rng)};
    ASSERT_EQ(delta_e(a, b), delta_e(b, a));
    ASSERT_LE(delta_e(a, c), delta_e(a, b) + delta_e(b, c) + 1e-12);
    ASSERT_GT(delta_e(a, b), 0.0);
  }
}

TEST(Colorspace, HexRoundTrip) {
  EXPECT_EQ(parse_hex("#FFFFFF"), (Srgb{255, 255, 255}));
  EXPECT_EQ(parse_hex("#0a7F10"), (Srgb{10, 127, 16}));
  EXPECT_EQ(to_hex({10, 127, 16}), "#0A7F10");
  EXPECT_THROW(parse_hex("#ZZ0000"), FormatError);
  EXPECT_THROW(parse_hex("FFFFFF"), FormatError);
  EXPECT_THROW(parse_hex("#FFF"), FormatError);
}
