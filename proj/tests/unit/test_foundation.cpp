#include <gtest/gtest.h>

#include <filesystem>
#include <set>

#include "zetagap/indicator.hpp"
#include "zetagap/rng.hpp"
#include "zetagap/text_io.hpp"

using namespace zetagap;

TEST(Indicator, BitsHexAndSetAlgebra) {
  const auto a = Indicator::from_bits("1011000");
  EXPECT_EQ(a.count(), 3u);
  EXPECT_EQ(a.to_bits(), "1011000");
  EXPECT_EQ(Indicator::from_mask(a.mask(), 7), a);
  EXPECT_EQ(a.complement().count(), 4u);
  const auto b = Indicator::from_bits("0011001");
  EXPECT_EQ(a.intersection_count(b), 2u);
  EXPECT_EQ(a.minus(b).to_bits(), "1000000");
  EXPECT_TRUE(a.contains(Indicator::from_bits("0010000")));
  EXPECT_FALSE(a.contains(b));
  EXPECT_EQ(Indicator::first_k(7, 2).to_bits(), "1100000");
  EXPECT_THROW(Indicator::from_bits("10x"), std::exception);
}

TEST(Indicator, WideIndicatorsKeepTailClear) {
  Indicator d(130);
  d.set(0);
  d.set(129);
  EXPECT_EQ(d.count(), 2u);
  EXPECT_EQ(d.complement().count(), 128u);
  EXPECT_EQ(d.complement().complement(), d);
  EXPECT_EQ(d.ones(), (std::vector<std::size_t>{0, 129}));
  EXPECT_NE(d.to_hex(), Indicator(130).to_hex());
}

TEST(Rng, DerivedSeedsAreDistinctAndStable) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 20; ++a)
    for (std::uint64_t b = 0; b < 20; ++b) seen.insert(derive_seed(7, {a, b}));
  EXPECT_EQ(seen.size(), 400u);
  EXPECT_EQ(derive_seed(7, {1, 2}), derive_seed(7, {1, 2}));
  EXPECT_NE(derive_seed(7, {1, 2}), derive_seed(7, {2, 1}));
  EXPECT_NE(derive_seed(7, {1}), derive_seed(8, {1}));
}

TEST(Rng, FairCoinAndUniformRange) {
  Rng rng = make_rng(1);
  int heads = 0;
  for (int i = 0; i < 40000; ++i) heads += fair_coin(rng);
  EXPECT_NEAR(heads, 20000, 4 * 100);
  for (int i = 0; i < 1000; ++i) {
    const double u = uniform01(rng);
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(TextIo, LinesFieldsAndNumbers) {
  std::istringstream in("# comment\n\n 1, 2 ;3\n4\t5 # trailing\n");
  const auto lines = io::content_lines(in);
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0].number, 3u);
  EXPECT_EQ(io::parse_row(lines[0]), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(io::parse_row(lines[1]), (std::vector<double>{4, 5}));
  EXPECT_THROW(io::parse_double("1.5x"), ParseError);
  EXPECT_THROW(io::parse_int("2.5"), ParseError);
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e300}) EXPECT_EQ(io::parse_double(io::fmt_exact(v)), v);
}

TEST(TextIo, AtomicWriteAndMissingFile) {
  const auto path = std::filesystem::temp_directory_path() / "zetagap_atomic_test.txt";
  io::write_file_atomic(path, "first");
  io::write_file_atomic(path, "second");
  EXPECT_EQ(io::read_file(path), "second");
  std::filesystem::remove(path);
  EXPECT_THROW(io::read_file(path), IoError);
}
