#include <limits>

#include <gtest/gtest.h>

#include "nomascma/rxcomplexity.hpp"

using namespace nomascma;
using namespace nomascma::rx;

TEST(Sic, KnownValues) {
  EXPECT_EQ(sic_complexity(3, 4), 360u);
  EXPECT_EQ(sic_complexity(4, 5), 1440u);
  EXPECT_EQ(sic_complexity(1, 7), 0u);
}

TEST(Sic, StrictlyIncreasing) {
  for (std::uint64_t L = 2; L < 12; ++L)
    for (std::uint64_t G = 1; G < 12; ++G) {
      EXPECT_LT(sic_complexity(L, G), sic_complexity(L + 1, G));
      EXPECT_LT(sic_complexity(L, G), sic_complexity(L, G + 1));
    }
}

TEST(Mpa, KnownValues) {
  EXPECT_EQ(mpa_complexity(28, 3, 3), 65856u);
  EXPECT_EQ(mpa_complexity(2, 1, 1), 2u);
  EXPECT_EQ(mpa_complexity(120, 3, 3), 5184000u);
  EXPECT_EQ(mpa_complexity(120, 4, 3), 622080000u);
}

TEST(Mpa, LinearInIterations) {
  for (std::uint64_t it = 1; it < 20; ++it) EXPECT_EQ(mpa_complexity(28, 3, it), it * mpa_complexity(28, 3, 1));
}

TEST(Mpa, MoreComplexThanSic) {
  EXPECT_NEAR(static_cast<double>(mpa_complexity(28, 3, 3)) / static_cast<double>(sic_complexity(3, 4)), 182.93, 0.01);
}

TEST(Complexity, OverflowAndDomainErrors) {
  EXPECT_THROW(mpa_complexity(1u << 20, 4, 1), std::overflow_error);
  EXPECT_THROW(sic_complexity(std::numeric_limits<std::uint64_t>::max() / 2, 2), std::overflow_error);
  EXPECT_THROW(sic_complexity(0, 1), std::invalid_argument);
  EXPECT_THROW(mpa_complexity(0, 1, 1), std::invalid_argument);
  EXPECT_THROW(checked_add(std::numeric_limits<std::uint64_t>::max(), 1), std::overflow_error);
}

TEST(Binomial, Values) {
  EXPECT_EQ(binomial(8, 2), 28u);
  EXPECT_EQ(binomial(10, 3), 120u);
  EXPECT_EQ(binomial(5, 0), 1u);
  EXPECT_EQ(binomial(5, 5), 1u);
  EXPECT_EQ(binomial(3, 4), 0u);
  EXPECT_EQ(binomial(60, 30), 118264581564861424u);
}

TEST(Table, FirstPublishedRowMatches) {
  const auto rows = complexity_table(published_rows());
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].pi_size, 28u);
  EXPECT_EQ(rows[0].sic, 360u);
  EXPECT_EQ(rows[0].mpa, 65856u);
  EXPECT_EQ(rows[0].discrepancies(), 0u);
}

TEST(Table, SecondPublishedRowFlagsBoth) {
  const auto row = complexity_table(published_rows())[1];
  EXPECT_EQ(row.pi_size, 120u);
  EXPECT_EQ(row.sic, 1440u);
  EXPECT_EQ(row.mpa, 622080000u);
  EXPECT_FALSE(row.sic_matches());
  EXPECT_FALSE(row.mpa_matches());
  ASSERT_EQ(row.discrepancies(), 2u);
  EXPECT_NE(row.notes[0].find("1920"), std::string::npos);
  EXPECT_NE(row.notes[0].find("L_T instead of L_T - 1"), std::string::npos);
  EXPECT_NE(row.notes[1].find("matches d = 3"), std::string::npos);
}

TEST(Table, EmptyInput) { EXPECT_TRUE(complexity_table({}).empty()); }

TEST(Table, ExplicitCodebookCount) {
  ComplexityParams p;
  p.pi_size = 6;
  const auto row = evaluate_row({p, std::nullopt, std::nullopt});
  EXPECT_EQ(row.pi_size, 6u);
  EXPECT_EQ(row.mpa, 3u * 216u);
  EXPECT_EQ(row.discrepancies(), 0u);
}

TEST(Render, CsvAndText) {
  const auto rows = complexity_table(published_rows());
  const auto csv = to_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "N,d,U,L_T,G,I_T,pi_size,sic_ops,mpa_ops,printed_sic,printed_mpa,notes");
  EXPECT_NE(csv.find("8,3,2,3,4,3,28,360,65856,360,65856,\"\""), std::string::npos);
  EXPECT_NE(csv.find("10,4,3,4,5,3,120,1440,622080000,1920,5184000,"), std::string::npos);
  const auto text = to_text(rows);
  EXPECT_NE(text.find("65856"), std::string::npos);
  EXPECT_NE(text.find("! SIC"), std::string::npos);
  EXPECT_NE(text.find("! MPA"), std::string::npos);
}
