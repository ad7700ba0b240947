#include <gtest/gtest.h>

#include "table_data.hpp"
#include "unargmax/region_count.hpp"

namespace ua = unargmax;

TEST(RegionCount, NamedCells) {
  EXPECT_EQ(ua::count_no_bias(4, 2), 12);
  EXPECT_EQ(ua::count_no_bias(10, 3), 1742);
  EXPECT_EQ(ua::count_no_bias(5, 4), 120);
  EXPECT_EQ(ua::count_with_bias(4, 2), 18);
  EXPECT_EQ(ua::count_with_bias(9, 1), 37);
  EXPECT_EQ(ua::count_with_bias(10, 10), 3628800);
  EXPECT_EQ(ua::count_with_bias(10, 3), 10366);
}

TEST(RegionCount, PublishedTables) {
  const auto q = ua::no_bias_table(10, 10);
  const auto b = ua::with_bias_table(10, 10);
  for (int n = 2; n <= 10; ++n) {
    for (int d = 1; d <= 10; ++d) {
      EXPECT_EQ(q[n][d], ua::testing::kNoBiasCounts[n - 2][d - 1]) << "n=" << n << " d=" << d;
      EXPECT_EQ(b[n][d], ua::testing::kWithBiasCounts[n - 2][d - 1]) << "n=" << n << " d=" << d;
    }
  }
}

TEST(RegionCount, DomainErrors) {
  EXPECT_THROW(ua::count_no_bias(1, 3), ua::DomainError);
  EXPECT_THROW(ua::count_with_bias(3, 0), ua::DomainError);
}

TEST(RegionCount, StructuralIdentities) {
  const int max_n = 25, max_d = 26;
  const auto q = ua::no_bias_table(max_n, max_d);
  const auto b = ua::with_bias_table(max_n, max_d);
  const auto s = ua::stirling_first_unsigned(max_n);
  for (int n = 2; n <= max_n; ++n) {
    const ua::BigInt fact = ua::factorial(n);
    ua::BigInt row_sum = 0;
    for (int k = 0; k <= n; ++k) row_sum += s[n][k];
    EXPECT_EQ(row_sum, fact);
    EXPECT_EQ(q[n][2], ua::BigInt(n) * (n - 1));
    EXPECT_EQ(b[n][1], 1 + ua::BigInt(n) * (n - 1) / 2);
    for (int d = 1; d <= max_d; ++d) {
      EXPECT_LE(q[n][d], fact);
      EXPECT_GE(b[n][d], q[n][d]);
      if (d > 1) {
        EXPECT_GE(q[n][d], q[n][d - 1]);
        EXPECT_GE(b[n][d], b[n][d - 1]);
      }
      if (d >= n - 1) {
        EXPECT_EQ(q[n][d], fact);
        EXPECT_EQ(b[n][d], fact);
      } else {
        EXPECT_LT(q[n][d], b[n][d]);
      }
    }
  }
}

TEST(RegionCount, BeyondSixtyFourBits) {
  // 25! does not fit in 64 bits; saturation must still be exact.
  EXPECT_EQ(ua::count_no_bias(25, 24), ua::factorial(25));
  EXPECT_GT(ua::factorial(25), ua::BigInt(std::numeric_limits<std::uint64_t>::max()));
}
