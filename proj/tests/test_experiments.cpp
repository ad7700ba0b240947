#include <gtest/gtest.h>

#include "unargmax/experiments.hpp"

namespace ua = unargmax;

TEST(SymmetricUniform, DeterministicAndInRange) {
  ua::SymmetricUniform a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double x = a();
    ASSERT_EQ(x, b());
    ASSERT_GT(x, -1.0);
    ASSERT_LT(x, 1.0);
    if (x != c()) differs = true;
  }
  EXPECT_TRUE(differs);
}

TEST(SymmetricUniform, FirstDrawIsPinned) {
  // std::mt19937_64 seeded with 5489 yields 14514284786278117030 first.
  ua::SymmetricUniform u(5489);
  const double expected = 2.0 * (static_cast<double>(14514284786278117030ULL >> 11) * 0x1.0p-53) - 1.0;
  EXPECT_EQ(u(), expected);
}

TEST(SymmetricUniform, MeanAndSpread) {
  ua::SymmetricUniform u(7);
  const int n = 1000000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = u();
    sum += x;
    sq += x * x;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0 / 3.0, 0.01);
}

TEST(RandomSpec, ShapesAndDraws) {
  auto spec = ua::random_spec(5, 3, true, 11);
  EXPECT_EQ(spec.classes(), 5);
  EXPECT_EQ(spec.dim(), 3);
  ASSERT_TRUE(spec.has_bias());
  ua::SymmetricUniform u(11);
  for (ua::Index i = 0; i < 5; ++i) {
    for (ua::Index j = 0; j < 3; ++j) EXPECT_EQ(spec.weights(i, j), u());
  }
  for (ua::Index i = 0; i < 5; ++i) EXPECT_EQ((*spec.bias)(i), u());
  auto nobias = ua::random_spec(5, 3, false, 11);
  EXPECT_FALSE(nobias.has_bias());
  EXPECT_EQ(nobias.weights, spec.weights);
  EXPECT_THROW(ua::random_spec(1, 3, false, 0), ua::DomainError);
}

TEST(Sweep, ReproducibleRows) {
  auto a = ua::sweep_dims(60, {2, 4}, true, {1, 2});
  auto b = ua::sweep_dims(60, {2, 4}, true, {1, 2});
  ASSERT_EQ(a.rows.size(), 4u);
  EXPECT_EQ(a.generator, std::string(ua::kGeneratorName));
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].d, b.rows[i].d);
    EXPECT_EQ(a.rows[i].seed, b.rows[i].seed);
    EXPECT_EQ(a.rows[i].unargmaxable, b.rows[i].unargmaxable);
    EXPECT_EQ(a.rows[i].potentially_unargmaxable, b.rows[i].potentially_unargmaxable);
    EXPECT_EQ(a.rows[i].mean_steps, b.rows[i].mean_steps);
    EXPECT_EQ(a.rows[i].max_steps, b.rows[i].max_steps);
    EXPECT_LE(a.rows[i].unargmaxable, a.rows[i].potentially_unargmaxable);
    EXPECT_EQ(a.rows[i].indeterminate, 0);
  }
  EXPECT_EQ(a.rows[0].d, 2);
  EXPECT_EQ(a.rows[2].d, 4);
}

TEST(Sweep, LowDimensionLeavesClassesOut) {
  auto table = ua::sweep_dims(200, {2}, false, {3});
  EXPECT_GT(table.rows[0].unargmaxable, 150);
}

TEST(Sweep, CsvLayout) {
  auto table = ua::sweep_dims(20, {2}, false, {9});
  const std::string csv = ua::experiment_to_csv(table);
  EXPECT_EQ(csv.rfind(std::string(ua::kExperimentCsvHeader) + "\n", 0), 0u);
  EXPECT_NE(csv.find("\n20,2,false,9,"), std::string::npos);
}
