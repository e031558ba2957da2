#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "pmscale/permanent.hpp"

using namespace pmscale;

namespace {

Matrix<double> random_matrix(std::mt19937_64& rng, std::size_t n, double lo = 1e-3,
                             double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix<double> m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = u(rng);
  return m;
}

Matrix<std::uint8_t> random_01(std::mt19937_64& rng, std::size_t n, double density) {
  std::bernoulli_distribution b(density);
  Matrix<std::uint8_t> m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = b(rng) ? 1 : 0;
  return m;
}

void expect_rel(double actual, double expected, double tol) {
  EXPECT_NEAR(actual, expected, tol * std::abs(expected)) << "expected " << expected;
}

}  // namespace

TEST(PermanentNaive, Examples) {
  EXPECT_EQ(permanent_naive(Matrix<double>{{1, 0}, {0, 1}}).value, 1.0);
  EXPECT_EQ(permanent_naive(Matrix<double>{{1, 1}, {1, 1}}).value, 2.0);
  EXPECT_EQ(permanent_naive(Matrix<double>{{0.5, 0.5}, {0.5, 0.5}}).value, 0.5);
}

TEST(PermanentNaive, Errors) {
  try {
    permanent_naive(Matrix<double>(11, 11, 1.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooLarge);
  }
  try {
    permanent_naive(Matrix<double>(2, 3, 1.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotSquare);
  }
}

TEST(PermanentRyser, Examples) {
  EXPECT_NEAR(permanent_ryser(Matrix<double>{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}).value, 1.0, 1e-15);
  const auto constant = permanent_ryser(Matrix<double>(10, 10, 0.3));
  expect_rel(constant.value, 21.42770112, 1e-12);
  EXPECT_EQ(constant.method, PermanentMethod::ryser_float);
  EXPECT_NEAR(permanent_ryser(Matrix<double>{{0.8, 0.2}, {0.2, 0.8}}).value, 0.68, 1e-15);
}

TEST(PermanentRyser, MatchesNaive) {
  std::mt19937_64 rng(101);
  for (std::size_t n = 1; n <= 8; ++n) {
    for (int t = 0; t < 100; ++t) {
      auto a = random_matrix(rng, n);
      expect_rel(permanent_ryser(a).value, permanent_naive(a).value, 1e-10);
    }
  }
}

TEST(PermanentRyser, Limits) {
  try {
    permanent_ryser(Matrix<double>(29, 29, 0.5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooLarge);
  }
}

TEST(PermanentRyser, LogValueMatchesValue) {
  std::mt19937_64 rng(102);
  auto a = random_matrix(rng, 7);
  const auto r = permanent_ryser(a);
  EXPECT_NEAR(r.log_value, std::log(r.value), 1e-13);
}

TEST(PermanentProperties, InvariantUnderRowAndColumnPermutations) {
  std::mt19937_64 rng(103);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + t % 7;
    auto a = random_matrix(rng, n);
    std::vector<std::size_t> rp(n), cp(n);
    std::iota(rp.begin(), rp.end(), std::size_t{0});
    std::iota(cp.begin(), cp.end(), std::size_t{0});
    std::shuffle(rp.begin(), rp.end(), rng);
    std::shuffle(cp.begin(), cp.end(), rng);
    Matrix<double> b(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) b(i, j) = a(rp[i], cp[j]);
    expect_rel(permanent_ryser(b).value, permanent_ryser(a).value, 1e-12);
  }
}

TEST(PermanentProperties, MonotoneInEntries) {
  std::mt19937_64 rng(104);
  std::uniform_real_distribution<double> bump(0.0, 0.5);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + t % 6;
    auto a = random_matrix(rng, n);
    const double before = permanent_ryser(a).value;
    a(rng() % n, rng() % n) += bump(rng);
    EXPECT_GE(permanent_ryser(a).value, before * (1 - 1e-12));
  }
}

TEST(PermanentProperties, RowScaling) {
  std::mt19937_64 rng(105);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + t % 8;
    auto a = random_matrix(rng, n);
    const double before = permanent_ryser(a).value;
    const std::size_t row = rng() % n;
    for (std::size_t j = 0; j < n; ++j) a(row, j) *= 3.25;
    expect_rel(permanent_ryser(a).value, 3.25 * before, 1e-12);
  }
}

TEST(IntegerPermanent, Examples) {
  EXPECT_EQ(count_integer_permanent(Matrix<std::uint8_t>(4, 4, 1)), PermanentCount{24});
  EXPECT_EQ(count_integer_permanent(Matrix<std::uint8_t>(5, 5, 0)), PermanentCount{0});
  EXPECT_EQ(count_integer_permanent(Matrix<std::uint8_t>{{1, 0}, {0, 1}}), PermanentCount{1});
}

TEST(IntegerPermanent, AllOnesIsFactorial) {
  PermanentCount factorial = 1;
  for (std::size_t n = 1; n <= 20; ++n) {
    factorial *= n;
    EXPECT_EQ(to_string(count_integer_permanent(Matrix<std::uint8_t>(n, n, 1))),
              to_string(factorial))
        << "n = " << n;
  }
}

TEST(IntegerPermanent, MatchesFloatRyser) {
  std::mt19937_64 rng(106);
  for (std::size_t n = 1; n <= 12; ++n) {
    for (int t = 0; t < 20; ++t) {
      auto a = random_01(rng, n, 0.3 + 0.05 * (t % 10));
      Matrix<double> d(n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d(i, j) = a(i, j);
      EXPECT_EQ(static_cast<double>(count_integer_permanent(a)),
                std::round(permanent_ryser(d).value));
    }
  }
}

TEST(IntegerPermanent, Errors) {
  try {
    count_integer_permanent(Matrix<std::uint8_t>{{1, 2}, {0, 1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotZeroOne);
  }
  try {
    count_integer_permanent(Matrix<std::uint8_t>(25, 25, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooLarge);
  }
}

TEST(PermanentCountFormatting, ToString) {
  EXPECT_EQ(to_string(PermanentCount{0}), "0");
  PermanentCount big = 1;
  for (int k = 1; k <= 24; ++k) big *= static_cast<unsigned>(k);
  EXPECT_EQ(to_string(big), "620448401733239439360000");
}

TEST(LogFactorial, Examples) {
  EXPECT_EQ(log_factorial(0), 0.0);
  EXPECT_EQ(log_factorial(1), 0.0);
  EXPECT_NEAR(log_factorial(10), 15.104412573075515, 1e-13);
  EXPECT_NEAR(log_factorial(170), std::lgamma(171.0), 1e-10);
}

TEST(NormalizedRoot, Examples) {
  for (std::size_t n : {1u, 5u, 12u, 20u}) {
    EXPECT_NEAR(normalized_pm_root(Matrix<double>(n, n, 0.37)), 0.37, 1e-12 * 0.37) << n;
  }
  EXPECT_NEAR(normalized_pm_root(Matrix<double>{{0.3}}), 0.3, 1e-15);
  EXPECT_NEAR(normalized_pm_root(Matrix<double>{{0.8, 0.2}, {0.2, 0.8}}), 0.58309518948453005,
              1e-15);
}

TEST(NormalizedRoot, ConstantAtCeiling) {
  EXPECT_NEAR(normalized_pm_root(Matrix<double>(28, 28, 0.6)), 0.6, 1e-12 * 0.6);
}

TEST(NormalizedRoot, RejectsOutOfRange) {
  EXPECT_THROW(normalized_pm_root(Matrix<double>{{1.5}}), Error);
  EXPECT_THROW(normalized_pm_root(Matrix<double>{{0.0}}), Error);
}

TEST(MatchingEntropy, Examples) {
  EXPECT_NEAR(matching_entropy(Matrix<double>(10, 10, 0.3)), -1.9961166400124301, 1e-13);
  EXPECT_NEAR(matching_entropy(Matrix<double>{{0.4}}), std::log(0.4), 1e-15);
}

TEST(MatchingEntropy, IdentityWithRoot) {
  std::mt19937_64 rng(107);
  for (std::size_t n = 1; n <= 12; ++n) {
    auto a = random_matrix(rng, n, 0.05, 1.0);
    const double nd = static_cast<double>(n);
    const double residual = matching_entropy(a) - std::log(normalized_pm_root(a)) -
                            log_factorial(n) / nd + std::log(nd);
    EXPECT_NEAR(residual, 0.0, 1e-12);
  }
}
