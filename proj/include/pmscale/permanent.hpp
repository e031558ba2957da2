#pragma once

// Exact permanents.
//
// permanent_ryser evaluates Ryser's inclusion-exclusion formula in the
// centered form of Nijenhuis and Wilf:
//
//   per(A) = (-1)^{n-1} 2 sum_{S subset [n-1]} (-1)^{|S|} prod_i (c_i + sum_{j in S} a_ij),
//   c_i = a_{i,n} - (1/2) sum_j a_ij,
//
// walking the subsets in Gray-code order so each step updates the n row sums
// with a single column (O(2^{n-1} n) total). Row sums, products and the
// running total are kept in long double, and the signed terms are summed
// with Kahan compensation.
//
// Error model: the alternating sum loses about log10(max|term| / per) digits
// to cancellation. Centering shrinks the largest term from ~(row sum)^n to
// ~(row sum / 2)^n; for entries in (0,1] and n <= 28 the relative error stays
// below ~1e-5 at the ceiling and near 1e-12 for n <= 20. Asymptotic callers
// should read `log_value`; `value` overflows for large matrices.
//
// count_integer_permanent runs plain Ryser over 0/1 rows stored as bitmasks,
// accumulating in unsigned 128-bit arithmetic. Intermediate sums may wrap,
// but arithmetic mod 2^128 is a ring homomorphism and the final permanent
// (at most 24!) is representable, so the result is exact.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "pmscale/error.hpp"
#include "pmscale/matrix.hpp"

namespace pmscale {

enum class PermanentMethod { naive, ryser_float, ryser_integer };

struct PermanentResult {
  double log_value = 0.0;
  double value = 0.0;
  PermanentMethod method = PermanentMethod::naive;
};

inline constexpr std::size_t kNaiveMaxN = 10;
inline constexpr std::size_t kRyserMaxN = 28;
inline constexpr std::size_t kIntegerMaxN = 24;

using PermanentCount = unsigned __int128;

inline std::string to_string(PermanentCount v) {
  if (v == 0) return "0";
  std::string s;
  while (v != 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

namespace detail {

template <class T>
void check_square(const Matrix<T>& a, std::size_t max_n) {
  if (!a.is_square()) throw Error(ErrorCode::NotSquare, "permanent requires a square matrix");
  if (a.rows() > max_n) {
    throw Error(ErrorCode::TooLarge,
                "n = " + std::to_string(a.rows()) + " exceeds limit " + std::to_string(max_n));
  }
}

inline void check_nonnegative(const Matrix<double>& a) {
  for (double v : a.data()) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::NonPositiveEntry, "permanent requires nonnegative finite entries");
    }
  }
}

inline PermanentResult make_result(long double sum, PermanentMethod method) {
  PermanentResult r;
  r.method = method;
  r.value = static_cast<double>(sum);
  r.log_value = sum > 0.0L ? static_cast<double>(std::log(sum))
                           : -std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace detail

/// Direct sum over all n! permutations.
inline PermanentResult permanent_naive(const Matrix<double>& a) {
  detail::check_square(a, kNaiveMaxN);
  detail::check_nonnegative(a);
  const std::size_t n = a.rows();
  std::vector<std::size_t> sigma(n);
  std::iota(sigma.begin(), sigma.end(), std::size_t{0});
  long double total = 0.0L;
  do {
    long double prod = 1.0L;
    for (std::size_t i = 0; i < n; ++i) prod *= a(i, sigma[i]);
    total += prod;
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return detail::make_result(total, PermanentMethod::naive);
}

inline PermanentResult permanent_ryser(const Matrix<double>& a) {
  detail::check_square(a, kRyserMaxN);
  detail::check_nonnegative(a);
  const std::size_t n = a.rows();
  if (n == 0) return detail::make_result(1.0L, PermanentMethod::ryser_float);

  std::vector<long double> rowsum(n);
  for (std::size_t i = 0; i < n; ++i) {
    long double total = 0.0L;
    for (std::size_t j = 0; j < n; ++j) total += a(i, j);
    rowsum[i] = a(i, n - 1) - total / 2.0L;
  }

  auto product = [&] {
    long double prod = 1.0L;
    for (long double v : rowsum) prod *= v;
    return prod;
  };

  // Kahan-compensated running total of (-1)^{|S|} prod_i rowsum_i.
  long double sum = product();
  long double comp = 0.0L;
  const std::uint64_t subsets = std::uint64_t{1} << (n - 1);
  std::uint64_t gray = 0;
  for (std::uint64_t k = 1; k < subsets; ++k) {
    const auto j = static_cast<std::size_t>(std::countr_zero(k));
    const std::uint64_t bit = std::uint64_t{1} << j;
    gray ^= bit;
    if (gray & bit) {
      for (std::size_t i = 0; i < n; ++i) rowsum[i] += a(i, j);
    } else {
      for (std::size_t i = 0; i < n; ++i) rowsum[i] -= a(i, j);
    }
    long double term = product();
    if (std::popcount(gray) & 1) term = -term;
    const long double y = term - comp;
    const long double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  if ((n - 1) & 1) sum = -sum;
  return detail::make_result(2.0L * sum, PermanentMethod::ryser_float);
}

/// Number of perfect matchings of the bipartite graph with 0/1 adjacency `a`.
inline PermanentCount count_integer_permanent(const Matrix<std::uint8_t>& a) {
  detail::check_square(a, kIntegerMaxN);
  for (auto v : a.data()) {
    if (v > 1) throw Error(ErrorCode::NotZeroOne, "adjacency entries must be 0 or 1");
  }
  const std::size_t n = a.rows();
  if (n == 0) return 1;

  // Row i as a bitmask over columns.
  std::vector<std::uint32_t> rows(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (a(i, j)) rows[i] |= std::uint32_t{1} << j;
    }
  }
  for (std::uint32_t r : rows) {
    if (r == 0) return 0;
  }

  // Columns as bitmasks over rows, for the incremental row-sum update.
  std::vector<std::uint32_t> cols(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (a(i, j)) cols[j] |= std::uint32_t{1} << i;
    }
  }

  std::vector<std::uint32_t> rowsum(n, 0);
  std::size_t zero_rows = n;
  PermanentCount sum = 0;  // mod 2^128
  const std::uint64_t subsets = std::uint64_t{1} << n;
  std::uint64_t gray = 0;
  for (std::uint64_t k = 1; k < subsets; ++k) {
    const auto j = static_cast<std::size_t>(std::countr_zero(k));
    const std::uint64_t bit = std::uint64_t{1} << j;
    gray ^= bit;
    const bool added = (gray & bit) != 0;
    for (std::uint32_t m = cols[j]; m != 0; m &= m - 1) {
      const auto i = static_cast<std::size_t>(std::countr_zero(m));
      if (added) {
        if (rowsum[i]++ == 0) --zero_rows;
      } else {
        if (--rowsum[i] == 0) ++zero_rows;
      }
    }
    if (zero_rows != 0) continue;
    PermanentCount prod = 1;
    for (std::uint32_t v : rowsum) prod *= v;
    // sign (-1)^{n - |S|}
    if ((n - static_cast<std::size_t>(std::popcount(gray))) & 1) sum -= prod;
    else sum += prod;
  }
  return sum;
}

/// ln(n!) as a running sum of logarithms.
inline double log_factorial(std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 2; k <= n; ++k) acc += std::log(static_cast<double>(k));
  return acc;
}

namespace detail {

inline void check_unit_interval(const Matrix<double>& a) {
  if (a.rows() == 0) throw Error(ErrorCode::EmptyInput, "matrix must be at least 1x1");
  for (double v : a.data()) {
    if (!(v > 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::EntryOutOfRange, "entries must lie in (0,1]");
    }
  }
}

}  // namespace detail

/// (per(A) / n!)^{1/n}, evaluated in log space.
inline double normalized_pm_root(const Matrix<double>& a) {
  detail::check_unit_interval(a);
  const PermanentResult per = permanent_ryser(a);
  const auto n = static_cast<double>(a.rows());
  return std::exp((per.log_value - log_factorial(a.rows())) / n);
}

/// (1/n) log per(A) - log n.
inline double matching_entropy(const Matrix<double>& a) {
  detail::check_unit_interval(a);
  const PermanentResult per = permanent_ryser(a);
  const auto n = static_cast<double>(a.rows());
  return per.log_value / n - std::log(n);
}

}  // namespace pmscale
