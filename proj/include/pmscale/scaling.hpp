#pragma once

// Scaling mean of a positive matrix F with respect to stochastic vectors p, q:
//
//   sm(F) = inf_{x,y > 0} prod x_r^{-p_r} prod y_s^{-q_s} sum_{r,s} x_r f_rs y_s p_r q_s
//
// computed from the fixed point of T = K1 . I2 . K2 . I1 acting on the
// positive cone of R^alpha, where I1, I2 invert componentwise and
//
//   (K2 x)_s = sum_r f_rs x_r p_r,   (K1 y)_r = sum_s f_rs y_s q_s.
//
// T is homogeneous of degree one and contracts the Hilbert projective metric
// by kappa = tanh^2(delta / 4), delta = 2 log(max f / min f). At the fixed
// point x, with y = K2(I1 x), sm = prod x_r^{p_r} prod y_s^{q_s}.
//
// Closed forms for 2x2 (uniform weights) and alpha x 2 matrices, plus a grid
// minimization of the variational objective, serve as independent checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "pmscale/core.hpp"
#include "pmscale/error.hpp"

namespace pmscale {

struct ScalingVectorPair {
  std::vector<double> x;  // length alpha
  std::vector<double> y;  // length beta
};

struct ScalingSolution {
  double sm = 0.0;
  ScalingVectorPair pair;
  std::size_t iterations = 0;
  double residual = 0.0;
  double contraction_bound = 0.0;
  bool converged = false;
};

struct SolverOptions {
  double tol = 1e-13;
  std::size_t max_iter = 10'000;
  std::optional<std::vector<double>> x0;  // defaults to all-ones
};

namespace detail {

inline void require_positive(std::span<const double> v, const char* name) {
  for (double e : v) {
    if (!(e > 0.0) || !std::isfinite(e)) {
      throw Error(ErrorCode::NonPositiveEntry, std::string(name) + " must be strictly positive");
    }
  }
}

inline void check_weights(const PositiveMatrix& F, const StochasticVector& p,
                          const StochasticVector& q) {
  if (F.rows() != p.size() || F.cols() != q.size()) {
    throw Error(ErrorCode::DimensionMismatch, "F must be |p| x |q|");
  }
}

// (K2 I1 x)_s = sum_r f_rs p_r / x_r
inline std::vector<double> k2_of_reciprocal(const PositiveMatrix& F, const StochasticVector& p,
                                            std::span<const double> x) {
  std::vector<double> y(F.cols(), 0.0);
  for (std::size_t r = 0; r < F.rows(); ++r) {
    const double w = p[r] / x[r];
    for (std::size_t s = 0; s < F.cols(); ++s) y[s] += F(r, s) * w;
  }
  return y;
}

// (K1 I2 y)_r = sum_s f_rs q_s / y_s
inline std::vector<double> k1_of_reciprocal(const PositiveMatrix& F, const StochasticVector& q,
                                            std::span<const double> y) {
  std::vector<double> x(F.rows(), 0.0);
  for (std::size_t r = 0; r < F.rows(); ++r) {
    double acc = 0.0;
    for (std::size_t s = 0; s < F.cols(); ++s) acc += F(r, s) * q[s] / y[s];
    x[r] = acc;
  }
  return x;
}

inline double log_weighted_product(std::span<const double> v, const StochasticVector& w) {
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) acc += w[i] * std::log(v[i]);
  return acc;
}

}  // namespace detail

/// Hilbert projective pseudo-metric log(max_i x_i/z_i / min_i x_i/z_i).
inline double hilbert_distance(std::span<const double> x, std::span<const double> z) {
  if (x.size() != z.size()) throw Error(ErrorCode::LengthMismatch, "vectors differ in length");
  if (x.empty()) throw Error(ErrorCode::LengthMismatch, "vectors must be non-empty");
  detail::require_positive(x, "x");
  detail::require_positive(z, "z");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double ratio = std::log(x[i]) - std::log(z[i]);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  return hi - lo;
}

/// delta = 2 log(max f / min f), the certified bound on the projective
/// diameter used for the contraction factor.
inline double projective_diameter_bound(const PositiveMatrix& F) {
  return 2.0 * std::log(F.max_entry() / F.min_entry());
}

/// kappa = tanh^2(delta / 4).
inline double contraction_bound(const PositiveMatrix& F) {
  const double t = std::tanh(projective_diameter_bound(F) / 4.0);
  return t * t;
}

inline std::vector<double> apply_T(const PositiveMatrix& F, const StochasticVector& p,
                                   const StochasticVector& q, std::span<const double> x) {
  detail::check_weights(F, p, q);
  if (x.size() != F.rows()) throw Error(ErrorCode::DimensionMismatch, "x must have length alpha");
  detail::require_positive(x, "x");
  return detail::k1_of_reciprocal(F, q, detail::k2_of_reciprocal(F, p, x));
}

/// The normalized bilinear form whose infimum over positive (x, y) is sm.
inline double variational_objective(const PositiveMatrix& F, const StochasticVector& p,
                                    const StochasticVector& q, const ScalingVectorPair& pair) {
  detail::check_weights(F, p, q);
  if (pair.x.size() != F.rows() || pair.y.size() != F.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "scaling vectors do not match F");
  }
  detail::require_positive(pair.x, "x");
  detail::require_positive(pair.y, "y");
  double bilinear = 0.0;
  for (std::size_t r = 0; r < F.rows(); ++r) {
    double row = 0.0;
    for (std::size_t s = 0; s < F.cols(); ++s) row += F(r, s) * pair.y[s] * q[s];
    bilinear += pair.x[r] * p[r] * row;
  }
  const double log_norm =
      detail::log_weighted_product(pair.x, p) + detail::log_weighted_product(pair.y, q);
  return std::exp(std::log(bilinear) - log_norm);
}

/// Iterates x <- T(x) / T(x)_0 until the Hilbert distance between
/// successive iterates drops to `tol`. A run that hits `max_iter` returns the
/// last iterate with `converged == false`.
inline ScalingSolution solve_scaling_fixed_point(const PositiveMatrix& F,
                                                 const StochasticVector& p,
                                                 const StochasticVector& q,
                                                 const SolverOptions& options = {}) {
  detail::check_weights(F, p, q);
  if (!(options.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");

  ScalingSolution sol;
  sol.contraction_bound = contraction_bound(F);

  if (F.rows() == 1 && F.cols() == 1) {
    sol.sm = F(0, 0);
    sol.pair = {{1.0}, {F(0, 0)}};
    sol.converged = true;
    return sol;
  }

  std::vector<double> x = options.x0.value_or(std::vector<double>(F.rows(), 1.0));
  if (x.size() != F.rows()) throw Error(ErrorCode::DimensionMismatch, "x0 must have length alpha");
  detail::require_positive(x, "x0");

  for (std::size_t it = 0;; ++it) {
    std::vector<double> next = detail::k1_of_reciprocal(F, q, detail::k2_of_reciprocal(F, p, x));
    sol.residual = hilbert_distance(next, x);
    const double scale = next.front();
    for (double& v : next) v /= scale;
    x = std::move(next);
    sol.iterations = it;
    if (sol.residual <= options.tol) {
      sol.converged = true;
      break;
    }
    if (it + 1 >= options.max_iter) break;
  }

  std::vector<double> y = detail::k2_of_reciprocal(F, p, x);
  sol.sm = std::exp(detail::log_weighted_product(x, p) + detail::log_weighted_product(y, q));
  sol.pair = {std::move(x), std::move(y)};
  return sol;
}

/// (sqrt(f11 f22) + sqrt(f12 f21)) / 2, valid for p = q = (1/2, 1/2).
inline double closed_form_2x2(const PositiveMatrix& F) {
  if (F.rows() != 2 || F.cols() != 2) throw Error(ErrorCode::WrongShape, "F must be 2x2");
  return (std::sqrt(F(0, 0) * F(1, 1)) + std::sqrt(F(0, 1) * F(1, 0))) / 2.0;
}

/// Root chi > 0 of sum_r p_r f_r1 / (f_r1 + f_r2 chi) = q_1, by bisection in
/// log(chi) on [2^-60, 2^60].
inline double alpha_2_root(const PositiveMatrix& F, const StochasticVector& p,
                           const StochasticVector& q) {
  auto excess = [&](double chi) {
    double acc = 0.0;
    for (std::size_t r = 0; r < F.rows(); ++r) acc += p[r] * F(r, 0) / (F(r, 0) + F(r, 1) * chi);
    return acc - q[0];
  };
  double lo = std::ldexp(1.0, -60);
  double hi = std::ldexp(1.0, 60);
  if (!(excess(lo) > 0.0) || !(excess(hi) < 0.0)) {
    throw Error(ErrorCode::RootBracketFailure, "root of the alpha x 2 equation not bracketed");
  }
  while ((hi - lo) > 1e-14 * hi) {
    const double mid = std::sqrt(lo) * std::sqrt(hi);
    if (mid <= lo || mid >= hi) break;
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  return std::sqrt(lo) * std::sqrt(hi);
}

/// q1^q1 (q2/chi)^q2 prod_r (f_r1 + f_r2 chi)^p_r for an alpha x 2 matrix.
inline double closed_form_alpha_2(const PositiveMatrix& F, const StochasticVector& p,
                                  const StochasticVector& q) {
  if (F.cols() != 2) throw Error(ErrorCode::WrongShape, "F must have exactly two columns");
  detail::check_weights(F, p, q);
  const double chi = alpha_2_root(F, p, q);
  double log_sm = q[0] * std::log(q[0]) + q[1] * (std::log(q[1]) - std::log(chi));
  for (std::size_t r = 0; r < F.rows(); ++r) log_sm += p[r] * std::log(F(r, 0) + F(r, 1) * chi);
  return std::exp(log_sm);
}

inline constexpr std::size_t kGridOracleMaxDimension = 6;  // alpha + beta

/// Brute-force minimum of the variational objective over a logarithmic
/// grid. x_0 = y_0 = 1 is pinned; each remaining log-coordinate takes
/// `resolution` evenly spaced values on [-delta, delta].
inline double grid_oracle_sm(const PositiveMatrix& F, const StochasticVector& p,
                             const StochasticVector& q, std::size_t resolution) {
  detail::check_weights(F, p, q);
  if (F.rows() + F.cols() > kGridOracleMaxDimension) {
    throw Error(ErrorCode::DimensionTooLarge, "grid oracle limited to alpha + beta <= 6");
  }
  if (resolution < 16) throw Error(ErrorCode::InvalidArgument, "resolution must be at least 16");

  const double delta = projective_diameter_bound(F);
  std::vector<double> axis(resolution);
  for (std::size_t k = 0; k < resolution; ++k) {
    axis[k] = -delta + 2.0 * delta * static_cast<double>(k) / static_cast<double>(resolution - 1);
  }

  const std::size_t free_dims = F.rows() + F.cols() - 2;
  std::vector<std::size_t> idx(free_dims, 0);
  ScalingVectorPair pair{std::vector<double>(F.rows(), 1.0), std::vector<double>(F.cols(), 1.0)};
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    for (std::size_t d = 0; d < free_dims; ++d) {
      const double v = std::exp(axis[idx[d]]);
      if (d + 1 < F.rows()) pair.x[d + 1] = v;
      else pair.y[d + 2 - F.rows()] = v;
    }
    best = std::min(best, variational_objective(F, p, q, pair));

    std::size_t d = 0;
    while (d < free_dims && ++idx[d] == resolution) idx[d++] = 0;
    if (d == free_dims) break;
  }
  return best;
}

}  // namespace pmscale
