#pragma once

// Random environments and the graphs they generate.
//
// An environment prefix is n i.i.d. row symbols w_i ~ p and n i.i.d. column
// symbols m_j ~ q. Row symbols come from Stream(mix(seed, 1)) and column
// symbols from Stream(mix(seed, 2)), one uniform draw each, so a longer prefix
// with the same seed extends a shorter one. The edge (i, j) is then present
// with probability F[w_i][m_j], independently; sample_graph draws those
// indicators row-major from Stream(mix(seed, 3)).
//
// Symbols are stored 0-based.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "pmscale/core.hpp"
#include "pmscale/error.hpp"
#include "pmscale/matrix.hpp"
#include "pmscale/random.hpp"

namespace pmscale {

inline constexpr std::uint64_t kRowStream = 1;
inline constexpr std::uint64_t kColumnStream = 2;
inline constexpr std::uint64_t kGraphStream = 3;

struct EnvironmentPrefix {
  std::vector<std::size_t> w;  // row symbols in [0, alpha)
  std::vector<std::size_t> m;  // column symbols in [0, beta)
  std::uint64_t seed = 0;
  std::size_t n = 0;

  friend bool operator==(const EnvironmentPrefix&, const EnvironmentPrefix&) = default;
};

/// A_n(omega) with entry (i, j) = F[w_i][m_j].
using ProbabilityMatrix = Matrix<double>;

struct GraphSample {
  Matrix<std::uint8_t> adjacency;
  std::uint64_t seed = 0;
};

/// Index of the symbol selected by `u` under cumulative-weight inversion.
inline std::size_t draw_symbol(const StochasticVector& weights, double u) {
  double cumulative = 0.0;
  for (std::size_t r = 0; r + 1 < weights.size(); ++r) {
    cumulative += weights[r];
    if (u < cumulative) return r;
  }
  return weights.size() - 1;
}

inline EnvironmentPrefix sample_environment(const ModelConfig& model, std::size_t n,
                                            std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "environment length must be at least 1");
  EnvironmentPrefix env;
  env.seed = seed;
  env.n = n;
  env.w.resize(n);
  env.m.resize(n);
  Stream rows(mix(seed, kRowStream));
  Stream cols(mix(seed, kColumnStream));
  for (std::size_t i = 0; i < n; ++i) env.w[i] = draw_symbol(model.p(), rows.uniform());
  for (std::size_t j = 0; j < n; ++j) env.m[j] = draw_symbol(model.q(), cols.uniform());
  return env;
}

inline ProbabilityMatrix build_probability_matrix(const ModelConfig& model,
                                                  const EnvironmentPrefix& env) {
  if (env.w.size() != env.n || env.m.size() != env.n) {
    throw Error(ErrorCode::DimensionMismatch, "environment prefix length mismatch");
  }
  for (std::size_t s : env.w) {
    if (s >= model.alpha()) throw Error(ErrorCode::SymbolOutOfRange, "row symbol out of range");
  }
  for (std::size_t s : env.m) {
    if (s >= model.beta()) throw Error(ErrorCode::SymbolOutOfRange, "column symbol out of range");
  }
  ProbabilityMatrix a(env.n, env.n);
  for (std::size_t i = 0; i < env.n; ++i) {
    for (std::size_t j = 0; j < env.n; ++j) a(i, j) = model.F()(env.w[i], env.m[j]);
  }
  return a;
}

/// Independent Bernoulli(a_ij) edges; edge present iff u_ij < a_ij.
inline GraphSample sample_graph(const ProbabilityMatrix& a, std::uint64_t seed) {
  GraphSample g{Matrix<std::uint8_t>(a.rows(), a.cols(), 0), seed};
  Stream stream(mix(seed, kGraphStream));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      g.adjacency(i, j) = stream.uniform() < a(i, j) ? 1 : 0;
    }
  }
  return g;
}

/// log P(G = K_{n,n}) = sum_ij log a_ij.
inline double complete_graph_log_probability(const ProbabilityMatrix& a) {
  double acc = 0.0;
  for (double v : a.data()) {
    if (!(v > 0.0)) throw Error(ErrorCode::NonPositiveEntry, "probabilities must be positive");
    acc += std::log(v);
  }
  return acc;
}

}  // namespace pmscale
