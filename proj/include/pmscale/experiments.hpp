#pragma once

// Desk-scale experiments on the random-environment model:
//
//   run_convergence  (per(A_n)/n!)^{1/n} against sm(F) over seeds and sizes
//   run_monte_carlo  sample mean of pm(G) against per(A_n) for one environment
//   er_baseline      per of a constant-p matrix against n! p^n
//
// Work fans out over a fixed number of threads; results land in slots
// indexed by task, so output never depends on scheduling.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include "pmscale/core.hpp"
#include "pmscale/environment.hpp"
#include "pmscale/permanent.hpp"
#include "pmscale/random.hpp"
#include "pmscale/scaling.hpp"
#include "pmscale/table.hpp"

namespace pmscale {

struct ConvergenceRecord {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  double log_per = 0.0;
  double root = 0.0;
  double entropy = 0.0;
  double sm = 0.0;
  double abs_error = 0.0;
};

struct MonteCarloRecord {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t trials = 0;
  double sample_mean = 0.0;
  double sample_std = 0.0;
  double exact_mean = 0.0;
  double z_score = 0.0;
};

struct BaselineRecord {
  double p = 0.0;
  std::size_t n = 0;
  double exact = 0.0;
  double computed = 0.0;
  double rel_error = 0.0;
};

inline constexpr std::size_t kMonteCarloMaxN = 12;

inline std::size_t default_thread_count() {
  if (const char* env = std::getenv("PM_SCALER_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, count) on up to `threads` workers. The first
/// exception thrown by any task is rethrown after all workers join.
template <class Body>
void parallel_for(std::size_t count, std::size_t threads, Body&& body) {
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

/// Records come out ordered by seed position, then by n position.
inline std::vector<ConvergenceRecord> run_convergence(const ModelConfig& model,
                                                      std::span<const std::size_t> n_list,
                                                      std::span<const std::uint64_t> seeds,
                                                      std::size_t threads = default_thread_count()) {
  for (std::size_t n : n_list) {
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "n must be at least 1");
    if (n > kRyserMaxN) {
      throw Error(ErrorCode::TooLarge, "n = " + std::to_string(n) + " exceeds limit " +
                                           std::to_string(kRyserMaxN));
    }
  }
  const double sm = solve_scaling_fixed_point(model.F(), model.p(), model.q()).sm;

  std::vector<ConvergenceRecord> records(seeds.size() * n_list.size());
  parallel_for(records.size(), threads, [&](std::size_t task) {
    const std::uint64_t seed = seeds[task / n_list.size()];
    const std::size_t n = n_list[task % n_list.size()];
    const EnvironmentPrefix env = sample_environment(model, n, seed);
    const PermanentResult per = permanent_ryser(build_probability_matrix(model, env));
    const auto nd = static_cast<double>(n);

    ConvergenceRecord& rec = records[task];
    rec.seed = seed;
    rec.n = n;
    rec.log_per = per.log_value;
    rec.root = std::exp((per.log_value - log_factorial(n)) / nd);
    rec.entropy = per.log_value / nd - std::log(nd);
    rec.sm = sm;
    rec.abs_error = std::abs(rec.root - sm);
  });
  return records;
}

/// Draws one environment from `seed`, then `trials` graphs; trial t uses
/// graph seed mix(mix(seed, 3), t).
inline MonteCarloRecord run_monte_carlo(const ModelConfig& model, std::size_t n,
                                        std::size_t trials, std::uint64_t seed,
                                        std::size_t threads = default_thread_count()) {
  if (trials == 0) throw Error(ErrorCode::InvalidArgument, "trials must be at least 1");
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "n must be at least 1");
  if (n > kMonteCarloMaxN) {
    throw Error(ErrorCode::TooLarge, "Monte Carlo limited to n <= " +
                                         std::to_string(kMonteCarloMaxN));
  }
  const ProbabilityMatrix a = build_probability_matrix(model, sample_environment(model, n, seed));
  const std::uint64_t trial_root = mix(seed, kGraphStream);

  std::vector<double> counts(trials);
  constexpr std::size_t kChunk = 1024;
  const std::size_t chunks = (trials + kChunk - 1) / kChunk;
  parallel_for(chunks, threads, [&](std::size_t c) {
    const std::size_t end = std::min(trials, (c + 1) * kChunk);
    for (std::size_t t = c * kChunk; t < end; ++t) {
      const GraphSample g = sample_graph(a, mix(trial_root, t));
      counts[t] = static_cast<double>(count_integer_permanent(g.adjacency));
    }
  });

  MonteCarloRecord rec;
  rec.seed = seed;
  rec.n = n;
  rec.trials = trials;
  double mean = 0.0;
  for (std::size_t t = 0; t < trials; ++t) mean += (counts[t] - mean) / static_cast<double>(t + 1);
  double ss = 0.0;
  for (double c : counts) ss += (c - mean) * (c - mean);
  rec.sample_mean = mean;
  rec.sample_std = trials > 1 ? std::sqrt(ss / static_cast<double>(trials - 1)) : 0.0;
  rec.exact_mean = permanent_ryser(a).value;

  const double diff = rec.sample_mean - rec.exact_mean;
  if (rec.sample_std > 0.0) {
    rec.z_score = diff / (rec.sample_std / std::sqrt(static_cast<double>(trials)));
  } else if (std::abs(diff) <= 1e-9 * std::max(1.0, std::abs(rec.exact_mean))) {
    rec.z_score = 0.0;
  } else {
    rec.z_score = std::copysign(std::numeric_limits<double>::infinity(), diff);
  }
  return rec;
}

inline BaselineRecord er_baseline(double p, std::size_t n) {
  if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorCode::EntryOutOfRange, "p must lie in (0,1]");
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "n must be at least 1");
  const double log_exact = log_factorial(n) + static_cast<double>(n) * std::log(p);
  const PermanentResult per = permanent_ryser(Matrix<double>(n, n, p));
  BaselineRecord rec;
  rec.p = p;
  rec.n = n;
  rec.exact = std::exp(log_exact);
  rec.computed = per.value;
  rec.rel_error = std::abs(std::expm1(per.log_value - log_exact));
  return rec;
}

// Tables ---------------------------------------------------------------------

inline Table to_table(std::span<const ConvergenceRecord> records) {
  Table t{{"seed", "n", "log_per", "root", "entropy", "sm", "abs_error"}, {}};
  for (const auto& r : records) {
    t.rows.push_back({r.seed, std::uint64_t{r.n}, r.log_per, r.root, r.entropy, r.sm, r.abs_error});
  }
  return t;
}

inline Table to_table(const MonteCarloRecord& r) {
  return {{"seed", "n", "trials", "sample_mean", "sample_std", "exact_mean", "z_score"},
          {{r.seed, std::uint64_t{r.n}, std::uint64_t{r.trials}, r.sample_mean, r.sample_std,
            r.exact_mean, r.z_score}}};
}

inline Table to_table(const BaselineRecord& r) {
  return {{"p", "n", "exact", "computed", "rel_error"},
          {{r.p, std::uint64_t{r.n}, r.exact, r.computed, r.rel_error}}};
}

inline Table to_table(const ScalingSolution& s) {
  return {{"sm", "iterations", "residual", "contraction_bound"},
          {{s.sm, std::uint64_t{s.iterations}, s.residual, s.contraction_bound}}};
}

}  // namespace pmscale
