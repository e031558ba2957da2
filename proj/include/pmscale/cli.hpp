#pragma once

// Command-line front end for pm-scaler.
//
// Exit codes: 0 success, 1 validation or size-limit failure, 2 usage error.
// Failures print one line on stderr prefixed E_CONFIG, E_LIMIT or E_USAGE.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pmscale/core.hpp"
#include "pmscale/experiments.hpp"
#include "pmscale/scaling.hpp"
#include "pmscale/table.hpp"

namespace pmscale {

namespace detail {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string model_path;
  std::string format = "csv";
  std::string out_path;
  std::optional<std::size_t> threads;
};

inline void add_output_options(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--format", opts.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--out", opts.out_path, "Write results to this file instead of stdout");
}

inline void add_model_option(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--model", opts.model_path, "JSON model file {alpha, beta, p, q, F}")
      ->required();
}

inline void add_threads_option(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--threads", opts.threads,
                  "Worker threads (default: $PM_SCALER_THREADS, else hardware threads)")
      ->check(CLI::PositiveNumber);
}

inline void emit(const Table& table, const CommonOptions& opts, std::ostream& out) {
  const OutputFormat format = opts.format == "json" ? OutputFormat::json : OutputFormat::csv;
  if (opts.out_path.empty()) {
    write_table(out, table, format);
    return;
  }
  std::ofstream file(opts.out_path);
  if (!file) throw Error(ErrorCode::InvalidArgument, "cannot open output file " + opts.out_path);
  write_table(file, table, format);
}

inline bool is_uniform(const StochasticVector& v) {
  return std::ranges::all_of(v.weights(), [&](double w) {
    return std::abs(w - 1.0 / static_cast<double>(v.size())) <= kNormalizationTolerance;
  });
}

}  // namespace detail

/// `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scaling means, permanents and random-environment bipartite graphs",
               "pm-scaler"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  detail::CommonOptions opts;

  // sm
  SolverOptions solver;
  auto* sm_cmd = app.add_subcommand("sm", "Scaling mean of the model's F with diagnostics");
  detail::add_model_option(sm_cmd, opts);
  sm_cmd->add_option("--tol", solver.tol, "Hilbert-metric stopping tolerance")
      ->capture_default_str();
  sm_cmd->add_option("--max-iter", solver.max_iter, "Iteration cap")->capture_default_str();
  detail::add_output_options(sm_cmd, opts);

  // converge
  std::string n_list_text = "8,16,24";
  std::vector<std::uint64_t> seed_list;
  std::optional<std::uint64_t> base_seed;
  std::size_t seed_count = 20;
  auto* conv_cmd =
      app.add_subcommand("converge", "Sweep (per(A_n)/n!)^(1/n) against sm over seeds and n");
  detail::add_model_option(conv_cmd, opts);
  conv_cmd->add_option("--n-list", n_list_text, "Comma-separated matrix sizes (each <= 28)")
      ->capture_default_str();
  auto* seeds_opt =
      conv_cmd->add_option("--seeds", seed_list, "Explicit comma-separated seed list")
          ->delimiter(',');
  auto* seed_opt = conv_cmd->add_option("--seed", base_seed,
                                        "Base seed; the sweep uses seed, seed+1, ...");
  conv_cmd->add_option("--seed-count", seed_count, "Number of seeds derived from --seed")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  seeds_opt->excludes(seed_opt);
  detail::add_threads_option(conv_cmd, opts);
  detail::add_output_options(conv_cmd, opts);

  // sample
  std::size_t mc_n = 8;
  std::size_t mc_trials = 100'000;
  std::uint64_t mc_seed = 0;
  auto* sample_cmd =
      app.add_subcommand("sample", "Monte Carlo mean of pm(G) against per(A_n) for one environment");
  detail::add_model_option(sample_cmd, opts);
  sample_cmd->add_option("--n", mc_n, "Graph size (<= 12)")->capture_default_str();
  sample_cmd->add_option("--trials", mc_trials, "Number of sampled graphs")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sample_cmd->add_option("--seed", mc_seed, "Seed for the environment and graph streams")
      ->required();
  detail::add_threads_option(sample_cmd, opts);
  detail::add_output_options(sample_cmd, opts);

  // baseline
  double er_p = 0.0;
  std::size_t er_n = 0;
  auto* base_cmd =
      app.add_subcommand("baseline", "Permanent of a constant-p matrix against n! p^n");
  base_cmd->add_option("--p", er_p, "Edge probability in (0,1]")->required();
  base_cmd->add_option("--n", er_n, "Matrix size (<= 28)")->required();
  detail::add_output_options(base_cmd, opts);

  // oracle
  std::string mode;
  std::size_t resolution = 128;
  auto* oracle_cmd =
      app.add_subcommand("oracle", "Cross-check the fixed-point solver against an oracle");
  detail::add_model_option(oracle_cmd, opts);
  oracle_cmd->add_option("--mode", mode, "Oracle: 2x2, alpha2 or grid")
      ->required()
      ->check(CLI::IsMember({"2x2", "alpha2", "grid"}));
  oracle_cmd->add_option("--resolution", resolution, "Grid points per axis (grid mode, >= 16)")
      ->capture_default_str();
  detail::add_output_options(oracle_cmd, opts);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "E_USAGE: " << e.what() << '\n';
    return 2;
  }

  try {
    if (sm_cmd->parsed()) {
      const ModelConfig model = load_model(opts.model_path);
      const ScalingSolution sol = solve_scaling_fixed_point(model.F(), model.p(), model.q(), solver);
      if (!sol.converged) {
        err << "warning: no convergence after " << solver.max_iter << " iterations\n";
      }
      detail::emit(to_table(sol), opts, out);
    } else if (conv_cmd->parsed()) {
      std::vector<std::size_t> n_list;
      for (const auto& tok : CLI::detail::split(n_list_text, ',')) {
        std::size_t n = 0;
        if (!CLI::detail::lexical_cast(CLI::detail::trim_copy(tok), n)) {
          throw detail::UsageError("--n-list: '" + tok + "' is not a count");
        }
        n_list.push_back(n);
      }
      if (n_list.empty()) throw detail::UsageError("--n-list is empty");
      std::vector<std::uint64_t> seeds = seed_list;
      if (seeds.empty()) {
        if (!base_seed) throw detail::UsageError("converge requires --seed or --seeds");
        for (std::size_t k = 0; k < seed_count; ++k) seeds.push_back(*base_seed + k);
      }
      const ModelConfig model = load_model(opts.model_path);
      const auto records = run_convergence(model, n_list, seeds,
                                           opts.threads.value_or(default_thread_count()));
      detail::emit(to_table(records), opts, out);
    } else if (sample_cmd->parsed()) {
      const ModelConfig model = load_model(opts.model_path);
      const auto rec = run_monte_carlo(model, mc_n, mc_trials, mc_seed,
                                       opts.threads.value_or(default_thread_count()));
      detail::emit(to_table(rec), opts, out);
    } else if (base_cmd->parsed()) {
      detail::emit(to_table(er_baseline(er_p, er_n)), opts, out);
    } else if (oracle_cmd->parsed()) {
      const ModelConfig model = load_model(opts.model_path);
      const double solver_sm = solve_scaling_fixed_point(model.F(), model.p(), model.q()).sm;
      double oracle_sm = 0.0;
      if (mode == "2x2") {
        if (!detail::is_uniform(model.p()) || !detail::is_uniform(model.q())) {
          throw Error(ErrorCode::WrongShape, "2x2 closed form requires p = q = (1/2, 1/2)");
        }
        oracle_sm = closed_form_2x2(model.F());
      } else if (mode == "alpha2") {
        oracle_sm = closed_form_alpha_2(model.F(), model.p(), model.q());
      } else {
        oracle_sm = grid_oracle_sm(model.F(), model.p(), model.q(), resolution);
      }
      Table t{{"mode", "solver_sm", "oracle_sm", "abs_diff"},
              {{mode, solver_sm, oracle_sm, std::abs(solver_sm - oracle_sm)}}};
      detail::emit(t, opts, out);
    }
  } catch (const detail::UsageError& e) {
    err << "E_USAGE: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) {
      err << "E_USAGE: " << e.what() << '\n';
      return 2;
    }
    err << (e.is_limit() ? "E_LIMIT: " : "E_CONFIG: ") << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace pmscale
