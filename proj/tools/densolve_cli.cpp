// Copyright 2026 The densolve Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line driver: `densolve solve` runs one method on one system,
// `densolve bench` sweeps methods x sizes x precisions x backends and prints
// speedup tables.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include "densolve/densolve.hpp"

namespace {

constexpr int kExitSolveFailure = 1;
constexpr int kExitUsage = 2;

struct CommonFlags {
  std::string precision = "f64";
  double tol = 1e-4;
  std::size_t restart = 35;
  std::size_t block_size = 64;
  std::size_t max_iters = 0;
  std::uint64_t seed = 1;
  std::string output;
  std::string out_path;
  std::size_t tile = 64;
  int threads = 0;

  densolve::SolverConfig config() const {
    densolve::SolverConfig cfg;
    cfg.tolerance = tol;
    cfg.restart_m = restart;
    cfg.block_size_b = block_size;
    cfg.max_iterations = max_iters;
    return cfg;
  }

  densolve::BlockedOptions blocked() const { return {tile, threads}; }
};

void add_common(CLI::App& cmd, CommonFlags& f) {
  cmd.add_option("--tol", f.tol, "Relative residual tolerance")->capture_default_str();
  cmd.add_option("--restart", f.restart, "GMRES restart length")->capture_default_str();
  cmd.add_option("--block-size", f.block_size, "Block size for blocked LU and Cholesky")
      ->capture_default_str();
  cmd.add_option("--max-iters", f.max_iters, "Iteration cap (0 means 10*n)")->capture_default_str();
  cmd.add_option("--seed", f.seed, "Generator seed")->capture_default_str();
  cmd.add_option("--out", f.out_path, "Write the report to this file instead of stdout");
  cmd.add_option("--tile", f.tile, "gemm tile edge of the blocked backend")->capture_default_str();
  cmd.add_option("--threads", f.threads, "Threads of the blocked backend (0 = all cores)")
      ->capture_default_str();
}

void write_report(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

struct SolveFlags {
  std::string method = "gmres";
  std::size_t n = 1024;
  std::string backend = "reference";
  std::string matrix;
};

template <densolve::Real T>
int run_solve(const SolveFlags& s, const CommonFlags& c) {
  using namespace densolve;
  const Method method = parse_method(s.method);
  const auto cfg = c.config();
  cfg.validate();
  auto be = make_backend<T>(s.backend, c.blocked());

  Problem<T> prob;
  if (!s.matrix.empty()) {
    auto a = read_matrix_market<T>(s.matrix);
    if (!a.square()) throw std::invalid_argument("matrix in '" + s.matrix + "' is not square");
    prob = make_problem<T>(std::move(a), c.seed);
  } else {
    prob = generate_problem<T>({default_kind(method), s.n, c.seed, precision_of<T>()});
  }

  const auto outcome = run_method<T>(method, prob.a, prob.b, cfg, *be);
  const auto& rep = outcome.report;

  BenchRecord rec;
  rec.method = std::string(to_string(method));
  rec.n = prob.a.rows();
  rec.precision = precision_of<T>();
  rec.backend = std::string(be->name());
  rec.wall_time_s = rep.wall_time.count();
  rec.iterations = rep.iterations;
  rec.converged = rep.converged;
  rec.relative_residual = rep.final_relative_residual;
  rec.speedup = rec.backend == "reference" ? 1.0 : std::numeric_limits<double>::quiet_NaN();
  write_report(emit_report({rec}, parse_report_format(c.output.empty() ? "csv" : c.output),
                           cfg.restart_m),
               c.out_path);

  std::cerr << to_string(method) << ": " << (rep.converged ? "converged" : "did not converge")
            << " after " << rep.iterations << " iterations, relative residual "
            << rep.final_relative_residual;
  if (rep.breakdown) std::cerr << " [" << to_string(*rep.breakdown) << "]";
  if (!outcome.error.empty()) std::cerr << " (" << outcome.error << ")";
  std::cerr << '\n';
  return rep.converged ? 0 : kExitSolveFailure;
}

struct BenchFlags {
  std::vector<std::string> methods;
  std::vector<std::size_t> sizes;
  std::vector<std::string> precisions{"f32", "f64"};
  std::vector<std::string> backends{"reference", "blocked"};
  std::size_t runs = 3;
};

int run_bench(const BenchFlags& b, const CommonFlags& c) {
  using namespace densolve;
  BenchOptions opts;
  const std::vector<std::string> methods =
      b.methods.empty() ? std::vector<std::string>{"jacobi", "gauss-seidel", "gmres", "bicgstab"}
                        : b.methods;
  for (const auto& m : methods) opts.methods.push_back(parse_method(m));
  if (b.sizes.empty()) {
    const bool any_iterative =
        std::any_of(opts.methods.begin(), opts.methods.end(), [](Method m) { return is_iterative(m); });
    opts.sizes = any_iterative ? std::vector<std::size_t>{256, 512, 1024, 2048}
                               : std::vector<std::size_t>{256, 512, 1024};
  } else {
    opts.sizes = b.sizes;
  }
  opts.precisions.clear();
  for (const auto& p : b.precisions) opts.precisions.push_back(parse_precision(p));
  opts.backends = b.backends;
  opts.config = c.config();
  opts.seed = c.seed;
  opts.timed_runs = b.runs;
  opts.blocked = c.blocked();

  const auto records = run_benchmark(opts);
  write_report(emit_report(records, parse_report_format(c.output.empty() ? "markdown" : c.output),
                           opts.config.restart_m),
               c.out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dense linear-system solvers and benchmark driver"};
  app.require_subcommand(1);

  CommonFlags solve_common, bench_common;
  SolveFlags solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one generated or file-based system");
  solve_cmd->add_option("--method", solve.method,
                        "jacobi|gauss-seidel|cg|gmres|bicgstab|lu|lu-blocked|cholesky")
      ->capture_default_str();
  solve_cmd->add_option("--n", solve.n, "System size for generated problems")->capture_default_str();
  solve_cmd->add_option("--precision", solve_common.precision, "f32|f64")->capture_default_str();
  solve_cmd->add_option("--backend", solve.backend, "reference|blocked")->capture_default_str();
  solve_cmd->add_option("--matrix", solve.matrix, "Matrix Market file to solve instead")
      ->check(CLI::ExistingFile);
  solve_cmd->add_option("--output", solve_common.output, "csv|markdown (default csv)");
  add_common(*solve_cmd, solve_common);

  BenchFlags bench;
  auto* bench_cmd = app.add_subcommand("bench", "Benchmark sweep with speedup tables");
  bench_cmd->add_option("--method", bench.methods, "Comma-separated methods")->delimiter(',');
  bench_cmd->add_option("--sizes,--n", bench.sizes, "Comma-separated system sizes")->delimiter(',');
  bench_cmd->add_option("--precision", bench.precisions, "Comma-separated f32|f64")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--backend", bench.backends, "Comma-separated reference|blocked")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--runs", bench.runs, "Timed runs per configuration (best is kept)")
      ->capture_default_str();
  bench_cmd->add_option("--output", bench_common.output, "csv|markdown (default markdown)");
  add_common(*bench_cmd, bench_common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (solve_cmd->parsed()) {
      return densolve::parse_precision(solve_common.precision) == densolve::Precision::f32
                 ? run_solve<float>(solve, solve_common)
                 : run_solve<double>(solve, solve_common);
    }
    return run_bench(bench, bench_common);
  } catch (const densolve::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolveFailure;
  }
}
