// Copyright 2026 The densolve Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "densolve/backends.hpp"
#include "densolve/core.hpp"
#include "densolve/harness/generate.hpp"
#include "densolve/harness/methods.hpp"

namespace densolve {

struct BenchRecord {
  std::string method;
  std::size_t n = 0;
  Precision precision = Precision::f64;
  std::string backend;
  double wall_time_s = 0;
  std::size_t iterations = 0;
  bool converged = false;
  double relative_residual = 0;
  /// Reference wall time over this backend's wall time; NaN without a reference run.
  double speedup = std::numeric_limits<double>::quiet_NaN();
};

struct BenchOptions {
  std::vector<Method> methods;
  std::vector<std::size_t> sizes;
  std::vector<Precision> precisions{Precision::f64};
  std::vector<std::string> backends{"reference", "blocked"};
  SolverConfig config;
  std::uint64_t seed = 1;
  std::size_t warmup_runs = 1;
  /// Best of this many timed runs is reported.
  std::size_t timed_runs = 3;
  BlockedOptions blocked;
};

namespace detail {

template <Real T>
void bench_precision(const BenchOptions& opts, std::vector<BenchRecord>& out) {
  for (std::size_t n : opts.sizes) {
    for (Method m : opts.methods) {
      const ProblemSpec spec{default_kind(m), n, opts.seed, precision_of<T>()};
      const auto prob = generate_problem<T>(spec);
      const std::size_t first = out.size();
      double reference_time = std::numeric_limits<double>::quiet_NaN();

      for (const auto& name : opts.backends) {
        auto be = make_backend<T>(name, opts.blocked);
        for (std::size_t w = 0; w < opts.warmup_runs; ++w) run_method<T>(m, prob.a, prob.b, opts.config, *be);
        MethodOutcome<T> last;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < std::max<std::size_t>(opts.timed_runs, 1); ++r) {
          const auto t0 = std::chrono::steady_clock::now();
          last = run_method<T>(m, prob.a, prob.b, opts.config, *be);
          const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
          best = std::min(best, dt.count());
        }
        BenchRecord rec;
        rec.method = std::string(to_string(m));
        rec.n = n;
        rec.precision = precision_of<T>();
        rec.backend = std::string(be->name());
        rec.wall_time_s = best;
        rec.iterations = last.report.iterations;
        rec.converged = last.report.converged;
        rec.relative_residual = last.report.final_relative_residual;
        if (rec.backend == "reference") reference_time = best;
        out.push_back(std::move(rec));
      }
      for (std::size_t i = first; i < out.size(); ++i) out[i].speedup = reference_time / out[i].wall_time_s;
    }
  }
}

}  // namespace detail

/// Runs every (precision, size, method, backend) combination sequentially.
/// Each method is benchmarked on its default problem family; a failed solve
/// yields a record with converged = false.
inline std::vector<BenchRecord> run_benchmark(const BenchOptions& opts) {
  if (opts.methods.empty() || opts.sizes.empty() || opts.precisions.empty() || opts.backends.empty())
    throw std::invalid_argument("benchmark needs at least one method, size, precision and backend");
  opts.config.validate();
  for (const auto& name : opts.backends) (void)make_backend<double>(name);

  std::vector<BenchRecord> records;
  for (Precision p : opts.precisions) {
    if (p == Precision::f32)
      detail::bench_precision<float>(opts, records);
    else
      detail::bench_precision<double>(opts, records);
  }
  return records;
}

}  // namespace densolve
