// Copyright 2026 The densolve Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "densolve/errors.hpp"
#include "densolve/harness/bench.hpp"
#include "densolve/harness/methods.hpp"

namespace densolve {

enum class ReportFormat { csv, markdown };

inline ReportFormat parse_report_format(std::string_view s) {
  if (s == "csv") return ReportFormat::csv;
  if (s == "markdown") return ReportFormat::markdown;
  throw std::invalid_argument("unknown output format '" + std::string(s) + "'");
}

inline constexpr std::string_view kCsvHeader =
    "method,n,precision,backend,wall_time_s,iterations,converged,relative_residual,speedup";

namespace detail {

inline std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fixed2(double v) {
  if (!std::isfinite(v)) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string emit_csv(const std::vector<BenchRecord>& records) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : records) {
    out += r.method + ',' + std::to_string(r.n) + ',' + std::string(to_string(r.precision)) + ',' +
           r.backend + ',' + exact(r.wall_time_s) + ',' + std::to_string(r.iterations) + ',' +
           (r.converged ? "true" : "false") + ',' + exact(r.relative_residual) + ',' +
           exact(r.speedup) + '\n';
  }
  return out;
}

// One table per (precision, method family, compared backend): rows are
// matrix dimensions, columns methods, cells the speedup over the reference.
inline std::string emit_markdown(const std::vector<BenchRecord>& records, std::size_t restart) {
  std::set<std::string> non_reference;
  for (const auto& r : records)
    if (r.backend != "reference") non_reference.insert(r.backend);
  std::set<std::string> compared = non_reference;
  if (compared.empty()) compared.insert("reference");

  std::ostringstream out;
  int table = 0;
  for (Precision p : {Precision::f32, Precision::f64}) {
    for (bool iterative : {true, false}) {
      for (const auto& backend : compared) {
        std::vector<Method> methods;
        std::set<std::size_t> sizes;
        std::map<std::pair<std::size_t, Method>, const BenchRecord*> cell;
        for (Method m : kAllMethods) {
          if (is_iterative(m) != iterative) continue;
          bool seen = false;
          for (const auto& r : records) {
            if (r.precision != p || r.backend != backend || r.method != to_string(m)) continue;
            seen = true;
            sizes.insert(r.n);
            cell[{r.n, m}] = &r;
          }
          if (seen) methods.push_back(m);
        }
        if (methods.empty()) continue;

        if (table++ > 0) out << '\n';
        out << "Table " << table << ". Speedup of the " << backend
            << " backend over the reference backend, "
            << (p == Precision::f32 ? "single" : "double") << " precision ("
            << to_string(p) << "), " << (iterative ? "iterative" : "direct") << " methods\n\n";
        out << "| Matrix dimension |";
        for (Method m : methods) out << ' ' << display_name(m, restart) << " |";
        out << "\n|---|";
        for (std::size_t i = 0; i < methods.size(); ++i) out << "---|";
        out << '\n';
        for (std::size_t n : sizes) {
          out << "| " << n << " |";
          for (Method m : methods) {
            const auto it = cell.find({n, m});
            out << ' ' << (it == cell.end() ? std::string("n/a") : fixed2(it->second->speedup))
                << " |";
          }
          out << '\n';
        }
      }
    }
  }
  return out.str();
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) fields.push_back(field);
  if (!line.empty() && line.back() == sep) fields.emplace_back();
  return fields;
}

}  // namespace detail

/// Renders benchmark records. Throws std::invalid_argument on an empty list.
inline std::string emit_report(const std::vector<BenchRecord>& records, ReportFormat format,
                               std::size_t restart = 35) {
  if (records.empty()) throw std::invalid_argument("cannot emit a report with no records");
  return format == ReportFormat::csv ? detail::emit_csv(records)
                                     : detail::emit_markdown(records, restart);
}

/// Reads back the csv produced by `emit_report`.
inline std::vector<BenchRecord> parse_csv_report(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line) || line != kCsvHeader) throw ParseError("unexpected csv header", 1);
  std::vector<BenchRecord> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = detail::split(line, ',');
    if (f.size() != 9) throw ParseError("expected 9 fields", lineno);
    try {
      BenchRecord r;
      r.method = f[0];
      r.n = std::stoull(f[1]);
      r.precision = parse_precision(f[2]);
      r.backend = f[3];
      r.wall_time_s = std::stod(f[4]);
      r.iterations = std::stoull(f[5]);
      if (f[6] != "true" && f[6] != "false") throw std::invalid_argument("converged flag");
      r.converged = f[6] == "true";
      r.relative_residual = std::stod(f[7]);
      r.speedup = std::stod(f[8]);
      out.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw ParseError(std::string("bad field: ") + e.what(), lineno);
    }
  }
  return out;
}

}  // namespace densolve
