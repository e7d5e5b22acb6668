#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "qnstein/bench/runner.hpp"

namespace qnstein::bench {

inline constexpr const char* kRunHeader =
    "step,seed,loss,energy,energy_error,circuits_per_sample_convention,circuits_raw,blocked";
inline constexpr const char* kAggregateHeader =
    "step,runs,mean_energy_error,std_energy_error,mean_loss,mean_circuits_per_sample_convention,mean_circuits_raw";

/// Shortest text that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline void write_runs(std::ostream& out, const std::vector<SeedRun>& runs) {
  out << kRunHeader << '\n';
  for (const auto& r : runs) {
    for (const auto& rec : r.trace) {
      out << rec.step << ',' << r.seed << ',' << format_double(rec.loss) << ',' << format_double(rec.energy) << ','
          << format_double(rec.energy_error) << ',' << rec.circuits_per_sample << ',' << rec.circuits_raw << ','
          << (rec.blocked ? 1 : 0) << '\n';
    }
  }
}

inline void write_aggregate(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << kAggregateHeader << '\n';
  for (const auto& a : rows) {
    out << a.step << ',' << a.count << ',' << format_double(a.mean_energy_error) << ','
        << format_double(a.std_energy_error) << ',' << format_double(a.mean_loss) << ','
        << format_double(a.mean_circuits_per_sample) << ',' << format_double(a.mean_circuits_raw) << '\n';
  }
}

inline std::string group_stem(const Group& g) {
  return g.label + "_n" + std::to_string(g.qubits) + "_L" + std::to_string(g.layers);
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  f << content;
  f.flush();
  if (!f) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace detail

/// Writes <stem>.csv and <stem>_aggregate.csv per group into `dir`; returns
/// the written paths in group order.
inline std::vector<std::filesystem::path> emit_csv(const BenchmarkResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> written;
  for (const auto& g : result.groups) {
    const std::string stem = group_stem(g);
    std::ostringstream runs, agg;
    write_runs(runs, g.runs);
    write_aggregate(agg, aggregate(g));
    const auto p1 = dir / (stem + ".csv");
    const auto p2 = dir / (stem + "_aggregate.csv");
    detail::write_file(p1, runs.str());
    detail::write_file(p2, agg.str());
    written.push_back(p1);
    written.push_back(p2);
  }
  return written;
}

}  // namespace qnstein::bench
