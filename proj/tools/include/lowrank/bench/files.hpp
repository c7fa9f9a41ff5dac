#pragma once

#include "lowrank/problems.hpp"
#include "lowrank/solvers.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace lowrank::bench {

/// Shortest-safe round-trip formatting: 17 significant digits, "inf"/"nan"
/// spelled as C printf does.
std::string format_double(double v);

/// Header metadata of an instance file.
struct InstanceHeader {
  Index m = 0;
  Index n = 0;
  Index d = 0;
  std::optional<Index> r_true;
  std::optional<double> snr_m;
  std::optional<std::uint64_t> seed;
};

/// An instance file: one '#'-prefixed header line
///   # lowrank-instance m=<m> n=<n> d=<d> [r_true=<r>] [snr_m=<dB>] [seed=<s>]
/// followed by d lines "i j value" (zero-based indices, value at 17
/// significant digits), LF line endings.
struct InstanceFile {
  InstanceHeader header;
  SamplingPattern pattern;
  Vector values;

  static InstanceFile from_instance(const ProblemInstance& inst,
                                    std::optional<std::uint64_t> seed = std::nullopt);

  ProblemInstance to_instance() const;

  void write(std::ostream& os) const;
  static InstanceFile read(std::istream& is);

  void save(const std::string& path) const;
  static InstanceFile load(const std::string& path);
};

/// One solver run as written to a result file.
struct ResultRecord {
  std::string solver;
  Index m = 0;
  Index n = 0;
  Index d = 0;
  Index rank = 0;
  double mu = 0.0;
  int iterations = 0;
  StopReason converged = StopReason::MaxIter;
  std::optional<double> snr_r;
  double wall_time = 0.0;
};

inline constexpr std::string_view kResultColumns =
    "solver,m,n,d,r,mu,iterations,converged,snr_r,wall_time_s";

void write_result_header(std::ostream& os, std::string_view meta);
void write_result_row(std::ostream& os, const ResultRecord& rec);

/// UTC timestamp for header lines.
std::string utc_timestamp();

}  // namespace lowrank::bench
