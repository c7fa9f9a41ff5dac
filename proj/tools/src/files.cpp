#include "lowrank/bench/files.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace lowrank::bench {

namespace {

constexpr std::string_view kInstanceTag = "lowrank-instance";

template <class T>
T parse_integer(std::string_view text, std::string_view what) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ParameterError("bad " + std::string(what) + ": '" + std::string(text) + "'");
  }
  return value;
}

double parse_real(std::string_view text, std::string_view what) {
  // from_chars for double is not available on every supported libstdc++.
  const std::string s(text);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw ParameterError("bad " + std::string(what) + ": '" + s + "'");
  }
  return v;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

InstanceHeader parse_header(std::string_view line) {
  auto tokens = split_ws(line);
  if (tokens.size() < 2 || tokens[0] != "#" || tokens[1] != kInstanceTag) {
    throw ParameterError("instance file must start with '# lowrank-instance'");
  }
  InstanceHeader h;
  bool have_m = false, have_n = false, have_d = false;
  for (std::size_t i = 2; i < tokens.size(); ++i) {
    const auto eq = tokens[i].find('=');
    if (eq == std::string_view::npos) {
      throw ParameterError("bad header field '" + std::string(tokens[i]) + "'");
    }
    const auto key = tokens[i].substr(0, eq);
    const auto val = tokens[i].substr(eq + 1);
    if (key == "m") {
      h.m = parse_integer<Index>(val, "m");
      have_m = true;
    } else if (key == "n") {
      h.n = parse_integer<Index>(val, "n");
      have_n = true;
    } else if (key == "d") {
      h.d = parse_integer<Index>(val, "d");
      have_d = true;
    } else if (key == "r_true") {
      h.r_true = parse_integer<Index>(val, "r_true");
    } else if (key == "snr_m") {
      h.snr_m = parse_real(val, "snr_m");
    } else if (key == "seed") {
      h.seed = parse_integer<std::uint64_t>(val, "seed");
    } else {
      throw ParameterError("unknown header field '" + std::string(key) + "'");
    }
  }
  if (!have_m || !have_n || !have_d) throw ParameterError("instance header needs m, n and d");
  if (h.m < 1 || h.n < 1) throw ParameterError("instance dimensions must be positive");
  if (h.d < 1 || h.d > h.m * h.n) {
    throw ParameterError("instance d=" + std::to_string(h.d) + " outside [1, m*n]");
  }
  if (h.r_true && (*h.r_true < 1 || *h.r_true > std::min(h.m, h.n))) {
    throw ParameterError("instance r_true out of range");
  }
  return h;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

InstanceFile InstanceFile::from_instance(const ProblemInstance& inst,
                                         std::optional<std::uint64_t> seed) {
  inst.validate();
  if (!inst.op.is_sampling()) {
    throw ParameterError("only sampling (completion) instances can be written to a file");
  }
  InstanceHeader h;
  h.m = inst.rows();
  h.n = inst.cols();
  h.d = inst.measurements();
  h.r_true = inst.r_true;
  if (inst.noise) h.snr_m = inst.noise->snr_m;
  h.seed = seed;
  return {h, inst.op.pattern(), inst.b};
}

ProblemInstance InstanceFile::to_instance() const {
  ProblemInstance inst{std::nullopt, MeasurementOperator::sampling(pattern), values, std::nullopt,
                       header.r_true};
  inst.validate();
  return inst;
}

void InstanceFile::write(std::ostream& os) const {
  os << "# " << kInstanceTag << " m=" << header.m << " n=" << header.n << " d=" << header.d;
  if (header.r_true) os << " r_true=" << *header.r_true;
  if (header.snr_m) os << " snr_m=" << format_double(*header.snr_m);
  if (header.seed) os << " seed=" << *header.seed;
  os << '\n';
  const auto& cells = pattern.observed();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    os << cells[i].row << ' ' << cells[i].col << ' '
       << format_double(values(static_cast<Index>(i))) << '\n';
  }
}

InstanceFile InstanceFile::read(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ParameterError("empty instance file");
  const InstanceHeader h = parse_header(line);

  std::vector<Cell> cells;
  std::vector<double> vals;
  cells.reserve(static_cast<std::size_t>(h.d));
  vals.reserve(static_cast<std::size_t>(h.d));
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tok = split_ws(line);
    if (tok.size() != 3) {
      throw ParameterError("line " + std::to_string(lineno) + ": expected 'i j value'");
    }
    const Index i = parse_integer<Index>(tok[0], "row index");
    const Index j = parse_integer<Index>(tok[1], "column index");
    const double v = parse_real(tok[2], "value");
    if (!std::isfinite(v)) {
      throw ParameterError("line " + std::to_string(lineno) + ": non-finite value");
    }
    cells.push_back({i, j});
    vals.push_back(v);
  }
  if (static_cast<Index>(cells.size()) != h.d) {
    throw ParameterError("instance header says d=" + std::to_string(h.d) + " but file has " +
                         std::to_string(cells.size()) + " triplets");
  }
  SamplingPattern pattern(h.m, h.n, std::move(cells));
  Vector values = Eigen::Map<const Vector>(vals.data(), static_cast<Index>(vals.size()));
  return {h, std::move(pattern), std::move(values)};
}

void InstanceFile::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  write(os);
  if (!os) throw std::runtime_error("failed writing '" + path + "'");
}

InstanceFile InstanceFile::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  return read(is);
}

void write_result_header(std::ostream& os, std::string_view meta) {
  os << "# lowrank-result " << meta << '\n' << kResultColumns << '\n';
}

void write_result_row(std::ostream& os, const ResultRecord& rec) {
  os << rec.solver << ',' << rec.m << ',' << rec.n << ',' << rec.d << ',' << rec.rank << ','
     << format_double(rec.mu) << ',' << rec.iterations << ',' << to_string(rec.converged) << ','
     << (rec.snr_r ? format_double(*rec.snr_r) : std::string("NA")) << ','
     << format_double(rec.wall_time) << '\n';
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace lowrank::bench
