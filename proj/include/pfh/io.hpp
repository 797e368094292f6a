#pragma once

#include <cctype>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pfh/energy.hpp"
#include "pfh/grid.hpp"
#include "pfh/util.hpp"

namespace pfh {

/// Field snapshot format "PFH1": one ASCII header line
///   PFH1 <dim> <n> <L> <origin>\n
/// followed by n^dim little-endian IEEE-754 doubles, row-major. Round trips
/// are bit-exact.
inline void write_field_pfh1(const std::filesystem::path& path, const ScalarField& f) {
  f.grid.validate();
  if (f.values.size() != f.grid.node_count())
    throw std::invalid_argument("field size does not match grid");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << "PFH1 " << f.grid.dim << ' ' << f.grid.n << ' ' << format_double(f.grid.length) << ' '
      << format_double(f.grid.origin) << '\n';
  for (double v : f.values) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    char bytes[8];
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xff);
    out.write(bytes, 8);
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline ScalarField read_field_pfh1(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("missing PFH1 header: " + path.string());
  std::istringstream hs(header);
  std::string magic;
  int dim = 0, n = 0;
  std::string l_str, o_str;
  hs >> magic >> dim >> n >> l_str >> o_str;
  if (magic != "PFH1" || !hs) throw std::runtime_error("malformed PFH1 header: " + path.string());
  GridSpec g{dim, n, parse_double(l_str), parse_double(o_str)};
  g.validate();
  ScalarField f{g, std::vector<double>(g.node_count())};
  for (double& v : f.values) {
    char bytes[8];
    in.read(bytes, 8);
    if (!in) throw std::runtime_error("truncated PFH1 payload: " + path.string());
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b)
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[b])) << (8 * b);
    std::memcpy(&v, &bits, sizeof(v));
  }
  return f;
}

/// Energy trace CSV. Header and row layout are part of the plotting contract;
/// the decimal point is always '.', independent of the locale.
inline constexpr const char* trace_csv_header =
    "step,time,gradient_part,potential_part,tv_part,total,normalized";

inline std::string trace_csv(const EnergyTrace& trace) {
  std::string out(trace_csv_header);
  out += '\n';
  for (const TraceRecord& r : trace) {
    out += std::to_string(r.step);
    out += ',';
    out += format_double(r.time);
    out += ',';
    out += format_double(r.energy.gradient_part);
    out += ',';
    out += format_double(r.energy.potential_part);
    out += ',';
    out += format_double(r.energy.tv_part);
    out += ',';
    out += format_double(r.energy.total);
    out += ',';
    out += format_double(r.energy.normalized);
    out += '\n';
  }
  return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << body;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Two-column (u, W) CSV used for tabulated potentials.
inline std::string tabulated_csv(std::span<const double> u, std::span<const double> w) {
  if (u.size() != w.size()) throw std::invalid_argument("tabulated CSV needs matching columns");
  std::string out = "u,W\n";
  for (std::size_t i = 0; i < u.size(); ++i) {
    out += format_double(u[i]);
    out += ',';
    out += format_double(w[i]);
    out += '\n';
  }
  return out;
}

inline std::pair<std::vector<double>, std::vector<double>> read_tabulated_csv(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::vector<double> u, w;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("malformed tabulated CSV line: '" + line + "'");
    const std::string a = line.substr(0, comma);
    const std::string b = line.substr(comma + 1);
    if (u.empty() && !a.empty() && (std::isalpha(static_cast<unsigned char>(a[0])) != 0)) continue;
    u.push_back(parse_double(a));
    w.push_back(parse_double(b));
  }
  if (u.size() < 2) throw std::runtime_error("tabulated CSV has fewer than 2 rows: " + path.string());
  return {std::move(u), std::move(w)};
}

} // namespace pfh
