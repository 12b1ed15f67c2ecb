#include "ftm/io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <iterator>
#include <limits>
#include <ostream>
#include <sstream>

#include "ftm/errors.hpp"

namespace ftm::io {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_nodes_tsv(std::ostream& out, const NodeTable& nodes) {
  out << "# id\tweight";
  for (int k = 0; k < nodes.dimension(); ++k) out << "\tx" << k;
  out << '\n';
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    out << i << '\t' << format_double(nodes.weight(i));
    for (double x : nodes.direction(i)) out << '\t' << format_double(x);
    out << '\n';
  }
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, '\t')) out.push_back(cur);
  return out;
}

bool skip_line(std::string& text) {
  if (!text.empty() && text.back() == '\r') text.pop_back();
  return text.empty() || text.front() == '#';
}

std::uint64_t parse_uint(const std::string& s, std::size_t line, const char* what) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw ParseError(std::string(what) + ": not a non-negative integer: '" + s + "'", line);
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw ParseError(std::string(what) + ": integer out of range: '" + s + "'", line);
  }
}

double parse_real(const std::string& s, std::size_t line, const char* what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (s.empty() || pos != s.size() || !std::isfinite(v))
    throw ParseError(std::string(what) + ": not a number: '" + s + "'", line);
  return v;
}

}  // namespace

NodeTable read_nodes_tsv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::vector<double> weights;
  std::string text;
  std::size_t line = 0;
  std::size_t d = 0;
  while (std::getline(in, text)) {
    ++line;
    if (skip_line(text)) continue;
    const auto f = split_tabs(text);
    if (f.size() < 4) throw ParseError("node row needs id, weight and >= 2 coordinates", line);
    if (d == 0) d = f.size() - 2;
    if (f.size() - 2 != d) throw ParseError("inconsistent direction dimension", line);
    if (parse_uint(f[0], line, "id") != rows.size())
      throw ParseError("node ids must be consecutive from 0", line);
    weights.push_back(parse_real(f[1], line, "weight"));
    std::vector<double> x;
    for (std::size_t k = 2; k < f.size(); ++k) x.push_back(parse_real(f[k], line, "coordinate"));
    rows.push_back(std::move(x));
  }
  if (rows.empty()) throw ParseError("empty node table");
  NodeTable table(rows.size(), static_cast<int>(d));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    table.set_weight(i, weights[i]);
    std::copy(rows[i].begin(), rows[i].end(), table.direction(i).begin());
  }
  return table;
}

void write_edges_tsv(std::ostream& out, std::span<const Edge> edges) {
  for (const auto& e : edges) out << e.src << '\t' << e.dst << '\n';
}

std::vector<Edge> read_edges_tsv(std::istream& in) {
  std::vector<Edge> edges;
  std::string text;
  std::size_t line = 0;
  bool any_line = false;
  while (std::getline(in, text)) {
    ++line;
    any_line = true;
    if (skip_line(text)) continue;
    auto f = split_tabs(text);
    if (f.size() != 2) {
      // tolerate space-separated pairs
      std::istringstream ws(text);
      f.assign(std::istream_iterator<std::string>(ws), std::istream_iterator<std::string>());
    }
    if (f.size() != 2) throw ParseError("edge row needs exactly two node ids", line);
    const auto u = parse_uint(f[0], line, "source");
    const auto v = parse_uint(f[1], line, "target");
    if (u > std::numeric_limits<std::uint32_t>::max() || v > std::numeric_limits<std::uint32_t>::max())
      throw ParseError("node id exceeds 2^32 - 1", line);
    if (u == v) throw ParseError("self-loop " + std::to_string(u), line);
    edges.push_back(Edge{static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v)});
  }
  if (!any_line) throw ParseError("empty edge list");
  return edges;
}

std::vector<std::uint64_t> read_degrees(std::istream& in) {
  std::vector<std::uint64_t> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (skip_line(text)) continue;
    out.push_back(parse_uint(text, line, "degree"));
  }
  if (out.empty()) throw ParseError("empty degree file");
  return out;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

std::string write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("write failed for " + path.string());
  return sha256_hex(content);
}

}  // namespace ftm::io
