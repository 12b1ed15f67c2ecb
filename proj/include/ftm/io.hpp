#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ftm/generator.hpp"

namespace ftm::io {

// %.17g: round-trips every double exactly.
std::string format_double(double x);

// Node table TSV: "# id weight x0 .. x{d-1}" header, then one node per line.
void write_nodes_tsv(std::ostream& out, const NodeTable& nodes);
NodeTable read_nodes_tsv(std::istream& in);

// Edge list TSV: "src<TAB>dst" per line; '#' lines are comments.
void write_edges_tsv(std::ostream& out, std::span<const Edge> edges);
std::vector<Edge> read_edges_tsv(std::istream& in);

// One non-negative integer per line.
std::vector<std::uint64_t> read_degrees(std::istream& in);

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

// Writes `content` to path and returns its digest.
std::string write_file(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

}  // namespace ftm::io
