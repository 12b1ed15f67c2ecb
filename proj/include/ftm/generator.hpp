#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ftm/model.hpp"

namespace ftm {

// Structure-of-arrays node storage: weights plus a flat n x d direction
// matrix.
class NodeTable {
 public:
  NodeTable() = default;
  NodeTable(std::size_t n, int d);

  std::size_t size() const noexcept { return weights_.size(); }
  int dimension() const noexcept { return d_; }

  double weight(std::size_t i) const noexcept { return weights_[i]; }
  std::span<const double> direction(std::size_t i) const noexcept {
    return {directions_.data() + i * static_cast<std::size_t>(d_), static_cast<std::size_t>(d_)};
  }
  std::span<double> direction(std::size_t i) noexcept {
    return {directions_.data() + i * static_cast<std::size_t>(d_), static_cast<std::size_t>(d_)};
  }
  void set_weight(std::size_t i, double w) noexcept { weights_[i] = w; }

  Node node(std::size_t i) const;
  void set_node(std::size_t i, const Node& node);

  const std::vector<double>& weights() const noexcept { return weights_; }

  friend bool operator==(const NodeTable&, const NodeTable&) = default;

 private:
  int d_ = 3;
  std::vector<double> weights_;
  std::vector<double> directions_;
};

// Undirected edges are stored with src < dst; directed arcs as src -> dst.
struct Edge {
  std::uint32_t src = 0;
  std::uint32_t dst = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct GenerationStats {
  std::uint64_t candidate_pairs = 0;
  double wall_seconds = 0.0;
  unsigned workers = 1;
};

struct Graph {
  ModelConfig config;
  NodeTable nodes;
  std::vector<Edge> edges;  // sorted lexicographically
  GenerationStats stats;

  bool directed() const noexcept { return config.rule.is_directed(); }
};

struct GenerateOptions {
  unsigned workers = 0;  // 0 = hardware concurrency
  std::uint64_t max_edges = 100'000'000;
};

NodeTable sample_nodes(const ModelConfig& config, unsigned workers = 0);

// Two-phase generation: sample every node from its substream, then decide
// all pairs with weight-sorted pruning. Output does not depend on the
// worker count. Throws ResourceLimitError past options.max_edges.
Graph generate(const ModelConfig& config, const GenerateOptions& options = {});

// Same edges from an explicit pair enumeration and no pruning; O(n^2).
Graph generate_reference(const ModelConfig& config);

// Candidate pairs (arcs for directed rules) surviving the weight bound
// scale * max(h) >= theta, in node ids. Undirected pairs have src < dst.
std::vector<Edge> candidate_pairs(const NodeTable& nodes, const EdgeRule& rule);
std::uint64_t count_candidate_pairs(const NodeTable& nodes, const EdgeRule& rule);

struct DegreeSequence {
  bool directed = false;
  std::vector<std::uint64_t> degrees;      // undirected only
  std::vector<std::uint64_t> out_degrees;  // directed only
  std::vector<std::uint64_t> in_degrees;   // directed only
};

DegreeSequence generate_degree_sequence(const Graph& graph);
DegreeSequence degree_sequence(std::size_t n, std::span<const Edge> edges, bool directed);

}  // namespace ftm
