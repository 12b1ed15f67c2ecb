#include "ftm/generator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ftm/errors.hpp"
#include "ftm/parallel.hpp"

namespace ftm {

NodeTable::NodeTable(std::size_t n, int d)
    : d_(d), weights_(n, 0.0), directions_(n * static_cast<std::size_t>(d), 0.0) {
  if (d < 2) throw DomainError("invalid dimension d=" + std::to_string(d) + " (need d >= 2)");
}

Node NodeTable::node(std::size_t i) const {
  const auto x = direction(i);
  return Node{i, weights_[i], std::vector<double>(x.begin(), x.end())};
}

void NodeTable::set_node(std::size_t i, const Node& node) {
  if (node.direction.size() != static_cast<std::size_t>(d_))
    throw DomainError("direction dimension mismatch");
  weights_[i] = node.weight;
  std::copy(node.direction.begin(), node.direction.end(), direction(i).begin());
}

namespace {

constexpr std::size_t kNodeBlock = 4096;
constexpr std::size_t kPairBlock = 512;
// Slack on the pruning bound: a direction dot product can round a hair
// above 1, so the bound must not cut pairs whose product sits at theta.
constexpr double kBoundSlack = 1.0 + 1e-9;

void check_node_count(const ModelConfig& config) {
  if (config.n > std::numeric_limits<std::uint32_t>::max())
    throw ResourceLimitError("node count exceeds 2^32 - 1");
}

// Nodes permuted into descending weight order, with the per-endpoint
// scale factors (w^alpha as source, w^beta as target) precomputed.
struct SortedNodes {
  std::vector<std::uint32_t> ids;
  std::vector<double> src_scale;
  std::vector<double> dst_scale;
  std::vector<double> directions;
  int d = 3;

  std::span<const double> direction(std::size_t p) const noexcept {
    return {directions.data() + p * static_cast<std::size_t>(d), static_cast<std::size_t>(d)};
  }
};

SortedNodes sort_nodes(const NodeTable& nodes, const EdgeRule& rule) {
  const std::size_t n = nodes.size();
  SortedNodes s;
  s.d = nodes.dimension();
  s.ids.resize(n);
  std::iota(s.ids.begin(), s.ids.end(), 0u);
  std::stable_sort(s.ids.begin(), s.ids.end(), [&](std::uint32_t x, std::uint32_t y) {
    return nodes.weight(x) > nodes.weight(y);
  });
  s.src_scale.resize(n);
  s.dst_scale.resize(n);
  s.directions.resize(n * static_cast<std::size_t>(s.d));
  const bool undirected = rule.variant == Variant::Undirected;
  for (std::size_t p = 0; p < n; ++p) {
    const double w = nodes.weight(s.ids[p]);
    s.src_scale[p] = undirected ? w : std::pow(w, rule.alpha);
    s.dst_scale[p] = undirected ? w : std::pow(w, rule.beta);
    const auto x = nodes.direction(s.ids[p]);
    std::copy(x.begin(), x.end(), s.directions.begin() + static_cast<std::ptrdiff_t>(p * s.d));
  }
  return s;
}

double bound_factor(const EdgeRule& rule) {
  if (rule.variant != Variant::LinkFunction) return kBoundSlack;
  const double hmax = rule.h.max_value();
  return hmax > 0.0 ? hmax * kBoundSlack : hmax;
}

// Visits candidate pairs whose outer position lies in [begin, end). For a
// fixed outer node the bound is monotone in the inner weight, so each inner
// scan stops at the first pruned pair.
template <class Visit>
std::uint64_t enumerate_block(const SortedNodes& s, const EdgeRule& rule, std::size_t begin,
                              std::size_t end, Visit&& visit) {
  const std::size_t n = s.ids.size();
  const double factor = bound_factor(rule);
  const bool undirected = rule.variant == Variant::Undirected;
  std::uint64_t candidates = 0;
  for (std::size_t p = begin; p < end; ++p) {
    const double src = s.src_scale[p];
    for (std::size_t q = undirected ? p + 1 : 0; q < n; ++q) {
      if (q == p) continue;
      const double scale = src * s.dst_scale[q];
      if (!(scale * factor >= rule.theta)) break;
      ++candidates;
      visit(p, q, scale);
    }
  }
  return candidates;
}

Edge make_edge(const SortedNodes& s, std::size_t p, std::size_t q, bool undirected) {
  const std::uint32_t u = s.ids[p];
  const std::uint32_t v = s.ids[q];
  if (undirected && v < u) return Edge{v, u};
  return Edge{u, v};
}

[[noreturn]] void throw_edge_limit(std::uint64_t max_edges) {
  throw ResourceLimitError("edge count exceeds the limit of " + std::to_string(max_edges) +
                           " (raise FTM_MAX_EDGES or increase theta)");
}

}  // namespace

NodeTable sample_nodes(const ModelConfig& config, unsigned workers) {
  config.validate();
  check_node_count(config);
  const std::size_t n = config.n;
  NodeTable table(n, config.d);
  const std::size_t blocks = (n + kNodeBlock - 1) / kNodeBlock;
  parallel_for(blocks, workers, [&](std::size_t b) {
    const std::size_t end = std::min(n, (b + 1) * kNodeBlock);
    for (std::size_t i = b * kNodeBlock; i < end; ++i) {
      auto stream = RngStream::substream(config.seed, StreamDomain::Node, i);
      table.set_weight(i, sample_weight(stream, config.pareto));
      sample_direction(stream, config.d, table.direction(i));
    }
  });
  return table;
}

Graph generate(const ModelConfig& config, const GenerateOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  Graph g;
  g.config = config;
  g.nodes = sample_nodes(config, options.workers);

  const auto sorted = sort_nodes(g.nodes, config.rule);
  const bool undirected = config.rule.variant == Variant::Undirected;
  const std::size_t n = g.nodes.size();
  const std::size_t blocks = (n + kPairBlock - 1) / kPairBlock;
  std::vector<std::vector<Edge>> block_edges(blocks);
  std::vector<std::uint64_t> block_candidates(blocks, 0);
  std::atomic<std::uint64_t> total_edges{0};

  parallel_for(blocks, options.workers, [&](std::size_t b) {
    auto& out = block_edges[b];
    std::size_t flushed = 0;
    block_candidates[b] = enumerate_block(
        sorted, config.rule, b * kPairBlock, std::min(n, (b + 1) * kPairBlock),
        [&](std::size_t p, std::size_t q, double scale) {
          if (!edge_condition(scale, dot(sorted.direction(p), sorted.direction(q)), config.rule))
            return;
          out.push_back(make_edge(sorted, p, q, undirected));
          if (out.size() - flushed >= 4096) {
            const auto seen = total_edges.fetch_add(out.size() - flushed) + (out.size() - flushed);
            flushed = out.size();
            if (seen > options.max_edges) throw_edge_limit(options.max_edges);
          }
        });
    if (total_edges.fetch_add(out.size() - flushed) + (out.size() - flushed) > options.max_edges)
      throw_edge_limit(options.max_edges);
  });

  std::size_t total = 0;
  for (const auto& e : block_edges) total += e.size();
  g.edges.reserve(total);
  for (auto& e : block_edges) {
    g.edges.insert(g.edges.end(), e.begin(), e.end());
    std::vector<Edge>().swap(e);
  }
  std::sort(g.edges.begin(), g.edges.end());

  g.stats.candidate_pairs =
      std::accumulate(block_candidates.begin(), block_candidates.end(), std::uint64_t{0});
  g.stats.workers = resolve_workers(options.workers);
  g.stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return g;
}

Graph generate_reference(const ModelConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  Graph g;
  g.config = config;
  g.nodes = sample_nodes(config, 1);
  const std::size_t n = g.nodes.size();
  const auto& rule = config.rule;
  const bool undirected = rule.variant == Variant::Undirected;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = undirected ? i + 1 : 0; j < n; ++j) {
      if (i == j) continue;
      ++g.stats.candidate_pairs;
      if (edge_exists(g.nodes.weight(i), g.nodes.direction(i), g.nodes.weight(j),
                      g.nodes.direction(j), rule))
        g.edges.push_back(Edge{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
    }
  }
  g.stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return g;
}

std::vector<Edge> candidate_pairs(const NodeTable& nodes, const EdgeRule& rule) {
  rule.validate();
  const auto sorted = sort_nodes(nodes, rule);
  const bool undirected = rule.variant == Variant::Undirected;
  std::vector<Edge> out;
  enumerate_block(sorted, rule, 0, nodes.size(), [&](std::size_t p, std::size_t q, double) {
    out.push_back(make_edge(sorted, p, q, undirected));
  });
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t count_candidate_pairs(const NodeTable& nodes, const EdgeRule& rule) {
  rule.validate();
  const auto sorted = sort_nodes(nodes, rule);
  return enumerate_block(sorted, rule, 0, nodes.size(), [](std::size_t, std::size_t, double) {});
}

DegreeSequence degree_sequence(std::size_t n, std::span<const Edge> edges, bool directed) {
  DegreeSequence ds;
  ds.directed = directed;
  if (directed) {
    ds.out_degrees.assign(n, 0);
    ds.in_degrees.assign(n, 0);
  } else {
    ds.degrees.assign(n, 0);
  }
  for (const auto& e : edges) {
    if (e.src >= n || e.dst >= n) throw ValidationError("edge endpoint out of range");
    if (directed) {
      ++ds.out_degrees[e.src];
      ++ds.in_degrees[e.dst];
    } else {
      ++ds.degrees[e.src];
      ++ds.degrees[e.dst];
    }
  }
  return ds;
}

DegreeSequence generate_degree_sequence(const Graph& graph) {
  return degree_sequence(graph.nodes.size(), graph.edges, graph.directed());
}

}  // namespace ftm
