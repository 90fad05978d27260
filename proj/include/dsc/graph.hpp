#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace dsc {

using NodeId = std::uint32_t;
using ClusterId = std::uint32_t;
using Weight = double;

// Node -> cluster ID assignment, one entry per node.
using Clustering = std::vector<ClusterId>;

// Symmetric directed weighted graph in compressed per-node form.
// Every undirected edge {u,v}, u != v, is stored as both (u,v) and (v,u).
// A loop (v,v) is stored once; its weight counts twice towards deg(v).
class Graph {
 public:
  Graph() = default;

  std::size_t num_nodes() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_arcs() const { return targets_.size(); }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }
  std::span<const Weight> weights(NodeId v) const {
    return {weights_.data() + offsets_[v], weights_.data() + offsets_[v + 1]};
  }

  Weight degree(NodeId v) const { return degrees_[v]; }
  Weight loop_weight(NodeId v) const { return loops_[v]; }
  Weight total_volume() const { return total_volume_; }

  // Builds from directed arcs; symmetrizes nothing. Duplicate arcs are merged
  // by weight summation. Callers must supply both orientations of each edge.
  static Graph from_arcs(std::size_t n, std::vector<std::tuple<NodeId, NodeId, Weight>> arcs);

  // Builds from undirected edges (each given once, either orientation).
  static Graph from_edges(std::size_t n, const std::vector<std::tuple<NodeId, NodeId, Weight>>& edges);

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
  std::vector<Weight> weights_;
  std::vector<Weight> degrees_;
  std::vector<Weight> loops_;
  Weight total_volume_ = 0;
};

struct NodeMapping {
  // old_to_new[old] = new ID, or kDropped for removed degree-zero nodes.
  static constexpr NodeId kDropped = static_cast<NodeId>(-1);
  std::vector<NodeId> old_to_new;

  bool dropped(NodeId old_id) const { return old_to_new[old_id] == kDropped; }
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parses "u v" / "u v w" lines; '#' and '%' start comment lines. Each
// undirected edge appears once; duplicates are merged by weight summation.
Graph load_edge_list(std::istream& in);
Graph load_edge_list_file(const std::string& path);

// Writes undirected edges once (u <= v); weight omitted when exactly 1.
void write_edge_list(const Graph& g, std::ostream& out);

// Removes degree-zero nodes, makes IDs consecutive, applies a seeded random
// permutation to the node order. Edge multiset preserved under the mapping.
std::pair<Graph, NodeMapping> preprocess(const Graph& g, std::uint64_t seed);

Weight weighted_degree(const Graph& g, NodeId v);

struct ClusterSummary {
  Weight vol = 0;
  Weight cut = 0;
};

// Per-cluster volume and cut, indexed by cluster ID (max ID + 1 entries).
std::vector<ClusterSummary> cluster_stats(const Graph& g, const Clustering& c);

// Remaps cluster IDs to consecutive {0,...,k-1}, ordered by first occurrence
// of the smallest member node. Returns the number of clusters.
ClusterId normalize_clusters(Clustering& c);

std::size_t cluster_count(const Clustering& c);

// "nodeId clusterId" per line, sorted by node ID.
void write_clustering(const Clustering& c, std::ostream& out);
void write_clustering_file(const Clustering& c, const std::string& path);
Clustering load_clustering(std::istream& in);
Clustering load_clustering_file(const std::string& path);

}  // namespace dsc
