#pragma once

#include <cstdint>

#include "dsc/graph.hpp"

namespace dsc::eval {

// Adjusted rand index; 1 for equal clusterings, expected 0 against random
// ones, may be negative.
double ari(const Clustering& x, const Clustering& y);

struct PlantedPartitionSpec {
  std::size_t nodes = 0;
  std::size_t clusters = 1;          // near-equal sizes
  double p_in = 1;                   // intra-cluster edge probability
  double p_out = 0;                  // inter-cluster edge probability
  std::uint64_t seed = 0;
};

struct PlantedPartition {
  Graph graph;
  Clustering truth;
};

// Each intra-cluster pair becomes an edge with probability p_in, each
// inter-cluster pair with p_out. Degree-zero nodes are possible; callers
// preprocess. Deterministic per (spec, seed).
PlantedPartition generate_planted_partition(const PlantedPartitionSpec& spec);

// Fraction of edges between different truth clusters (the mixing parameter
// of the sampled instance).
double measured_mixing(const Graph& g, const Clustering& truth);

struct Report {
  double modularity = 0;
  double map_equation = 0;  // full form, bits
  std::size_t clusters = 0;
  std::size_t min_cluster_size = 0;
  std::size_t max_cluster_size = 0;
  double mean_cluster_size = 0;
};

Report report(const Graph& g, const Clustering& c);

}  // namespace dsc::eval
