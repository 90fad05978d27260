#pragma once

#include "dsc/graph.hpp"

namespace dsc {

enum class Measure { modularity, map_equation };

// x * log2(x) with plogp(0) = 0. Domain [0,1]; values a hair outside from
// floating-point summation are clamped, anything further is a domain error.
double plogp(double x);

double modularity(const Graph& g, const Clustering& c);

// Two-level codelength in bits. With include_node_term the full L is
// returned (reporting form); without it the clustering-independent
// per-node entropy term is dropped (optimizer form).
double map_equation(const Graph& g, const Clustering& c, bool include_node_term = true);

// Statistics of a cluster with the moving node taken out. For a cluster the
// node is not part of, these coincide with the plain cluster statistics.
struct BidStats {
  Weight vol_rest = 0;   // vol(C \ v)
  Weight cut_to_v = 0;   // cut(v, C \ v)
  Weight cut_rest = 0;   // cut(C \ v)
};

// Everything needed to evaluate moving one node between two clusters.
struct MoveContext {
  Weight deg_v = 0;
  Weight loop_v = 0;
  Weight vol_total = 0;
  BidStats source;      // current cluster, without v
  BidStats candidate;   // target cluster, without v
  Weight total_cut = 0; // sum of cut(C) over the current clustering; map equation only
};

// Exact score change of moving v from its current cluster into the
// candidate. Positive means modularity improves.
double modularity_delta(const MoveContext& ctx);

// Candidate's attractiveness for the pairwise-reduction path:
// modularity_delta(ctx) == modularity_gain(cand) - modularity_gain(source).
double modularity_gain(const BidStats& stats, Weight deg_v, Weight vol_total);

// Exact change of the optimizer-form map equation; negative means the move
// improves (shortens) the codelength.
double map_equation_delta(const MoveContext& ctx);

// Builds the exact MoveContext for moving v into target_cluster under c,
// by direct inspection of the graph. Reference route for tests and the
// sequential baseline.
MoveContext move_context(const Graph& g, const Clustering& c, NodeId v, ClusterId target_cluster);

}  // namespace dsc
