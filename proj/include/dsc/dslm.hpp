#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "dsc/dataflow.hpp"
#include "dsc/graph.hpp"
#include "dsc/quality.hpp"

namespace dsc::dslm {

// Quintuple a cluster sends to an active node so the node can evaluate
// joining: (C, v, vol(C\v), cut(v, C\v), cut(C\v)).
struct Bid {
  ClusterId cluster = 0;
  NodeId node = 0;
  BidStats stats;
};

struct Config {
  Measure measure = Measure::modularity;
  int sub_rounds = 4;
  int max_rounds = 8;
  bool contract = true;
  std::uint64_t seed = 0;
  int workers = 1;
  // Pairwise-reduction bid selection for modularity. Produces clusterings
  // identical to the reference path.
  bool fast_modularity_path = true;
};

struct RoundStats {
  std::size_t moves = 0;
};

struct LevelStats {
  std::size_t nodes = 0;
  std::size_t clusters = 0;
  std::vector<RoundStats> rounds;
};

struct RunStats {
  std::vector<LevelStats> levels;
};

// Deterministic sub-round assignment: depends only on (v, round, seed, k).
int subround_of(NodeId v, int round, std::uint64_t seed, int k);

// Deterministic stand-in for uniform random tie breaking between equally
// good candidate clusters.
std::uint64_t tie_rank(std::uint64_t seed, int level, int round, int sub_round, NodeId v, ClusterId cluster);

// Coordinates identifying one sub-round within a run.
struct SubroundCtx {
  std::uint64_t seed = 0;
  int level = 0;
  int round = 0;
  int sub_round = 0;
  int sub_rounds = 1;

  bool active(NodeId v) const { return subround_of(v, round, seed, sub_rounds) == sub_round; }
};

// One bid per (cluster, active node in or adjacent to the cluster), with
// exact statistics computed inside the cluster's group.
flow::DistArray<Bid> bidding_step(flow::Worker& w, const Graph& g, const flow::DistArray<ClusterId>& c,
                                  const SubroundCtx& ctx);

// Sum of cut(C) over all clusters of the current clustering, identical on
// every worker.
double total_cut(flow::Worker& w, const Graph& g, const flow::DistArray<ClusterId>& c);

// Every active node adopts the best strictly improving bid; inactive nodes
// keep their cluster. `total_cut_value` is only read for the map equation.
flow::DistArray<ClusterId> compare_step(flow::Worker& w, const Graph& g, const flow::DistArray<ClusterId>& c,
                                        const flow::DistArray<Bid>& bids, double total_cut_value,
                                        const Config& cfg, const SubroundCtx& ctx);

// Rounds of sub-rounds starting from the singleton clustering (or `initial`
// when given); stops after a full round without moves or after max_rounds.
flow::DistArray<ClusterId> local_moving_phase(flow::Worker& w, const Graph& g, const Config& cfg, int level,
                                              LevelStats& stats,
                                              std::optional<flow::DistArray<ClusterId>> initial = {});

// Full multi-level pipeline: local moving, contraction, recursion, then
// unpacking through the stored memberships. With cfg.contract == false the
// first phase's clustering is returned directly.
Clustering run(const Graph& g, const Config& cfg, RunStats* stats = nullptr);

}  // namespace dsc::dslm
