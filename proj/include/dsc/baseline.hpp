#pragma once

#include <functional>

#include "dsc/dslm.hpp"
#include "dsc/graph.hpp"
#include "dsc/quality.hpp"

namespace dsc::baseline {

// Called after every accepted move with the exact score change.
using MoveObserver = std::function<void(double delta)>;

// Classic sequential Louvain loop: node-at-a-time over a seeded random
// order, moves take effect immediately, full multi-level with contraction.
// Uses the same measures, epsilon and tie breaking as the DSLM engine.
Clustering sequential_local_moving(const Graph& g, const dslm::Config& cfg,
                                   dslm::RunStats* stats = nullptr, const MoveObserver& observer = {});

// Exact optimum by enumeration of all set partitions; n <= 10.
struct BruteForceResult {
  Clustering clustering;
  double score = 0;  // modularity (higher better) or full map equation (lower better)
};

BruteForceResult brute_force_best(const Graph& g, Measure measure);

}  // namespace dsc::baseline
