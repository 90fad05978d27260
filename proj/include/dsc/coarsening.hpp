#pragma once

#include "dsc/dataflow.hpp"
#include "dsc/graph.hpp"

namespace dsc {

// Per contracted node, the finer-level members, sorted by node ID.
// Contracted IDs are consecutive from 0 in order of the old cluster IDs.
using Membership = std::vector<std::vector<NodeId>>;

struct ContractionResult {
  Graph graph;
  Membership membership;
};

// Merges each cluster into one node: inter-cluster weights summed, internal
// weight W turned into a loop of weight W. Empty cluster IDs are skipped
// during compaction. Volume and both quality scores are preserved.
ContractionResult contract(const Graph& g, const Clustering& c);

// Bulk-synchronous contraction over the dataflow layer; every worker
// receives the same result. Matches the sequential route exactly.
std::shared_ptr<const ContractionResult> contract(flow::Worker& w, const Graph& g,
                                                  const flow::DistArray<ClusterId>& c);

// Projects a coarse-level clustering back one level: every finer node in
// membership[x] receives coarse[x].
Clustering unpack(const Clustering& coarse, const Membership& membership);

}  // namespace dsc
