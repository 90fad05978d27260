#include "dsc/coarsening.hpp"

#include <algorithm>
#include <map>

namespace dsc {

namespace {

// Old cluster IDs are replaced by their rank among the occupied IDs, so
// empty clusters vanish and the new IDs are consecutive from 0.
std::pair<Clustering, ClusterId> compact_cluster_ids(const Clustering& c) {
  std::map<ClusterId, ClusterId> rank;
  for (ClusterId x : c) rank.emplace(x, 0);
  ClusterId next = 0;
  for (auto& [old_id, new_id] : rank) new_id = next++;
  Clustering compacted(c.size());
  for (std::size_t v = 0; v < c.size(); ++v) compacted[v] = rank.at(c[v]);
  return {std::move(compacted), next};
}

// Arc emission shared by both routes. Intra-cluster mass is emitted in
// half-loop units: a non-loop arc contributes w/2, a loop w; after duplicate
// merging the loop weight is exactly the internal undirected weight.
void emit_coarse_arcs(const Graph& g, NodeId v, ClusterId cv, const Clustering& node_to_new,
                      std::vector<std::tuple<NodeId, NodeId, Weight>>& out) {
  auto nbrs = g.neighbors(v);
  auto ws = g.weights(v);
  for (std::size_t i = 0; i < nbrs.size(); ++i) {
    ClusterId cu = node_to_new[nbrs[i]];
    if (cu == cv) {
      out.emplace_back(cv, cv, nbrs[i] == v ? ws[i] : ws[i] / 2);
    } else {
      out.emplace_back(cv, cu, ws[i]);
    }
  }
}

}  // namespace

ContractionResult contract(const Graph& g, const Clustering& c) {
  if (c.size() != g.num_nodes()) throw std::invalid_argument("contract: assignment length mismatch");
  auto [node_to_new, num_clusters] = compact_cluster_ids(c);

  Membership membership(num_clusters);
  for (NodeId v = 0; v < node_to_new.size(); ++v) membership[node_to_new[v]].push_back(v);

  std::vector<std::tuple<NodeId, NodeId, Weight>> arcs;
  arcs.reserve(g.num_arcs());
  for (NodeId v = 0; v < node_to_new.size(); ++v) emit_coarse_arcs(g, v, node_to_new[v], node_to_new, arcs);

  return {Graph::from_arcs(num_clusters, std::move(arcs)), std::move(membership)};
}

std::shared_ptr<const ContractionResult> contract(flow::Worker& w, const Graph& g,
                                                  const flow::DistArray<ClusterId>& c) {
  using flow::DistArray;
  const std::size_t n = g.num_nodes();
  if (c.size() != n) throw std::invalid_argument("contract: assignment length mismatch");

  // (old cluster, node) pairs, grouped by cluster; group positions become
  // the consecutive new IDs.
  auto pairs = flow::dmap_indexed(w, c, [](ClusterId cid, std::size_t v) {
    return std::pair<ClusterId, NodeId>(cid, static_cast<NodeId>(v));
  });
  auto groups = flow::aggregate_by_key(
      w, pairs, [](const auto& p) { return p.first; }, [](const auto& p) { return p.second; });

  // New clustering, sorted by node.
  auto relabeled = flow::dmap_indexed(w, groups, [](const auto& group, std::size_t pos) {
    std::vector<std::pair<NodeId, ClusterId>> out;
    out.reserve(group.second.size());
    for (const auto& p : group.second) out.emplace_back(p.second, static_cast<ClusterId>(pos));
    return out;
  });
  auto node_cluster_pairs = flow::flat_map(w, relabeled, [](const auto& v) { return v; });
  auto by_node = flow::sort_by_key(w, node_cluster_pairs, [](const auto& p) { return p.first; });
  auto node_to_new = flow::dmap(w, by_node, [](const auto& p) { return p.second; });

  // Coarse arc triples, merged into the contracted graph.
  flow::Indexer<ClusterId> assignment(node_to_new);
  auto arcs = flow::dmap_indexed(w, node_to_new, [&](ClusterId cv, std::size_t v) {
    std::vector<std::tuple<NodeId, NodeId, Weight>> out;
    auto nbrs = g.neighbors(static_cast<NodeId>(v));
    auto ws = g.weights(static_cast<NodeId>(v));
    out.reserve(nbrs.size());
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      ClusterId cu = assignment[nbrs[i]];
      if (cu == cv) {
        out.emplace_back(cv, cv, nbrs[i] == static_cast<NodeId>(v) ? ws[i] : ws[i] / 2);
      } else {
        out.emplace_back(cv, cu, ws[i]);
      }
    }
    return out;
  });
  auto arc_list = flow::flat_map(w, arcs, [](const auto& v) { return v; });

  return w.once<ContractionResult>([&] {
    ContractionResult result;
    std::size_t num_clusters = groups.size();
    result.graph = Graph::from_arcs(num_clusters, arc_list.gather());
    result.membership.resize(num_clusters);
    std::size_t pos = 0;
    for (const auto& part : groups.parts()) {
      for (const auto& [old_id, members] : part) {
        auto& list = result.membership[pos++];
        list.reserve(members.size());
        for (const auto& p : members) list.push_back(p.second);
      }
    }
    return result;
  });
}

Clustering unpack(const Clustering& coarse, const Membership& membership) {
  if (coarse.size() != membership.size())
    throw std::invalid_argument("unpack: coarse clustering and membership size mismatch");
  std::size_t n = 0;
  for (const auto& members : membership) n += members.size();
  Clustering finer(n, 0);
  std::vector<bool> seen(n, false);
  for (std::size_t x = 0; x < membership.size(); ++x) {
    for (NodeId v : membership[x]) {
      if (v >= n || seen[v]) throw std::invalid_argument("unpack: membership does not partition the node set");
      finer[v] = coarse[x];
      seen[v] = true;
    }
  }
  return finer;
}

}  // namespace dsc
