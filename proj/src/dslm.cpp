#include "dsc/dslm.hpp"

#include <algorithm>
#include <map>

#include "dsc/coarsening.hpp"
#include "dsc/hashing.hpp"

namespace dsc::dslm {

namespace {

constexpr double kImprovementEps = 1e-12;

}  // namespace

int subround_of(NodeId v, int round, std::uint64_t seed, int k) {
  if (k == 1) return 0;
  return static_cast<int>(mix64(mix64(seed, static_cast<std::uint64_t>(round)), v) % static_cast<std::uint64_t>(k));
}

std::uint64_t tie_rank(std::uint64_t seed, int level, int round, int sub_round, NodeId v, ClusterId cluster) {
  std::uint64_t coords = (static_cast<std::uint64_t>(level) << 48) ^
                         (static_cast<std::uint64_t>(round) << 32) ^
                         (static_cast<std::uint64_t>(sub_round) << 16);
  return mix64(mix64(seed, coords), (static_cast<std::uint64_t>(v) << 32) ^ cluster);
}

flow::DistArray<Bid> bidding_step(flow::Worker& w, const Graph& g, const flow::DistArray<ClusterId>& c,
                                  const SubroundCtx& ctx) {
  auto pairs = flow::dmap_indexed(w, c, [](ClusterId cid, std::size_t v) {
    return std::pair<ClusterId, NodeId>(cid, static_cast<NodeId>(v));
  });
  auto groups = flow::aggregate_by_key(
      w, pairs, [](const auto& p) { return p.first; }, [](const auto& p) { return p.second; });

  return flow::flat_map(w, groups, [&g, &ctx](const std::pair<ClusterId, std::vector<std::pair<ClusterId, NodeId>>>& group) {
    const ClusterId cid = group.first;
    std::vector<NodeId> members;
    members.reserve(group.second.size());
    for (const auto& p : group.second) members.push_back(p.second);

    auto in_cluster = [&members](NodeId u) {
      return std::binary_search(members.begin(), members.end(), u);
    };

    // Exact cluster statistics from the group's local view of the graph.
    Weight vol_c = 0, cut_c = 0;
    std::vector<Weight> internal(members.size(), 0);  // cut(v, C\v) per member
    std::map<NodeId, Weight> external;                // cut(x, C) per active outside neighbor
    for (std::size_t mi = 0; mi < members.size(); ++mi) {
      NodeId v = members[mi];
      vol_c += g.degree(v);
      auto nbrs = g.neighbors(v);
      auto ws = g.weights(v);
      for (std::size_t i = 0; i < nbrs.size(); ++i) {
        NodeId u = nbrs[i];
        if (u == v) continue;
        if (in_cluster(u)) {
          internal[mi] += ws[i];
        } else if (ctx.active(u)) {
          external[u] += ws[i];
        }
      }
      cut_c += g.degree(v) - 2 * g.loop_weight(v) - internal[mi];
    }

    std::vector<Bid> bids;
    for (std::size_t mi = 0; mi < members.size(); ++mi) {
      NodeId v = members[mi];
      if (!ctx.active(v)) continue;
      Weight deg_ext = g.degree(v) - 2 * g.loop_weight(v);
      Bid bid;
      bid.cluster = cid;
      bid.node = v;
      bid.stats.vol_rest = vol_c - g.degree(v);
      bid.stats.cut_to_v = internal[mi];
      bid.stats.cut_rest = cut_c - deg_ext + 2 * internal[mi];
      bids.push_back(bid);
    }
    for (const auto& [x, weight_to_c] : external) {
      Bid bid;
      bid.cluster = cid;
      bid.node = x;
      bid.stats.vol_rest = vol_c;
      bid.stats.cut_to_v = weight_to_c;
      bid.stats.cut_rest = cut_c;
      bids.push_back(bid);
    }
    return bids;
  });
}

double total_cut(flow::Worker& w, const Graph& g, const flow::DistArray<ClusterId>& c) {
  flow::Indexer<ClusterId> assignment(c);
  auto per_node = flow::dmap_indexed(w, c, [&g, &assignment](ClusterId cid, std::size_t v) {
    double out = 0;
    auto nbrs = g.neighbors(static_cast<NodeId>(v));
    auto ws = g.weights(static_cast<NodeId>(v));
    for (std::size_t i = 0; i < nbrs.size(); ++i)
      if (assignment[nbrs[i]] != cid) out += ws[i];
    return out;
  });
  return flow::all_reduce_sum(w, per_node);
}

namespace {

// Strict total order on candidate bids: higher score wins, ties fall to the
// pseudo-random rank, then to the cluster ID.
struct Candidate {
  bool present = false;
  ClusterId cluster = 0;
  BidStats stats;
  double score = 0;
  std::uint64_t rank = 0;

  bool beats(const Candidate& other) const {
    if (!other.present) return present;
    if (!present) return false;
    if (score != other.score) return score > other.score;
    if (rank != other.rank) return rank < other.rank;
    return cluster < other.cluster;
  }
};

// Reduction state of the modularity fast path: best candidate so far plus
// the node's own cluster's bid.
struct ReducedBids {
  Candidate best;
  bool has_source = false;
  BidStats source;
};

ClusterId select_cluster(const Graph& g, NodeId v, ClusterId current, const Candidate& best,
                         bool has_source, const BidStats& source, const Config& cfg) {
  if (!has_source)
    throw std::logic_error("compare_step: active node " + std::to_string(v) + " missing its own cluster's bid");
  if (!best.present) return current;

  double improvement;
  if (cfg.measure == Measure::modularity) {
    improvement = best.score - modularity_gain(source, g.degree(v), g.total_volume());
  } else {
    improvement = best.score;  // already -delta relative to the source
  }
  return improvement > kImprovementEps ? best.cluster : current;
}

flow::DistArray<ClusterId> compare_step_reference(flow::Worker& w, const Graph& g,
                                                  const flow::DistArray<ClusterId>& c,
                                                  const flow::DistArray<Bid>& bids, double total_cut_value,
                                                  const Config& cfg, const SubroundCtx& ctx) {
  auto per_node = flow::aggregate_to_index(
      w, bids, [](const Bid& b) { return static_cast<std::uint64_t>(b.node); }, g.num_nodes(),
      [](const Bid& b) { return b.cluster; });

  auto zipped = flow::zip(w, per_node, c);
  return flow::dmap(w, zipped, [&g, &cfg, &ctx, total_cut_value](const auto& entry) {
    const NodeId v = static_cast<NodeId>(entry.first.first);
    const std::vector<Bid>& node_bids = entry.first.second;
    const ClusterId current = entry.second;
    if (!ctx.active(v)) return current;

    bool has_source = false;
    BidStats source;
    for (const Bid& b : node_bids) {
      if (b.cluster == current) {
        has_source = true;
        source = b.stats;
        break;
      }
    }
    if (!has_source)
      throw std::logic_error("compare_step: active node " + std::to_string(v) + " missing its own cluster's bid");

    Candidate best;
    for (const Bid& b : node_bids) {
      if (b.cluster == current) continue;
      Candidate cand;
      cand.present = true;
      cand.cluster = b.cluster;
      cand.stats = b.stats;
      cand.rank = tie_rank(ctx.seed, ctx.level, ctx.round, ctx.sub_round, v, b.cluster);
      if (cfg.measure == Measure::modularity) {
        cand.score = modularity_gain(b.stats, g.degree(v), g.total_volume());
      } else {
        MoveContext mv;
        mv.deg_v = g.degree(v);
        mv.loop_v = g.loop_weight(v);
        mv.vol_total = g.total_volume();
        mv.source = source;
        mv.candidate = b.stats;
        mv.total_cut = total_cut_value;
        cand.score = -map_equation_delta(mv);
      }
      if (cand.beats(best)) best = cand;
    }
    return select_cluster(g, v, current, best, has_source, source, cfg);
  });
}

flow::DistArray<ClusterId> compare_step_fast_modularity(flow::Worker& w, const Graph& g,
                                                        const flow::DistArray<ClusterId>& c,
                                                        const flow::DistArray<Bid>& bids,
                                                        const Config& cfg, const SubroundCtx& ctx) {
  flow::Indexer<ClusterId> assignment(c);
  auto fold = [&g, &ctx, &assignment](ReducedBids acc, const Bid& b) {
    if (b.cluster == assignment[b.node]) {
      acc.has_source = true;
      acc.source = b.stats;
      return acc;
    }
    Candidate cand;
    cand.present = true;
    cand.cluster = b.cluster;
    cand.stats = b.stats;
    cand.score = modularity_gain(b.stats, g.degree(b.node), g.total_volume());
    cand.rank = tie_rank(ctx.seed, ctx.level, ctx.round, ctx.sub_round, b.node, b.cluster);
    if (cand.beats(acc.best)) acc.best = cand;
    return acc;
  };
  auto merge = [](ReducedBids a, const ReducedBids& b) {
    if (b.has_source) {
      a.has_source = true;
      a.source = b.source;
    }
    if (b.best.beats(a.best)) a.best = b.best;
    return a;
  };
  auto reduced = flow::aggregate_to_index_reduce(
      w, bids, [](const Bid& b) { return static_cast<std::uint64_t>(b.node); }, g.num_nodes(), ReducedBids{},
      fold, merge);

  auto zipped = flow::zip(w, reduced, c);
  return flow::dmap(w, zipped, [&g, &cfg, &ctx](const auto& entry) {
    const NodeId v = static_cast<NodeId>(entry.first.first);
    const ReducedBids& r = entry.first.second;
    const ClusterId current = entry.second;
    if (!ctx.active(v)) return current;
    return select_cluster(g, v, current, r.best, r.has_source, r.source, cfg);
  });
}

}  // namespace

flow::DistArray<ClusterId> compare_step(flow::Worker& w, const Graph& g, const flow::DistArray<ClusterId>& c,
                                        const flow::DistArray<Bid>& bids, double total_cut_value,
                                        const Config& cfg, const SubroundCtx& ctx) {
  if (cfg.measure == Measure::modularity && cfg.fast_modularity_path)
    return compare_step_fast_modularity(w, g, c, bids, cfg, ctx);
  return compare_step_reference(w, g, c, bids, total_cut_value, cfg, ctx);
}

flow::DistArray<ClusterId> local_moving_phase(flow::Worker& w, const Graph& g, const Config& cfg, int level,
                                              LevelStats& stats,
                                              std::optional<flow::DistArray<ClusterId>> initial) {
  const std::size_t n = g.num_nodes();
  auto c = initial ? *initial
                   : flow::generate(w, n, [](std::size_t i) { return static_cast<ClusterId>(i); });
  stats.nodes = n;
  stats.rounds.clear();

  const std::uint64_t level_seed = mix64(cfg.seed, 0x6c6f63616cULL + static_cast<std::uint64_t>(level));
  for (int round = 0; round < cfg.max_rounds; ++round) {
    std::size_t moves_in_round = 0;
    for (int sub = 0; sub < cfg.sub_rounds; ++sub) {
      SubroundCtx ctx{level_seed, level, round, sub, cfg.sub_rounds};
      double tc = cfg.measure == Measure::map_equation ? total_cut(w, g, c) : 0.0;
      auto bids = bidding_step(w, g, c, ctx);
      auto next = compare_step(w, g, c, bids, tc, cfg, ctx);

      auto changed = flow::dmap(w, flow::zip(w, next, c),
                                [](const std::pair<ClusterId, ClusterId>& p) { return p.first != p.second ? 1 : 0; });
      moves_in_round += static_cast<std::size_t>(flow::all_reduce_sum(w, changed));
      c = next;
    }
    stats.rounds.push_back(RoundStats{moves_in_round});
    if (moves_in_round == 0) break;
  }
  return c;
}

Clustering run(const Graph& g, const Config& cfg, RunStats* stats) {
  if (cfg.sub_rounds < 1 || cfg.max_rounds < 1 || cfg.workers < 1)
    throw std::invalid_argument("run_dslm: sub_rounds, max_rounds and workers must be positive");

  Clustering result;
  RunStats run_stats;
  flow::WorkerPool pool(cfg.workers, cfg.seed);
  pool.run([&](flow::Worker& w) {
    std::shared_ptr<const Graph> cur(std::shared_ptr<void>{}, &g);  // non-owning view of the input
    std::vector<std::shared_ptr<const ContractionResult>> level_stack;

    Clustering final_clustering;
    for (int level = 0;; ++level) {
      LevelStats level_stats;
      auto cdia = local_moving_phase(w, *cur, cfg, level, level_stats);
      Clustering clustering = cdia.gather();
      level_stats.clusters = cluster_count(clustering);
      if (w.id == 0) run_stats.levels.push_back(level_stats);

      bool is_singleton = level_stats.clusters == cur->num_nodes();
      if (!cfg.contract || is_singleton) {
        final_clustering = std::move(clustering);
        break;
      }
      auto contracted = contract(w, *cur, cdia);
      level_stack.push_back(contracted);
      cur = std::shared_ptr<const Graph>(contracted, &contracted->graph);
    }

    if (w.id == 0) {
      for (auto it = level_stack.rbegin(); it != level_stack.rend(); ++it)
        final_clustering = unpack(final_clustering, (*it)->membership);
      normalize_clusters(final_clustering);
      result = std::move(final_clustering);
    }
  });

  if (stats) *stats = std::move(run_stats);
  return result;
}

}  // namespace dsc::dslm
