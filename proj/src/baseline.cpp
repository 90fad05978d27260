#include "dsc/baseline.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "dsc/coarsening.hpp"
#include "dsc/hashing.hpp"

namespace dsc::baseline {

namespace {

constexpr double kImprovementEps = 1e-12;

struct LevelState {
  Clustering assignment;
  std::vector<Weight> vol;
  std::vector<Weight> cut;
  Weight total_cut = 0;
};

LevelState singleton_state(const Graph& g) {
  LevelState s;
  std::size_t n = g.num_nodes();
  s.assignment.resize(n);
  s.vol.resize(n);
  s.cut.resize(n);
  for (NodeId v = 0; v < n; ++v) {
    s.assignment[v] = v;
    s.vol[v] = g.degree(v);
    s.cut[v] = g.degree(v) - 2 * g.loop_weight(v);
    s.total_cut += s.cut[v];
  }
  return s;
}

// One local moving phase; moves are applied immediately.
Clustering phase(const Graph& g, const dslm::Config& cfg, int level, dslm::LevelStats& stats,
                 const MoveObserver& observer) {
  const std::size_t n = g.num_nodes();
  const Weight vol_total = g.total_volume();
  LevelState s = singleton_state(g);
  stats.nodes = n;
  stats.rounds.clear();

  std::vector<NodeId> order(n);
  for (NodeId v = 0; v < n; ++v) order[v] = v;
  const std::uint64_t level_seed = mix64(cfg.seed, 0x736571ULL + static_cast<std::uint64_t>(level));

  for (int round = 0; round < cfg.max_rounds; ++round) {
    SplitMix64 rng(mix64(level_seed, static_cast<std::uint64_t>(round)));
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.next_bounded(i)]);

    std::size_t moves = 0;
    for (NodeId v : order) {
      const ClusterId current = s.assignment[v];
      const Weight deg_v = g.degree(v);
      const Weight deg_ext = deg_v - 2 * g.loop_weight(v);

      std::map<ClusterId, Weight> weight_to;
      auto nbrs = g.neighbors(v);
      auto ws = g.weights(v);
      for (std::size_t e = 0; e < nbrs.size(); ++e)
        if (nbrs[e] != v) weight_to[s.assignment[nbrs[e]]] += ws[e];

      BidStats source;
      const Weight w_to_current = weight_to.count(current) ? weight_to[current] : 0;
      source.vol_rest = s.vol[current] - deg_v;
      source.cut_to_v = w_to_current;
      source.cut_rest = s.cut[current] - deg_ext + 2 * w_to_current;

      bool found = false;
      ClusterId best_cluster = current;
      BidStats best_stats;
      double best_score = 0;
      std::uint64_t best_rank = 0;
      for (const auto& [cand, w_to_cand] : weight_to) {
        if (cand == current) continue;
        BidStats stats_cand{s.vol[cand], w_to_cand, s.cut[cand]};
        double score;
        if (cfg.measure == Measure::modularity) {
          score = modularity_gain(stats_cand, deg_v, vol_total);
        } else {
          MoveContext mv;
          mv.deg_v = deg_v;
          mv.loop_v = g.loop_weight(v);
          mv.vol_total = vol_total;
          mv.source = source;
          mv.candidate = stats_cand;
          mv.total_cut = s.total_cut;
          score = -map_equation_delta(mv);
        }
        std::uint64_t rank = dslm::tie_rank(level_seed, level, round, 0, v, cand);
        bool better = !found || score > best_score ||
                      (score == best_score && (rank < best_rank || (rank == best_rank && cand < best_cluster)));
        if (better) {
          found = true;
          best_cluster = cand;
          best_stats = stats_cand;
          best_score = score;
          best_rank = rank;
        }
      }
      if (!found) continue;

      double improvement = cfg.measure == Measure::modularity
                               ? best_score - modularity_gain(source, deg_v, vol_total)
                               : best_score;
      if (improvement <= kImprovementEps) continue;

      const Weight cut_src_after = source.cut_rest;
      const Weight cut_cand_after = best_stats.cut_rest + deg_ext - 2 * best_stats.cut_to_v;
      s.total_cut += (cut_src_after - s.cut[current]) + (cut_cand_after - s.cut[best_cluster]);
      s.vol[current] -= deg_v;
      s.vol[best_cluster] += deg_v;
      s.cut[current] = cut_src_after;
      s.cut[best_cluster] = cut_cand_after;
      s.assignment[v] = best_cluster;
      ++moves;
      if (observer) observer(cfg.measure == Measure::modularity ? improvement : -improvement);
    }
    stats.rounds.push_back(dslm::RoundStats{moves});
    if (moves == 0) break;
  }
  return s.assignment;
}

}  // namespace

Clustering sequential_local_moving(const Graph& g, const dslm::Config& cfg, dslm::RunStats* stats,
                                   const MoveObserver& observer) {
  std::vector<Membership> level_stack;
  const Graph* cur = &g;
  Graph owned;
  Clustering final_clustering;
  dslm::RunStats run_stats;

  for (int level = 0;; ++level) {
    dslm::LevelStats level_stats;
    Clustering c = phase(*cur, cfg, level, level_stats, observer);
    level_stats.clusters = cluster_count(c);
    run_stats.levels.push_back(level_stats);

    bool is_singleton = level_stats.clusters == cur->num_nodes();
    if (!cfg.contract || is_singleton) {
      final_clustering = std::move(c);
      break;
    }
    ContractionResult contracted = contract(*cur, c);
    level_stack.push_back(std::move(contracted.membership));
    owned = std::move(contracted.graph);
    cur = &owned;
  }

  for (auto it = level_stack.rbegin(); it != level_stack.rend(); ++it)
    final_clustering = unpack(final_clustering, *it);
  normalize_clusters(final_clustering);
  if (stats) *stats = std::move(run_stats);
  return final_clustering;
}

BruteForceResult brute_force_best(const Graph& g, Measure measure) {
  const std::size_t n = g.num_nodes();
  if (n > 10) throw std::invalid_argument("brute_force_best: more than 10 nodes");

  BruteForceResult best;
  best.clustering.assign(n, 0);
  if (n == 0) return best;

  auto score_of = [&](const Clustering& c) {
    return measure == Measure::modularity ? modularity(g, c) : map_equation(g, c, true);
  };

  // Enumerate set partitions as restricted growth strings.
  Clustering labels(n, 0);
  std::vector<ClusterId> max_prefix(n, 0);
  bool first = true;
  for (;;) {
    double score = score_of(labels);
    bool better = first || (measure == Measure::modularity ? score > best.score : score < best.score);
    if (better) {
      best.score = score;
      best.clustering = labels;
    }
    first = false;

    // next restricted growth string
    std::size_t i = n;
    while (i-- > 1) {
      if (labels[i] <= max_prefix[i]) {
        ++labels[i];
        ClusterId m = std::max(max_prefix[i], labels[i]);
        for (std::size_t j = i + 1; j < n; ++j) {
          labels[j] = 0;
          max_prefix[j] = m;
        }
        break;
      }
    }
    if (i == 0) break;  // no position can be incremented: enumeration done
  }
  return best;
}

}  // namespace dsc::baseline
