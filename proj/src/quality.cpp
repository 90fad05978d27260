#include "dsc/quality.hpp"

#include <cmath>
#include <stdexcept>

namespace dsc {

double plogp(double x) {
  constexpr double kSlack = 1e-9;
  if (x < 0) {
    if (x < -kSlack) throw std::domain_error("plogp: argument below 0");
    return 0;
  }
  if (x > 1) {
    if (x > 1 + kSlack) throw std::domain_error("plogp: argument above 1");
    return 0;
  }
  if (x == 0) return 0;
  return x * std::log2(x);
}

double modularity(const Graph& g, const Clustering& c) {
  Weight vol_total = g.total_volume();
  if (vol_total == 0) return 0;
  double q = 0;
  for (const ClusterSummary& s : cluster_stats(g, c)) {
    q += (s.vol - s.cut) / vol_total;
    q -= (s.vol / vol_total) * (s.vol / vol_total);
  }
  return q;
}

double map_equation(const Graph& g, const Clustering& c, bool include_node_term) {
  Weight vol_total = g.total_volume();
  if (vol_total == 0) return 0;

  double total_cut_rel = 0;
  double cluster_terms = 0;
  for (const ClusterSummary& s : cluster_stats(g, c)) {
    double cut_rel = s.cut / vol_total;
    total_cut_rel += cut_rel;
    cluster_terms += -2 * plogp(cut_rel) + plogp((s.cut + s.vol) / vol_total);
  }
  double l = plogp(total_cut_rel) + cluster_terms;
  if (include_node_term) {
    for (NodeId v = 0; v < g.num_nodes(); ++v) l -= plogp(g.degree(v) / vol_total);
  }
  return l;
}

double modularity_gain(const BidStats& stats, Weight deg_v, Weight vol_total) {
  return 2 * (stats.cut_to_v - deg_v * stats.vol_rest / vol_total) / vol_total;
}

double modularity_delta(const MoveContext& ctx) {
  return modularity_gain(ctx.candidate, ctx.deg_v, ctx.vol_total) -
         modularity_gain(ctx.source, ctx.deg_v, ctx.vol_total);
}

double map_equation_delta(const MoveContext& ctx) {
  const Weight vol_total = ctx.vol_total;
  const Weight deg_ext = ctx.deg_v - 2 * ctx.loop_v;  // weight v sends outside itself

  // Current clusters: v inside the source, outside the candidate.
  const Weight cut_src_before = ctx.source.cut_rest + deg_ext - 2 * ctx.source.cut_to_v;
  const Weight vol_src_before = ctx.source.vol_rest + ctx.deg_v;
  const Weight cut_cand_before = ctx.candidate.cut_rest;
  const Weight vol_cand_before = ctx.candidate.vol_rest;

  // After the move: v leaves the source, joins the candidate.
  const Weight cut_src_after = ctx.source.cut_rest;
  const Weight vol_src_after = ctx.source.vol_rest;
  const Weight cut_cand_after = ctx.candidate.cut_rest + deg_ext - 2 * ctx.candidate.cut_to_v;
  const Weight vol_cand_after = ctx.candidate.vol_rest + ctx.deg_v;

  // Grouping the differences per cluster keeps the delta exactly zero when
  // source and candidate statistics coincide: the two changes are then exact
  // floating-point negations of each other.
  const Weight cut_change =
      (cut_src_after - cut_src_before) + (cut_cand_after - cut_cand_before);
  const double total_cut_after = ctx.total_cut + cut_change;

  auto cluster_terms = [vol_total](Weight cut, Weight vol) {
    return -2 * plogp(cut / vol_total) + plogp((cut + vol) / vol_total);
  };
  const double src_change = cluster_terms(cut_src_after, vol_src_after) -
                            cluster_terms(cut_src_before, vol_src_before);
  const double cand_change = cluster_terms(cut_cand_after, vol_cand_after) -
                             cluster_terms(cut_cand_before, vol_cand_before);
  return (plogp(total_cut_after / vol_total) - plogp(ctx.total_cut / vol_total)) +
         (src_change + cand_change);
}

MoveContext move_context(const Graph& g, const Clustering& c, NodeId v, ClusterId target_cluster) {
  MoveContext ctx;
  ctx.deg_v = g.degree(v);
  ctx.loop_v = g.loop_weight(v);
  ctx.vol_total = g.total_volume();

  const ClusterId source_cluster = c[v];
  auto stats = cluster_stats(g, c);

  Weight cut_v_src = 0, cut_v_cand = 0;
  auto nbrs = g.neighbors(v);
  auto ws = g.weights(v);
  for (std::size_t i = 0; i < nbrs.size(); ++i) {
    if (nbrs[i] == v) continue;
    if (c[nbrs[i]] == source_cluster) cut_v_src += ws[i];
    if (c[nbrs[i]] == target_cluster) cut_v_cand += ws[i];
  }

  const Weight deg_ext = ctx.deg_v - 2 * ctx.loop_v;
  const auto& src = stats[source_cluster];
  ctx.source.vol_rest = src.vol - ctx.deg_v;
  ctx.source.cut_to_v = cut_v_src;
  ctx.source.cut_rest = src.cut - deg_ext + 2 * cut_v_src;

  if (target_cluster == source_cluster) {
    ctx.candidate = ctx.source;
  } else if (target_cluster < stats.size()) {
    const auto& cand = stats[target_cluster];
    ctx.candidate.vol_rest = cand.vol;
    ctx.candidate.cut_to_v = cut_v_cand;
    ctx.candidate.cut_rest = cand.cut;
  }
  // else: target cluster is empty, all-zero candidate stats are already right

  ctx.total_cut = 0;
  for (const ClusterSummary& s : stats) ctx.total_cut += s.cut;
  return ctx;
}

}  // namespace dsc
