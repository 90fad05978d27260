#include "dsc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "dsc/hashing.hpp"
#include "dsc/quality.hpp"

namespace dsc::eval {

namespace {

double comb2(double k) { return k * (k - 1) / 2; }

}  // namespace

double ari(const Clustering& x, const Clustering& y) {
  if (x.size() != y.size()) throw std::invalid_argument("ari: clusterings cover different node sets");
  const std::size_t n = x.size();
  if (n == 0) return 1;

  Clustering xn = x, yn = y;
  ClusterId kx = normalize_clusters(xn);
  ClusterId ky = normalize_clusters(yn);

  std::unordered_map<std::uint64_t, std::size_t> cells;
  std::vector<std::size_t> row(kx, 0), col(ky, 0);
  for (std::size_t v = 0; v < n; ++v) {
    ++cells[(static_cast<std::uint64_t>(xn[v]) << 32) | yn[v]];
    ++row[xn[v]];
    ++col[yn[v]];
  }

  double sum_cells = 0, sum_rows = 0, sum_cols = 0;
  for (const auto& [key, count] : cells) sum_cells += comb2(static_cast<double>(count));
  for (std::size_t a : row) sum_rows += comb2(static_cast<double>(a));
  for (std::size_t b : col) sum_cols += comb2(static_cast<double>(b));

  double expected = sum_rows * sum_cols / comb2(static_cast<double>(n));
  double max_index = (sum_rows + sum_cols) / 2;
  if (max_index == expected) return 1;  // both trivial (e.g. all singletons vs all singletons)
  return (sum_cells - expected) / (max_index - expected);
}

PlantedPartition generate_planted_partition(const PlantedPartitionSpec& spec) {
  if (!(spec.p_out <= spec.p_in) || spec.p_in > 1 || spec.p_out < 0)
    throw std::invalid_argument("planted partition: need 0 <= p_out <= p_in <= 1");
  if (spec.clusters == 0) throw std::invalid_argument("planted partition: need at least one cluster");

  const std::size_t n = spec.nodes;
  PlantedPartition out;
  out.truth.resize(n);
  for (std::size_t v = 0; v < n; ++v) out.truth[v] = static_cast<ClusterId>(v * spec.clusters / std::max<std::size_t>(n, 1));

  std::vector<std::tuple<NodeId, NodeId, Weight>> edges;
  SplitMix64 rng(mix64(spec.seed, 0x70706765ULL));
  auto sample_pairs = [&](double p, auto&& accept) {
    // visits each pair (i<j) independently with probability p
    if (p <= 0) return;
    if (n <= 10000 && p > 0.01) {
      for (NodeId i = 0; i < n; ++i)
        for (NodeId j = i + 1; j < n; ++j)
          if (rng.next_double() < p) accept(i, j);
    } else {
      // geometric skipping over the linearized strict upper triangle
      const double log1mp = std::log1p(-p);
      std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
      std::uint64_t idx = 0;
      for (;;) {
        double u = rng.next_double();
        std::uint64_t skip = p >= 1 ? 0 : static_cast<std::uint64_t>(std::floor(std::log1p(-u) / log1mp));
        if (skip >= total - idx) break;
        idx += skip;
        // unrank pair index
        double fi = (2.0 * n - 1 - std::sqrt((2.0 * n - 1) * (2.0 * n - 1) - 8.0 * idx)) / 2.0;
        NodeId i = static_cast<NodeId>(fi);
        while (static_cast<std::uint64_t>(i + 1) * (2 * n - i - 2) / 2 <= idx) ++i;
        while (static_cast<std::uint64_t>(i) * (2 * n - i - 1) / 2 > idx) --i;
        NodeId j = static_cast<NodeId>(idx - static_cast<std::uint64_t>(i) * (2 * n - i - 1) / 2 + i + 1);
        accept(i, j);
        ++idx;
        if (idx >= total) break;
      }
    }
  };

  // Intra pairs at p_in; the complementary inter pairs at p_out. Sampling
  // all pairs at p_out and discarding intra hits leaves the inter pairs
  // exactly Bernoulli(p_out).
  sample_pairs(spec.p_in, [&](NodeId i, NodeId j) {
    if (out.truth[i] == out.truth[j]) edges.emplace_back(i, j, 1.0);
  });
  sample_pairs(spec.p_out, [&](NodeId i, NodeId j) {
    if (out.truth[i] != out.truth[j]) edges.emplace_back(i, j, 1.0);
  });

  out.graph = Graph::from_edges(n, edges);
  return out;
}

double measured_mixing(const Graph& g, const Clustering& truth) {
  Weight inter = 0, total = 0;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    auto nbrs = g.neighbors(v);
    auto ws = g.weights(v);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      if (nbrs[i] == v) continue;
      total += ws[i];
      if (truth[nbrs[i]] != truth[v]) inter += ws[i];
    }
  }
  return total == 0 ? 0 : inter / total;
}

Report report(const Graph& g, const Clustering& c) {
  Report r;
  r.modularity = modularity(g, c);
  r.map_equation = map_equation(g, c, true);

  Clustering normalized = c;
  ClusterId k = normalize_clusters(normalized);
  r.clusters = k;
  if (k == 0) return r;
  std::vector<std::size_t> sizes(k, 0);
  for (ClusterId x : normalized) ++sizes[x];
  r.min_cluster_size = *std::min_element(sizes.begin(), sizes.end());
  r.max_cluster_size = *std::max_element(sizes.begin(), sizes.end());
  r.mean_cluster_size = static_cast<double>(normalized.size()) / k;
  return r;
}

}  // namespace dsc::eval
