// Acceptance suite: end-to-end checks of the clustering engine against
// independent recomputation, enumeration, and ground-truth benchmarks.
// Prints one PASS/FAIL line per criterion; exit code 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <vector>

#include "dsc/baseline.hpp"
#include "dsc/coarsening.hpp"
#include "dsc/dslm.hpp"
#include "dsc/eval.hpp"
#include "dsc/hashing.hpp"
#include "dsc/quality.hpp"

using namespace dsc;

namespace {

int checks_failed = 0;

void expect(bool ok, const char* what) {
  if (!ok) {
    ++checks_failed;
    std::printf("    failed: %s\n", what);
  }
}

Graph random_graph(std::size_t n, double p, std::uint64_t seed) {
  SplitMix64 rng(mix64(seed, 0x677261ULL));
  std::vector<std::tuple<NodeId, NodeId, Weight>> edges;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i; j < n; ++j)
      if (rng.next_double() < p) edges.emplace_back(i, j, 1.0);
  return Graph::from_edges(n, edges);
}

Clustering random_clustering(std::size_t n, std::size_t max_clusters, std::uint64_t seed) {
  SplitMix64 rng(mix64(seed, 0x636c75ULL));
  Clustering c(n);
  for (std::size_t v = 0; v < n; ++v) c[v] = static_cast<ClusterId>(rng.next_bounded(max_clusters));
  return c;
}

Graph barbell6() {
  return Graph::from_edges(6, {{0, 1, 1}, {0, 2, 1}, {1, 2, 1}, {3, 4, 1}, {3, 5, 1}, {4, 5, 1}, {2, 3, 1}});
}

// ---------------------------------------------------------------------------
// 1. Incremental move deltas against from-scratch recomputation.

void criterion_delta_oracle() {
  constexpr double kTol = 1e-9;
  int cases = 0;
  for (std::uint64_t seed = 0; cases < 1000; ++seed) {
    std::size_t n = 10 + seed % 51;  // up to 60 nodes
    Graph g = random_graph(n, 0.15, seed);
    if (g.total_volume() == 0) continue;
    Clustering c = random_clustering(n, 2 + seed % 7, seed);
    SplitMix64 rng(mix64(seed, 0x64656cULL));
    for (int t = 0; t < 10; ++t, ++cases) {
      NodeId v = static_cast<NodeId>(rng.next_bounded(n));
      ClusterId target = static_cast<ClusterId>(rng.next_bounded(9));
      MoveContext ctx = move_context(g, c, v, target);

      double q_before = modularity(g, c);
      double l_before = map_equation(g, c, false);
      Clustering moved = c;
      moved[v] = target;
      expect(std::abs(modularity_delta(ctx) - (modularity(g, moved) - q_before)) <= kTol,
             "modularity delta deviates from recomputation");
      expect(std::abs(map_equation_delta(ctx) - (map_equation(g, moved, false) - l_before)) <= kTol,
             "map equation delta deviates from recomputation");
      c = std::move(moved);
    }
  }
}

// ---------------------------------------------------------------------------
// 2. Contracting a clustering leaves both quality scores unchanged.

void criterion_contraction_neutrality() {
  constexpr double kTol = 1e-9;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    std::size_t n = 10 + seed % 51;
    Graph g = random_graph(n, 0.12, mix64(seed, 2));
    if (g.total_volume() == 0) continue;
    Clustering c = random_clustering(n, 2 + seed % 8, seed);
    auto [coarse, membership] = contract(g, c);
    Clustering singletons(coarse.num_nodes());
    std::iota(singletons.begin(), singletons.end(), 0);
    expect(std::abs(modularity(g, c) - modularity(coarse, singletons)) <= kTol,
           "modularity changes under contraction");
    expect(std::abs(map_equation(g, c, false) - map_equation(coarse, singletons, false)) <= kTol,
           "map equation (optimizer form) changes under contraction");
  }
}

// ---------------------------------------------------------------------------
// 3. Both engine configurations find the enumerated optimum of barbell6.

void criterion_exact_optimum() {
  Graph g = barbell6();
  auto mod_best = baseline::brute_force_best(g, Measure::modularity);
  auto map_best = baseline::brute_force_best(g, Measure::map_equation);
  expect(std::abs(mod_best.score - 0.357142857) <= 1e-8, "enumerated modularity optimum off");
  expect(std::abs(map_best.score - 2.320731) <= 1e-5, "enumerated map equation optimum off");

  const Clustering expected{0, 0, 0, 1, 1, 1};
  for (Measure m : {Measure::modularity, Measure::map_equation}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      dslm::Config cfg;
      cfg.measure = m;
      cfg.seed = seed;
      cfg.workers = 2;
      expect(dslm::run(g, cfg) == expected, "engine misses the barbell6 optimum");
    }
  }
}

// ---------------------------------------------------------------------------
// 4. Ground-truth recovery on planted partitions at two mixing levels.

eval::PlantedPartition benchmark_instance(double p_out, std::uint64_t seed) {
  eval::PlantedPartitionSpec spec;
  spec.nodes = 2000;
  spec.clusters = 40;  // blocks of 50
  spec.p_in = 0.4;
  spec.p_out = p_out;
  spec.seed = seed;
  return eval::generate_planted_partition(spec);
}

// p_out chosen so the expected mixing (inter volume / total volume) is the
// given value: inter degree 1950 * p_out vs intra degree 49 * 0.4.
double p_out_for_mixing(double mu) { return 49 * 0.4 * mu / (1 - mu) / 1950; }

double mean_ari(double p_out, Measure m, double* mean_mixing = nullptr) {
  double ari_sum = 0, mix_sum = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto pp = benchmark_instance(p_out, seed);
    dslm::Config cfg;
    cfg.measure = m;
    cfg.seed = seed;
    cfg.workers = 4;
    ari_sum += eval::ari(dslm::run(pp.graph, cfg), pp.truth);
    mix_sum += eval::measured_mixing(pp.graph, pp.truth);
  }
  if (mean_mixing) *mean_mixing = mix_sum / 5;
  return ari_sum / 5;
}

void criterion_ground_truth() {
  const double p_out_low = p_out_for_mixing(0.3);
  const double p_out_high = p_out_for_mixing(0.6);

  double mixing_low = 0, mixing_high = 0;
  double ari_map_low = mean_ari(p_out_low, Measure::map_equation, &mixing_low);
  double ari_mod_low = mean_ari(p_out_low, Measure::modularity);
  double ari_map_high = mean_ari(p_out_high, Measure::map_equation, &mixing_high);
  std::printf("    mixing %.3f: mean ARI map %.4f (need >= 0.95), mod %.4f (need >= 0.90)\n",
              mixing_low, ari_map_low, ari_mod_low);
  std::printf("    mixing %.3f: mean ARI map %.4f (need >= 0.80)\n", mixing_high, ari_map_high);

  expect(std::abs(mixing_low - 0.3) < 0.05, "low-mixing instances off target");
  expect(std::abs(mixing_high - 0.6) < 0.05, "high-mixing instances off target");
  expect(ari_map_low >= 0.95, "map equation misses ground truth at moderate mixing");
  expect(ari_mod_low >= 0.90, "modularity misses ground truth at moderate mixing");
  expect(ari_map_high >= 0.80, "map equation misses ground truth at high mixing");
}

// ---------------------------------------------------------------------------
// 5. Single-phase variant: one level only, quality close to the full engine.

void criterion_no_contraction() {
  auto pp = benchmark_instance(p_out_for_mixing(0.3), 0);
  dslm::Config cfg;
  cfg.seed = 1;
  cfg.workers = 4;
  double full_ari = eval::ari(dslm::run(pp.graph, cfg), pp.truth);

  cfg.contract = false;
  dslm::RunStats stats;
  double single_ari = eval::ari(dslm::run(pp.graph, cfg, &stats), pp.truth);
  std::printf("    ARI full %.4f, single phase %.4f\n", full_ari, single_ari);

  expect(stats.levels.size() == 1, "more than one level without contraction");
  expect(std::abs(full_ari - single_ari) <= 0.05, "single-phase quality strays from the full engine");
}

// ---------------------------------------------------------------------------
// 6. Worker-count independence of the full pipeline.

void criterion_worker_independence() {
  auto pp = benchmark_instance(p_out_for_mixing(0.3), 0);
  for (Measure m : {Measure::modularity, Measure::map_equation}) {
    dslm::Config cfg;
    cfg.measure = m;
    cfg.seed = 5;
    cfg.workers = 1;
    Clustering reference = dslm::run(pp.graph, cfg);
    for (int workers : {2, 4}) {
      cfg.workers = workers;
      expect(dslm::run(pp.graph, cfg) == reference, "clustering depends on the worker count");
    }
  }
}

// ---------------------------------------------------------------------------
// 7. Adjusted rand index unit checks.

void criterion_ari() {
  Clustering x = random_clustering(60, 6, 1);
  expect(eval::ari(x, x) == 1.0, "self-ARI is not 1");

  Clustering relabeled = x;
  for (auto& v : relabeled) v = 200 - v;
  expect(eval::ari(x, relabeled) == 1.0, "ARI not invariant under relabeling");

  double frozen = eval::ari(Clustering{0, 0, 0, 1, 1, 1}, Clustering{0, 0, 0, 0, 1, 1});
  expect(std::abs(frozen - 12.0 / 37.0) <= 1e-9, "6-node ARI example off");

  // random shuffles of a clustering carry no information about the original
  Clustering base = random_clustering(100, 5, 7);
  SplitMix64 rng(mix64(7, 0x736875ULL));
  double sum = 0;
  for (int t = 0; t < 100; ++t) {
    Clustering shuffled = base;
    for (std::size_t i = shuffled.size(); i > 1; --i)
      std::swap(shuffled[i - 1], shuffled[rng.next_bounded(i)]);
    sum += eval::ari(base, shuffled);
  }
  expect(std::abs(sum / 100) <= 0.05, "shuffled-baseline ARI mean outside [-0.05, 0.05]");
}

// ---------------------------------------------------------------------------
// 8. Sequential baseline only ever accepts improving moves.

void criterion_baseline_monotonicity() {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Graph g = random_graph(40, 0.12, mix64(seed, 8));
    if (g.total_volume() == 0) continue;
    dslm::Config cfg;
    cfg.seed = seed;
    baseline::sequential_local_moving(g, cfg, nullptr, [](double delta) {
      expect(delta > 0, "accepted move decreases modularity");
    });
    cfg.measure = Measure::map_equation;
    baseline::sequential_local_moving(g, cfg, nullptr, [](double delta) {
      expect(delta < 0, "accepted move lengthens the map equation codelength");
    });
  }
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    void (*check)();
    bool informational;
  };
  const Criterion criteria[] = {
      {"1 move deltas match recomputation (1000 instances, tol 1e-9)", criterion_delta_oracle, false},
      {"2 contraction preserves both quality scores (200 pairs, tol 1e-9)", criterion_contraction_neutrality,
       false},
      {"3 engine finds the enumerated barbell6 optimum (10 seeds, both measures)", criterion_exact_optimum,
       false},
      {"4 planted-partition ground-truth recovery (n=2000, 40 clusters, 5 seeds)", criterion_ground_truth,
       false},
      {"5 no-contraction variant: one phase, quality within 0.05 ARI", criterion_no_contraction, false},
      {"6 identical clusterings for 1, 2 and 4 workers", criterion_worker_independence, false},
      {"7 adjusted rand index unit checks", criterion_ari, false},
      {"8 sequential baseline accepts only improving moves (50 graphs)", criterion_baseline_monotonicity,
       false},
      {"9 cluster-scale benchmarks (billions of edges, hundreds of hosts) out of scope on this hardware",
       nullptr, true},
  };

  bool all_ok = true;
  for (const Criterion& c : criteria) {
    if (c.informational) {
      std::printf("criterion %s: SKIP (documented, not asserted)\n", c.name);
      continue;
    }
    checks_failed = 0;
    auto start = std::chrono::steady_clock::now();
    c.check();
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool ok = checks_failed == 0;
    all_ok = all_ok && ok;
    std::printf("criterion %s: %s (%.1fs)\n", c.name, ok ? "PASS" : "FAIL", elapsed);
  }
  return all_ok ? 0 : 1;
}
