#include <doctest.h>

#include <algorithm>
#include <map>

#include "dsc/dslm.hpp"
#include "dsc/quality.hpp"
#include "test_support.hpp"

using namespace dsc;
using namespace dsc::dslm;

namespace {

// All bids addressed to one node, keyed by the bidding cluster.
std::map<ClusterId, BidStats> bids_for(const std::vector<Bid>& bids, NodeId v) {
  std::map<ClusterId, BidStats> out;
  for (const Bid& b : bids)
    if (b.node == v) out[b.cluster] = b.stats;
  return out;
}

std::vector<Bid> collect_bids(const Graph& g, const Clustering& c, const SubroundCtx& ctx, int workers = 2) {
  std::vector<Bid> out;
  flow::WorkerPool pool(workers);
  pool.run([&](flow::Worker& w) {
    auto dist_c = flow::distribute(w, c);
    auto bids = bidding_step(w, g, dist_c, ctx);
    if (w.id == 0) out = bids.gather();
  });
  return out;
}

}  // namespace

TEST_CASE("subround_of: single sub-round") {
  for (NodeId v = 0; v < 100; ++v)
    for (int round = 0; round < 3; ++round) CHECK(subround_of(v, round, 99, 1) == 0);
}

TEST_CASE("subround_of: deterministic, in range, round-dependent") {
  int changed = 0;
  for (NodeId v = 0; v < 200; ++v) {
    int s = subround_of(v, 1, 7, 4);
    CHECK(s >= 0);
    CHECK(s < 4);
    CHECK(subround_of(v, 1, 7, 4) == s);
    if (subround_of(v, 2, 7, 4) != s) ++changed;
  }
  CHECK(changed > 0);  // assignment reshuffles between rounds
}

TEST_CASE("subround_of: near-uniform balance") {
  const int k = 4;
  const std::size_t n = 100000;
  std::vector<std::size_t> counts(k, 0);
  for (NodeId v = 0; v < n; ++v) ++counts[static_cast<std::size_t>(subround_of(v, 0, 123, k))];
  for (std::size_t count : counts) {
    CHECK(count > n / k * 0.95);
    CHECK(count < n / k * 1.05);
  }
}

TEST_CASE("sub-rounds partition the nodes each round") {
  SubroundCtx ctx{42, 0, 3, 0, 4};
  for (NodeId v = 0; v < 500; ++v) {
    int active_in = 0;
    for (ctx.sub_round = 0; ctx.sub_round < ctx.sub_rounds; ++ctx.sub_round)
      if (ctx.active(v)) ++active_in;
    CHECK(active_in == 1);
  }
}

TEST_CASE("bidding_step: barbell6 two clusters, everyone active") {
  Graph g = testing::barbell6();
  SubroundCtx ctx{0, 0, 0, 0, 1};
  auto bids = collect_bids(g, testing::barbell6_two_clusters(), ctx);

  // bridge node 2: member bid from its own triangle, external bid from the other
  auto node2 = bids_for(bids, 2);
  REQUIRE(node2.size() == 2);
  CHECK(node2[0].vol_rest == doctest::Approx(4));
  CHECK(node2[0].cut_to_v == doctest::Approx(2));
  CHECK(node2[0].cut_rest == doctest::Approx(2));
  CHECK(node2[1].vol_rest == doctest::Approx(7));
  CHECK(node2[1].cut_to_v == doctest::Approx(1));
  CHECK(node2[1].cut_rest == doctest::Approx(1));

  // node 0 touches only its own cluster
  auto node0 = bids_for(bids, 0);
  REQUIRE(node0.size() == 1);
  CHECK(node0[0].vol_rest == doctest::Approx(5));
  CHECK(node0[0].cut_to_v == doctest::Approx(2));
  CHECK(node0[0].cut_rest == doctest::Approx(3));
}

TEST_CASE("bidding_step: singleton clusters bid with plain statistics") {
  Graph g = testing::barbell6();
  Clustering singletons{0, 1, 2, 3, 4, 5};
  SubroundCtx ctx{0, 0, 0, 0, 1};
  auto bids = collect_bids(g, singletons, ctx);
  for (NodeId v = 0; v < 6; ++v) {
    auto mine = bids_for(bids, v);
    // own-cluster bid has all-zero rest statistics
    REQUIRE(mine.count(v) == 1);
    CHECK(mine[v].vol_rest == doctest::Approx(0));
    CHECK(mine[v].cut_to_v == doctest::Approx(0));
    CHECK(mine[v].cut_rest == doctest::Approx(0));
    // one external bid per neighbor, carrying the neighbor's degree and cut
    auto nbrs = g.neighbors(v);
    REQUIRE(mine.size() == 1 + nbrs.size());
    for (NodeId u : nbrs) {
      REQUIRE(mine.count(u) == 1);
      CHECK(mine[u].vol_rest == doctest::Approx(g.degree(u)));
      CHECK(mine[u].cut_rest == doctest::Approx(g.degree(u)));
    }
  }
}

TEST_CASE("bidding_step: inactive nodes receive no bids") {
  Graph g = testing::random_graph(40, 0.15, 3);
  Clustering c = testing::random_clustering(g.num_nodes(), 6, 3);
  SubroundCtx ctx{11, 0, 0, 2, 4};
  auto bids = collect_bids(g, c, ctx);
  CHECK(!bids.empty());
  for (const Bid& b : bids) CHECK(ctx.active(b.node));
}

TEST_CASE("bid statistics agree with the reference move context") {
  Graph g = testing::random_graph(30, 0.2, 8);
  Clustering c = testing::random_clustering(g.num_nodes(), 5, 8);
  SubroundCtx ctx{5, 0, 0, 0, 1};
  auto bids = collect_bids(g, c, ctx);
  for (const Bid& b : bids) {
    MoveContext ref = move_context(g, c, b.node, b.cluster);
    CHECK(b.stats.vol_rest == doctest::Approx(ref.candidate.vol_rest).epsilon(1e-12));
    CHECK(b.stats.cut_to_v == doctest::Approx(ref.candidate.cut_to_v).epsilon(1e-12));
    CHECK(b.stats.cut_rest == doctest::Approx(ref.candidate.cut_rest).epsilon(1e-12));
  }
}

TEST_CASE("compare_step: stable clustering stays put") {
  Graph g = testing::barbell6();
  Clustering two = testing::barbell6_two_clusters();
  for (Measure m : {Measure::modularity, Measure::map_equation}) {
    Config cfg;
    cfg.measure = m;
    flow::WorkerPool pool(2);
    pool.run([&](flow::Worker& w) {
      auto dist_c = flow::distribute(w, two);
      SubroundCtx ctx{0, 0, 0, 0, 1};
      double tc = total_cut(w, g, dist_c);
      auto bids = bidding_step(w, g, dist_c, ctx);
      auto next = compare_step(w, g, dist_c, bids, tc, cfg, ctx);
      CHECK(next.gather() == two);
    });
  }
}

TEST_CASE("total_cut matches cluster statistics") {
  Graph g = testing::random_graph(45, 0.12, 14);
  Clustering c = testing::random_clustering(g.num_nodes(), 6, 14);
  double expected = 0;
  for (const auto& s : cluster_stats(g, c)) expected += s.cut;
  flow::WorkerPool pool(3);
  pool.run([&](flow::Worker& w) {
    auto dist_c = flow::distribute(w, c);
    CHECK(total_cut(w, g, dist_c) == doctest::Approx(expected).epsilon(1e-12));
  });
}

TEST_CASE("fast modularity path matches the reference path exactly") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    Graph g = testing::random_graph(60, 0.08, seed);
    Config fast, reference;
    fast.seed = reference.seed = seed;
    fast.workers = reference.workers = 2;
    reference.fast_modularity_path = false;
    RunStats fs, rs;
    Clustering a = run(g, fast, &fs);
    Clustering b = run(g, reference, &rs);
    CHECK(a == b);
    REQUIRE(fs.levels.size() == rs.levels.size());
    for (std::size_t l = 0; l < fs.levels.size(); ++l)
      CHECK(fs.levels[l].clusters == rs.levels[l].clusters);
  }
}

TEST_CASE("results are independent of the worker count") {
  for (Measure m : {Measure::modularity, Measure::map_equation}) {
    Graph g = testing::random_graph(70, 0.07, 31);
    Config cfg;
    cfg.measure = m;
    cfg.seed = 9;
    cfg.workers = 1;
    Clustering reference = run(g, cfg);
    for (int workers : {2, 4}) {
      cfg.workers = workers;
      CHECK(run(g, cfg) == reference);
    }
  }
}

TEST_CASE("run: barbell6 recovers the two triangles") {
  Graph g = testing::barbell6();
  Clustering expected{0, 0, 0, 1, 1, 1};
  for (Measure m : {Measure::modularity, Measure::map_equation}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Config cfg;
      cfg.measure = m;
      cfg.seed = seed;
      cfg.workers = 2;
      CHECK(run(g, cfg) == expected);
    }
  }
}

TEST_CASE("run: output is a normalized partition") {
  Graph g = testing::random_graph(80, 0.06, 2);
  Config cfg;
  cfg.seed = 4;
  cfg.workers = 2;
  Clustering c = run(g, cfg);
  REQUIRE(c.size() == g.num_nodes());
  Clustering copy = c;
  ClusterId k = normalize_clusters(copy);
  CHECK(copy == c);  // labels already compact, first-occurrence ordered
  CHECK(k >= 1);
  CHECK(k <= g.num_nodes());
}

TEST_CASE("run: disabling contraction stops after one level") {
  Graph g = testing::random_graph(50, 0.1, 12);
  Config cfg;
  cfg.contract = false;
  cfg.workers = 2;
  RunStats stats;
  Clustering c = run(g, cfg, &stats);
  CHECK(stats.levels.size() == 1);
  CHECK(c.size() == g.num_nodes());
}

TEST_CASE("run: moves per round are monotone to zero at the last level") {
  Graph g = testing::random_graph(60, 0.1, 19);
  Config cfg;
  cfg.workers = 2;
  RunStats stats;
  run(g, cfg, &stats);
  REQUIRE(!stats.levels.empty());
  const LevelStats& last = stats.levels.back();
  REQUIRE(!last.rounds.empty());
  // either converged (final round has no moves) or hit the round cap
  if (last.rounds.size() < static_cast<std::size_t>(cfg.max_rounds))
    CHECK(last.rounds.back().moves == 0);
}

TEST_CASE("run: invalid configuration is rejected") {
  Graph g = testing::barbell6();
  Config cfg;
  cfg.sub_rounds = 0;
  CHECK_THROWS_AS(run(g, cfg), std::invalid_argument);
  cfg = Config{};
  cfg.workers = 0;
  CHECK_THROWS_AS(run(g, cfg), std::invalid_argument);
}
