// dsclu: graph clustering by distributed synchronous local moving.
//
// Subcommands: preprocess, cluster, evaluate, generate. Diagnostics go to
// stderr, data to the given output files; exit code 0 iff no error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "dsc/baseline.hpp"
#include "dsc/dslm.hpp"
#include "dsc/eval.hpp"
#include "dsc/graph.hpp"
#include "dsc/quality.hpp"

namespace {

int default_workers() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  return static_cast<int>(std::min(hw, 16u));
}

void print_report(const dsc::eval::Report& r, std::ostream& out) {
  out << "modularity " << r.modularity << "\n"
      << "map_equation " << r.map_equation << "\n"
      << "clusters " << r.clusters << "\n"
      << "cluster_size_min " << r.min_cluster_size << "\n"
      << "cluster_size_max " << r.max_cluster_size << "\n"
      << "cluster_size_mean " << r.mean_cluster_size << "\n";
}

int run_preprocess(const std::string& input, const std::string& output, std::uint64_t seed) {
  dsc::Graph g = dsc::load_edge_list_file(input);
  auto [clean, mapping] = dsc::preprocess(g, seed);

  std::ofstream out(output);
  if (!out) throw std::runtime_error("cannot open " + output);
  dsc::write_edge_list(clean, out);

  std::ofstream map_out(output + ".map");
  if (!map_out) throw std::runtime_error("cannot open " + output + ".map");
  for (dsc::NodeId old_id = 0; old_id < mapping.old_to_new.size(); ++old_id)
    if (!mapping.dropped(old_id)) map_out << old_id << ' ' << mapping.old_to_new[old_id] << '\n';

  std::cerr << "preprocess: " << clean.num_nodes() << " nodes, " << clean.num_arcs() / 2
            << " undirected edges (dropped "
            << g.num_nodes() - clean.num_nodes() << " degree-zero nodes)\n";
  return 0;
}

int run_cluster(const std::string& input, const std::string& output, const dsc::dslm::Config& cfg,
                const std::string& algorithm, bool verbose) {
  dsc::Graph g = dsc::load_edge_list_file(input);

  auto start = std::chrono::steady_clock::now();
  dsc::dslm::RunStats stats;
  dsc::Clustering c;
  if (algorithm == "dslm") {
    c = dsc::dslm::run(g, cfg, &stats);
  } else {
    c = dsc::baseline::sequential_local_moving(g, cfg, &stats);
  }
  auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  dsc::write_clustering_file(c, output);
  print_report(dsc::eval::report(g, c), std::cerr);
  std::cerr << "time_seconds " << elapsed << "\n";
  if (verbose) {
    for (std::size_t level = 0; level < stats.levels.size(); ++level) {
      const auto& ls = stats.levels[level];
      std::cerr << "level " << level << ": nodes " << ls.nodes << " clusters " << ls.clusters << " moves";
      for (const auto& r : ls.rounds) std::cerr << ' ' << r.moves;
      std::cerr << '\n';
    }
  }
  return 0;
}

int run_evaluate(const std::string& graph_path, const std::string& clustering_path,
                 const std::string& reference_path) {
  dsc::Graph g = dsc::load_edge_list_file(graph_path);
  dsc::Clustering c = dsc::load_clustering_file(clustering_path);
  if (c.size() != g.num_nodes())
    throw std::runtime_error("clustering covers " + std::to_string(c.size()) + " nodes, graph has " +
                             std::to_string(g.num_nodes()));

  print_report(dsc::eval::report(g, c), std::cout);
  if (!reference_path.empty()) {
    dsc::Clustering ref = dsc::load_clustering_file(reference_path);
    if (ref.size() != c.size())
      throw std::runtime_error("reference covers " + std::to_string(ref.size()) + " nodes, clustering has " +
                               std::to_string(c.size()));
    std::cout << "ari " << dsc::eval::ari(c, ref) << "\n";
  }
  return 0;
}

int run_generate(std::size_t nodes, std::size_t clusters, double p_in, double p_out, std::uint64_t seed,
                 const std::string& graph_out, const std::string& truth_out) {
  dsc::eval::PlantedPartitionSpec spec{nodes, clusters, p_in, p_out, seed};
  auto pp = dsc::eval::generate_planted_partition(spec);

  std::ofstream out(graph_out);
  if (!out) throw std::runtime_error("cannot open " + graph_out);
  dsc::write_edge_list(pp.graph, out);
  dsc::write_clustering_file(pp.truth, truth_out);

  std::cerr << "generate: " << pp.graph.num_nodes() << " nodes, " << pp.graph.num_arcs() / 2
            << " undirected edges, measured mixing " << dsc::eval::measured_mixing(pp.graph, pp.truth) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph clustering via distributed synchronous local moving"};
  app.require_subcommand(1);

  std::string input, output, graph_path, clustering_path, reference_path, truth_out;
  std::uint64_t seed = 0;
  auto* pre = app.add_subcommand("preprocess", "remove degree-zero nodes, compact and shuffle IDs");
  pre->add_option("--input", input, "edge list input")->required();
  pre->add_option("--output", output, "preprocessed edge list output (mapping written to OUTPUT.map)")->required();
  pre->add_option("--seed", seed, "random seed");

  dsc::dslm::Config cfg;
  cfg.workers = default_workers();
  std::string measure = "mod";
  std::string algorithm = "dslm";
  bool no_contraction = false;
  bool verbose = false;
  auto* cluster = app.add_subcommand("cluster", "compute a clustering");
  cluster->add_option("--input", input, "preprocessed edge list")->required();
  cluster->add_option("--output", output, "clustering file output")->required();
  cluster->add_option("--measure", measure, "quality measure")->check(CLI::IsMember({"mod", "map"}));
  cluster->add_option("--sub-rounds", cfg.sub_rounds, "sub-rounds per round")->check(CLI::PositiveNumber);
  cluster->add_option("--max-rounds", cfg.max_rounds, "max rounds per phase")->check(CLI::PositiveNumber);
  cluster->add_flag("--no-contraction", no_contraction, "stop after the first local moving phase");
  cluster->add_option("--seed", cfg.seed, "random seed");
  cluster->add_option("--workers", cfg.workers, "worker threads")->check(CLI::PositiveNumber);
  cluster->add_option("--algorithm", algorithm, "dslm or sequential")->check(CLI::IsMember({"dslm", "sequential"}));
  cluster->add_flag("--verbose", verbose, "per-round move counts and per-level sizes on stderr");

  auto* evaluate = app.add_subcommand("evaluate", "score a clustering");
  evaluate->add_option("--graph", graph_path, "edge list")->required();
  evaluate->add_option("--clustering", clustering_path, "clustering file")->required();
  evaluate->add_option("--reference", reference_path, "reference clustering for ARI");

  std::size_t nodes = 0, clusters = 1;
  double p_in = 1, p_out = 0;
  auto* generate = app.add_subcommand("generate", "planted partition benchmark graph");
  generate->add_option("--nodes", nodes, "node count")->required();
  generate->add_option("--clusters", clusters, "cluster count")->required();
  generate->add_option("--p-in", p_in, "intra-cluster edge probability")->required();
  generate->add_option("--p-out", p_out, "inter-cluster edge probability")->required();
  generate->add_option("--seed", seed, "random seed");
  generate->add_option("--graph-out", output, "edge list output")->required();
  generate->add_option("--truth-out", truth_out, "ground truth clustering output")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (pre->parsed()) return run_preprocess(input, output, seed);
    if (cluster->parsed()) {
      cfg.measure = measure == "mod" ? dsc::Measure::modularity : dsc::Measure::map_equation;
      cfg.contract = !no_contraction;
      return run_cluster(input, output, cfg, algorithm, verbose);
    }
    if (evaluate->parsed()) return run_evaluate(graph_path, clustering_path, reference_path);
    if (generate->parsed()) return run_generate(nodes, clusters, p_in, p_out, seed, output, truth_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
