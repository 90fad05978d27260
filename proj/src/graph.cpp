#include "dsc/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "dsc/hashing.hpp"

namespace dsc {

Graph Graph::from_arcs(std::size_t n, std::vector<std::tuple<NodeId, NodeId, Weight>> arcs) {
  std::sort(arcs.begin(), arcs.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
  });

  Graph g;
  g.offsets_.assign(n + 1, 0);
  g.degrees_.assign(n, 0);
  g.loops_.assign(n, 0);
  g.targets_.reserve(arcs.size());
  g.weights_.reserve(arcs.size());

  std::size_t i = 0;
  for (NodeId v = 0; v < n; ++v) {
    g.offsets_[v] = g.targets_.size();
    while (i < arcs.size() && std::get<0>(arcs[i]) == v) {
      NodeId u = std::get<1>(arcs[i]);
      Weight w = 0;
      while (i < arcs.size() && std::get<0>(arcs[i]) == v && std::get<1>(arcs[i]) == u) {
        w += std::get<2>(arcs[i]);
        ++i;
      }
      g.targets_.push_back(u);
      g.weights_.push_back(w);
      if (u == v) {
        g.degrees_[v] += 2 * w;
        g.loops_[v] += w;
      } else {
        g.degrees_[v] += w;
      }
    }
  }
  g.offsets_[n] = g.targets_.size();
  g.total_volume_ = std::accumulate(g.degrees_.begin(), g.degrees_.end(), Weight{0});
  return g;
}

Graph Graph::from_edges(std::size_t n, const std::vector<std::tuple<NodeId, NodeId, Weight>>& edges) {
  std::vector<std::tuple<NodeId, NodeId, Weight>> arcs;
  arcs.reserve(2 * edges.size());
  for (const auto& [u, v, w] : edges) {
    arcs.emplace_back(u, v, w);
    if (u != v) arcs.emplace_back(v, u, w);
  }
  return from_arcs(n, std::move(arcs));
}

namespace {

bool parse_u64(std::string_view tok, std::uint64_t& out) {
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc{} && p == tok.data() + tok.size();
}

}  // namespace

Graph load_edge_list(std::istream& in) {
  std::vector<std::tuple<NodeId, NodeId, Weight>> edges;
  std::uint64_t max_id = 0;
  bool any = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    if (line[start] == '#' || line[start] == '%') continue;

    std::istringstream ls(line);
    std::string tu, tv, tw, extra;
    ls >> tu >> tv;
    if (tv.empty()) throw ParseError("line " + std::to_string(line_no) + ": expected \"u v [w]\"");
    std::uint64_t u = 0, v = 0;
    if (!parse_u64(tu, u) || !parse_u64(tv, v))
      throw ParseError("line " + std::to_string(line_no) + ": malformed node ID");
    if (u > std::numeric_limits<NodeId>::max() - 1 || v > std::numeric_limits<NodeId>::max() - 1)
      throw ParseError("line " + std::to_string(line_no) + ": node ID out of range");
    Weight w = 1;
    if (ls >> tw) {
      try {
        std::size_t pos = 0;
        w = std::stod(tw, &pos);
        if (pos != tw.size()) throw std::invalid_argument(tw);
      } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": malformed weight");
      }
      if (!(w >= 0) || !std::isfinite(w))
        throw ParseError("line " + std::to_string(line_no) + ": weight must be finite and non-negative");
      if (ls >> extra) throw ParseError("line " + std::to_string(line_no) + ": trailing tokens");
    }
    edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v), w);
    max_id = std::max({max_id, u, v});
    any = true;
  }
  std::size_t n = any ? max_id + 1 : 0;
  return Graph::from_edges(n, edges);
}

Graph load_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_edge_list(in);
}

void write_edge_list(const Graph& g, std::ostream& out) {
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    auto nbrs = g.neighbors(v);
    auto ws = g.weights(v);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      if (nbrs[i] < v) continue;
      out << v << ' ' << nbrs[i];
      if (ws[i] != 1) {
        char buf[32];
        auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), ws[i]);
        out << ' ' << std::string_view(buf, p - buf);
      }
      out << '\n';
    }
  }
}

std::pair<Graph, NodeMapping> preprocess(const Graph& g, std::uint64_t seed) {
  std::size_t n = g.num_nodes();
  NodeMapping mapping;
  mapping.old_to_new.assign(n, NodeMapping::kDropped);

  std::vector<NodeId> kept;
  kept.reserve(n);
  for (NodeId v = 0; v < n; ++v)
    if (g.degree(v) > 0) kept.push_back(v);

  // seeded Fisher-Yates, independent of platform library internals
  SplitMix64 rng(mix64(seed, 0x70726570ULL));  // distinct stream per purpose
  for (std::size_t i = kept.size(); i > 1; --i) {
    std::size_t j = rng.next_bounded(i);
    std::swap(kept[i - 1], kept[j]);
  }
  for (NodeId pos = 0; pos < kept.size(); ++pos) mapping.old_to_new[kept[pos]] = pos;

  std::vector<std::tuple<NodeId, NodeId, Weight>> arcs;
  arcs.reserve(g.num_arcs());
  for (NodeId v = 0; v < n; ++v) {
    if (mapping.dropped(v)) continue;
    auto nbrs = g.neighbors(v);
    auto ws = g.weights(v);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      arcs.emplace_back(mapping.old_to_new[v], mapping.old_to_new[nbrs[i]], ws[i]);
    }
  }
  return {Graph::from_arcs(kept.size(), std::move(arcs)), std::move(mapping)};
}

Weight weighted_degree(const Graph& g, NodeId v) {
  if (v >= g.num_nodes()) throw std::out_of_range("weighted_degree: node out of range");
  return g.degree(v);
}

std::vector<ClusterSummary> cluster_stats(const Graph& g, const Clustering& c) {
  if (c.size() != g.num_nodes()) throw std::invalid_argument("cluster_stats: assignment length mismatch");
  ClusterId max_c = 0;
  for (ClusterId x : c) max_c = std::max(max_c, x);
  std::vector<ClusterSummary> stats(c.empty() ? 0 : max_c + 1);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    auto& s = stats[c[v]];
    s.vol += g.degree(v);
    auto nbrs = g.neighbors(v);
    auto ws = g.weights(v);
    for (std::size_t i = 0; i < nbrs.size(); ++i)
      if (c[nbrs[i]] != c[v]) s.cut += ws[i];
  }
  return stats;
}

ClusterId normalize_clusters(Clustering& c) {
  std::unordered_map<ClusterId, ClusterId> remap;
  remap.reserve(c.size());
  ClusterId next = 0;
  for (ClusterId& x : c) {
    auto [it, inserted] = remap.try_emplace(x, next);
    if (inserted) ++next;
    x = it->second;
  }
  return next;
}

std::size_t cluster_count(const Clustering& c) {
  Clustering copy = c;
  return normalize_clusters(copy);
}

void write_clustering(const Clustering& c, std::ostream& out) {
  for (std::size_t v = 0; v < c.size(); ++v) out << v << ' ' << c[v] << '\n';
}

void write_clustering_file(const Clustering& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  write_clustering(c, out);
}

Clustering load_clustering(std::istream& in) {
  Clustering c;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::uint64_t v = 0, cid = 0;
    if (!(ls >> v >> cid)) throw ParseError("clustering line " + std::to_string(line_no) + ": expected \"node cluster\"");
    if (v >= c.size()) c.resize(v + 1, 0);
    c[v] = static_cast<ClusterId>(cid);
  }
  return c;
}

Clustering load_clustering_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_clustering(in);
}

}  // namespace dsc
