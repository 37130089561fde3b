#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <future>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "aqt/network.hpp"
#include "aqt/static_routing.hpp"

namespace aqt::sweep {

struct Topology {
  std::string label;  // e.g. "line4", "in-tree(()(()))"
  Network network;
};

// Canonical form of the rooted tree given by a parent array (node 0 is the
// root, parent[i-1] is the parent of node i).
inline std::string canonical_tree(const std::vector<std::size_t>& parent) {
  const std::size_t nodes = parent.size() + 1;
  std::vector<std::vector<std::size_t>> children(nodes);
  for (std::size_t i = 1; i < nodes; ++i) children[parent[i - 1]].push_back(i);
  std::function<std::string(std::size_t)> encode = [&](std::size_t v) {
    std::vector<std::string> parts;
    for (const auto c : children[v]) parts.push_back(encode(c));
    std::sort(parts.begin(), parts.end());
    std::string s = "(";
    for (const auto& p : parts) s += p;
    return s + ")";
  };
  return encode(0);
}

// One representative parent array per unlabeled rooted tree with `edges`
// edges, in deterministic order.
inline std::vector<std::vector<std::size_t>> rooted_trees(std::size_t edges) {
  std::vector<std::vector<std::size_t>> out;
  std::set<std::string> seen;
  std::vector<std::size_t> parent(edges, 0);
  std::function<void(std::size_t)> grow = [&](std::size_t i) {
    if (i == edges) {
      if (seen.insert(canonical_tree(parent)).second) out.push_back(parent);
      return;
    }
    for (std::size_t p = 0; p <= i; ++p) {
      parent[i] = p;
      grow(i + 1);
    }
  };
  grow(0);
  return out;
}

// Lines with 1..max_edges edges and/or every other rooted tree with up to
// max_edges edges, oriented both toward and away from the root. A rooted
// chain with the root at one end is a line and only appears under "line".
inline std::vector<Topology> topologies(std::size_t max_edges, bool lines, bool trees) {
  std::vector<Topology> out;
  for (std::size_t k = 1; k <= max_edges; ++k) {
    if (lines) out.push_back({"line" + std::to_string(k), make_line(k)});
    if (!trees) continue;
    for (const auto& parent : rooted_trees(k)) {
      const auto canon = canonical_tree(parent);
      std::string chain;
      for (std::size_t i = 0; i <= k; ++i) chain = "(" + chain + ")";
      if (canon == chain) continue;
      out.push_back({"in-tree" + canon, make_tree(parent, true)});
      out.push_back({"out-tree" + canon, make_tree(parent, false)});
    }
  }
  return out;
}

struct Instance {
  std::size_t topology = 0;  // index into the topology list
  std::vector<PacketPath> paths;
};

// Every multiset of 1..max_packets simple paths on each topology.
inline std::vector<Instance> instances(const std::vector<Topology>& tops, std::size_t max_packets) {
  std::vector<Instance> out;
  for (std::size_t t = 0; t < tops.size(); ++t) {
    const auto paths = enumerate_paths(tops[t].network);
    std::vector<std::size_t> pick;
    std::function<void(std::size_t)> choose = [&](std::size_t from) {
      if (!pick.empty()) {
        Instance inst{t, {}};
        for (const auto i : pick) inst.paths.push_back(paths[i]);
        out.push_back(std::move(inst));
      }
      if (pick.size() == max_packets) return;
      for (std::size_t i = from; i < paths.size(); ++i) {
        pick.push_back(i);
        choose(i);
        pick.pop_back();
      }
    };
    choose(0);
  }
  return out;
}

struct Row {
  std::size_t instance_id = 0;
  std::size_t packets = 0;
  std::size_t edges = 0;
  std::int64_t n = 0;
  std::int64_t d = 0;
  Step optimal = 0;
  Step greedy_fifo = 0;
  std::int64_t lemma1_bound = 0;

  bool exceeds_n_plus_d() const { return optimal > n + d; }
};

inline Row evaluate(const std::vector<Topology>& tops, const Instance& inst, std::size_t id) {
  const auto& net = tops[inst.topology].network;
  const auto si = StaticInstance::make(net, inst.paths);
  Row row;
  row.instance_id = id;
  row.packets = inst.paths.size();
  row.edges = net.edge_count();
  row.n = si.cd.n;
  row.d = si.cd.d;
  row.lemma1_bound = lemma1_bound(si.cd.n, si.cd.d);
  // Greedy routing always finishes within n*d, so the cap is never hit.
  row.optimal = bruteforce_optimal_makespan(si, row.lemma1_bound).value();
  row.greedy_fifo = greedy_schedule(si, Discipline::FIFO).makespan;
  return row;
}

// Evaluates all instances, fanning out over `threads` workers. Rows come back
// in instance order regardless of completion order.
inline std::vector<Row> run(const std::vector<Topology>& tops, const std::vector<Instance>& insts,
                            unsigned threads = std::max(1u, std::thread::hardware_concurrency())) {
  std::vector<Row> rows(insts.size());
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(insts.size())));
  std::vector<std::future<void>> workers;
  for (unsigned w = 0; w < threads; ++w) {
    workers.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < insts.size(); i += threads) rows[i] = evaluate(tops, insts[i], i);
    }));
  }
  for (auto& f : workers) f.get();
  return rows;
}

inline void write_csv(std::ostream& out, const std::vector<Row>& rows) {
  out << "instance_id,packets,edges,n,d,optimal,greedy_fifo,lemma1_bound\n";
  for (const auto& r : rows)
    out << r.instance_id << ',' << r.packets << ',' << r.edges << ',' << r.n << ',' << r.d << ','
        << r.optimal << ',' << r.greedy_fifo << ',' << r.lemma1_bound << '\n';
}

}  // namespace aqt::sweep
