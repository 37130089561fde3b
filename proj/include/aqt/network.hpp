#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aqt/errors.hpp"

namespace aqt {

using NodeIndex = std::uint32_t;
using EdgeIndex = std::uint32_t;

// Discrete time. Step 1 is the first step in which the adversary may inject;
// step 0 is the empty startup state.
using Step = std::int64_t;

struct EdgeSpec {
  std::string id;
  std::string source;
  std::string target;
};

struct Edge {
  std::string id;
  NodeIndex source;
  NodeIndex target;
};

// Fixed route of a packet as a sequence of edge indices into a Network.
class PacketPath {
 public:
  PacketPath() = default;
  explicit PacketPath(std::vector<EdgeIndex> edges) : edges_(std::move(edges)) {}
  PacketPath(std::initializer_list<EdgeIndex> edges) : edges_(edges) {}

  std::size_t length() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }
  EdgeIndex operator[](std::size_t k) const { return edges_[k]; }
  EdgeIndex front() const { return edges_.front(); }
  std::span<const EdgeIndex> edges() const { return edges_; }
  auto begin() const { return edges_.begin(); }
  auto end() const { return edges_.end(); }

  friend bool operator==(const PacketPath&, const PacketPath&) = default;

 private:
  std::vector<EdgeIndex> edges_;
};

// Directed graph with unit-capacity edges. Immutable once built; edge
// iteration order is the declaration order.
class Network {
 public:
  // Throws ValidationError on an empty node list, duplicate node or edge ids,
  // undeclared endpoints, or a second edge between the same ordered pair.
  static Network build(std::vector<std::string> nodes, const std::vector<EdgeSpec>& edges) {
    if (nodes.empty()) throw ValidationError("network: node list is empty");
    Network net;
    for (auto& name : nodes) {
      const auto index = static_cast<NodeIndex>(net.nodes_.size());
      if (!net.node_lookup_.emplace(name, index).second)
        throw ValidationError("network: duplicate node '" + name + "'");
      net.nodes_.push_back(std::move(name));
    }
    std::map<std::pair<NodeIndex, NodeIndex>, std::string> pairs;
    for (const auto& spec : edges) {
      const auto src = net.node_lookup_.find(spec.source);
      const auto dst = net.node_lookup_.find(spec.target);
      if (src == net.node_lookup_.end())
        throw ValidationError("network: edge '" + spec.id + "' references undeclared node '" +
                              spec.source + "'");
      if (dst == net.node_lookup_.end())
        throw ValidationError("network: edge '" + spec.id + "' references undeclared node '" +
                              spec.target + "'");
      const auto index = static_cast<EdgeIndex>(net.edges_.size());
      if (!net.edge_lookup_.emplace(spec.id, index).second)
        throw ValidationError("network: duplicate edge id '" + spec.id + "'");
      auto [it, fresh] = pairs.emplace(std::pair{src->second, dst->second}, spec.id);
      if (!fresh)
        throw ValidationError("network: parallel edges '" + it->second + "' and '" + spec.id +
                              "' between '" + spec.source + "' and '" + spec.target + "'");
      net.edges_.push_back(Edge{spec.id, src->second, dst->second});
    }
    return net;
  }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::string& node_name(NodeIndex v) const { return nodes_.at(v); }
  const Edge& edge(EdgeIndex e) const { return edges_.at(e); }
  std::span<const Edge> edges() const { return edges_; }

  std::optional<EdgeIndex> find_edge(std::string_view id) const {
    const auto it = edge_lookup_.find(std::string(id));
    if (it == edge_lookup_.end()) return std::nullopt;
    return it->second;
  }

  // True iff the path is non-empty, every edge exists and consecutive edges
  // share the connecting node.
  bool validate_path(const PacketPath& path) const {
    if (path.empty()) return false;
    for (std::size_t k = 0; k < path.length(); ++k) {
      if (path[k] >= edges_.size()) return false;
      if (k > 0 && edges_[path[k - 1]].target != edges_[path[k]].source) return false;
    }
    return true;
  }

  // Maps edge ids to a validated path, throwing ValidationError otherwise.
  PacketPath resolve_path(std::span<const std::string> ids) const {
    std::vector<EdgeIndex> edges;
    edges.reserve(ids.size());
    for (const auto& id : ids) {
      const auto e = find_edge(id);
      if (!e) throw ValidationError("path: unknown edge '" + id + "'");
      edges.push_back(*e);
    }
    PacketPath path(std::move(edges));
    if (!validate_path(path)) throw ValidationError("path: " + describe(path) + " is not contiguous");
    return path;
  }

  std::string describe(const PacketPath& path) const {
    std::string out = "[";
    for (std::size_t k = 0; k < path.length(); ++k) {
      if (k) out += ",";
      out += path[k] < edges_.size() ? edges_[path[k]].id : "?";
    }
    return out + "]";
  }

 private:
  std::vector<std::string> nodes_;
  std::vector<Edge> edges_;
  std::map<std::string, NodeIndex, std::less<>> node_lookup_;
  std::map<std::string, EdgeIndex, std::less<>> edge_lookup_;
};

// Congestion n and dilation d of a packet set.
struct CongestionDilation {
  std::int64_t n = 0;
  std::int64_t d = 0;
  friend bool operator==(const CongestionDilation&, const CongestionDilation&) = default;
};

// n counts edge traversals, so a path that revisits an edge on a cyclic
// network contributes once per visit. On simple paths this is the number of
// paths containing the edge.
inline CongestionDilation congestion_dilation(std::span<const PacketPath> paths) {
  if (paths.empty()) throw ValidationError("congestion_dilation: packet set is empty");
  std::vector<std::int64_t> load;
  CongestionDilation cd;
  for (const auto& path : paths) {
    cd.d = std::max<std::int64_t>(cd.d, static_cast<std::int64_t>(path.length()));
    for (const EdgeIndex e : path) {
      if (e >= load.size()) load.resize(e + 1, 0);
      cd.n = std::max(cd.n, ++load[e]);
    }
  }
  return cd;
}

// One-way line v1 -> v2 -> ... -> v{k+1} with edges e1..ek.
inline Network make_line(std::size_t edge_count) {
  std::vector<std::string> nodes;
  std::vector<EdgeSpec> edges;
  for (std::size_t v = 1; v <= edge_count + 1; ++v) nodes.push_back("v" + std::to_string(v));
  for (std::size_t e = 1; e <= edge_count; ++e)
    edges.push_back({"e" + std::to_string(e), nodes[e - 1], nodes[e]});
  return Network::build(std::move(nodes), edges);
}

// Directed tree over nodes v0..vk where parent[i-1] < i names the parent of
// node vi. Edge ei joins vi and its parent, pointing to the root when
// `toward_root`, away from it otherwise.
inline Network make_tree(std::span<const std::size_t> parent, bool toward_root = true) {
  std::vector<std::string> nodes{"v0"};
  std::vector<EdgeSpec> edges;
  for (std::size_t i = 1; i <= parent.size(); ++i) {
    if (parent[i - 1] >= i) throw ValidationError("make_tree: parent must precede child");
    nodes.push_back("v" + std::to_string(i));
  }
  for (std::size_t i = 1; i <= parent.size(); ++i) {
    const auto& child = nodes[i];
    const auto& up = nodes[parent[i - 1]];
    edges.push_back({"e" + std::to_string(i), toward_root ? child : up, toward_root ? up : child});
  }
  return Network::build(std::move(nodes), edges);
}

// Every simple directed path of the network, in deterministic order (by start
// edge, then by extension). Exponential on dense graphs; meant for small
// acyclic instances.
inline std::vector<PacketPath> enumerate_paths(const Network& net) {
  std::vector<PacketPath> out;
  std::vector<EdgeIndex> stack;
  std::vector<bool> used(net.edge_count(), false);
  auto extend = [&](auto&& self) -> void {
    out.emplace_back(stack);
    const NodeIndex at = net.edge(stack.back()).target;
    for (EdgeIndex e = 0; e < net.edge_count(); ++e) {
      if (used[e] || net.edge(e).source != at) continue;
      used[e] = true;
      stack.push_back(e);
      self(self);
      stack.pop_back();
      used[e] = false;
    }
  };
  for (EdgeIndex e = 0; e < net.edge_count(); ++e) {
    used[e] = true;
    stack.assign(1, e);
    extend(extend);
    used[e] = false;
  }
  return out;
}

}  // namespace aqt
