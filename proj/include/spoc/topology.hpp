#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace spoc::sim {

using NodeId = std::uint32_t;

enum class Role { Source, Intermediate, Sink };

std::string_view to_string(Role role) noexcept;
std::optional<Role> role_from_string(std::string_view s) noexcept;

struct Node {
  NodeId id = 0;
  Role role = Role::Intermediate;
};

/// Directed link. Capacity is in packets per round; loss is an independent
/// per-packet drop probability.
struct Edge {
  NodeId from = 0;
  NodeId to = 0;
  std::uint32_t capacity = 1;
  double loss = 0.0;
};

class Topology {
 public:
  Topology() = default;
  Topology(std::vector<Node> nodes, std::vector<Edge> edges)
      : nodes_(std::move(nodes)), edges_(std::move(edges)) {}

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::vector<Edge>& edges() noexcept { return edges_; }

  /// Throws ConfigInvalid naming the offending entry: duplicate ids, unknown
  /// endpoints, self-loops, bad capacity or loss, not exactly one source, no
  /// sink, or a sink the source cannot reach.
  void validate() const;

  std::optional<std::size_t> index_of(NodeId id) const noexcept;
  std::optional<std::size_t> find_edge(NodeId from, NodeId to) const noexcept;
  NodeId source() const;
  std::vector<NodeId> sinks() const;

  /// Max-flow between two nodes using edge capacities.
  std::uint32_t min_cut(NodeId from, NodeId to) const;

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
};

/// Seven-node butterfly: 1 multicasts to sinks 6 and 7 through the 4->5
/// bottleneck. Unit capacities, lossless.
Topology build_butterfly();

/// Random DAG over nodes 1..node_count in topological order. Node 1 is the
/// source, the last `sink_count` nodes are sinks, and every node has at
/// least one parent so all sinks are reachable.
Topology random_dag(std::size_t node_count, std::uint64_t seed, double edge_probability = 0.4,
                    std::size_t sink_count = 2, double loss = 0.0);

}  // namespace spoc::sim
