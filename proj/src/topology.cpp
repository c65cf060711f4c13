#include "spoc/topology.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <random>
#include <set>
#include <string>

#include "spoc/error.hpp"

namespace spoc::sim {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(Errc::ConfigInvalid, what); }

std::string edge_name(std::size_t i) { return "topology.edges[" + std::to_string(i) + "]"; }

}  // namespace

std::string_view to_string(Role role) noexcept {
  switch (role) {
    case Role::Source: return "source";
    case Role::Intermediate: return "intermediate";
    case Role::Sink: return "sink";
  }
  return "intermediate";
}

std::optional<Role> role_from_string(std::string_view s) noexcept {
  if (s == "source") return Role::Source;
  if (s == "intermediate") return Role::Intermediate;
  if (s == "sink") return Role::Sink;
  return std::nullopt;
}

std::optional<std::size_t> Topology::index_of(NodeId id) const noexcept {
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].id == id) return i;
  return std::nullopt;
}

std::optional<std::size_t> Topology::find_edge(NodeId from, NodeId to) const noexcept {
  for (std::size_t i = 0; i < edges_.size(); ++i)
    if (edges_[i].from == from && edges_[i].to == to) return i;
  return std::nullopt;
}

NodeId Topology::source() const {
  for (const auto& n : nodes_)
    if (n.role == Role::Source) return n.id;
  invalid("topology.nodes: no source node");
}

std::vector<NodeId> Topology::sinks() const {
  std::vector<NodeId> out;
  for (const auto& n : nodes_)
    if (n.role == Role::Sink) out.push_back(n.id);
  return out;
}

void Topology::validate() const {
  if (nodes_.empty()) invalid("topology.nodes: empty");
  std::set<NodeId> ids;
  std::size_t sources = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!ids.insert(nodes_[i].id).second) {
      invalid("topology.nodes[" + std::to_string(i) + "].id: duplicate id " +
              std::to_string(nodes_[i].id));
    }
    if (nodes_[i].role == Role::Source) ++sources;
  }
  if (sources != 1) invalid("topology.nodes: expected exactly one source, found " + std::to_string(sources));

  std::set<std::pair<NodeId, NodeId>> seen;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto& e = edges_[i];
    if (!ids.count(e.from)) invalid(edge_name(i) + ".from: unknown node " + std::to_string(e.from));
    if (!ids.count(e.to)) invalid(edge_name(i) + ".to: unknown node " + std::to_string(e.to));
    if (e.from == e.to) invalid(edge_name(i) + ": self-loop on node " + std::to_string(e.from));
    if (!seen.insert({e.from, e.to}).second) invalid(edge_name(i) + ": duplicate edge");
    if (e.capacity == 0) invalid(edge_name(i) + ".capacity: must be at least 1");
    if (!(e.loss >= 0.0 && e.loss <= 1.0)) invalid(edge_name(i) + ".loss: must be in [0, 1]");
  }

  const auto targets = sinks();
  if (targets.empty()) invalid("topology.nodes: no sink node");
  std::set<NodeId> reached{source()};
  std::deque<NodeId> frontier{source()};
  while (!frontier.empty()) {
    const NodeId at = frontier.front();
    frontier.pop_front();
    for (const auto& e : edges_) {
      if (e.from == at && reached.insert(e.to).second) frontier.push_back(e.to);
    }
  }
  for (NodeId s : targets) {
    if (!reached.count(s)) invalid("topology: sink " + std::to_string(s) + " is unreachable from the source");
  }
}

std::uint32_t Topology::min_cut(NodeId from, NodeId to) const {
  const auto s = index_of(from);
  const auto t = index_of(to);
  if (!s || !t) invalid("min_cut: unknown node");
  const std::size_t n = nodes_.size();
  std::vector<std::vector<std::int64_t>> residual(n, std::vector<std::int64_t>(n, 0));
  for (const auto& e : edges_) residual[*index_of(e.from)][*index_of(e.to)] += e.capacity;

  // Edmonds-Karp.
  std::uint32_t flow = 0;
  while (true) {
    std::vector<std::size_t> parent(n, n);
    parent[*s] = *s;
    std::deque<std::size_t> q{*s};
    while (!q.empty() && parent[*t] == n) {
      const std::size_t u = q.front();
      q.pop_front();
      for (std::size_t v = 0; v < n; ++v) {
        if (parent[v] == n && residual[u][v] > 0) {
          parent[v] = u;
          q.push_back(v);
        }
      }
    }
    if (parent[*t] == n) break;
    std::int64_t bottleneck = std::numeric_limits<std::int64_t>::max();
    for (std::size_t v = *t; v != *s; v = parent[v]) bottleneck = std::min(bottleneck, residual[parent[v]][v]);
    for (std::size_t v = *t; v != *s; v = parent[v]) {
      residual[parent[v]][v] -= bottleneck;
      residual[v][parent[v]] += bottleneck;
    }
    flow += static_cast<std::uint32_t>(bottleneck);
  }
  return flow;
}

Topology build_butterfly() {
  std::vector<Node> nodes{{1, Role::Source},       {2, Role::Intermediate}, {3, Role::Intermediate},
                          {4, Role::Intermediate}, {5, Role::Intermediate}, {6, Role::Sink},
                          {7, Role::Sink}};
  std::vector<Edge> edges{{1, 2}, {1, 3}, {2, 4}, {3, 4}, {2, 6}, {3, 7}, {4, 5}, {5, 6}, {5, 7}};
  return {std::move(nodes), std::move(edges)};
}

Topology random_dag(std::size_t node_count, std::uint64_t seed, double edge_probability,
                    std::size_t sink_count, double loss) {
  if (node_count < 2) invalid("random_dag: need at least two nodes");
  sink_count = std::clamp<std::size_t>(sink_count, 1, node_count - 1);
  std::mt19937_64 rng(seed);
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  std::vector<Node> nodes;
  for (std::size_t i = 1; i <= node_count; ++i) {
    Role role = Role::Intermediate;
    if (i == 1) role = Role::Source;
    else if (i > node_count - sink_count) role = Role::Sink;
    nodes.push_back({static_cast<NodeId>(i), role});
  }
  std::vector<Edge> edges;
  for (std::size_t j = 2; j <= node_count; ++j) {
    const std::size_t parent = 1 + static_cast<std::size_t>(rng() % (j - 1));
    for (std::size_t i = 1; i < j; ++i) {
      if (i == parent || uniform() < edge_probability) {
        edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), 1, loss});
      }
    }
  }
  return {std::move(nodes), std::move(edges)};
}

}  // namespace spoc::sim
