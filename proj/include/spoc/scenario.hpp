#pragma once

// Scenario configuration for the simulator, and its JSON loader. The schema
// is documented in docs/config.md.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string_view>
#include <utility>
#include <vector>

#include "spoc/gf.hpp"
#include "spoc/topology.hpp"

namespace spoc::sim {

struct DropRule {
  NodeId from = 0;
  NodeId to = 0;
  double probability = 0.0;
  std::optional<std::uint64_t> budget;  // drop the first `budget` packets instead
};

struct InjectRule {
  NodeId target = 0;
  std::uint32_t per_round = 1;
  std::uint32_t first_round = 1;
  std::uint32_t last_round = 0;  // 0 = no end

  bool active(std::size_t round) const noexcept {
    return round >= first_round && (last_round == 0 || round <= last_round);
  }
};

struct AdversaryConfig {
  bool eavesdrop_all = false;
  std::vector<std::pair<NodeId, NodeId>> eavesdrop_edges;
  std::vector<DropRule> drops;
  std::vector<InjectRule> injections;

  bool eavesdrops(NodeId from, NodeId to) const;
};

enum class CoefficientMode { Secure, Seeded };

struct ScenarioConfig {
  std::size_t h = 2;
  gf::FieldId field = gf::FieldId::GF256;
  std::size_t payload_symbols = 16;
  std::size_t generations = 1;
  std::size_t rounds_per_generation = 0;  // 0 = enough source capacity for h packets
  std::size_t max_rounds = 0;             // 0 = derived from the schedule
  bool locking = true;
  std::size_t integrity_z = 0;  // 0 = integrity check disabled
  std::set<NodeId> store_and_forward;
  AdversaryConfig adversary;
  std::uint64_t seed = 1;
  std::optional<std::filesystem::path> key_file;
  CoefficientMode coefficients = CoefficientMode::Secure;
};

struct Scenario {
  Topology topology;
  ScenarioConfig config;
};

/// Throws ConfigInvalid naming the offending field.
void validate(const Topology& topology, const ScenarioConfig& config);

/// Relative key_file paths resolve against base_dir.
Scenario parse_scenario(std::string_view json_text, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace spoc::sim
