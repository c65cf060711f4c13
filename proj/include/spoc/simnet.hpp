#pragma once

// Synchronous-round multicast simulator.
//
// Each round every node offers each outgoing edge up to its capacity in
// packets built from the generation buffers it held at the start of the
// round; everything delivered in round r is usable from round r + 1. The
// source spends rounds_per_generation rounds on each generation, emitting
// its h identity-row packets first and recoding its own packets afterwards.
// Relays recode their current generation (the newest one they hold), or
// forward one stored packet unchanged in store-and-forward mode. Sinks try
// to decode a generation the round it reaches full rank.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spoc/gf.hpp"
#include "spoc/rlnc.hpp"
#include "spoc/scenario.hpp"
#include "spoc/topology.hpp"
#include "spoc/wire.hpp"

namespace spoc::sim {

struct GenerationOutcome {
  std::uint32_t generation_id = 0;
  std::size_t rank = 0;
  bool decoded = false;
  bool matches_source = false;
  bool integrity_reject = false;
  bool decode_error = false;
  std::optional<std::size_t> decode_round;

  bool resolved() const noexcept { return decoded || integrity_reject || decode_error; }
};

struct SinkReport {
  NodeId id = 0;
  std::vector<GenerationOutcome> generations;
};

struct NodeStats {
  NodeId id = 0;
  Role role = Role::Intermediate;
  std::uint64_t sent = 0;
  std::uint64_t received = 0;
  std::uint64_t stored = 0;
  std::uint64_t discarded = 0;
};

struct EdgeStats {
  NodeId from = 0;
  NodeId to = 0;
  std::uint64_t offered = 0;
  std::uint64_t delivered = 0;
  std::uint64_t lost = 0;     // link loss
  std::uint64_t dropped = 0;  // adversary
};

struct IntegrityEvent {
  std::size_t round = 0;
  NodeId node = 0;
  std::uint32_t generation_id = 0;
};

/// Per-node state at the end of a round.
struct NodeSample {
  std::size_t rank = 0;  // summed over generation buffers
  std::uint64_t sent = 0;
  std::uint64_t received = 0;
  std::uint64_t stored = 0;
  std::uint64_t discarded = 0;

  friend bool operator==(const NodeSample&, const NodeSample&) = default;
};

/// Simulation ground truth and raw captures. Kept in memory only.
struct GroundTruth {
  gf::FieldId field = gf::FieldId::GF256;
  std::size_t h = 0;
  std::map<std::uint32_t, gf::SymbolMatrix> natives;
  std::map<std::uint32_t, gf::SymbolMatrix> locked_rows;
  std::map<NodeId, std::map<std::uint32_t, rlnc::GenerationBuffer>> sink_buffers;
  std::vector<wire::CodedPacket> observed;
};

struct RunReport {
  std::uint64_t seed = 0;
  std::size_t rounds_run = 0;
  bool all_decoded = false;
  bool all_correct = false;
  std::uint64_t injected = 0;
  std::vector<NodeStats> nodes;
  std::vector<EdgeStats> edges;
  std::vector<SinkReport> sinks;
  std::vector<IntegrityEvent> integrity_events;
  std::vector<std::uint32_t> undelivered_generations;
  std::vector<std::vector<NodeSample>> trajectory;  // [round - 1][node index]
  GroundTruth truth;
};

/// Throws ConfigInvalid.
RunReport run(const Topology& topology, const ScenarioConfig& config, std::uint64_t seed);

struct EavesdropperView {
  struct Generation {
    std::uint32_t generation_id = 0;
    std::uint64_t observed = 0;
    std::size_t rank = 0;
    bool full_rank = false;
    bool reconstructed = false;
  };

  std::uint64_t packets_observed = 0;
  std::vector<Generation> generations;
  bool any_reconstructed = false;

  bool empty() const noexcept { return packets_observed == 0; }
};

/// What a keyless observer of the eavesdropped edges can do: rank of the
/// captured unlocked matrix per generation and, at full rank, whether the
/// natives fall out when the locked coefficients are read as plaintext or
/// when the coding matrix is assumed to be the identity.
EavesdropperView eavesdropper_view(const RunReport& report);

/// Deterministic JSON document (ground truth and trajectories excluded).
std::string to_json(const RunReport& report);
std::string summary(const RunReport& report);

}  // namespace spoc::sim
