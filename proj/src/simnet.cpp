#include "spoc/simnet.hpp"

#include <algorithm>
#include <memory>
#include <optional>
#include <set>

#include "spoc/integrity.hpp"
#include "spoc/locking.hpp"

namespace spoc::sim {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix(splitmix(seed) ^ splitmix(stream));
}

enum Stream : std::uint64_t {
  kNatives = 1,
  kLoss = 2,
  kAdversary = 3,
  kIntegrity = 4,
  kCoefficients = 5,
  kKey = 6,
  kNodeBase = 1000,
};

double uniform(rlnc::RecodeRng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct NodeState {
  NodeId id;
  Role role;
  bool store_and_forward;
  rlnc::RecodeRng rng;
  std::map<std::uint32_t, rlnc::GenerationBuffer> buffers;
  NodeStats stats;

  std::size_t rank() const {
    std::size_t r = 0;
    for (const auto& [_, b] : buffers) r += b.rank();
    return r;
  }

  const rlnc::GenerationBuffer* current() const {
    return buffers.empty() ? nullptr : &buffers.rbegin()->second;
  }
};

class Simulation {
 public:
  Simulation(const Topology& topology, const ScenarioConfig& config, std::uint64_t seed)
      : topo_(topology),
        cfg_(config),
        field_(gf::Field::get(config.field)),
        natives_rng_(stream_seed(seed, kNatives)),
        loss_rng_(stream_seed(seed, kLoss)),
        adversary_rng_(stream_seed(seed, kAdversary)),
        integrity_rng_(stream_seed(seed, kIntegrity)) {
    report_.seed = seed;
    report_.truth.field = config.field;
    report_.truth.h = config.h;

    if (config.coefficients == CoefficientMode::Seeded) {
      coefficients_ = std::make_unique<locking::SeededCoefficientSource>(stream_seed(seed, kCoefficients));
    } else {
      coefficients_ = std::make_unique<locking::SecureCoefficientSource>();
    }
    session_.emplace(config.field, config.h, *coefficients_);

    locking::SharedKey key;
    if (config.key_file) {
      key = locking::read_key_file(*config.key_file);
    } else {
      rlnc::RecodeRng key_rng(stream_seed(seed, kKey));
      key.key_id = static_cast<std::uint32_t>(key_rng());
      for (auto& b : key.bytes) b = static_cast<std::uint8_t>(key_rng());
    }
    ctx_ = config.locking ? locking::LockingContext::with_key(key, config.field, config.h)
                          : locking::LockingContext::stub(config.field, config.h);

    for (const auto& n : topology.nodes()) {
      nodes_.push_back({n.id, n.role, config.store_and_forward.count(n.id) > 0,
                        rlnc::RecodeRng(stream_seed(seed, kNodeBase + n.id)), {}, {n.id, n.role}});
    }
    for (const auto& e : topology.edges()) {
      report_.edges.push_back({e.from, e.to});
      const auto* rule = drop_rule(e.from, e.to);
      drop_budget_.push_back(rule && rule->budget ? *rule->budget : 0);
    }
    for (NodeId s : topology.sinks()) {
      SinkReport sr{s, {}};
      for (std::size_t g = 0; g < config.generations; ++g) {
        GenerationOutcome o;
        o.generation_id = static_cast<std::uint32_t>(g);
        sr.generations.push_back(o);
      }
      report_.sinks.push_back(std::move(sr));
    }

    std::uint32_t source_capacity = 0;
    for (const auto& e : topology.edges())
      if (e.from == topology.source()) source_capacity += e.capacity;
    dwell_ = config.rounds_per_generation;
    if (dwell_ == 0) dwell_ = std::max<std::size_t>(1, (config.h + source_capacity - 1) / std::max<std::uint32_t>(source_capacity, 1));
    max_rounds_ = config.max_rounds;
    if (max_rounds_ == 0) max_rounds_ = config.generations * dwell_ + 4 * topology.nodes().size();
  }

  RunReport run() {
    for (std::size_t round = 1; round <= max_rounds_; ++round) {
      step(round);
      report_.rounds_run = round;
      if (all_resolved()) break;
    }
    finish();
    return std::move(report_);
  }

 private:
  const DropRule* drop_rule(NodeId from, NodeId to) const {
    for (const auto& d : cfg_.adversary.drops)
      if (d.from == from && d.to == to) return &d;
    return nullptr;
  }

  NodeState& node(NodeId id) { return nodes_[*topo_.index_of(id)]; }

  void start_generation(std::uint32_t g) {
    std::vector<gf::SymbolVector> payloads;
    for (std::size_t i = 0; i < cfg_.h; ++i) {
      payloads.push_back(gf::random_vector(field_, cfg_.payload_symbols, natives_rng_));
    }
    source_.emplace(session_->begin_generation(g, std::move(payloads)));
    const auto w = rlnc::native_matrix(cfg_.field, source_->natives());
    if (cfg_.integrity_z > 0) {
      secrets_.emplace(g, integrity::make_secret(g, w, cfg_.integrity_z, integrity_rng_));
    }
    report_.truth.natives.emplace(g, w);
  }

  std::optional<wire::CodedPacket> produce(NodeState& n, std::size_t round) {
    if (n.role == Role::Source) {
      const std::size_t g = (round - 1) / dwell_;
      if (g >= cfg_.generations || !source_) return std::nullopt;
      if (!source_->exhausted()) return source_->emit(ctx_);
      return source_->recode(n.rng);
    }
    const auto* buffer = n.current();
    if (buffer == nullptr) return std::nullopt;
    if (n.store_and_forward) {
      const auto& stored = buffer->packets();
      return stored[static_cast<std::size_t>(n.rng() % stored.size())];
    }
    return rlnc::recode(*buffer, n.rng);
  }

  wire::CodedPacket forge(NodeId target) {
    // Attacker-chosen headers for the generation currently in flight.
    const auto& victim = node(target);
    std::uint32_t g = source_ ? source_->generation_id() : 0;
    if (const auto* b = victim.current()) g = std::max(g, b->generation_id());
    wire::CodedPacket p;
    p.header.field = cfg_.field;
    p.header.generation_id = g;
    p.header.unlocked = adversary_rng_.nonzero_vector(field_, cfg_.h);
    p.header.locked = gf::random_vector(field_, cfg_.h, adversary_rng_);
    p.payload = gf::random_vector(field_, cfg_.payload_symbols, adversary_rng_);
    return p;
  }

  void receive(NodeState& n, const wire::CodedPacket& p) {
    ++n.stats.received;
    if (n.role == Role::Source || p.h() != cfg_.h || p.payload.size() != cfg_.payload_symbols ||
        p.field() != cfg_.field) {
      ++n.stats.discarded;
      return;
    }
    auto [it, fresh] = n.buffers.try_emplace(p.generation_id(), cfg_.field, p.generation_id(), cfg_.h);
    if (it->second.insert(p) == rlnc::InsertResult::Discarded) {
      ++n.stats.discarded;
      if (fresh) n.buffers.erase(it);
    } else {
      ++n.stats.stored;
    }
  }

  void try_decode(std::size_t round) {
    for (auto& sink : report_.sinks) {
      auto& n = node(sink.id);
      for (auto& outcome : sink.generations) {
        const auto it = n.buffers.find(outcome.generation_id);
        if (it == n.buffers.end()) continue;
        outcome.rank = it->second.rank();
        if (outcome.resolved() || !it->second.full_rank()) continue;

        const auto secret = secrets_.find(outcome.generation_id);
        try {
          const auto natives = locking::sink_decode(
              it->second, ctx_, secret == secrets_.end() ? nullptr : &secret->second);
          outcome.decoded = true;
          outcome.decode_round = round;
          outcome.matches_source =
              rlnc::native_matrix(cfg_.field, natives) == report_.truth.natives.at(outcome.generation_id);
        } catch (const Error& e) {
          if (e.code() != Errc::IntegrityReject) {
            outcome.decode_error = true;
            continue;
          }
          outcome.integrity_reject = true;
          report_.integrity_events.push_back({round, sink.id, outcome.generation_id});
        }
      }
    }
  }

  void step(std::size_t round) {
    const std::size_t g = (round - 1) / dwell_;
    if (g < cfg_.generations && (!source_ || source_->generation_id() != g)) {
      if (source_) report_.truth.locked_rows.emplace(source_->generation_id(), source_->locked_rows());
      start_generation(static_cast<std::uint32_t>(g));
    }

    std::vector<std::pair<NodeId, wire::CodedPacket>> deliveries;
    const auto& edges = topo_.edges();
    for (auto& n : nodes_) {
      for (std::size_t ei = 0; ei < edges.size(); ++ei) {
        const auto& e = edges[ei];
        if (e.from != n.id) continue;
        auto& es = report_.edges[ei];
        for (std::uint32_t c = 0; c < e.capacity; ++c) {
          auto packet = produce(n, round);
          if (!packet) break;
          ++n.stats.sent;
          ++es.offered;
          if (cfg_.adversary.eavesdrops(e.from, e.to)) report_.truth.observed.push_back(*packet);

          // Both draws happen for every packet so that random streams do not
          // depend on outcomes.
          const double adversary_draw = uniform(adversary_rng_);
          const double loss_draw = uniform(loss_rng_);
          bool dropped = false;
          if (const auto* rule = drop_rule(e.from, e.to)) {
            if (rule->budget) {
              if (drop_budget_[ei] > 0) {
                --drop_budget_[ei];
                dropped = true;
              }
            } else {
              dropped = adversary_draw < rule->probability;
            }
          }
          if (dropped) {
            ++es.dropped;
          } else if (loss_draw < e.loss) {
            ++es.lost;
          } else {
            ++es.delivered;
            deliveries.emplace_back(e.to, std::move(*packet));
          }
        }
      }
    }

    for (const auto& rule : cfg_.adversary.injections) {
      if (!rule.active(round)) continue;
      for (std::uint32_t k = 0; k < rule.per_round; ++k) {
        deliveries.emplace_back(rule.target, forge(rule.target));
        ++report_.injected;
      }
    }

    for (const auto& [to, packet] : deliveries) receive(node(to), packet);
    try_decode(round);

    std::vector<NodeSample> sample;
    for (const auto& n : nodes_) {
      sample.push_back({n.rank(), n.stats.sent, n.stats.received, n.stats.stored, n.stats.discarded});
    }
    report_.trajectory.push_back(std::move(sample));
  }

  bool all_resolved() const {
    for (const auto& s : report_.sinks)
      for (const auto& o : s.generations)
        if (!o.resolved()) return false;
    return true;
  }

  void finish() {
    if (source_ && !report_.truth.locked_rows.count(source_->generation_id())) {
      report_.truth.locked_rows.emplace(source_->generation_id(), source_->locked_rows());
    }
    for (const auto& n : nodes_) report_.nodes.push_back(n.stats);
    for (const auto& s : report_.sinks) report_.truth.sink_buffers[s.id] = node(s.id).buffers;

    report_.all_decoded = true;
    report_.all_correct = true;
    std::set<std::uint32_t> undelivered;
    for (const auto& s : report_.sinks) {
      for (const auto& o : s.generations) {
        if (!o.decoded) undelivered.insert(o.generation_id);
        report_.all_decoded = report_.all_decoded && o.decoded;
        report_.all_correct = report_.all_correct && o.decoded && o.matches_source;
      }
    }
    report_.undelivered_generations.assign(undelivered.begin(), undelivered.end());
  }

  const Topology& topo_;
  const ScenarioConfig& cfg_;
  const gf::Field& field_;
  rlnc::RecodeRng natives_rng_;
  rlnc::RecodeRng loss_rng_;
  rlnc::RecodeRng adversary_rng_;
  rlnc::RecodeRng integrity_rng_;
  std::unique_ptr<locking::CoefficientSource> coefficients_;
  std::optional<locking::SourceSession> session_;
  std::optional<locking::SourceGenerationState> source_;
  locking::LockingContext ctx_;
  std::map<std::uint32_t, integrity::ParitySecret> secrets_;
  std::vector<NodeState> nodes_;
  std::vector<std::uint64_t> drop_budget_;
  std::size_t dwell_ = 1;
  std::size_t max_rounds_ = 0;
  RunReport report_;
};

}  // namespace

RunReport run(const Topology& topology, const ScenarioConfig& config, std::uint64_t seed) {
  validate(topology, config);
  return Simulation(topology, config, seed).run();
}

}  // namespace spoc::sim
