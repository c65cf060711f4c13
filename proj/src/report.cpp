#include <map>
#include <sstream>

#include "json.hpp"
#include "spoc/locking.hpp"
#include "spoc/simnet.hpp"

namespace spoc::sim {

EavesdropperView eavesdropper_view(const RunReport& report) {
  EavesdropperView view;
  view.packets_observed = report.truth.observed.size();
  const auto& truth = report.truth;

  std::map<std::uint32_t, std::vector<const wire::CodedPacket*>> by_generation;
  for (const auto& p : truth.observed) by_generation[p.generation_id()].push_back(&p);

  for (const auto& [g, packets] : by_generation) {
    EavesdropperView::Generation gen{g, packets.size()};
    const auto natives = truth.natives.find(g);
    if (natives == truth.natives.end()) continue;

    rlnc::GenerationBuffer captured(truth.field, g, truth.h);
    for (const auto* p : packets) captured.insert(*p);
    gen.rank = captured.rank();
    gen.full_rank = captured.full_rank();

    if (gen.full_rank) {
      // Attempt 1: read the locked coefficients as if they were plaintext.
      try {
        const auto guess = locking::sink_decode(captured, locking::LockingContext::stub(truth.field, truth.h));
        gen.reconstructed = rlnc::native_matrix(truth.field, guess) == natives->second;
      } catch (const Error&) {
      }
      // Attempt 2: take the unlocked rows as the true encoding vectors.
      if (!gen.reconstructed) {
        const auto guess = rlnc::decode_plain(captured);
        gen.reconstructed = rlnc::native_matrix(truth.field, guess) == natives->second;
      }
    }
    view.any_reconstructed = view.any_reconstructed || gen.reconstructed;
    view.generations.push_back(gen);
  }
  return view;
}

std::string to_json(const RunReport& report) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["seed"] = report.seed;
  doc["rounds_run"] = report.rounds_run;
  doc["all_decoded"] = report.all_decoded;
  doc["all_correct"] = report.all_correct;
  doc["injected"] = report.injected;
  doc["undelivered_generations"] = report.undelivered_generations;

  auto& sinks = doc["sinks"] = ordered_json::array();
  for (const auto& s : report.sinks) {
    ordered_json gens = ordered_json::array();
    for (const auto& o : s.generations) {
      ordered_json g;
      g["generation"] = o.generation_id;
      g["rank"] = o.rank;
      g["decoded"] = o.decoded;
      g["decode_round"] = o.decode_round ? ordered_json(*o.decode_round) : ordered_json(nullptr);
      g["matches_source"] = o.matches_source;
      g["integrity_reject"] = o.integrity_reject;
      g["decode_error"] = o.decode_error;
      gens.push_back(std::move(g));
    }
    sinks.push_back({{"node", s.id}, {"generations", std::move(gens)}});
  }

  auto& nodes = doc["nodes"] = ordered_json::array();
  for (const auto& n : report.nodes) {
    nodes.push_back({{"node", n.id},
                     {"role", std::string(to_string(n.role))},
                     {"sent", n.sent},
                     {"received", n.received},
                     {"stored", n.stored},
                     {"discarded", n.discarded}});
  }

  auto& edges = doc["edges"] = ordered_json::array();
  for (const auto& e : report.edges) {
    edges.push_back({{"from", e.from},
                     {"to", e.to},
                     {"offered", e.offered},
                     {"delivered", e.delivered},
                     {"lost", e.lost},
                     {"dropped", e.dropped}});
  }

  auto& events = doc["integrity_events"] = ordered_json::array();
  for (const auto& ev : report.integrity_events) {
    events.push_back({{"kind", "IntegrityReject"},
                      {"round", ev.round},
                      {"node", ev.node},
                      {"generation", ev.generation_id}});
  }

  const auto view = eavesdropper_view(report);
  ordered_json eve;
  eve["packets_observed"] = view.packets_observed;
  eve["any_reconstructed"] = view.any_reconstructed;
  eve["generations"] = ordered_json::array();
  for (const auto& g : view.generations) {
    eve["generations"].push_back({{"generation", g.generation_id},
                                  {"observed", g.observed},
                                  {"rank", g.rank},
                                  {"full_rank", g.full_rank},
                                  {"reconstructed", g.reconstructed}});
  }
  doc["eavesdropper"] = std::move(eve);
  return doc.dump(2) + "\n";
}

std::string summary(const RunReport& report) {
  std::ostringstream out;
  out << "seed " << report.seed << ", " << report.rounds_run << " rounds\n";
  for (const auto& s : report.sinks) {
    std::size_t decoded = 0;
    std::size_t correct = 0;
    std::size_t rejected = 0;
    for (const auto& o : s.generations) {
      decoded += o.decoded;
      correct += o.decoded && o.matches_source;
      rejected += o.integrity_reject;
    }
    out << "sink " << s.id << ": decoded " << decoded << "/" << s.generations.size()
        << " (correct " << correct << ", integrity rejects " << rejected << ")\n";
  }
  if (report.injected > 0) out << "injected packets: " << report.injected << "\n";
  const auto view = eavesdropper_view(report);
  if (!view.empty()) {
    out << "eavesdropper: " << view.packets_observed << " packets observed, natives "
        << (view.any_reconstructed ? "RECONSTRUCTED" : "not reconstructed") << "\n";
  }
  out << (report.all_correct ? "all sinks decoded every generation\n" : "decode incomplete\n");
  return out.str();
}

}  // namespace spoc::sim
