#include <set>

#include "doctest.h"
#include "spoc/simnet.hpp"

using namespace spoc;
using namespace spoc::sim;

namespace {

ScenarioConfig butterfly_config() {
  ScenarioConfig c;
  c.h = 2;
  c.payload_symbols = 8;
  c.coefficients = CoefficientMode::Seeded;
  return c;
}

const GenerationOutcome& outcome(const RunReport& r, NodeId sink, std::size_t g = 0) {
  for (const auto& s : r.sinks)
    if (s.id == sink) return s.generations.at(g);
  FAIL("no such sink");
  return r.sinks.front().generations.front();
}

}  // namespace

TEST_SUITE("simnet") {

TEST_CASE("butterfly shape") {
  const auto t = build_butterfly();
  t.validate();
  CHECK(t.nodes().size() == 7);
  CHECK(t.edges().size() == 9);
  CHECK(t.source() == 1);
  CHECK(t.sinks() == std::vector<NodeId>{6, 7});
  CHECK(t.min_cut(1, 6) == 2);
  CHECK(t.min_cut(1, 7) == 2);
  CHECK(t.min_cut(1, 5) == 1);
  for (auto [f, to] : std::vector<std::pair<NodeId, NodeId>>{{1, 2}, {1, 3}, {2, 4}, {3, 4}, {2, 6}, {3, 7}, {4, 5}, {5, 6}, {5, 7}}) {
    CHECK(t.find_edge(f, to).has_value());
  }
}

TEST_CASE("topology validation names the problem") {
  auto bad = [](std::vector<Node> n, std::vector<Edge> e) {
    try {
      Topology(std::move(n), std::move(e)).validate();
    } catch (const Error& err) {
      CHECK(err.code() == Errc::ConfigInvalid);
      return std::string(err.what());
    }
    return std::string();
  };
  CHECK(bad({{1, Role::Source}, {2, Role::Sink}}, {{1, 1}}).find("edges[0]") != std::string::npos);
  CHECK(bad({{1, Role::Source}, {2, Role::Sink}}, {{1, 3}}).find("edges[0]") != std::string::npos);
  CHECK(!bad({{1, Role::Source}, {2, Role::Sink}}, {}).empty());
  CHECK(!bad({{1, Role::Source}, {1, Role::Sink}}, {{1, 1}}).empty());
  CHECK(!bad({{1, Role::Intermediate}, {2, Role::Sink}}, {{1, 2}}).empty());
  CHECK(!bad({{1, Role::Source}, {2, Role::Sink}}, {{1, 2, 1, 1.5}}).empty());
}

TEST_CASE("random DAGs are valid") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto t = random_dag(3 + seed % 8, seed);
    CHECK_NOTHROW(t.validate());
    for (NodeId s : t.sinks()) CHECK(t.min_cut(t.source(), s) >= 1);
  }
}

TEST_CASE("butterfly decodes by round 4") {
  const auto t = build_butterfly();
  int on_time = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto r = run(t, butterfly_config(), seed);
    REQUIRE(r.all_correct);
    bool both = true;
    for (NodeId s : {6u, 7u}) {
      const auto& o = outcome(r, s);
      REQUIRE(o.decode_round.has_value());
      REQUIRE(*o.decode_round >= 4);
      both = both && *o.decode_round == 4;
    }
    on_time += both;
  }
  // Node 4 draws a zero coefficient with probability about 2/256.
  CHECK(on_time >= 95);
}

TEST_CASE("store-and-forward at the bottleneck starves a sink") {
  const auto t = build_butterfly();
  auto c = butterfly_config();
  c.store_and_forward = {4};
  c.max_rounds = 4;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto r = run(t, c, seed);
    CHECK((outcome(r, 6).rank < 2 || outcome(r, 7).rank < 2));
  }
}

TEST_CASE("determinism") {
  const auto t = build_butterfly();
  auto c = butterfly_config();
  c.generations = 5;
  c.adversary.eavesdrop_all = true;
  const auto a = run(t, c, 17), b = run(t, c, 17);
  CHECK(to_json(a) == to_json(b));
  CHECK(a.trajectory == b.trajectory);
  CHECK(to_json(run(t, c, 18)) != to_json(a));
}

TEST_CASE("conservation") {
  auto t = random_dag(9, 5, 0.4, 2, 0.2);
  ScenarioConfig c;
  c.h = 4;
  c.generations = 6;
  c.adversary.drops.push_back({t.edges()[0].from, t.edges()[0].to, 0.3, std::nullopt});
  const auto r = run(t, c, 3);
  for (const auto& e : r.edges) CHECK(e.delivered + e.lost + e.dropped == e.offered);
  std::uint64_t delivered = 0, received = 0;
  for (const auto& e : r.edges) delivered += e.delivered;
  for (const auto& n : r.nodes) {
    CHECK(n.stored + n.discarded == n.received);
    received += n.received;
  }
  CHECK(delivered == received);
}

TEST_CASE("throughput approaches the min-cut") {
  auto c = butterfly_config();
  c.generations = 100;
  c.rounds_per_generation = 1;
  const auto r = run(build_butterfly(), c, 9);
  for (const auto& s : r.sinks) {
    const auto idx = *build_butterfly().index_of(s.id);
    const double per_round = r.trajectory.back()[idx].stored / double(r.rounds_run);
    CAPTURE(per_round);
    CHECK(per_round >= 1.8);
    CHECK(per_round <= 2.2);
  }
}

TEST_CASE("locking does not change any decision") {
  auto t = random_dag(8, 21, 0.5, 2, 0.2);
  ScenarioConfig c;
  c.h = 4;
  c.generations = 4;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    c.locking = true;
    const auto locked = run(t, c, seed);
    c.locking = false;
    const auto plain = run(t, c, seed);
    REQUIRE(locked.trajectory == plain.trajectory);
  }
}

TEST_CASE("lost bottleneck") {
  auto t = build_butterfly();
  t.edges()[*t.find_edge(4, 5)].loss = 1.0;
  const auto r = run(t, butterfly_config(), 1);
  CHECK_FALSE(r.all_decoded);
  CHECK(outcome(r, 6).rank == 1);
  CHECK(outcome(r, 7).rank == 1);
  CHECK(r.undelivered_generations == std::vector<std::uint32_t>{0});
}

TEST_CASE("side paths carry a generation around a dead link") {
  auto t = build_butterfly();
  t.edges()[*t.find_edge(2, 6)].loss = 1.0;
  t.edges().push_back({4, 6, 1, 0.0});
  const auto r = run(t, butterfly_config(), 1);
  CHECK(outcome(r, 6).decoded);
  CHECK(outcome(r, 6).matches_source);
}

TEST_CASE("injection is caught only with integrity") {
  const auto t = build_butterfly();
  auto c = butterfly_config();
  c.adversary.injections.push_back({4, 1, 1, 3});
  int garbage = 0, rejected = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    c.integrity_z = 0;
    const auto open = run(t, c, seed);
    CHECK(open.injected == 3);
    CHECK(open.integrity_events.empty());
    garbage += !open.all_correct;

    c.integrity_z = 2;
    const auto guarded = run(t, c, seed);
    rejected += !guarded.integrity_events.empty();
    for (const auto& s : guarded.sinks)
      for (const auto& o : s.generations) CHECK_FALSE((o.decoded && !o.matches_source));
  }
  CHECK(garbage >= 18);
  CHECK(rejected >= 18);
}

TEST_CASE("integrity never fires without an adversary") {
  ScenarioConfig c;
  c.h = 4;
  c.generations = 3;
  c.integrity_z = 2;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto r = run(random_dag(7, seed, 0.5), c, seed);
    CHECK(r.integrity_events.empty());
    for (const auto& s : r.sinks)
      for (const auto& o : s.generations)
        if (o.decoded) CHECK(o.matches_source);
  }
}

TEST_CASE("eavesdropper") {
  const auto t = build_butterfly();
  auto c = butterfly_config();
  c.generations = 3;

  SUBCASE("no tapped edges") {
    CHECK(eavesdropper_view(run(t, c, 1)).empty());
  }
  SUBCASE("locked") {
    c.adversary.eavesdrop_all = true;
    const auto v = eavesdropper_view(run(t, c, 1));
    CHECK(v.packets_observed > 0);
    REQUIRE(v.generations.size() == 3);
    for (const auto& g : v.generations) CHECK(g.full_rank);
    CHECK_FALSE(v.any_reconstructed);
  }
  SUBCASE("stub keystream") {
    c.adversary.eavesdrop_all = true;
    c.locking = false;
    const auto v = eavesdropper_view(run(t, c, 1));
    CHECK(v.any_reconstructed);
    for (const auto& g : v.generations) CHECK(g.reconstructed);
  }
  SUBCASE("single edge") {
    c.adversary.eavesdrop_edges = {{2, 6}};  // node 2 only ever holds one source row
    c.locking = false;
    const auto v = eavesdropper_view(run(t, c, 1));
    for (const auto& g : v.generations) CHECK(g.rank == 1);
    CHECK_FALSE(v.any_reconstructed);
  }
}

TEST_CASE("received packets are combinations of the source's emitted rows") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto t = random_dag(10, seed, 0.4, 3, 0.1);
    ScenarioConfig c;
    c.h = 3;
    c.generations = 3;
    c.locking = seed % 2 == 0;
    const auto r = run(t, c, seed);
    for (const auto& [sink, buffers] : r.truth.sink_buffers) {
      for (const auto& [g, buf] : buffers) {
        const auto& rows = r.truth.locked_rows.at(g);
        for (const auto& p : buf.packets()) {
          const gf::SymbolMatrix u(c.field, 1, c.h, p.header.unlocked);
          REQUIRE(gf::mat_mul(u, rows).data() == p.header.locked);
        }
        if (!c.locking) {
          for (const auto& p : buf.packets()) {
            const gf::SymbolMatrix l(c.field, 1, c.h, p.header.locked);
            REQUIRE(gf::mat_mul(l, r.truth.natives.at(g)).data() == p.payload);
          }
        }
      }
    }
  }
}

TEST_CASE("undelivered generations are reported") {
  auto c = butterfly_config();
  c.generations = 4;
  c.max_rounds = 3;
  const auto r = run(build_butterfly(), c, 1);
  CHECK(r.undelivered_generations == std::vector<std::uint32_t>{0, 1, 2, 3});
}

TEST_CASE("source recoding repairs a lost packet") {
  const Topology t({{1, Role::Source}, {2, Role::Sink}}, {{1, 2}});
  auto c = butterfly_config();
  c.rounds_per_generation = 4;
  c.adversary.drops.push_back({1, 2, 0.0, 1});
  const auto r = run(t, c, 1);
  CHECK(r.edges[0].dropped == 1);
  CHECK(outcome(r, 2).decoded);
  CHECK(outcome(r, 2).matches_source);
  CHECK(*outcome(r, 2).decode_round >= 3);
}

TEST_CASE("report documents") {
  auto c = butterfly_config();
  c.adversary.eavesdrop_all = true;
  const auto r = run(build_butterfly(), c, 2);
  const auto json = to_json(r);
  for (const char* key : {"\"seed\"", "\"rounds_run\"", "\"sinks\"", "\"decode_round\"", "\"edges\"",
                          "\"integrity_events\"", "\"eavesdropper\""}) {
    CHECK(json.find(key) != std::string::npos);
  }
  const auto text = summary(r);
  CHECK(text.find("sink 6: decoded 1/1") != std::string::npos);
  CHECK(text.find("not reconstructed") != std::string::npos);
}

TEST_CASE("invalid configs are refused before running") {
  auto c = butterfly_config();
  c.h = 0;
  CHECK_THROWS_AS(run(build_butterfly(), c, 1), Error);
}

}
