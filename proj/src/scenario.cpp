#include "spoc/scenario.hpp"

#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <string>
#include <tuple>

#include "json.hpp"
#include "spoc/error.hpp"
#include "spoc/integrity.hpp"

namespace spoc::sim {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
  throw Error(Errc::ConfigInvalid, field + ": " + what);
}

void only_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> keys) {
  for (const auto& [k, _] : obj.items()) {
    bool known = false;
    for (auto allowed : keys) known = known || k == allowed;
    if (!known) invalid(where.empty() ? k : where + "." + k, "unknown key");
  }
}

const json& object(const json& v, const std::string& field) {
  if (!v.is_object()) invalid(field, "expected an object");
  return v;
}

std::uint64_t unsigned_at(const json& v, const std::string& field, std::uint64_t max) {
  if (!v.is_number_unsigned()) {
    invalid(field, "expected a non-negative integer");
  }
  const auto value = v.get<std::uint64_t>();
  if (value > max) invalid(field, "must be at most " + std::to_string(max));
  return value;
}

double probability_at(const json& v, const std::string& field) {
  if (!v.is_number()) invalid(field, "expected a number");
  const double p = v.get<double>();
  if (!(p >= 0.0 && p <= 1.0)) invalid(field, "must be in [0, 1]");
  return p;
}

bool bool_at(const json& v, const std::string& field) {
  if (!v.is_boolean()) invalid(field, "expected true or false");
  return v.get<bool>();
}

NodeId node_at(const json& v, const std::string& field) {
  return static_cast<NodeId>(unsigned_at(v, field, std::numeric_limits<NodeId>::max()));
}

std::pair<NodeId, NodeId> edge_ref(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 2) invalid(field, "expected [from, to]");
  return {node_at(v[0], field + "[0]"), node_at(v[1], field + "[1]")};
}

Topology parse_topology(const json& v) {
  if (v.is_string()) {
    if (v.get<std::string>() == "butterfly") return build_butterfly();
    invalid("topology", "unknown preset '" + v.get<std::string>() + "'");
  }
  object(v, "topology");
  only_keys(v, "topology", {"nodes", "edges"});
  if (!v.contains("nodes") || !v["nodes"].is_array()) invalid("topology.nodes", "expected an array");
  if (!v.contains("edges") || !v["edges"].is_array()) invalid("topology.edges", "expected an array");

  std::vector<Node> nodes;
  for (std::size_t i = 0; i < v["nodes"].size(); ++i) {
    const std::string where = "topology.nodes[" + std::to_string(i) + "]";
    const auto& n = object(v["nodes"][i], where);
    only_keys(n, where, {"id", "role"});
    if (!n.contains("id")) invalid(where + ".id", "missing");
    Node node{node_at(n["id"], where + ".id"), Role::Intermediate};
    if (n.contains("role")) {
      if (!n["role"].is_string()) invalid(where + ".role", "expected a string");
      const auto role = role_from_string(n["role"].get<std::string>());
      if (!role) invalid(where + ".role", "expected source, intermediate or sink");
      node.role = *role;
    }
    nodes.push_back(node);
  }

  std::vector<Edge> edges;
  for (std::size_t i = 0; i < v["edges"].size(); ++i) {
    const std::string where = "topology.edges[" + std::to_string(i) + "]";
    const auto& e = object(v["edges"][i], where);
    only_keys(e, where, {"from", "to", "capacity", "loss"});
    if (!e.contains("from")) invalid(where + ".from", "missing");
    if (!e.contains("to")) invalid(where + ".to", "missing");
    Edge edge{node_at(e["from"], where + ".from"), node_at(e["to"], where + ".to"), 1, 0.0};
    if (e.contains("capacity")) {
      edge.capacity = static_cast<std::uint32_t>(unsigned_at(e["capacity"], where + ".capacity", 1u << 16));
    }
    if (e.contains("loss")) edge.loss = probability_at(e["loss"], where + ".loss");
    edges.push_back(edge);
  }
  return {std::move(nodes), std::move(edges)};
}

AdversaryConfig parse_adversary(const json& v) {
  object(v, "adversary");
  only_keys(v, "adversary", {"eavesdrop", "drop", "inject"});
  AdversaryConfig adv;
  if (v.contains("eavesdrop")) {
    const auto& e = v["eavesdrop"];
    if (e.is_string() && e.get<std::string>() == "all") {
      adv.eavesdrop_all = true;
    } else if (e.is_array()) {
      for (std::size_t i = 0; i < e.size(); ++i) {
        adv.eavesdrop_edges.push_back(edge_ref(e[i], "adversary.eavesdrop[" + std::to_string(i) + "]"));
      }
    } else {
      invalid("adversary.eavesdrop", "expected \"all\" or a list of [from, to] edges");
    }
  }
  if (v.contains("drop")) {
    if (!v["drop"].is_array()) invalid("adversary.drop", "expected an array");
    for (std::size_t i = 0; i < v["drop"].size(); ++i) {
      const std::string where = "adversary.drop[" + std::to_string(i) + "]";
      const auto& d = object(v["drop"][i], where);
      only_keys(d, where, {"edge", "probability", "budget"});
      if (!d.contains("edge")) invalid(where + ".edge", "missing");
      DropRule rule;
      std::tie(rule.from, rule.to) = edge_ref(d["edge"], where + ".edge");
      if (d.contains("probability") == d.contains("budget")) {
        invalid(where, "give exactly one of probability or budget");
      }
      if (d.contains("probability")) rule.probability = probability_at(d["probability"], where + ".probability");
      if (d.contains("budget")) {
        rule.budget = unsigned_at(d["budget"], where + ".budget", std::numeric_limits<std::uint64_t>::max());
      }
      adv.drops.push_back(rule);
    }
  }
  if (v.contains("inject")) {
    if (!v["inject"].is_array()) invalid("adversary.inject", "expected an array");
    for (std::size_t i = 0; i < v["inject"].size(); ++i) {
      const std::string where = "adversary.inject[" + std::to_string(i) + "]";
      const auto& in = object(v["inject"][i], where);
      only_keys(in, where, {"target", "per_round", "first_round", "last_round"});
      if (!in.contains("target")) invalid(where + ".target", "missing");
      InjectRule rule;
      rule.target = node_at(in["target"], where + ".target");
      constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
      if (in.contains("per_round")) rule.per_round = static_cast<std::uint32_t>(unsigned_at(in["per_round"], where + ".per_round", kMax));
      if (in.contains("first_round")) rule.first_round = static_cast<std::uint32_t>(unsigned_at(in["first_round"], where + ".first_round", kMax));
      if (in.contains("last_round")) rule.last_round = static_cast<std::uint32_t>(unsigned_at(in["last_round"], where + ".last_round", kMax));
      adv.injections.push_back(rule);
    }
  }
  return adv;
}

}  // namespace

bool AdversaryConfig::eavesdrops(NodeId from, NodeId to) const {
  if (eavesdrop_all) return true;
  for (const auto& [f, t] : eavesdrop_edges)
    if (f == from && t == to) return true;
  return false;
}

void validate(const Topology& topology, const ScenarioConfig& c) {
  topology.validate();
  if (c.h == 0 || c.h > 0xFFFF) invalid("h", "must be between 1 and 65535");
  if (c.payload_symbols == 0 || c.payload_symbols > 0xFFFF) {
    invalid("payload_symbols", "must be between 1 and 65535");
  }
  if (c.generations == 0) invalid("generations", "must be at least 1");
  if (c.integrity_z > c.payload_symbols) invalid("integrity.z", "must not exceed payload_symbols");
  for (NodeId n : c.store_and_forward) {
    if (!topology.index_of(n)) invalid("store_and_forward", "unknown node " + std::to_string(n));
  }
  for (std::size_t i = 0; i < c.adversary.eavesdrop_edges.size(); ++i) {
    const auto& [f, t] = c.adversary.eavesdrop_edges[i];
    if (!topology.find_edge(f, t)) invalid("adversary.eavesdrop[" + std::to_string(i) + "]", "no such edge");
  }
  for (std::size_t i = 0; i < c.adversary.drops.size(); ++i) {
    const auto& d = c.adversary.drops[i];
    if (!topology.find_edge(d.from, d.to)) invalid("adversary.drop[" + std::to_string(i) + "].edge", "no such edge");
    if (!(d.probability >= 0.0 && d.probability <= 1.0)) {
      invalid("adversary.drop[" + std::to_string(i) + "].probability", "must be in [0, 1]");
    }
  }
  for (std::size_t i = 0; i < c.adversary.injections.size(); ++i) {
    const auto& in = c.adversary.injections[i];
    const std::string where = "adversary.inject[" + std::to_string(i) + "]";
    if (!topology.index_of(in.target)) invalid(where + ".target", "unknown node " + std::to_string(in.target));
    if (in.target == topology.source()) invalid(where + ".target", "cannot inject into the source");
  }
}

Scenario parse_scenario(std::string_view json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    invalid("config", std::string("malformed JSON: ") + e.what());
  }
  object(doc, "config");
  only_keys(doc, "", {"topology", "h", "field", "payload_symbols", "generations",
                      "rounds_per_generation", "max_rounds", "locking", "integrity",
                      "store_and_forward", "adversary", "seed", "key_file", "coefficients"});

  Scenario s;
  auto& c = s.config;
  if (!doc.contains("topology")) invalid("topology", "missing");
  s.topology = parse_topology(doc["topology"]);

  if (doc.contains("h")) c.h = unsigned_at(doc["h"], "h", 0xFFFF);
  if (doc.contains("field")) {
    const auto& f = doc["field"];
    if (f == "GF256" || f == 8) c.field = gf::FieldId::GF256;
    else if (f == "GF65536" || f == 16) c.field = gf::FieldId::GF65536;
    else invalid("field", "expected \"GF256\" or \"GF65536\"");
  }
  if (doc.contains("payload_symbols")) c.payload_symbols = unsigned_at(doc["payload_symbols"], "payload_symbols", 0xFFFF);
  if (doc.contains("generations")) c.generations = unsigned_at(doc["generations"], "generations", 1u << 20);
  if (doc.contains("rounds_per_generation")) {
    c.rounds_per_generation = unsigned_at(doc["rounds_per_generation"], "rounds_per_generation", 1u << 20);
  }
  if (doc.contains("max_rounds")) c.max_rounds = unsigned_at(doc["max_rounds"], "max_rounds", 1u << 24);
  if (doc.contains("locking")) c.locking = bool_at(doc["locking"], "locking");
  if (doc.contains("integrity")) {
    const auto& in = doc["integrity"];
    if (in.is_boolean()) {
      c.integrity_z = in.get<bool>() ? integrity::kDefaultParityRows : 0;
    } else if (in.is_object()) {
      only_keys(in, "integrity", {"z"});
      c.integrity_z = in.contains("z") ? unsigned_at(in["z"], "integrity.z", 0xFFFF) : integrity::kDefaultParityRows;
      if (c.integrity_z == 0) invalid("integrity.z", "must be at least 1 (omit the block to disable)");
    } else if (!in.is_null()) {
      invalid("integrity", "expected an object, a boolean or null");
    }
  }
  if (doc.contains("store_and_forward")) {
    const auto& list = doc["store_and_forward"];
    if (!list.is_array()) invalid("store_and_forward", "expected an array of node ids");
    for (std::size_t i = 0; i < list.size(); ++i) {
      c.store_and_forward.insert(node_at(list[i], "store_and_forward[" + std::to_string(i) + "]"));
    }
  }
  if (doc.contains("adversary")) c.adversary = parse_adversary(doc["adversary"]);
  if (doc.contains("seed")) c.seed = unsigned_at(doc["seed"], "seed", std::numeric_limits<std::uint64_t>::max());
  if (doc.contains("key_file")) {
    if (!doc["key_file"].is_string()) invalid("key_file", "expected a path string");
    std::filesystem::path p = doc["key_file"].get<std::string>();
    c.key_file = p.is_relative() ? base_dir / p : p;
  }
  if (doc.contains("coefficients")) {
    const auto& m = doc["coefficients"];
    if (m == "secure") c.coefficients = CoefficientMode::Secure;
    else if (m == "seeded") c.coefficients = CoefficientMode::Seeded;
    else invalid("coefficients", "expected \"secure\" or \"seeded\"");
  }

  validate(s.topology, c);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ConfigInvalid, "config: cannot open " + path.string());
  std::stringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str(), path.parent_path());
}

}  // namespace spoc::sim
