// spoc: scenario runner and analysis tables.
//
//   spoc run configs/butterfly.json --seed 7 --out report.json
//   spoc overhead [--sizes 1500,5000,8192] [--h 20,50,100,200]
//   spoc volume --h 20 --field GF256
//   spoc bench --h 8,16,32,64
//
// Exit status: 0 success, 1 configuration or usage error, 2 decode failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spoc/analysis.hpp"
#include "spoc/scenario.hpp"
#include "spoc/simnet.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kDecodeFailure = 2;

struct Common {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, Common& c, const std::string& default_format) {
  c.format = default_format;
  cmd->add_option("--seed", c.seed, "Random seed");
  cmd->add_option("--out", c.out, "Output file (default stdout)");
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary | std::ios::trunc);
  if (!f) throw spoc::Error(spoc::Errc::Io, "--out: cannot write " + c.out);
  f << text;
  if (!f) throw spoc::Error(spoc::Errc::Io, "--out: write failed for " + c.out);
}

spoc::gf::FieldId parse_field(const std::string& s) {
  if (s == "GF256" || s == "8") return spoc::gf::FieldId::GF256;
  if (s == "GF65536" || s == "16") return spoc::gf::FieldId::GF65536;
  throw spoc::Error(spoc::Errc::ConfigInvalid, "--field: expected GF256 or GF65536, got " + s);
}

int cmd_run(const std::string& config_path, const Common& c) {
  if (c.format == "csv") {
    throw spoc::Error(spoc::Errc::ConfigInvalid, "--format: run reports are JSON only");
  }
  const auto scenario = spoc::sim::load_scenario(config_path);
  const std::uint64_t seed = c.seed.value_or(scenario.config.seed);
  const auto report = spoc::sim::run(scenario.topology, scenario.config, seed);
  emit(c, spoc::sim::to_json(report));
  (c.out.empty() ? std::cerr : std::cout) << spoc::sim::summary(report);
  return report.all_correct ? kOk : kDecodeFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secure practical network coding: simulator and analysis"};
  app.require_subcommand(1);

  Common run_opts;
  std::string config_path;
  auto* run = app.add_subcommand("run", "Run a scenario and write its JSON report");
  run->add_option("config", config_path, "Scenario file")->required();
  add_common(run, run_opts, "json");

  Common overhead_opts;
  std::vector<std::size_t> sizes = spoc::analysis::default_packet_sizes();
  std::vector<std::size_t> hs = spoc::analysis::default_h_values();
  std::vector<std::string> fields{"GF256", "GF65536"};
  auto* overhead = app.add_subcommand("overhead", "Locked-coefficient share of each packet");
  overhead->set_help_flag("--help", "Print this help message and exit");
  overhead->add_option("--sizes", sizes, "Maximum packet sizes in bytes")->delimiter(',');
  overhead->add_option("--h", hs, "Generation sizes")->delimiter(',');
  overhead->add_option("--fields", fields, "Fields")->delimiter(',');
  add_common(overhead, overhead_opts, "csv");

  Common volume_opts;
  std::vector<std::uint64_t> plaintexts;
  std::size_t volume_h = 20;
  std::string volume_field = "GF256";
  auto* volume = app.add_subcommand("volume", "Bytes to encrypt against plaintext size");
  volume->set_help_flag("--help", "Print this help message and exit");
  volume->add_option("--sizes", plaintexts, "Plaintext sizes in bytes")->delimiter(',');
  volume->add_option("--h", volume_h, "Generation size");
  volume->add_option("--field", volume_field, "Field");
  add_common(volume, volume_opts, "csv");

  Common bench_opts;
  std::vector<std::size_t> bench_hs{8, 16, 32, 64};
  std::string bench_field = "GF256";
  std::size_t payload = 16;
  auto* bench = app.add_subcommand("bench", "Counted field operations per node role");
  bench->set_help_flag("--help", "Print this help message and exit");
  bench->add_option("--h", bench_hs, "Generation sizes, ascending")->delimiter(',');
  bench->add_option("--field", bench_field, "Field");
  bench->add_option("--payload", payload, "Payload symbols per packet");
  add_common(bench, bench_opts, "csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*run) return cmd_run(config_path, run_opts);

    if (*overhead) {
      std::vector<spoc::gf::FieldId> ids;
      for (const auto& f : fields) ids.push_back(parse_field(f));
      const auto rows = spoc::analysis::overhead_table(sizes, hs, ids);
      emit(overhead_opts, overhead_opts.format == "json" ? spoc::analysis::to_json(rows)
                                                          : spoc::analysis::to_csv(rows));
    } else if (*volume) {
      if (plaintexts.empty()) {
        for (std::uint64_t d = 0; d <= 10 * spoc::analysis::kMaxPayloadBytes; d += 370) plaintexts.push_back(d);
      }
      const auto rows = spoc::analysis::volume_table(plaintexts, volume_h, parse_field(volume_field));
      emit(volume_opts, volume_opts.format == "json" ? spoc::analysis::to_json(rows)
                                                      : spoc::analysis::to_csv(rows));
    } else if (*bench) {
      for (std::size_t i = 1; i < bench_hs.size(); ++i) {
        if (bench_hs[i] <= bench_hs[i - 1]) {
          throw spoc::Error(spoc::Errc::ConfigInvalid, "--h: values must be strictly ascending");
        }
      }
      const auto rows = spoc::analysis::bench_table(bench_hs, parse_field(bench_field), payload,
                                                    bench_opts.seed.value_or(1));
      emit(bench_opts, bench_opts.format == "json" ? spoc::analysis::to_json(rows)
                                                    : spoc::analysis::to_csv(rows));
    }
    return kOk;
  } catch (const spoc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
}
