#include <cmath>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "spoc/analysis.hpp"

using namespace spoc;
using gf::FieldId;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream l(line);
    std::string cell;
    while (std::getline(l, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("default overhead table has 24 recomputable cells") {
  const auto rows = analysis::overhead_table(analysis::default_packet_sizes(), analysis::default_h_values(),
                                             {FieldId::GF256, FieldId::GF65536});
  REQUIRE(rows.size() == 24);
  const auto csv = parse_csv(analysis::to_csv(rows));
  REQUIRE(csv.size() == 25);
  CHECK(csv[0] == std::vector<std::string>{"packet_bytes", "h", "field", "overhead_percent"});
  for (std::size_t i = 1; i < csv.size(); ++i) {
    const double size = std::stod(csv[i][0]), h = std::stod(csv[i][1]);
    const double s = csv[i][2] == "GF256" ? 1 : 2;
    CHECK(std::stod(csv[i][3]) == doctest::Approx(100 * h * s / size).epsilon(1e-4));
  }
  const auto doc = nlohmann::json::parse(analysis::to_json(rows));
  CHECK(doc.size() == 24);
  CHECK(doc[0]["overhead_percent"].get<double>() == doctest::Approx(20.0 / 15));
}

TEST_CASE("overhead examples") {
  const auto r = analysis::overhead_table({5000}, {20}, {FieldId::GF256, FieldId::GF65536});
  CHECK(std::abs(r[0].overhead_percent - 0.4) <= 0.05);
  CHECK(r[1].overhead_percent == doctest::Approx(2 * r[0].overhead_percent));
  CHECK_THROWS_AS(analysis::overhead_table({0}, {20}, {FieldId::GF256}), Error);
}

TEST_CASE("encryption volume is a step function") {
  CHECK(analysis::spoc_volume(0, 20, FieldId::GF256) == 0);
  CHECK(analysis::spoc_volume(1, 20, FieldId::GF256) == 20);
  CHECK(analysis::spoc_volume(1480, 20, FieldId::GF256) == 20);
  CHECK(analysis::spoc_volume(1481, 20, FieldId::GF256) == 40);
  CHECK(analysis::spoc_volume(1480, 20, FieldId::GF65536) == 40);
  const auto rows = analysis::volume_table({0, 1480, 14800}, 20, FieldId::GF256);
  CHECK(rows[0].spoc_bytes == 0);
  CHECK(rows[0].traditional_bytes == 0);
  CHECK(rows[2].spoc_bytes == 200);
  CHECK(rows[2].traditional_bytes == 14800);
  CHECK(rows[2].spoc_bytes / double(rows[2].traditional_bytes) == doctest::Approx(0.0135).epsilon(0.01));
  const auto csv = parse_csv(analysis::to_csv(rows));
  for (std::size_t i = 1; i < csv.size(); ++i) {
    const auto d = std::stoull(csv[i][0]);
    CHECK(std::stoull(csv[i][3]) == (d + 1479) / 1480 * 20);
    CHECK(std::stoull(csv[i][4]) == d);
  }
}

TEST_CASE("bench counts match the closed forms") {
  for (FieldId id : {FieldId::GF256, FieldId::GF65536}) {
    for (std::size_t h : {2u, 8u, 16u}) {
      const auto r = analysis::bench(h, id, 12, 5);
      CHECK(r.source_header.mul == h * h);
      CHECK(r.source_header.add == (h - 1) * h);
      CHECK(r.source_payload.mul == h * 12);
      CHECK(r.recode_n == h);
      CHECK(r.recode_header.mul == r.recode_n * h);
      CHECK(r.recode_header.add == (r.recode_n - 1) * h);
      CHECK(r.recode_payload.mul == r.recode_n * 12);
      // Two h x h products are exactly 2h^3; Gauss-Jordan on [M_U | I] adds
      // at most h rows x 2h columns per pivot.
      CHECK(r.sink_matrix.mul >= 2 * h * h * h);
      CHECK(r.sink_matrix.mul <= 4 * h * h * h);
    }
  }
}

TEST_CASE("sink cost is cubic") {
  const auto rows = analysis::bench_table({8, 16, 32, 64}, FieldId::GF256, 16, 1);
  std::vector<double> x, y;
  for (const auto& r : rows) {
    x.push_back(double(r.h));
    y.push_back(double(r.sink_total_mul()));
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double ratio = y[i] / y[i - 1];
    CAPTURE(ratio);
    CHECK(ratio >= 6);
    CHECK(ratio <= 10);
  }
  CHECK(std::abs(analysis::fit_exponent(x, y) - 3.0) <= 0.3);
  CHECK(analysis::to_csv(rows).find("# sink_total_mul exponent") != std::string::npos);
  const auto doc = nlohmann::json::parse(analysis::to_json(rows));
  CHECK(doc["rows"].size() == 4);
  CHECK(doc["sink_total_mul_exponent"].get<double>() == doctest::Approx(analysis::fit_exponent(x, y)));
}

TEST_CASE("exponent fit") {
  CHECK(analysis::fit_exponent({1, 2, 4}, {3, 24, 192}) == doctest::Approx(3.0));
  CHECK(analysis::fit_exponent({2, 4}, {5, 5}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(analysis::fit_exponent({1}, {1}), Error);
}

}
