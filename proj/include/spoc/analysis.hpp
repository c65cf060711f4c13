#pragma once

// Closed-form overhead tables and counted operation benchmarks.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "spoc/gf.hpp"

namespace spoc::analysis {

inline constexpr std::size_t kMaxPayloadBytes = 1480;

struct OverheadRow {
  std::size_t packet_bytes = 0;
  std::size_t h = 0;
  gf::FieldId field = gf::FieldId::GF256;
  double overhead_percent = 0.0;
};

/// One row per (packet size, h, field), in that nesting order.
std::vector<OverheadRow> overhead_table(const std::vector<std::size_t>& packet_sizes,
                                        const std::vector<std::size_t>& hs,
                                        const std::vector<gf::FieldId>& fields);

std::vector<std::size_t> default_packet_sizes();
std::vector<std::size_t> default_h_values();

struct VolumeRow {
  std::uint64_t plaintext_bytes = 0;
  std::size_t h = 0;
  gf::FieldId field = gf::FieldId::GF256;
  std::uint64_t spoc_bytes = 0;
  std::uint64_t traditional_bytes = 0;
};

/// Bytes locked to carry `plaintext_bytes`: one set of h locked coefficients
/// per started 1480-byte payload.
std::uint64_t spoc_volume(std::uint64_t plaintext_bytes, std::size_t h, gf::FieldId field);

std::vector<VolumeRow> volume_table(const std::vector<std::uint64_t>& sizes, std::size_t h,
                                    gf::FieldId field);

/// Counted field operations for one generation of size h.
struct BenchRow {
  std::size_t h = 0;
  gf::FieldId field = gf::FieldId::GF256;
  std::size_t payload_symbols = 0;
  // Source: locked-coefficient work for one emitted packet.
  gf::OpCounts source_header;
  gf::OpCounts source_payload;
  // Relay: recoding n = h stored packets into one.
  std::size_t recode_n = 0;
  gf::OpCounts recode_header;  // locked set only
  gf::OpCounts recode_payload;
  // Sink: inverse and the two matrix products, then the payload solve.
  gf::OpCounts sink_matrix;
  gf::OpCounts sink_payload;

  std::uint64_t sink_total_mul() const noexcept { return sink_matrix.mul + sink_payload.mul; }
};

BenchRow bench(std::size_t h, gf::FieldId field, std::size_t payload_symbols, std::uint64_t seed);
std::vector<BenchRow> bench_table(const std::vector<std::size_t>& hs, gf::FieldId field,
                                  std::size_t payload_symbols, std::uint64_t seed);

/// Least-squares slope of log(y) against log(x).
double fit_exponent(const std::vector<double>& x, const std::vector<double>& y);

std::string to_csv(const std::vector<OverheadRow>& rows);
std::string to_csv(const std::vector<VolumeRow>& rows);
std::string to_csv(const std::vector<BenchRow>& rows);
std::string to_json(const std::vector<OverheadRow>& rows);
std::string to_json(const std::vector<VolumeRow>& rows);
std::string to_json(const std::vector<BenchRow>& rows);

}  // namespace spoc::analysis
