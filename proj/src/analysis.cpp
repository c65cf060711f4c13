#include "spoc/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "spoc/locking.hpp"
#include "spoc/rlnc.hpp"
#include "spoc/wire.hpp"

namespace spoc::analysis {

std::vector<std::size_t> default_packet_sizes() { return {1500, 5000, 8192}; }
std::vector<std::size_t> default_h_values() { return {20, 50, 100, 200}; }

std::vector<OverheadRow> overhead_table(const std::vector<std::size_t>& packet_sizes,
                                        const std::vector<std::size_t>& hs,
                                        const std::vector<gf::FieldId>& fields) {
  std::vector<OverheadRow> rows;
  for (std::size_t size : packet_sizes) {
    if (size == 0) throw Error(Errc::ConfigInvalid, "packet size must be positive");
    for (std::size_t h : hs) {
      if (h == 0) throw Error(Errc::ConfigInvalid, "h must be positive");
      for (gf::FieldId f : fields) {
        rows.push_back({size, h, f, wire::header_overhead(h, gf::symbol_bytes(f), size)});
      }
    }
  }
  return rows;
}

std::uint64_t spoc_volume(std::uint64_t plaintext_bytes, std::size_t h, gf::FieldId field) {
  const std::uint64_t packets = (plaintext_bytes + kMaxPayloadBytes - 1) / kMaxPayloadBytes;
  return packets * h * gf::symbol_bytes(field);
}

std::vector<VolumeRow> volume_table(const std::vector<std::uint64_t>& sizes, std::size_t h,
                                    gf::FieldId field) {
  if (h == 0) throw Error(Errc::ConfigInvalid, "h must be positive");
  std::vector<VolumeRow> rows;
  for (std::uint64_t d : sizes) rows.push_back({d, h, field, spoc_volume(d, h, field), d});
  return rows;
}

BenchRow bench(std::size_t h, gf::FieldId field, std::size_t payload_symbols, std::uint64_t seed) {
  if (h == 0) throw Error(Errc::ConfigInvalid, "h must be positive");
  const auto& f = gf::Field::get(field);
  rlnc::RecodeRng rng(seed);

  std::vector<gf::SymbolVector> payloads;
  for (std::size_t i = 0; i < h; ++i) payloads.push_back(gf::random_vector(f, payload_symbols, rng));

  locking::SeededCoefficientSource coefficients(rng());
  locking::SourceSession session(field, h, coefficients);
  auto source = session.begin_generation(std::move(payloads));

  locking::SharedKey key;
  key.key_id = static_cast<std::uint32_t>(rng());
  for (auto& b : key.bytes) b = static_cast<std::uint8_t>(rng());
  const auto ctx = locking::LockingContext::with_key(key, field, h);

  BenchRow row;
  row.h = h;
  row.field = field;
  row.payload_symbols = payload_symbols;

  rlnc::GenerationBuffer relay(field, source.generation_id(), h);
  for (std::size_t k = 0; k < h; ++k) {
    gf::OpTally tally;
    gf::TallyScope scope(tally);
    relay.insert(source.emit(ctx));
    if (k == 0) {
      row.source_header = tally[gf::Part::Locked];
      row.source_payload = tally[gf::Part::Payload];
    } else if (tally[gf::Part::Locked].mul != row.source_header.mul) {
      throw Error(Errc::DimensionMismatch, "bench: source cost varies between packets");
    }
  }

  rlnc::GenerationBuffer sink(field, source.generation_id(), h);
  {
    gf::OpTally tally;
    gf::TallyScope scope(tally);
    const auto beta = rng.nonzero_vector(f, relay.rank());
    sink.insert(rlnc::recode_with(relay, beta));
    row.recode_n = relay.rank();
    row.recode_header = tally[gf::Part::Locked];
    row.recode_payload = tally[gf::Part::Payload];
  }
  while (!sink.full_rank()) sink.insert(rlnc::recode(relay, rng));

  {
    gf::OpTally tally;
    gf::TallyScope scope(tally);
    const auto natives = locking::sink_decode(sink, ctx);
    if (natives != source.natives()) throw Error(Errc::Singular, "bench: sink decoded wrong natives");
    row.sink_matrix = tally[gf::Part::Matrix];
    row.sink_payload = tally[gf::Part::Payload];
  }
  return row;
}

std::vector<BenchRow> bench_table(const std::vector<std::size_t>& hs, gf::FieldId field,
                                  std::size_t payload_symbols, std::uint64_t seed) {
  std::vector<BenchRow> rows;
  for (std::size_t h : hs) rows.push_back(bench(h, field, payload_symbols, seed + h));
  return rows;
}

double fit_exponent(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(Errc::DimensionMismatch, "fit_exponent needs two or more points");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string to_csv(const std::vector<OverheadRow>& rows) {
  std::ostringstream out;
  out << "packet_bytes,h,field,overhead_percent\n";
  for (const auto& r : rows) {
    out << r.packet_bytes << ',' << r.h << ',' << gf::field_name(r.field) << ','
        << fixed(r.overhead_percent, 4) << '\n';
  }
  return out.str();
}

std::string to_csv(const std::vector<VolumeRow>& rows) {
  std::ostringstream out;
  out << "plaintext_bytes,h,field,spoc_bytes,traditional_bytes\n";
  for (const auto& r : rows) {
    out << r.plaintext_bytes << ',' << r.h << ',' << gf::field_name(r.field) << ',' << r.spoc_bytes
        << ',' << r.traditional_bytes << '\n';
  }
  return out.str();
}

std::string to_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "h,field,payload_symbols,source_header_mul,source_header_add,source_payload_mul,"
         "recode_n,recode_header_mul,recode_header_add,recode_payload_mul,"
         "sink_matrix_mul,sink_payload_mul,sink_total_mul\n";
  for (const auto& r : rows) {
    out << r.h << ',' << gf::field_name(r.field) << ',' << r.payload_symbols << ','
        << r.source_header.mul << ',' << r.source_header.add << ',' << r.source_payload.mul << ','
        << r.recode_n << ',' << r.recode_header.mul << ',' << r.recode_header.add << ','
        << r.recode_payload.mul << ',' << r.sink_matrix.mul << ',' << r.sink_payload.mul << ','
        << r.sink_total_mul() << '\n';
  }
  if (rows.size() >= 2) {
    std::vector<double> x, y;
    for (const auto& r : rows) {
      x.push_back(static_cast<double>(r.h));
      y.push_back(static_cast<double>(r.sink_total_mul()));
    }
    out << "# sink_total_mul exponent " << fixed(fit_exponent(x, y), 3) << '\n';
  }
  return out.str();
}

std::string to_json(const std::vector<OverheadRow>& rows) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    doc.push_back({{"packet_bytes", r.packet_bytes},
                   {"h", r.h},
                   {"field", gf::field_name(r.field)},
                   {"overhead_percent", r.overhead_percent}});
  }
  return doc.dump(2) + "\n";
}

std::string to_json(const std::vector<VolumeRow>& rows) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    doc.push_back({{"plaintext_bytes", r.plaintext_bytes},
                   {"h", r.h},
                   {"field", gf::field_name(r.field)},
                   {"spoc_bytes", r.spoc_bytes},
                   {"traditional_bytes", r.traditional_bytes}});
  }
  return doc.dump(2) + "\n";
}

std::string to_json(const std::vector<BenchRow>& rows) {
  using nlohmann::ordered_json;
  auto counts = [](const gf::OpCounts& c) { return ordered_json{{"mul", c.mul}, {"add", c.add}}; };
  ordered_json doc;
  doc["rows"] = ordered_json::array();
  std::vector<double> x, y;
  for (const auto& r : rows) {
    doc["rows"].push_back({{"h", r.h},
                           {"field", gf::field_name(r.field)},
                           {"payload_symbols", r.payload_symbols},
                           {"source_header", counts(r.source_header)},
                           {"source_payload", counts(r.source_payload)},
                           {"recode_n", r.recode_n},
                           {"recode_header", counts(r.recode_header)},
                           {"recode_payload", counts(r.recode_payload)},
                           {"sink_matrix", counts(r.sink_matrix)},
                           {"sink_payload", counts(r.sink_payload)},
                           {"sink_total_mul", r.sink_total_mul()}});
    x.push_back(static_cast<double>(r.h));
    y.push_back(static_cast<double>(r.sink_total_mul()));
  }
  doc["sink_total_mul_exponent"] = rows.size() >= 2 ? ordered_json(fit_exponent(x, y)) : ordered_json(nullptr);
  return doc.dump(2) + "\n";
}

}  // namespace spoc::analysis
