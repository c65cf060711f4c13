#include "spoc/wire.hpp"

#include <limits>
#include <string>

namespace spoc::wire {

namespace {

class Writer {
 public:
  explicit Writer(std::size_t capacity) { out_.reserve(capacity); }

  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
    out_.push_back(static_cast<std::uint8_t>(v));
  }
  void u32(std::uint32_t v) {
    u16(static_cast<std::uint16_t>(v >> 16));
    u16(static_cast<std::uint16_t>(v));
  }
  void symbols(std::span<const gf::Symbol> v, std::size_t width) {
    for (gf::Symbol s : v) width == 1 ? u8(static_cast<std::uint8_t>(s)) : u16(s);
  }

  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::size_t remaining() const { return in_.size() - pos_; }

  void need(std::size_t n, const char* field) const {
    if (remaining() < n) {
      throw Error(Errc::Truncated, std::string(field) + ": need " + std::to_string(n) +
                                       " bytes, have " + std::to_string(remaining()));
    }
  }
  std::uint8_t u8(const char* field) {
    need(1, field);
    return in_[pos_++];
  }
  std::uint16_t u16(const char* field) {
    need(2, field);
    const auto v = static_cast<std::uint16_t>((in_[pos_] << 8) | in_[pos_ + 1]);
    pos_ += 2;
    return v;
  }
  std::uint32_t u32(const char* field) {
    need(4, field);
    const std::uint32_t hi = u16(field);
    return (hi << 16) | u16(field);
  }
  gf::SymbolVector symbols(std::size_t count, std::size_t width, const char* field) {
    need(count * width, field);
    gf::SymbolVector v(count);
    for (auto& s : v) s = width == 1 ? u8(field) : u16(field);
    return v;
  }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

void validate(const CodedPacket& p) {
  constexpr std::size_t kMax = std::numeric_limits<std::uint16_t>::max();
  if (p.header.unlocked.size() != p.header.locked.size()) {
    throw Error(Errc::DimensionMismatch, "locked: length " + std::to_string(p.header.locked.size()) +
                                             " != h " + std::to_string(p.header.unlocked.size()));
  }
  if (p.h() > kMax) throw Error(Errc::DimensionMismatch, "h: exceeds 16 bits");
  if (p.payload.size() > kMax) throw Error(Errc::DimensionMismatch, "payload_symbols: exceeds 16 bits");
  const auto& f = gf::Field::get(p.field());
  gf::check_symbols(f, p.header.unlocked, "unlocked");
  gf::check_symbols(f, p.header.locked, "locked");
  gf::check_symbols(f, p.payload, "payload");
}

std::size_t serialized_size(gf::FieldId field, std::size_t h, std::size_t payload_symbols) {
  return kFixedHeaderBytes + (2 * h + payload_symbols) * gf::symbol_bytes(field);
}

std::vector<std::uint8_t> serialize(const CodedPacket& p) {
  validate(p);
  const std::size_t width = gf::symbol_bytes(p.field());
  Writer w(serialized_size(p.field(), p.h(), p.payload.size()));
  w.u8(kMagic0);
  w.u8(kMagic1);
  w.u8(kVersion);
  w.u8(static_cast<std::uint8_t>(p.field()));
  w.u32(p.generation_id());
  w.u16(static_cast<std::uint16_t>(p.h()));
  w.u16(static_cast<std::uint16_t>(p.payload.size()));
  w.symbols(p.header.unlocked, width);
  w.symbols(p.header.locked, width);
  w.symbols(p.payload, width);
  return w.take();
}

CodedPacket deserialize(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const std::uint8_t m0 = r.u8("magic");
  const std::uint8_t m1 = r.u8("magic");
  if (m0 != kMagic0 || m1 != kMagic1) throw Error(Errc::BadMagic, "magic: expected 0x53 0x50");
  const std::uint8_t version = r.u8("version");
  if (version != kVersion) {
    throw Error(Errc::BadVersion, "version: unsupported value " + std::to_string(version));
  }
  const std::uint8_t field_id = r.u8("field_id");
  if (field_id > 1) {
    throw Error(Errc::FieldMismatch, "field_id: unknown value " + std::to_string(field_id));
  }

  CodedPacket p;
  p.header.field = static_cast<gf::FieldId>(field_id);
  p.header.generation_id = r.u32("generation_id");
  const std::size_t h = r.u16("h");
  const std::size_t n = r.u16("payload_symbols");
  const std::size_t width = gf::symbol_bytes(p.header.field);
  p.header.unlocked = r.symbols(h, width, "unlocked");
  p.header.locked = r.symbols(h, width, "locked");
  p.payload = r.symbols(n, width, "payload");
  if (r.remaining() != 0) {
    throw Error(Errc::Truncated, "payload: " + std::to_string(r.remaining()) +
                                     " bytes beyond the declared length");
  }
  return p;
}

double header_overhead(std::size_t h, std::size_t symbol_bytes, std::size_t max_packet_bytes) {
  return 100.0 * static_cast<double>(h * symbol_bytes) / static_cast<double>(max_packet_bytes);
}

}  // namespace spoc::wire
