#include "spoc/rlnc.hpp"

#include <algorithm>
#include <string>

namespace spoc::rlnc {

namespace {

std::vector<std::span<const gf::Symbol>> collect(const std::vector<CodedPacket>& packets,
                                                 gf::SymbolVector wire::PacketHeader::*part) {
  std::vector<std::span<const gf::Symbol>> rows;
  rows.reserve(packets.size());
  for (const auto& p : packets) rows.emplace_back(p.header.*part);
  return rows;
}

}  // namespace

gf::SymbolVector RecodeRng::nonzero_vector(const gf::Field& f, std::size_t n) {
  gf::SymbolVector v(n);
  if (n == 0) return v;
  do {
    for (auto& s : v) s = symbol(f);
  } while (std::all_of(v.begin(), v.end(), [](gf::Symbol s) { return s == 0; }));
  return v;
}

gf::SymbolVector source_encode(gf::FieldId field, std::span<const NativePacket> natives,
                               std::span<const gf::Symbol> coeffs) {
  if (natives.size() != coeffs.size()) {
    throw Error(Errc::DimensionMismatch, "source_encode: " + std::to_string(coeffs.size()) +
                                             " coefficients for " +
                                             std::to_string(natives.size()) + " natives");
  }
  if (natives.empty()) throw Error(Errc::DimensionMismatch, "source_encode: no natives");
  std::vector<std::span<const gf::Symbol>> rows;
  for (const auto& n : natives) {
    if (n.payload.size() != natives.front().payload.size()) {
      throw Error(Errc::DimensionMismatch, "source_encode: natives differ in payload length");
    }
    rows.emplace_back(n.payload);
  }
  return gf::combine(gf::Field::get(field), coeffs, rows);
}

// ---------------------------------------------------------------------------

GenerationBuffer::GenerationBuffer(gf::FieldId field, std::uint32_t generation_id, std::size_t h)
    : field_(field), generation_id_(generation_id), h_(h) {
  if (h == 0) throw Error(Errc::DimensionMismatch, "generation size must be positive");
}

void GenerationBuffer::check(const CodedPacket& p) const {
  if (p.generation_id() != generation_id_) {
    throw Error(Errc::GenerationMismatch, "generation_id " + std::to_string(p.generation_id()) +
                                              " offered to buffer of generation " +
                                              std::to_string(generation_id_));
  }
  if (p.field() != field_) throw Error(Errc::FieldMismatch, "field_id differs from buffer");
  if (p.header.unlocked.size() != h_ || p.header.locked.size() != h_) {
    throw Error(Errc::DimensionMismatch, "coefficient vectors must have length h = " +
                                             std::to_string(h_));
  }
  if (!packets_.empty() && p.payload.size() != packets_.front().payload.size()) {
    throw Error(Errc::DimensionMismatch, "payload length differs within generation");
  }
}

gf::SymbolVector GenerationBuffer::residual(std::span<const gf::Symbol> v) const {
  const gf::Field& f = gf::Field::get(field_);
  gf::SymbolVector r(v.begin(), v.end());
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    const gf::Symbol factor = r[pivots_[i]];
    if (factor == 0) continue;
    for (std::size_t j = 0; j < h_; ++j) r[j] ^= f.mul(factor, basis_[i][j]);
  }
  return r;
}

bool GenerationBuffer::is_innovative(const CodedPacket& p) const {
  check(p);
  if (full_rank()) return false;
  const auto r = residual(p.header.unlocked);
  return std::any_of(r.begin(), r.end(), [](gf::Symbol s) { return s != 0; });
}

InsertResult GenerationBuffer::insert(const CodedPacket& p) {
  check(p);
  if (full_rank()) return InsertResult::Discarded;
  auto r = residual(p.header.unlocked);
  const auto it = std::find_if(r.begin(), r.end(), [](gf::Symbol s) { return s != 0; });
  if (it == r.end()) return InsertResult::Discarded;

  const gf::Field& f = gf::Field::get(field_);
  const std::size_t pivot = static_cast<std::size_t>(it - r.begin());
  const gf::Symbol scale = f.inv(r[pivot]);
  for (auto& s : r) s = f.mul(scale, s);
  for (auto& row : basis_) {
    const gf::Symbol factor = row[pivot];
    if (factor == 0) continue;
    for (std::size_t j = 0; j < h_; ++j) row[j] ^= f.mul(factor, r[j]);
  }
  basis_.push_back(std::move(r));
  pivots_.push_back(pivot);
  packets_.push_back(p);
  return full_rank() ? InsertResult::FullRank : InsertResult::Stored;
}

gf::SymbolMatrix GenerationBuffer::unlocked_matrix() const {
  return gf::SymbolMatrix::from_rows(field_, h_, collect(packets_, &wire::PacketHeader::unlocked));
}

gf::SymbolMatrix GenerationBuffer::locked_matrix() const {
  return gf::SymbolMatrix::from_rows(field_, h_, collect(packets_, &wire::PacketHeader::locked));
}

gf::SymbolMatrix GenerationBuffer::payload_matrix() const {
  const std::size_t cols = packets_.empty() ? 0 : packets_.front().payload.size();
  std::vector<std::span<const gf::Symbol>> rows;
  for (const auto& p : packets_) rows.emplace_back(p.payload);
  return gf::SymbolMatrix::from_rows(field_, cols, rows);
}

// ---------------------------------------------------------------------------

CodedPacket recode_with(const GenerationBuffer& buffer, std::span<const gf::Symbol> beta) {
  if (buffer.empty()) throw Error(Errc::EmptyBuffer, "recode: buffer is empty");
  const auto& packets = buffer.packets();
  const gf::Field& f = gf::Field::get(buffer.field());

  CodedPacket out;
  out.header.field = buffer.field();
  out.header.generation_id = buffer.generation_id();
  {
    gf::PartScope part(gf::Part::Unlocked);
    out.header.unlocked = gf::combine(f, beta, collect(packets, &wire::PacketHeader::unlocked));
  }
  {
    gf::PartScope part(gf::Part::Locked);
    out.header.locked = gf::combine(f, beta, collect(packets, &wire::PacketHeader::locked));
  }
  {
    gf::PartScope part(gf::Part::Payload);
    std::vector<std::span<const gf::Symbol>> rows;
    for (const auto& p : packets) rows.emplace_back(p.payload);
    out.payload = gf::combine(f, beta, rows);
  }
  return out;
}

CodedPacket recode(const GenerationBuffer& buffer, RecodeRng& rng) {
  if (buffer.empty()) throw Error(Errc::EmptyBuffer, "recode: buffer is empty");
  const auto beta = rng.nonzero_vector(gf::Field::get(buffer.field()), buffer.packets().size());
  return recode_with(buffer, beta);
}

gf::SymbolMatrix native_matrix(gf::FieldId field, std::span<const NativePacket> natives) {
  const std::size_t cols = natives.empty() ? 0 : natives.front().payload.size();
  std::vector<std::span<const gf::Symbol>> rows;
  for (const auto& n : natives) rows.emplace_back(n.payload);
  return gf::SymbolMatrix::from_rows(field, cols, rows);
}

std::vector<NativePacket> natives_from(std::uint32_t generation_id, const gf::SymbolMatrix& w) {
  std::vector<NativePacket> out;
  out.reserve(w.rows());
  for (std::size_t i = 0; i < w.rows(); ++i) {
    out.push_back({generation_id, i, gf::SymbolVector(w.row(i).begin(), w.row(i).end())});
  }
  return out;
}

std::vector<NativePacket> decode_plain(const DecoderState& state) {
  if (!state.full_rank()) {
    throw Error(Errc::NotFullRank, "decode: rank " + std::to_string(state.rank()) + " of " +
                                       std::to_string(state.h()));
  }
  const auto w = gf::solve(state.unlocked_matrix(), state.payload_matrix());
  return natives_from(state.generation_id(), w);
}

}  // namespace spoc::rlnc
