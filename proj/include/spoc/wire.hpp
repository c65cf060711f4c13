#pragma once

// Coded packet format and its byte encoding.
//
//   offset  size        field
//   0       2           magic 0x53 0x50
//   2       1           version 0x01
//   3       1           field id (0 = GF(2^8), 1 = GF(2^16))
//   4       4           generation id
//   8       2           h
//   10      2           payload symbol count
//   12      h*s         unlocked coefficients
//   ..      h*s         locked coefficients
//   ..      n*s         payload
//
// Integers and multi-byte symbols are big-endian; s is the symbol width in
// bytes.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "spoc/gf.hpp"

namespace spoc::wire {

inline constexpr std::uint8_t kMagic0 = 0x53;
inline constexpr std::uint8_t kMagic1 = 0x50;
inline constexpr std::uint8_t kVersion = 0x01;
inline constexpr std::size_t kFixedHeaderBytes = 12;

struct PacketHeader {
  std::uint32_t generation_id = 0;
  gf::FieldId field = gf::FieldId::GF256;
  gf::SymbolVector unlocked;
  gf::SymbolVector locked;

  std::size_t h() const noexcept { return unlocked.size(); }

  friend bool operator==(const PacketHeader&, const PacketHeader&) = default;
};

struct CodedPacket {
  PacketHeader header;
  gf::SymbolVector payload;

  std::uint32_t generation_id() const noexcept { return header.generation_id; }
  gf::FieldId field() const noexcept { return header.field; }
  std::size_t h() const noexcept { return header.h(); }

  friend bool operator==(const CodedPacket&, const CodedPacket&) = default;
};

/// An original source packet w_i of a generation.
struct NativePacket {
  std::uint32_t generation_id = 0;
  std::size_t index = 0;
  gf::SymbolVector payload;

  friend bool operator==(const NativePacket&, const NativePacket&) = default;
};

/// Throws DimensionMismatch / InvalidSymbol when the packet cannot be encoded.
void validate(const CodedPacket& p);

std::size_t serialized_size(gf::FieldId field, std::size_t h, std::size_t payload_symbols);

std::vector<std::uint8_t> serialize(const CodedPacket& p);
CodedPacket deserialize(std::span<const std::uint8_t> bytes);

/// Share of a maximum-size packet taken by the locked coefficients, in
/// percent.
double header_overhead(std::size_t h, std::size_t symbol_bytes, std::size_t max_packet_bytes);

}  // namespace spoc::wire
