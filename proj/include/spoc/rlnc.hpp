#pragma once

// Practical network coding: source encoding, recoding at relays, generation
// buffers with innovativeness filtering, and plain (unlocked) decoding.
//
// This module knows nothing about keys. Relays recode the unlocked and
// locked coefficient sets as ordinary symbols.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "spoc/gf.hpp"
#include "spoc/wire.hpp"

namespace spoc::rlnc {

using wire::CodedPacket;
using wire::NativePacket;

/// Seeded coefficient generator. Identical seeds give identical streams on
/// every platform (symbols are taken by masking raw engine output).
class RecodeRng {
 public:
  using result_type = std::uint64_t;

  explicit RecodeRng(std::uint64_t seed) : engine_(seed) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  gf::Symbol symbol(const gf::Field& f) { return gf::random_symbol(f, *this); }

  /// Uniform vector over the field, redrawn while all-zero.
  gf::SymbolVector nonzero_vector(const gf::Field& f, std::size_t n);

 private:
  std::mt19937_64 engine_;
};

/// Sum of coeffs[i] * natives[i].payload.
gf::SymbolVector source_encode(gf::FieldId field, std::span<const NativePacket> natives,
                               std::span<const gf::Symbol> coeffs);

enum class InsertResult { Stored, Discarded, FullRank };

/// Innovative packets of one generation, plus the reduced row echelon form
/// of their unlocked vectors for rank tracking.
class GenerationBuffer {
 public:
  GenerationBuffer(gf::FieldId field, std::uint32_t generation_id, std::size_t h);

  gf::FieldId field() const noexcept { return field_; }
  std::uint32_t generation_id() const noexcept { return generation_id_; }
  std::size_t h() const noexcept { return h_; }
  std::size_t rank() const noexcept { return packets_.size(); }
  bool full_rank() const noexcept { return rank() == h_; }
  bool empty() const noexcept { return packets_.empty(); }
  const std::vector<CodedPacket>& packets() const noexcept { return packets_; }

  /// True iff the unlocked vector lies outside the span of those stored.
  /// Throws GenerationMismatch or DimensionMismatch.
  bool is_innovative(const CodedPacket& p) const;

  InsertResult insert(const CodedPacket& p);

  /// M_U, L and Y: one row per stored packet, in insertion order.
  gf::SymbolMatrix unlocked_matrix() const;
  gf::SymbolMatrix locked_matrix() const;
  gf::SymbolMatrix payload_matrix() const;

 private:
  void check(const CodedPacket& p) const;
  // Residual of v after elimination against the basis.
  gf::SymbolVector residual(std::span<const gf::Symbol> v) const;

  gf::FieldId field_;
  std::uint32_t generation_id_;
  std::size_t h_;
  std::vector<CodedPacket> packets_;
  std::vector<gf::SymbolVector> basis_;  // RREF rows, pivot normalized to 1
  std::vector<std::size_t> pivots_;
};

/// Receiver-side view of a generation: M_U, L and Y are the buffer's
/// matrices.
using DecoderState = GenerationBuffer;

/// Applies beta to every buffered packet: unlocked, locked and payload are
/// transformed identically.
CodedPacket recode_with(const GenerationBuffer& buffer, std::span<const gf::Symbol> beta);

/// Random linear combination of the buffer. The coefficient vector is
/// uniform over the field and never all-zero. Throws EmptyBuffer.
CodedPacket recode(const GenerationBuffer& buffer, RecodeRng& rng);

/// Solves M_U * W = Y, treating the unlocked vectors as true global encoding
/// vectors. Throws NotFullRank.
std::vector<NativePacket> decode_plain(const DecoderState& state);

/// Stacks native payloads into an h x payload_symbols matrix.
gf::SymbolMatrix native_matrix(gf::FieldId field, std::span<const NativePacket> natives);

/// Splits matrix rows back into natives 0..rows-1.
std::vector<NativePacket> natives_from(std::uint32_t generation_id, const gf::SymbolMatrix& w);

}  // namespace spoc::rlnc
