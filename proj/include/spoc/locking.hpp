#pragma once

// Coefficient locking. The source's true encoding vectors travel encrypted
// under a size-preserving stream cipher, next to plaintext identity-derived
// rows that record what the network did to them. Sinks undo the network
// transform on the ciphertext rows, decrypt, and only then decode.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "spoc/gf.hpp"
#include "spoc/integrity.hpp"
#include "spoc/rlnc.hpp"
#include "spoc/wire.hpp"

namespace spoc::locking {

using wire::CodedPacket;
using wire::NativePacket;

struct SharedKey {
  std::uint32_t key_id = 0;
  std::array<std::uint8_t, 16> bytes{};

  friend bool operator==(const SharedKey&, const SharedKey&) = default;
};

inline constexpr std::size_t kKeyFileBytes = 20;

// Key file: 4-byte big-endian key id followed by 16 key bytes.
SharedKey parse_key(std::span<const std::uint8_t> bytes);
std::array<std::uint8_t, kKeyFileBytes> encode_key(const SharedKey& key);
SharedKey read_key_file(const std::filesystem::path& path);
void write_key_file(const std::filesystem::path& path, const SharedKey& key);

/// Source of keystream bytes for one locked row, addressed by
/// (generation, row).
class Cipher {
 public:
  virtual ~Cipher() = default;
  virtual std::vector<std::uint8_t> keystream(std::uint32_t generation_id, std::uint32_t row_index,
                                              std::size_t n_bytes) const = 0;
};

/// AES-128 in counter mode. Counter block:
/// key_id | generation_id | row_index | block counter, each 4 bytes BE.
class AesCtrCipher final : public Cipher {
 public:
  explicit AesCtrCipher(const SharedKey& key) : key_(key) {}
  std::vector<std::uint8_t> keystream(std::uint32_t generation_id, std::uint32_t row_index,
                                      std::size_t n_bytes) const override;

 private:
  SharedKey key_;
};

/// All-zero keystream: locking becomes the identity map.
class ZeroCipher final : public Cipher {
 public:
  std::vector<std::uint8_t> keystream(std::uint32_t, std::uint32_t,
                                      std::size_t n_bytes) const override {
    return std::vector<std::uint8_t>(n_bytes, 0);
  }
};

std::vector<std::uint8_t> keystream(const SharedKey& key, std::uint32_t generation_id,
                                    std::uint32_t row_index, std::size_t n_bytes);

namespace detail {
std::array<std::uint8_t, 16> aes128_encrypt_block(const std::array<std::uint8_t, 16>& key,
                                                  const std::array<std::uint8_t, 16>& block);
}

struct LockingContext {
  std::shared_ptr<const Cipher> cipher;
  gf::FieldId field = gf::FieldId::GF256;
  std::size_t h = 1;

  static LockingContext with_key(const SharedKey& key, gf::FieldId field, std::size_t h);
  static LockingContext stub(gf::FieldId field, std::size_t h);
};

gf::SymbolVector lock(const LockingContext& ctx, std::uint32_t generation_id,
                      std::uint32_t row_index, std::span<const gf::Symbol> coeffs);
gf::SymbolVector unlock(const LockingContext& ctx, std::uint32_t generation_id,
                        std::uint32_t row_index, std::span<const gf::Symbol> locked);

// ---------------------------------------------------------------------------
// Source side.

/// Where the source's coding matrix comes from.
class CoefficientSource {
 public:
  virtual ~CoefficientSource() = default;
  virtual void fill(const gf::Field& f, std::span<gf::Symbol> out) = 0;
};

/// Operating-system CSPRNG.
class SecureCoefficientSource final : public CoefficientSource {
 public:
  void fill(const gf::Field& f, std::span<gf::Symbol> out) override;
};

/// Reproducible draws for simulation and tests.
class SeededCoefficientSource final : public CoefficientSource {
 public:
  explicit SeededCoefficientSource(std::uint64_t seed) : rng_(seed) {}
  void fill(const gf::Field& f, std::span<gf::Symbol> out) override;

 private:
  rlnc::RecodeRng rng_;
};

class SourceGenerationState {
 public:
  /// Draws the h x h coding matrix C, redrawing until it is invertible.
  SourceGenerationState(std::uint32_t generation_id, std::vector<NativePacket> natives,
                        gf::FieldId field, CoefficientSource& coefficients);

  std::uint32_t generation_id() const noexcept { return generation_id_; }
  gf::FieldId field() const noexcept { return field_; }
  std::size_t h() const noexcept { return natives_.size(); }
  std::size_t emitted() const noexcept { return locked_rows_.size(); }
  bool exhausted() const noexcept { return emitted() == h(); }

  const std::vector<NativePacket>& natives() const noexcept { return natives_; }
  const gf::SymbolMatrix& coding_matrix() const noexcept { return coding_; }
  /// Ciphertext rows emitted so far, row k locked under nonce (generation, k).
  gf::SymbolMatrix locked_rows() const;

  /// Next packet: unlocked e_k, locked lock(C_k), payload C_k * W.
  /// Throws GenerationExhausted once all h rows are out.
  CodedPacket emit(const LockingContext& ctx);

  /// Random recombination of the h emitted packets, exactly as a relay
  /// would. Requires exhausted().
  CodedPacket recode(rlnc::RecodeRng& rng) const;

 private:
  std::uint32_t generation_id_;
  gf::FieldId field_;
  std::vector<NativePacket> natives_;
  gf::SymbolMatrix coding_;
  std::vector<gf::SymbolVector> locked_rows_;
  rlnc::GenerationBuffer sent_;
};

/// Hands out strictly increasing generation ids so that no (generation, row)
/// nonce is used twice under one key.
class SourceSession {
 public:
  SourceSession(gf::FieldId field, std::size_t h, CoefficientSource& coefficients,
                std::uint32_t first_generation = 0);

  std::uint32_t next_generation_id() const noexcept { return next_id_; }

  SourceGenerationState begin_generation(std::vector<gf::SymbolVector> payloads);
  /// Throws GenerationReuse when generation_id was already handed out.
  SourceGenerationState begin_generation(std::uint32_t generation_id,
                                         std::vector<gf::SymbolVector> payloads);

 private:
  gf::FieldId field_;
  std::size_t h_;
  CoefficientSource* coefficients_;
  std::uint32_t next_id_;
};

// ---------------------------------------------------------------------------
// Sink side.

/// M_P = M_U^-1 * L: the source's ciphertext rows, with the network
/// transform removed. Throws NotFullRank or Singular.
gf::SymbolMatrix recover_locked_rows(const rlnc::DecoderState& state);

/// Inverts M_U, recovers and unlocks the ciphertext rows into C, forms
/// M = M_U * C and solves M * W = Y. With a secret, W must also pass the
/// parity check or IntegrityReject is thrown.
std::vector<NativePacket> sink_decode(const rlnc::DecoderState& state, const LockingContext& ctx,
                                      const integrity::ParitySecret* secret = nullptr);

}  // namespace spoc::locking
