#include "spoc/locking.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>

#include <algorithm>
#include <fstream>
#include <iterator>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

namespace spoc::locking {

namespace {

void put_be32(std::uint8_t* out, std::uint32_t v) {
  out[0] = static_cast<std::uint8_t>(v >> 24);
  out[1] = static_cast<std::uint8_t>(v >> 16);
  out[2] = static_cast<std::uint8_t>(v >> 8);
  out[3] = static_cast<std::uint8_t>(v);
}

struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

// AES-128 applied block-by-block (ECB) to `in`, whose length is a multiple
// of 16.
std::vector<std::uint8_t> aes128_blocks(const std::array<std::uint8_t, 16>& key,
                                        std::span<const std::uint8_t> in) {
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  if (!ctx || EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_ecb(), nullptr, key.data(), nullptr) != 1 ||
      EVP_CIPHER_CTX_set_padding(ctx.get(), 0) != 1) {
    throw std::runtime_error("AES-128 initialisation failed");
  }
  std::vector<std::uint8_t> out(in.size() + 16);
  int written = 0;
  if (!in.empty() && EVP_EncryptUpdate(ctx.get(), out.data(), &written, in.data(),
                                       static_cast<int>(in.size())) != 1) {
    throw std::runtime_error("AES-128 encryption failed");
  }
  int tail = 0;
  if (EVP_EncryptFinal_ex(ctx.get(), out.data() + written, &tail) != 1) {
    throw std::runtime_error("AES-128 finalisation failed");
  }
  out.resize(static_cast<std::size_t>(written + tail));
  return out;
}

std::vector<std::uint8_t> to_bytes(const gf::Field& f, std::span<const gf::Symbol> v) {
  std::vector<std::uint8_t> out;
  out.reserve(v.size() * f.symbol_bytes());
  for (gf::Symbol s : v) {
    if (f.symbol_bytes() == 2) out.push_back(static_cast<std::uint8_t>(s >> 8));
    out.push_back(static_cast<std::uint8_t>(s));
  }
  return out;
}

gf::SymbolVector from_bytes(const gf::Field& f, std::span<const std::uint8_t> bytes) {
  const std::size_t width = f.symbol_bytes();
  gf::SymbolVector out(bytes.size() / width);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = width == 1 ? bytes[i]
                        : static_cast<gf::Symbol>((bytes[2 * i] << 8) | bytes[2 * i + 1]);
  }
  return out;
}

gf::SymbolVector apply_keystream(const LockingContext& ctx, std::uint32_t generation_id,
                                 std::uint32_t row_index, std::span<const gf::Symbol> v) {
  if (v.size() != ctx.h) {
    throw Error(Errc::DimensionMismatch, "lock: " + std::to_string(v.size()) +
                                             " coefficients, context expects h = " +
                                             std::to_string(ctx.h));
  }
  const gf::Field& f = gf::Field::get(ctx.field);
  gf::check_symbols(f, v, "coefficients");
  auto bytes = to_bytes(f, v);
  const auto stream = ctx.cipher->keystream(generation_id, row_index, bytes.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] ^= stream[i];
  return from_bytes(f, bytes);
}

}  // namespace

// ---------------------------------------------------------------------------

SharedKey parse_key(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kKeyFileBytes) {
    throw Error(Errc::Io, "key file must hold exactly 20 bytes, got " +
                              std::to_string(bytes.size()));
  }
  SharedKey key;
  key.key_id = (std::uint32_t{bytes[0]} << 24) | (std::uint32_t{bytes[1]} << 16) |
               (std::uint32_t{bytes[2]} << 8) | bytes[3];
  std::copy(bytes.begin() + 4, bytes.end(), key.bytes.begin());
  return key;
}

std::array<std::uint8_t, kKeyFileBytes> encode_key(const SharedKey& key) {
  std::array<std::uint8_t, kKeyFileBytes> out{};
  put_be32(out.data(), key.key_id);
  std::copy(key.bytes.begin(), key.bytes.end(), out.begin() + 4);
  return out;
}

SharedKey read_key_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open key file " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return parse_key(bytes);
}

void write_key_file(const std::filesystem::path& path, const SharedKey& key) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write key file " + path.string());
  const auto bytes = encode_key(key);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::array<std::uint8_t, 16> detail::aes128_encrypt_block(
    const std::array<std::uint8_t, 16>& key, const std::array<std::uint8_t, 16>& block) {
  const auto out = aes128_blocks(key, block);
  std::array<std::uint8_t, 16> result{};
  std::copy_n(out.begin(), 16, result.begin());
  return result;
}

std::vector<std::uint8_t> AesCtrCipher::keystream(std::uint32_t generation_id,
                                                  std::uint32_t row_index,
                                                  std::size_t n_bytes) const {
  if (n_bytes == 0) return {};
  const std::size_t blocks = (n_bytes + 15) / 16;
  std::vector<std::uint8_t> counters(blocks * 16);
  for (std::size_t b = 0; b < blocks; ++b) {
    std::uint8_t* block = counters.data() + 16 * b;
    put_be32(block, key_.key_id);
    put_be32(block + 4, generation_id);
    put_be32(block + 8, row_index);
    put_be32(block + 12, static_cast<std::uint32_t>(b));
  }
  auto stream = aes128_blocks(key_.bytes, counters);
  stream.resize(n_bytes);
  return stream;
}

std::vector<std::uint8_t> keystream(const SharedKey& key, std::uint32_t generation_id,
                                    std::uint32_t row_index, std::size_t n_bytes) {
  return AesCtrCipher(key).keystream(generation_id, row_index, n_bytes);
}

LockingContext LockingContext::with_key(const SharedKey& key, gf::FieldId field, std::size_t h) {
  if (h == 0) throw Error(Errc::DimensionMismatch, "locking context: h must be at least 1");
  return {std::make_shared<AesCtrCipher>(key), field, h};
}

LockingContext LockingContext::stub(gf::FieldId field, std::size_t h) {
  if (h == 0) throw Error(Errc::DimensionMismatch, "locking context: h must be at least 1");
  return {std::make_shared<ZeroCipher>(), field, h};
}

gf::SymbolVector lock(const LockingContext& ctx, std::uint32_t generation_id,
                      std::uint32_t row_index, std::span<const gf::Symbol> coeffs) {
  return apply_keystream(ctx, generation_id, row_index, coeffs);
}

gf::SymbolVector unlock(const LockingContext& ctx, std::uint32_t generation_id,
                        std::uint32_t row_index, std::span<const gf::Symbol> locked) {
  return apply_keystream(ctx, generation_id, row_index, locked);
}

// ---------------------------------------------------------------------------

void SecureCoefficientSource::fill(const gf::Field& f, std::span<gf::Symbol> out) {
  std::vector<std::uint8_t> raw(out.size() * 2);
  if (!raw.empty() && RAND_bytes(raw.data(), static_cast<int>(raw.size())) != 1) {
    throw std::runtime_error("system random generator unavailable");
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<gf::Symbol>(((raw[2 * i] << 8) | raw[2 * i + 1]) & f.mask());
  }
}

void SeededCoefficientSource::fill(const gf::Field& f, std::span<gf::Symbol> out) {
  for (auto& s : out) s = rng_.symbol(f);
}

SourceGenerationState::SourceGenerationState(std::uint32_t generation_id,
                                             std::vector<NativePacket> natives, gf::FieldId field,
                                             CoefficientSource& coefficients)
    : generation_id_(generation_id),
      field_(field),
      natives_(std::move(natives)),
      sent_(field, generation_id, std::max<std::size_t>(natives_.size(), 1)) {
  const std::size_t h = natives_.size();
  if (h == 0) throw Error(Errc::DimensionMismatch, "source: generation needs at least one native");
  const gf::Field& f = gf::Field::get(field);
  for (std::size_t i = 0; i < h; ++i) {
    const auto& n = natives_[i];
    if (n.generation_id != generation_id || n.index != i) {
      throw Error(Errc::GenerationMismatch, "source: native " + std::to_string(i) +
                                                " carries a foreign generation or index");
    }
    if (n.payload.size() != natives_.front().payload.size()) {
      throw Error(Errc::DimensionMismatch, "source: natives differ in payload length");
    }
    gf::check_symbols(f, n.payload, "native payload");
  }

  std::vector<gf::Symbol> draw(h * h);
  do {
    coefficients.fill(f, draw);
    coding_ = gf::SymbolMatrix(field, h, h, draw);
  } while (gf::rank(coding_) != h);
}

gf::SymbolMatrix SourceGenerationState::locked_rows() const {
  std::vector<std::span<const gf::Symbol>> rows(locked_rows_.begin(), locked_rows_.end());
  return gf::SymbolMatrix::from_rows(field_, h(), rows);
}

CodedPacket SourceGenerationState::emit(const LockingContext& ctx) {
  if (exhausted()) {
    throw Error(Errc::GenerationExhausted, "source: all " + std::to_string(h()) +
                                               " rows of generation " +
                                               std::to_string(generation_id_) + " emitted");
  }
  if (ctx.field != field_) throw Error(Errc::FieldMismatch, "source: locking context field");
  if (ctx.h != h()) throw Error(Errc::DimensionMismatch, "source: locking context h");

  const std::size_t k = emitted();
  const gf::Field& f = gf::Field::get(field_);
  const auto c_row = coding_.row(k);

  CodedPacket p;
  p.header.field = field_;
  p.header.generation_id = generation_id_;
  p.header.unlocked.assign(h(), 0);
  p.header.unlocked[k] = 1;
  {
    // Global encoding vector of the combination: C_k applied to the natives'
    // identity headers.
    gf::PartScope part(gf::Part::Locked);
    const auto eye = gf::SymbolMatrix::identity(field_, h());
    std::vector<std::span<const gf::Symbol>> rows;
    for (std::size_t i = 0; i < h(); ++i) rows.push_back(eye.row(i));
    const auto global = gf::combine(f, c_row, rows);
    p.header.locked = lock(ctx, generation_id_, static_cast<std::uint32_t>(k), global);
  }
  {
    gf::PartScope part(gf::Part::Payload);
    p.payload = rlnc::source_encode(field_, natives_, c_row);
  }
  locked_rows_.push_back(p.header.locked);
  sent_.insert(p);
  return p;
}

CodedPacket SourceGenerationState::recode(rlnc::RecodeRng& rng) const {
  if (!exhausted()) {
    throw Error(Errc::NotFullRank, "source: recoding before all identity rows were emitted");
  }
  return rlnc::recode(sent_, rng);
}

SourceSession::SourceSession(gf::FieldId field, std::size_t h, CoefficientSource& coefficients,
                             std::uint32_t first_generation)
    : field_(field), h_(h), coefficients_(&coefficients), next_id_(first_generation) {}

SourceGenerationState SourceSession::begin_generation(std::vector<gf::SymbolVector> payloads) {
  return begin_generation(next_id_, std::move(payloads));
}

SourceGenerationState SourceSession::begin_generation(std::uint32_t generation_id,
                                                      std::vector<gf::SymbolVector> payloads) {
  if (generation_id < next_id_) {
    throw Error(Errc::GenerationReuse, "generation " + std::to_string(generation_id) +
                                           " already used under this key");
  }
  if (payloads.size() != h_) {
    throw Error(Errc::DimensionMismatch, "generation needs " + std::to_string(h_) +
                                             " natives, got " + std::to_string(payloads.size()));
  }
  std::vector<NativePacket> natives;
  for (std::size_t i = 0; i < payloads.size(); ++i) {
    natives.push_back({generation_id, i, std::move(payloads[i])});
  }
  SourceGenerationState state(generation_id, std::move(natives), field_, *coefficients_);
  next_id_ = generation_id + 1;
  return state;
}

// ---------------------------------------------------------------------------

gf::SymbolMatrix recover_locked_rows(const rlnc::DecoderState& state) {
  if (!state.full_rank()) {
    throw Error(Errc::NotFullRank, "decode: rank " + std::to_string(state.rank()) + " of " +
                                       std::to_string(state.h()));
  }
  gf::PartScope part(gf::Part::Matrix);
  const auto inverse = gf::mat_inverse(state.unlocked_matrix());
  return gf::mat_mul(inverse, state.locked_matrix());
}

std::vector<NativePacket> sink_decode(const rlnc::DecoderState& state, const LockingContext& ctx,
                                      const integrity::ParitySecret* secret) {
  if (ctx.field != state.field()) throw Error(Errc::FieldMismatch, "decode: locking context field");
  if (ctx.h != state.h()) throw Error(Errc::DimensionMismatch, "decode: locking context h");

  const auto unlocked = state.unlocked_matrix();
  const auto ciphertext = recover_locked_rows(state);

  gf::SymbolMatrix plain(state.field(), state.h(), state.h());
  for (std::size_t i = 0; i < state.h(); ++i) {
    const auto row = unlock(ctx, state.generation_id(), static_cast<std::uint32_t>(i),
                            ciphertext.row(i));
    std::copy(row.begin(), row.end(), plain.row(i).begin());
  }

  gf::SymbolMatrix decoding;
  {
    gf::PartScope part(gf::Part::Matrix);
    decoding = gf::mat_mul(unlocked, plain);
  }
  gf::SymbolMatrix w;
  {
    gf::PartScope part(gf::Part::Payload);
    w = gf::solve(decoding, state.payload_matrix());
  }
  if (secret != nullptr) {
    if (secret->generation_id != state.generation_id()) {
      throw Error(Errc::GenerationMismatch, "decode: parity secret belongs to generation " +
                                                std::to_string(secret->generation_id));
    }
    if (!integrity::verify(w, *secret)) {
      throw Error(Errc::IntegrityReject, "generation " + std::to_string(state.generation_id()) +
                                             " failed the parity check");
    }
  }
  return rlnc::natives_from(state.generation_id(), w);
}

}  // namespace spoc::locking
