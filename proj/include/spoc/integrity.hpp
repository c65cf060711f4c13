#pragma once

// Shared-secret detection of modified generations. The source draws a random
// parity-check matrix P (z x payload_symbols) and publishes H = W * P^T to the
// sinks over a secure side channel; a decoded W' passes iff W' * P^T == H.
//
// A nonzero error E escapes detection iff E * P^T = 0, which for uniform P
// happens with probability q^-(z * rank E).

#include <cstddef>
#include <cstdint>

#include "spoc/gf.hpp"

namespace spoc::integrity {

inline constexpr std::size_t kDefaultParityRows = 2;

struct ParitySecret {
  std::uint32_t generation_id = 0;
  gf::SymbolMatrix parity;  // P, z x payload_symbols
  gf::SymbolMatrix hash;    // H, h x z
};

/// Builds the secret from an explicit parity-check matrix.
ParitySecret make_secret(std::uint32_t generation_id, const gf::SymbolMatrix& natives,
                         gf::SymbolMatrix parity);

template <class Rng>
ParitySecret make_secret(std::uint32_t generation_id, const gf::SymbolMatrix& natives,
                         std::size_t z, Rng& rng) {
  if (z == 0) throw Error(Errc::DimensionMismatch, "integrity: z must be at least 1");
  return make_secret(generation_id, natives,
                     gf::SymbolMatrix::random(natives.field(), z, natives.cols(), rng));
}

/// Throws DimensionMismatch when the decoded matrix does not fit the secret.
bool verify(const gf::SymbolMatrix& decoded, const ParitySecret& secret);

}  // namespace spoc::integrity
