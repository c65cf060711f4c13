#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spoc {

enum class Errc {
  ZeroInverse,
  DimensionMismatch,
  InvalidSymbol,
  Singular,
  BadMagic,
  BadVersion,
  Truncated,
  FieldMismatch,
  EmptyBuffer,
  GenerationMismatch,
  NotFullRank,
  GenerationExhausted,
  GenerationReuse,
  IntegrityReject,
  ConfigInvalid,
  Io,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above; the
/// message names the offending field or dimension.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::ZeroInverse: return "ZeroInverse";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::InvalidSymbol: return "InvalidSymbol";
    case Errc::Singular: return "Singular";
    case Errc::BadMagic: return "BadMagic";
    case Errc::BadVersion: return "BadVersion";
    case Errc::Truncated: return "Truncated";
    case Errc::FieldMismatch: return "FieldMismatch";
    case Errc::EmptyBuffer: return "EmptyBuffer";
    case Errc::GenerationMismatch: return "GenerationMismatch";
    case Errc::NotFullRank: return "NotFullRank";
    case Errc::GenerationExhausted: return "GenerationExhausted";
    case Errc::GenerationReuse: return "GenerationReuse";
    case Errc::IntegrityReject: return "IntegrityReject";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace spoc
