#include "spoc/integrity.hpp"

#include <string>
#include <utility>

namespace spoc::integrity {

ParitySecret make_secret(std::uint32_t generation_id, const gf::SymbolMatrix& natives,
                         gf::SymbolMatrix parity) {
  if (parity.rows() == 0) throw Error(Errc::DimensionMismatch, "integrity: z must be at least 1");
  if (parity.cols() != natives.cols()) {
    throw Error(Errc::DimensionMismatch, "integrity: parity matrix has " +
                                             std::to_string(parity.cols()) + " columns, natives " +
                                             std::to_string(natives.cols()));
  }
  ParitySecret s{generation_id, std::move(parity), {}};
  s.hash = gf::mat_mul(natives, s.parity.transpose());
  return s;
}

bool verify(const gf::SymbolMatrix& decoded, const ParitySecret& secret) {
  if (decoded.cols() != secret.parity.cols() || decoded.rows() != secret.hash.rows()) {
    throw Error(Errc::DimensionMismatch, "integrity: decoded matrix is " +
                                             std::to_string(decoded.rows()) + "x" +
                                             std::to_string(decoded.cols()) +
                                             ", secret expects " +
                                             std::to_string(secret.hash.rows()) + "x" +
                                             std::to_string(secret.parity.cols()));
  }
  return gf::mat_mul(decoded, secret.parity.transpose()) == secret.hash;
}

}  // namespace spoc::integrity
