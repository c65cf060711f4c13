#include "spoc/gf.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

namespace spoc::gf {

namespace {

thread_local OpTally* t_tally = nullptr;
thread_local Part t_part = Part::Other;

void require_same_field(const SymbolMatrix& a, const SymbolMatrix& b, const char* op) {
  if (a.field() != b.field()) {
    throw Error(Errc::FieldMismatch, std::string(op) + ": operands over different fields");
  }
}

// Reduces the first `left` columns of `m` to reduced row echelon form while
// carrying the remaining columns along. Returns the pivot columns.
std::vector<std::size_t> reduce(SymbolMatrix& m, std::size_t left) {
  const Field& f = m.gf();
  const std::size_t cols = m.cols();
  std::uint64_t muls = 0;
  std::uint64_t adds = 0;
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < left && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && m(p, c) == 0) ++p;
    if (p == m.rows()) continue;
    if (p != r) std::swap_ranges(m.row(p).begin(), m.row(p).end(), m.row(r).begin());

    auto pivot_row = m.row(r);
    const Symbol scale = f.inv(pivot_row[c]);
    if (scale != 1) {
      for (std::size_t j = c; j < cols; ++j) pivot_row[j] = f.mul(scale, pivot_row[j]);
      muls += cols - c;
    }
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r) continue;
      const Symbol factor = m(i, c);
      if (factor == 0) continue;
      auto target = m.row(i);
      for (std::size_t j = c; j < cols; ++j) target[j] ^= f.mul(factor, pivot_row[j]);
      muls += cols - c;
      adds += cols - c;
    }
    pivots.push_back(c);
    ++r;
  }
  detail::tally(muls, adds);
  return pivots;
}

}  // namespace

// ---------------------------------------------------------------------------

Symbol slow_mul(const FieldSpec& spec, std::uint32_t a, std::uint32_t b) noexcept {
  const std::uint32_t top = 1u << spec.symbol_bits;
  std::uint32_t product = 0;
  while (b != 0) {
    if (b & 1u) product ^= a;
    b >>= 1;
    a <<= 1;
    if (a & top) a ^= spec.reduction_poly;
  }
  return static_cast<Symbol>(product);
}

Field::Field(const FieldSpec& spec) : spec_(spec), order_(1u << spec.symbol_bits) {
  const std::uint32_t cycle = order_ - 1;
  log_.assign(order_, 0);
  exp_.assign(2 * std::size_t{cycle}, 0);

  // A full-length multiplicative cycle exists only if the quotient ring is a
  // field, which also establishes irreducibility of the reduction polynomial.
  for (std::uint32_t g = 2; g < order_ && generator_ == 0; ++g) {
    std::uint32_t x = 1;
    std::uint32_t i = 0;
    for (; i < cycle; ++i) {
      if (i > 0 && x == 1) break;
      exp_[i] = static_cast<Symbol>(x);
      x = slow_mul(spec_, x, g);
    }
    if (i == cycle && x == 1) generator_ = static_cast<Symbol>(g);
  }
  if (generator_ == 0) throw std::logic_error("reduction polynomial is not irreducible");

  for (std::uint32_t i = 0; i < cycle; ++i) {
    exp_[i + cycle] = exp_[i];
    log_[exp_[i]] = static_cast<Symbol>(i);
  }
  inv_.assign(order_, 0);
  for (std::uint32_t a = 1; a < order_; ++a) inv_[a] = exp_[(cycle - log_[a]) % cycle];

  if (spec_.id == FieldId::GF256) {
    mul256_.assign(std::size_t{order_} * order_, 0);
    for (std::uint32_t a = 1; a < order_; ++a) {
      for (std::uint32_t b = 1; b < order_; ++b) {
        mul256_[(a << 8) | b] = exp_[std::size_t{log_[a]} + log_[b]];
      }
    }
  }

  // Cross-check against the shift-and-xor product on a fixed pseudo-random
  // sample (every pair for GF(2^8)).
  std::uint64_t state = 0x9E3779B97F4A7C15ull;
  const std::size_t checks = spec_.id == FieldId::GF256 ? std::size_t{order_} * order_ : 10000;
  for (std::size_t n = 0; n < checks; ++n) {
    std::uint32_t a;
    std::uint32_t b;
    if (spec_.id == FieldId::GF256) {
      a = static_cast<std::uint32_t>(n >> 8);
      b = static_cast<std::uint32_t>(n & 0xFF);
    } else {
      state = state * 6364136223846793005ull + 1442695040888963407ull;
      a = static_cast<std::uint32_t>(state >> 48);
      b = static_cast<std::uint32_t>((state >> 16) & 0xFFFF);
    }
    if (mul(static_cast<Symbol>(a), static_cast<Symbol>(b)) != slow_mul(spec_, a, b)) {
      throw std::logic_error("field table self-check failed");
    }
  }
}

const Field& Field::get(FieldId id) {
  if (id == FieldId::GF256) {
    static const Field f256(kGF256);
    return f256;
  }
  static const Field f65536(kGF65536);
  return f65536;
}

Symbol Field::inv(Symbol a) const {
  if (a == 0) throw Error(Errc::ZeroInverse, "inverse of zero");
  if (!contains(a)) throw Error(Errc::InvalidSymbol, "symbol out of field range");
  return inv_[a];
}

// ---------------------------------------------------------------------------

TallyScope::TallyScope(OpTally& tally) noexcept : previous_(t_tally) { t_tally = &tally; }
TallyScope::~TallyScope() { t_tally = previous_; }

PartScope::PartScope(Part part) noexcept : previous_(t_part) { t_part = part; }
PartScope::~PartScope() { t_part = previous_; }

void detail::tally(std::uint64_t muls, std::uint64_t adds) noexcept {
  if (t_tally == nullptr) return;
  auto& c = (*t_tally)[t_part];
  c.mul += muls;
  c.add += adds;
}

// ---------------------------------------------------------------------------

void check_symbols(const Field& f, std::span<const Symbol> v, const char* what) {
  for (Symbol s : v) {
    if (!f.contains(s)) {
      throw Error(Errc::InvalidSymbol, std::string(what) + ": symbol " + std::to_string(s) +
                                           " exceeds field range");
    }
  }
}

void scale_into(const Field& f, Symbol alpha, std::span<const Symbol> x, std::span<Symbol> out) {
  if (x.size() != out.size()) throw Error(Errc::DimensionMismatch, "scale: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = f.mul(alpha, x[i]);
  detail::tally(x.size(), 0);
}

void axpy_inplace(const Field& f, Symbol alpha, std::span<const Symbol> x, std::span<Symbol> y) {
  if (x.size() != y.size()) throw Error(Errc::DimensionMismatch, "axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] ^= f.mul(alpha, x[i]);
  detail::tally(x.size(), x.size());
}

SymbolVector vec_axpy(const Field& f, Symbol alpha, std::span<const Symbol> x,
                      std::span<const Symbol> y) {
  SymbolVector out(y.begin(), y.end());
  axpy_inplace(f, alpha, x, out);
  return out;
}

SymbolVector combine(const Field& f, std::span<const Symbol> coeffs,
                     std::span<const std::span<const Symbol>> rows) {
  if (rows.empty()) throw Error(Errc::DimensionMismatch, "combine: no rows");
  if (coeffs.size() != rows.size()) {
    throw Error(Errc::DimensionMismatch, "combine: " + std::to_string(coeffs.size()) +
                                             " coefficients for " + std::to_string(rows.size()) +
                                             " rows");
  }
  SymbolVector out(rows.front().size());
  scale_into(f, coeffs[0], rows[0], out);
  for (std::size_t i = 1; i < rows.size(); ++i) axpy_inplace(f, coeffs[i], rows[i], out);
  return out;
}

// ---------------------------------------------------------------------------

SymbolMatrix::SymbolMatrix(FieldId field, std::size_t rows, std::size_t cols)
    : field_(field), rows_(rows), cols_(cols), data_(rows * cols, 0) {}

SymbolMatrix::SymbolMatrix(FieldId field, std::size_t rows, std::size_t cols,
                           std::vector<Symbol> data)
    : field_(field), rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw Error(Errc::DimensionMismatch, "matrix data length " + std::to_string(data_.size()) +
                                             " != " + std::to_string(rows) + "x" +
                                             std::to_string(cols));
  }
  check_symbols(Field::get(field), data_, "matrix");
}

SymbolMatrix SymbolMatrix::identity(FieldId field, std::size_t n) {
  SymbolMatrix m(field, n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

SymbolMatrix SymbolMatrix::from_rows(FieldId field, std::size_t cols,
                                     std::span<const std::span<const Symbol>> rows) {
  SymbolMatrix m(field, rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw Error(Errc::DimensionMismatch, "from_rows: ragged rows");
    std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  }
  check_symbols(Field::get(field), m.data_, "matrix");
  return m;
}

bool SymbolMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](Symbol s) { return s == 0; });
}

SymbolMatrix SymbolMatrix::transpose() const {
  SymbolMatrix t(field_, cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

SymbolMatrix mat_mul(const SymbolMatrix& a, const SymbolMatrix& b) {
  require_same_field(a, b, "mat_mul");
  if (a.cols() != b.rows()) {
    throw Error(Errc::DimensionMismatch, "mat_mul: " + std::to_string(a.rows()) + "x" +
                                             std::to_string(a.cols()) + " times " +
                                             std::to_string(b.rows()) + "x" +
                                             std::to_string(b.cols()));
  }
  const Field& f = a.gf();
  SymbolMatrix out(a.field(), a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Symbol acc = 0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc ^= f.mul(a(i, k), b(k, j));
      out(i, j) = acc;
    }
  }
  const std::uint64_t cells = std::uint64_t{a.rows()} * b.cols();
  detail::tally(cells * a.cols(), a.cols() == 0 ? 0 : cells * (a.cols() - 1));
  return out;
}

SymbolMatrix mat_add(const SymbolMatrix& a, const SymbolMatrix& b) {
  require_same_field(a, b, "mat_add");
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(Errc::DimensionMismatch, "mat_add: shape mismatch");
  }
  std::vector<Symbol> data(a.data());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] ^= b.data()[i];
  detail::tally(0, data.size());
  return SymbolMatrix(a.field(), a.rows(), a.cols(), std::move(data));
}

Echelon gaussian_eliminate(const SymbolMatrix& a) {
  Echelon e{a, 0, {}};
  e.pivot_cols = reduce(e.rref, a.cols());
  e.rank = e.pivot_cols.size();
  return e;
}

std::size_t rank(const SymbolMatrix& a) { return gaussian_eliminate(a).rank; }

namespace {

// Gauss-Jordan on [A | B]; returns the right block once A reduces to I.
SymbolMatrix eliminate_augmented(const SymbolMatrix& a, const SymbolMatrix& b, const char* op) {
  const std::size_t n = a.rows();
  SymbolMatrix aug(a.field(), n, n + b.cols());
  for (std::size_t r = 0; r < n; ++r) {
    std::copy(a.row(r).begin(), a.row(r).end(), aug.row(r).begin());
    std::copy(b.row(r).begin(), b.row(r).end(), aug.row(r).begin() + n);
  }
  if (reduce(aug, n).size() != n) throw Error(Errc::Singular, std::string(op) + ": matrix is singular");
  SymbolMatrix out(a.field(), n, b.cols());
  for (std::size_t r = 0; r < n; ++r) {
    std::copy(aug.row(r).begin() + n, aug.row(r).end(), out.row(r).begin());
  }
  return out;
}

}  // namespace

SymbolMatrix mat_inverse(const SymbolMatrix& a) {
  if (a.rows() != a.cols()) throw Error(Errc::DimensionMismatch, "mat_inverse: matrix not square");
  return eliminate_augmented(a, SymbolMatrix::identity(a.field(), a.rows()), "mat_inverse");
}

SymbolMatrix solve(const SymbolMatrix& a, const SymbolMatrix& y) {
  require_same_field(a, y, "solve");
  if (a.rows() != a.cols()) throw Error(Errc::DimensionMismatch, "solve: matrix not square");
  if (a.rows() != y.rows()) throw Error(Errc::DimensionMismatch, "solve: row count mismatch");
  return eliminate_augmented(a, y, "solve");
}

}  // namespace spoc::gf
