#pragma once

// Arithmetic and dense linear algebra over GF(2^8) and GF(2^16).

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "spoc/error.hpp"

namespace spoc::gf {

using Symbol = std::uint16_t;
using SymbolVector = std::vector<Symbol>;

enum class FieldId : std::uint8_t { GF256 = 0, GF65536 = 1 };

struct FieldSpec {
  FieldId id;
  unsigned symbol_bits;
  std::uint32_t reduction_poly;
};

// x^8+x^4+x^3+x+1 and x^16+x^12+x^3+x+1.
inline constexpr FieldSpec kGF256{FieldId::GF256, 8, 0x11B};
inline constexpr FieldSpec kGF65536{FieldId::GF65536, 16, 0x1100B};

constexpr const FieldSpec& spec_of(FieldId id) {
  return id == FieldId::GF256 ? kGF256 : kGF65536;
}

constexpr std::size_t symbol_bytes(FieldId id) { return spec_of(id).symbol_bits / 8; }

constexpr const char* field_name(FieldId id) {
  return id == FieldId::GF256 ? "GF256" : "GF65536";
}

/// Table-driven field. Instances are built once on first use and are
/// immutable afterwards.
class Field {
 public:
  static const Field& get(FieldId id);

  Field(const Field&) = delete;
  Field& operator=(const Field&) = delete;

  const FieldSpec& spec() const noexcept { return spec_; }
  FieldId id() const noexcept { return spec_.id; }
  unsigned bits() const noexcept { return spec_.symbol_bits; }
  std::size_t symbol_bytes() const noexcept { return spec_.symbol_bits / 8; }
  std::uint32_t order() const noexcept { return order_; }
  Symbol mask() const noexcept { return static_cast<Symbol>(order_ - 1); }
  bool contains(std::uint32_t v) const noexcept { return v < order_; }

  /// Multiplicative generator found while building the tables.
  Symbol generator() const noexcept { return generator_; }

  static Symbol add(Symbol a, Symbol b) noexcept { return a ^ b; }

  Symbol mul(Symbol a, Symbol b) const noexcept {
    if (!mul256_.empty()) return mul256_[(std::size_t{a} << 8) | b];
    if (a == 0 || b == 0) return 0;
    return exp_[std::size_t{log_[a]} + log_[b]];
  }

  Symbol inv(Symbol a) const;
  Symbol div(Symbol a, Symbol b) const { return mul(a, inv(b)); }

 private:
  explicit Field(const FieldSpec& spec);

  FieldSpec spec_;
  std::uint32_t order_;
  Symbol generator_ = 0;
  std::vector<Symbol> log_;
  std::vector<Symbol> exp_;  // doubled so log sums need no reduction
  std::vector<Symbol> inv_;
  std::vector<Symbol> mul256_;
};

inline Symbol gf_add(Symbol a, Symbol b) noexcept { return a ^ b; }
inline Symbol gf_mul(const Field& f, Symbol a, Symbol b) noexcept { return f.mul(a, b); }
inline Symbol gf_inv(const Field& f, Symbol a) { return f.inv(a); }

/// Shift-and-xor product used to cross-check the tables at build time.
Symbol slow_mul(const FieldSpec& spec, std::uint32_t a, std::uint32_t b) noexcept;

// ---------------------------------------------------------------------------
// Operation counting.
//
// Kernels below report every field multiplication and addition they perform
// to the tally installed on the current thread, attributed to the current
// Part. Nothing is counted when no tally is installed.

enum class Part : std::uint8_t { Unlocked, Locked, Payload, Matrix, Other };
inline constexpr std::size_t kPartCount = 5;

struct OpCounts {
  std::uint64_t mul = 0;
  std::uint64_t add = 0;
};

struct OpTally {
  std::array<OpCounts, kPartCount> parts{};

  OpCounts& operator[](Part p) { return parts[static_cast<std::size_t>(p)]; }
  const OpCounts& operator[](Part p) const { return parts[static_cast<std::size_t>(p)]; }
};

class TallyScope {
 public:
  explicit TallyScope(OpTally& tally) noexcept;
  ~TallyScope();
  TallyScope(const TallyScope&) = delete;
  TallyScope& operator=(const TallyScope&) = delete;

 private:
  OpTally* previous_;
};

class PartScope {
 public:
  explicit PartScope(Part part) noexcept;
  ~PartScope();
  PartScope(const PartScope&) = delete;
  PartScope& operator=(const PartScope&) = delete;

 private:
  Part previous_;
};

namespace detail {
void tally(std::uint64_t muls, std::uint64_t adds) noexcept;
}

// ---------------------------------------------------------------------------
// Vectors.

template <class Rng>
Symbol random_symbol(const Field& f, Rng& rng) {
  return static_cast<Symbol>(rng() & f.mask());
}

template <class Rng>
SymbolVector random_vector(const Field& f, std::size_t n, Rng& rng) {
  SymbolVector v(n);
  for (auto& s : v) s = random_symbol(f, rng);
  return v;
}

/// Throws InvalidSymbol if any element does not fit the field.
void check_symbols(const Field& f, std::span<const Symbol> v, const char* what);

/// out = alpha * x
void scale_into(const Field& f, Symbol alpha, std::span<const Symbol> x, std::span<Symbol> out);
/// y += alpha * x
void axpy_inplace(const Field& f, Symbol alpha, std::span<const Symbol> x, std::span<Symbol> y);
/// Returns alpha * x + y.
SymbolVector vec_axpy(const Field& f, Symbol alpha, std::span<const Symbol> x,
                      std::span<const Symbol> y);

/// Sum of coeffs[i] * rows[i]. Costs rows.size() * len multiplications and
/// (rows.size() - 1) * len additions.
SymbolVector combine(const Field& f, std::span<const Symbol> coeffs,
                     std::span<const std::span<const Symbol>> rows);

// ---------------------------------------------------------------------------
// Matrices.

class SymbolMatrix {
 public:
  SymbolMatrix() = default;
  SymbolMatrix(FieldId field, std::size_t rows, std::size_t cols);
  SymbolMatrix(FieldId field, std::size_t rows, std::size_t cols, std::vector<Symbol> data);

  static SymbolMatrix identity(FieldId field, std::size_t n);
  static SymbolMatrix from_rows(FieldId field, std::size_t cols,
                                std::span<const std::span<const Symbol>> rows);

  template <class Rng>
  static SymbolMatrix random(FieldId field, std::size_t rows, std::size_t cols, Rng& rng) {
    const Field& f = Field::get(field);
    SymbolMatrix m(field, rows, cols);
    for (auto& s : m.data_) s = random_symbol(f, rng);
    return m;
  }

  FieldId field() const noexcept { return field_; }
  const Field& gf() const { return Field::get(field_); }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  Symbol& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  Symbol operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<Symbol> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const Symbol> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  const std::vector<Symbol>& data() const noexcept { return data_; }

  bool is_zero() const;
  SymbolMatrix transpose() const;

  friend bool operator==(const SymbolMatrix&, const SymbolMatrix&) = default;

 private:
  FieldId field_ = FieldId::GF256;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Symbol> data_;
};

/// Naive cubic product.
SymbolMatrix mat_mul(const SymbolMatrix& a, const SymbolMatrix& b);
SymbolMatrix mat_add(const SymbolMatrix& a, const SymbolMatrix& b);

struct Echelon {
  SymbolMatrix rref;
  std::size_t rank = 0;
  std::vector<std::size_t> pivot_cols;
};

/// Reduced row echelon form. Pivots are the first nonzero entry found
/// scanning rows top-down in each column, left to right.
Echelon gaussian_eliminate(const SymbolMatrix& a);

std::size_t rank(const SymbolMatrix& a);

/// Gauss-Jordan on [A | I]. Throws Singular.
SymbolMatrix mat_inverse(const SymbolMatrix& a);

/// Returns W with A * W = Y. Throws Singular.
SymbolMatrix solve(const SymbolMatrix& a, const SymbolMatrix& y);

}  // namespace spoc::gf
