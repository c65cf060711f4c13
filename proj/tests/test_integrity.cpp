#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "spoc/integrity.hpp"

using namespace spoc;
using gf::FieldId;
using gf::SymbolMatrix;

namespace {

// Random rank-1 error u * v^T with u, v nonzero.
SymbolMatrix rank_one(FieldId id, std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  const auto& f = gf::Field::get(id);
  gf::SymbolVector u, v;
  do u = gf::random_vector(f, rows, rng); while (std::all_of(u.begin(), u.end(), [](auto s) { return s == 0; }));
  do v = gf::random_vector(f, cols, rng); while (std::all_of(v.begin(), v.end(), [](auto s) { return s == 0; }));
  return gf::mat_mul(SymbolMatrix(id, rows, 1, u), SymbolMatrix(id, 1, cols, v));
}

double escape_rate(std::size_t z, int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  int escaped = 0;
  for (int t = 0; t < trials; ++t) {
    const auto w = SymbolMatrix::random(FieldId::GF256, 4, 16, rng);
    const auto secret = integrity::make_secret(0, w, z, rng);
    escaped += integrity::verify(gf::mat_add(w, rank_one(FieldId::GF256, 4, 16, rng)), secret);
  }
  return escaped / double(trials);
}

}  // namespace

TEST_SUITE("integrity") {

TEST_CASE("hash of zero natives is zero") {
  std::mt19937_64 rng(109);
  const auto s = integrity::make_secret(3, SymbolMatrix(FieldId::GF256, 4, 8), 2, rng);
  CHECK(s.hash.is_zero());
  CHECK(s.generation_id == 3);
}

TEST_CASE("hash matches triple-loop product with P transposed") {
  for (FieldId id : {FieldId::GF256, FieldId::GF65536}) {
    std::mt19937_64 rng(113);
    const auto w = SymbolMatrix::random(id, 4, 10, rng);
    const auto s = integrity::make_secret(0, w, 2, rng);
    REQUIRE(s.parity.rows() == 2);
    REQUIRE(s.parity.cols() == 10);
    const oracle::Field& o = id == FieldId::GF256 ? oracle::gf256 : oracle::gf65536;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 2; ++j) {
        std::uint32_t acc = 0;
        for (std::size_t k = 0; k < 10; ++k) acc ^= o.mul(w(i, k), s.parity(j, k));
        CHECK(s.hash(i, j) == acc);
      }
    CHECK(integrity::make_secret(0, w, s.parity).hash == s.hash);
  }
}

TEST_CASE("completeness") {
  std::mt19937_64 rng(127);
  for (int t = 0; t < 1000; ++t) {
    const auto w = SymbolMatrix::random(FieldId::GF256, 1 + t % 8, 1 + t % 13, rng);
    REQUIRE(integrity::verify(w, integrity::make_secret(0, w, 1 + t % 3 % w.cols(), rng)));
  }
}

TEST_CASE("single symbol flip is caught") {
  std::mt19937_64 rng(131);
  int caught = 0;
  for (int t = 0; t < 10000; ++t) {
    auto w = SymbolMatrix::random(FieldId::GF256, 4, 16, rng);
    const auto secret = integrity::make_secret(0, w, 1, rng);
    w(rng() % 4, rng() % 16) ^= static_cast<gf::Symbol>(1 + rng() % 255);
    caught += !integrity::verify(w, secret);
  }
  CHECK(caught / 10000.0 >= 1.0 - 1.0 / 256 - 3 * std::sqrt((1.0 / 256) * (255.0 / 256) / 10000));
}

TEST_CASE("rank-1 escape frequency is q^-z") {
  const int n = 10000;
  for (std::size_t z : {1u, 2u}) {
    const double p = std::pow(256.0, -double(z));
    const double sigma = std::sqrt(p * (1 - p) / n);
    const double rate = escape_rate(z, n, 137 + z);
    CAPTURE(z);
    CAPTURE(rate);
    CHECK(std::abs(rate - p) <= 3 * sigma + 1.0 / n);
  }
}

TEST_CASE("dimension checks") {
  std::mt19937_64 rng(139);
  const auto w = SymbolMatrix::random(FieldId::GF256, 3, 5, rng);
  const auto s = integrity::make_secret(0, w, 2, rng);
  CHECK_THROWS_AS(integrity::verify(SymbolMatrix(FieldId::GF256, 3, 6), s), Error);
  CHECK_THROWS_AS(integrity::verify(SymbolMatrix(FieldId::GF256, 2, 5), s), Error);
  CHECK_THROWS_AS(integrity::make_secret(0, w, 0, rng), Error);
}

}
