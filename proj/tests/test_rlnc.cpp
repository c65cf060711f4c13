#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "spoc/rlnc.hpp"

using namespace spoc;
using gf::FieldId;
using gf::SymbolMatrix;
using gf::SymbolVector;
using rlnc::CodedPacket;
using rlnc::GenerationBuffer;
using rlnc::InsertResult;

namespace {

std::vector<rlnc::NativePacket> random_natives(FieldId id, std::uint32_t gen, std::size_t h, std::size_t n,
                                               std::mt19937_64& rng) {
  std::vector<rlnc::NativePacket> out;
  for (std::size_t i = 0; i < h; ++i) out.push_back({gen, i, gf::random_vector(gf::Field::get(id), n, rng)});
  return out;
}

// Plain RLNC source packet: true coefficients in the unlocked set.
CodedPacket plain_packet(FieldId id, const std::vector<rlnc::NativePacket>& natives, const SymbolVector& coeffs,
                         const SymbolVector& locked) {
  CodedPacket p;
  p.header.field = id;
  p.header.generation_id = natives.front().generation_id;
  p.header.unlocked = coeffs;
  p.header.locked = locked;
  p.payload = rlnc::source_encode(id, natives, coeffs);
  return p;
}

SymbolVector unit(std::size_t h, std::size_t k) {
  SymbolVector v(h, 0);
  v[k] = 1;
  return v;
}

}  // namespace

TEST_SUITE("rlnc") {

TEST_CASE("source_encode") {
  std::mt19937_64 rng(31);
  const auto natives = random_natives(FieldId::GF256, 0, 2, 8, rng);
  CHECK(rlnc::source_encode(FieldId::GF256, natives, SymbolVector{0, 1}) == natives[1].payload);
  CHECK(rlnc::source_encode(FieldId::GF256, natives, SymbolVector{0, 0}) == SymbolVector(8, 0));

  const auto p = rlnc::source_encode(FieldId::GF256, natives, SymbolVector{3, 2});
  for (std::size_t j = 0; j < 8; ++j) {
    CHECK(p[j] == (oracle::gf256.mul(3, natives[0].payload[j]) ^ oracle::gf256.mul(2, natives[1].payload[j])));
  }
  CHECK_THROWS_AS(rlnc::source_encode(FieldId::GF256, natives, SymbolVector{1}), Error);
}

TEST_CASE("recode with explicit coefficients") {
  std::mt19937_64 rng(37);
  const auto natives = random_natives(FieldId::GF256, 4, 2, 6, rng);
  GenerationBuffer buf(FieldId::GF256, 4, 2);
  buf.insert(plain_packet(FieldId::GF256, natives, unit(2, 0), {0x11, 0x22}));

  SUBCASE("single packet, beta 1") {
    CHECK(rlnc::recode_with(buf, SymbolVector{1}) == buf.packets()[0]);
  }
  SUBCASE("node 4 of the butterfly") {
    buf.insert(plain_packet(FieldId::GF256, natives, unit(2, 1), {0x33, 0x44}));
    const auto out = rlnc::recode_with(buf, SymbolVector{1, 1});
    CHECK(out.header.unlocked == SymbolVector{1, 1});
    CHECK(out.header.locked == SymbolVector{0x11 ^ 0x33, 0x22 ^ 0x44});
    CHECK(out.generation_id() == 4);
  }
}

TEST_CASE("recode applies one beta to all three parts") {
  for (FieldId id : {FieldId::GF256, FieldId::GF65536}) {
    const auto& f = gf::Field::get(id);
    const oracle::Field& o = id == FieldId::GF256 ? oracle::gf256 : oracle::gf65536;
    std::mt19937_64 rng(41);
    const std::size_t h = 5, n = 9;
    const auto natives = random_natives(id, 2, h, n, rng);
    GenerationBuffer buf(id, 2, h);
    while (buf.rank() < 3) {
      buf.insert(plain_packet(id, natives, gf::random_vector(f, h, rng), gf::random_vector(f, h, rng)));
    }
    rlnc::RecodeRng r1(99), r2(99);
    const auto out = rlnc::recode(buf, r1);

    // Replay the draw and apply it as a 1 x rank matrix to the stacked rows.
    const auto beta = r2.nonzero_vector(f, buf.rank());
    oracle::Matrix b{std::vector<std::uint32_t>(beta.begin(), beta.end())};
    oracle::Matrix stacked;
    for (const auto& p : buf.packets()) {
      std::vector<std::uint32_t> row;
      for (auto s : p.header.unlocked) row.push_back(s);
      for (auto s : p.header.locked) row.push_back(s);
      for (auto s : p.payload) row.push_back(s);
      stacked.push_back(row);
    }
    const auto expect = oracle::matmul(o, b, stacked)[0];
    std::vector<std::uint32_t> got;
    for (auto s : out.header.unlocked) got.push_back(s);
    for (auto s : out.header.locked) got.push_back(s);
    for (auto s : out.payload) got.push_back(s);
    CHECK(got == expect);
  }
}

TEST_CASE("recode draws are reproducible and never all zero") {
  const auto& f = gf::Field::get(FieldId::GF256);
  rlnc::RecodeRng a(5), b(5);
  for (int i = 0; i < 1000; ++i) {
    const auto v = a.nonzero_vector(f, 1);
    CHECK(v[0] != 0);
    CHECK(v == b.nonzero_vector(f, 1));
  }
  GenerationBuffer empty(FieldId::GF256, 0, 2);
  try {
    rlnc::recode(empty, a);
    FAIL("expected EmptyBuffer");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyBuffer);
  }
}

TEST_CASE("innovativeness") {
  std::mt19937_64 rng(43);
  const auto natives = random_natives(FieldId::GF256, 0, 3, 4, rng);
  GenerationBuffer buf(FieldId::GF256, 0, 3);
  const auto p1 = plain_packet(FieldId::GF256, natives, {1, 2, 3}, {0, 0, 0});
  const auto p2 = plain_packet(FieldId::GF256, natives, {0, 5, 7}, {0, 0, 0});
  CHECK(buf.is_innovative(p1));
  CHECK(buf.insert(p1) == InsertResult::Stored);
  CHECK_FALSE(buf.is_innovative(p1));
  CHECK(buf.insert(p1) == InsertResult::Discarded);
  CHECK(buf.insert(p2) == InsertResult::Stored);
  const auto sum = plain_packet(FieldId::GF256, natives, {1, 2 ^ 5, 3 ^ 7}, {0, 0, 0});
  CHECK_FALSE(buf.is_innovative(sum));
  CHECK(buf.insert(sum) == InsertResult::Discarded);
  CHECK(buf.rank() == 2);
  CHECK(buf.insert(plain_packet(FieldId::GF256, natives, {0, 0, 1}, {0, 0, 0})) == InsertResult::FullRank);
  CHECK(buf.full_rank());
  CHECK(buf.insert(plain_packet(FieldId::GF256, natives, {9, 9, 9}, {0, 0, 0})) == InsertResult::Discarded);
  CHECK_FALSE(buf.is_innovative(plain_packet(FieldId::GF256, natives, {0, 0, 0}, {0, 0, 0})));
}

TEST_CASE("innovativeness agrees with a from-scratch rank") {
  for (FieldId id : {FieldId::GF256, FieldId::GF65536}) {
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t h = 1 + trial % 8;
      const auto natives = random_natives(id, 0, h, 2, rng);
      GenerationBuffer buf(id, 0, h);
      std::vector<SymbolVector> stored;
      for (int k = 0; k < 20; ++k) {
        // Small symbols make dependent rows common.
        SymbolVector c(h);
        for (auto& s : c) s = static_cast<gf::Symbol>(rng() % 3);
        auto rows = stored;
        rows.push_back(c);
        oracle::Matrix m;
        for (const auto& r : rows) m.emplace_back(r.begin(), r.end());
        const bool expect = oracle::rank(id == FieldId::GF256 ? oracle::gf256 : oracle::gf65536, m) > stored.size();
        REQUIRE(buf.is_innovative(plain_packet(id, natives, c, SymbolVector(h, 0))) == expect);
        if (buf.insert(plain_packet(id, natives, c, SymbolVector(h, 0))) != InsertResult::Discarded) stored.push_back(c);
        REQUIRE(buf.rank() == stored.size());
      }
    }
  }
}

TEST_CASE("buffer rejects foreign packets") {
  std::mt19937_64 rng(53);
  const auto natives = random_natives(FieldId::GF256, 1, 2, 4, rng);
  GenerationBuffer buf(FieldId::GF256, 0, 2);
  try {
    buf.insert(plain_packet(FieldId::GF256, natives, {1, 0}, {0, 0}));
    FAIL("expected GenerationMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::GenerationMismatch);
  }
  GenerationBuffer wide(FieldId::GF256, 1, 3);
  CHECK_THROWS_AS(wide.insert(plain_packet(FieldId::GF256, natives, {1, 0}, {0, 0})), Error);
}

TEST_CASE("matrices stay aligned") {
  std::mt19937_64 rng(59);
  const auto natives = random_natives(FieldId::GF256, 0, 3, 5, rng);
  GenerationBuffer buf(FieldId::GF256, 0, 3);
  buf.insert(plain_packet(FieldId::GF256, natives, {1, 1, 0}, {7, 8, 9}));
  buf.insert(plain_packet(FieldId::GF256, natives, {0, 1, 1}, {1, 2, 3}));
  CHECK(buf.unlocked_matrix() == SymbolMatrix(FieldId::GF256, 2, 3, {1, 1, 0, 0, 1, 1}));
  CHECK(buf.locked_matrix() == SymbolMatrix(FieldId::GF256, 2, 3, {7, 8, 9, 1, 2, 3}));
  CHECK(buf.payload_matrix().rows() == 2);
  CHECK(buf.payload_matrix().cols() == 5);
}

TEST_CASE("decode_plain") {
  std::mt19937_64 rng(61);
  SUBCASE("identity") {
    const auto natives = random_natives(FieldId::GF256, 0, 3, 4, rng);
    GenerationBuffer buf(FieldId::GF256, 0, 3);
    for (std::size_t k = 0; k < 3; ++k) buf.insert(plain_packet(FieldId::GF256, natives, unit(3, k), {0, 0, 0}));
    CHECK(rlnc::decode_plain(buf) == natives);
  }
  SUBCASE("not full rank") {
    const auto natives = random_natives(FieldId::GF256, 0, 3, 4, rng);
    GenerationBuffer buf(FieldId::GF256, 0, 3);
    buf.insert(plain_packet(FieldId::GF256, natives, unit(3, 0), {0, 0, 0}));
    buf.insert(plain_packet(FieldId::GF256, natives, unit(3, 1), {0, 0, 0}));
    try {
      rlnc::decode_plain(buf);
      FAIL("expected NotFullRank");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NotFullRank);
    }
  }
  SUBCASE("random trials through a relay") {
    int decoded = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      const std::size_t h = std::size_t{2} << (trial % 3);
      const auto natives = random_natives(FieldId::GF256, 0, h, 6, rng);
      GenerationBuffer relay(FieldId::GF256, 0, h), sink(FieldId::GF256, 0, h);
      for (std::size_t k = 0; k < h; ++k) relay.insert(plain_packet(FieldId::GF256, natives, unit(h, k), SymbolVector(h, 0)));
      rlnc::RecodeRng r(rng());
      for (std::size_t k = 0; k < h + 2; ++k) sink.insert(rlnc::recode(relay, r));
      if (!sink.full_rank()) continue;
      ++decoded;
      REQUIRE(rlnc::decode_plain(sink) == natives);
    }
    CHECK(decoded > 950);
  }
}

TEST_CASE("native matrix helpers") {
  std::mt19937_64 rng(67);
  const auto natives = random_natives(FieldId::GF65536, 9, 3, 4, rng);
  const auto w = rlnc::native_matrix(FieldId::GF65536, natives);
  CHECK(w.rows() == 3);
  CHECK(rlnc::natives_from(9, w) == natives);
}

}
