#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "abr/rate_codec.hpp"

using namespace abr;

namespace {

// Independent oracle: enumerate every nonzero code, compute its value from
// first principles, and keep the largest one not exceeding the target rate.
// Deliberately brute force so it shares no arithmetic with encode_rate16.
RateCode16 best_code_at_most(double rate) {
  RateCode16 best;  // canonical zero
  double best_value = -1.0;
  for (int e = 0; e < 32; ++e) {
    for (int m = 0; m < 512; ++m) {
      double value = std::pow(2.0, e) * (1.0 + m / 512.0);
      if (value <= rate && value > best_value) {
        best_value = value;
        best = RateCode16{true, static_cast<std::uint8_t>(e),
                          static_cast<std::uint16_t>(m)};
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("encode picks the largest representable rate not above the input") {
  // Structured probes: exact code values, just above them, just below them.
  std::vector<double> probes = {1.0,    1.001, 1.9999, 2.0,     3.0,   3.01,
                                1023.0, 511.5, 512.0,  16777215.0, 999999.0};
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mag(0.0, 31.0);
  for (int i = 0; i < 200; ++i) probes.push_back(std::exp2(mag(rng)));

  for (double r : probes) {
    CAPTURE(r);
    CHECK(encode_rate16(r) == best_code_at_most(r));
  }
}

TEST_CASE("exhaustive roundtrip over every payload pattern") {
  for (unsigned bits = 0; bits < (1u << 15); ++bits) {
    RateCode16 code = RateCode16::from_u16(static_cast<std::uint16_t>(bits));
    double value = decode_rate16(code);
    if (!code.nz) {
      REQUIRE(value == 0.0);
      // All nz=0 patterns mean zero; re-encoding gives the canonical form.
      REQUIRE(encode_rate16(value) == RateCode16{});
    } else {
      REQUIRE(encode_rate16(value) == code);
    }
  }
}

TEST_CASE("bit layout of the 16-bit code") {
  CHECK(RateCode16{true, 31, 511}.to_u16() == 0x7FFF);
  CHECK(RateCode16{true, 0, 0}.to_u16() == 0x4000);
  CHECK(RateCode16{}.to_u16() == 0x0000);
  CHECK(RateCode16::from_u16(0x4200) == RateCode16{true, 1, 0});
  // The top (reserved) bit is ignored on read.
  CHECK(RateCode16::from_u16(0xC000) == RateCode16{true, 0, 0});
}

TEST_CASE("decode is strictly monotone over nonzero codes") {
  double prev = 0.0;
  for (int e = 0; e < 32; ++e)
    for (int m = 0; m < 512; ++m) {
      double value = decode_rate16(RateCode16{true, static_cast<std::uint8_t>(e),
                                              static_cast<std::uint16_t>(m)});
      REQUIRE(value > prev);
      prev = value;
    }
}

TEST_CASE("round-down error stays below one part in 512") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> mag(0.0, 31.9);
  for (int i = 0; i < 5000; ++i) {
    double r = std::exp2(mag(rng));
    double back = decode_rate16(encode_rate16(r));
    CAPTURE(r);
    REQUIRE(back <= r);
    REQUIRE(back > r * (1.0 - 1.0 / 512.0));
  }
}

TEST_CASE("known code values") {
  // 3.0 = 2^1 * (1 + 256/512)
  CHECK(encode_rate16(3.0) == RateCode16{true, 1, 256});
  CHECK(decode_rate16(RateCode16{true, 0, 0}) == 1.0);
  CHECK(decode_rate16(RateCode16{true, 31, 511}) == kMaxRate16);
  CHECK(kMaxRate16 == 4'290'772'992.0);
  CHECK(encode_rate16(kMaxRate16) == RateCode16{true, 31, 511});
}

TEST_CASE("rates below one cell per second collapse to the zero code") {
  CHECK(encode_rate16(0.0) == RateCode16{});
  CHECK(encode_rate16(0.5) == RateCode16{});
  CHECK(encode_rate16(0.999999) == RateCode16{});
  CHECK(encode_rate16(1.0) == RateCode16{true, 0, 0});
}

TEST_CASE("out-of-range rates are rejected") {
  CHECK_THROWS_AS(encode_rate16(-1.0), std::out_of_range);
  CHECK_THROWS_AS(encode_rate16(kMaxRate16 * 1.001), std::out_of_range);
  CHECK_THROWS_AS(encode_rate16(std::nan("")), std::out_of_range);
}

TEST_CASE("24-bit integer rate format floors and saturates its range") {
  CHECK(encode_rate24(365566.03) == 365566);
  CHECK(encode_rate24(0.0) == 0);
  CHECK(encode_rate24(kMaxRate24) == 16'777'215);
  CHECK(decode_rate24(16'777'215) == kMaxRate24);
  CHECK_THROWS_AS(encode_rate24(kMaxRate24 + 1.0), std::out_of_range);
  CHECK_THROWS_AS(encode_rate24(-0.5), std::out_of_range);
  CHECK_THROWS_AS(decode_rate24(1u << 24), std::out_of_range);
}
