#include "abr/rate_codec.hpp"

#include <cmath>
#include <stdexcept>

namespace abr {

std::uint16_t RateCode16::to_u16() const {
  return static_cast<std::uint16_t>((nz ? 1u : 0u) << 14 |
                                    (exponent & 0x1Fu) << 9 |
                                    (mantissa & 0x1FFu));
}

RateCode16 RateCode16::from_u16(std::uint16_t bits) {
  RateCode16 c;
  c.nz = (bits >> 14) & 1u;
  c.exponent = static_cast<std::uint8_t>((bits >> 9) & 0x1Fu);
  c.mantissa = static_cast<std::uint16_t>(bits & 0x1FFu);
  return c;
}

RateCode16 encode_rate16(double rate) {
  if (!(rate >= 0.0) || rate > kMaxRate16)
    throw std::out_of_range("rate not representable in 16-bit rate format");
  if (rate < 1.0) return RateCode16{};  // canonical zero

  // 2^e <= rate < 2^(e+1); scaling by 2^(9-e) is exact in binary floating
  // point, so the floor below is the true round-down mantissa.
  int e = std::ilogb(rate);
  auto m = static_cast<std::uint16_t>(std::floor(std::ldexp(rate, 9 - e)) - 512.0);
  return RateCode16{true, static_cast<std::uint8_t>(e), m};
}

double decode_rate16(const RateCode16& code) {
  if (!code.nz) return 0.0;
  return std::ldexp(512.0 + code.mantissa, code.exponent - 9);
}

std::uint32_t encode_rate24(double rate) {
  if (!(rate >= 0.0) || rate > kMaxRate24)
    throw std::out_of_range("rate not representable in 24-bit rate format");
  return static_cast<std::uint32_t>(rate);
}

double decode_rate24(std::uint32_t value) {
  if (value > static_cast<std::uint32_t>(kMaxRate24))
    throw std::out_of_range("value exceeds 24 bits");
  return static_cast<double>(value);
}

}  // namespace abr
