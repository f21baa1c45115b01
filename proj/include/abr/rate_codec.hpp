#pragma once

#include <cstdint>

namespace abr {

// 16-bit floating-point rate format carried in the ER, CCR and MCR fields of
// RM cells (ATM Forum TM4.0):
//
//   15   14   13........9   8...............0
//  +----+----+------------+-------------------+
//  | r  | nz | exponent   | mantissa          |
//  +----+----+------------+-------------------+
//   r: reserved, always 0
//   nz: 0 encodes the rate zero regardless of exponent/mantissa
//
// value = nz * 2^exponent * (1 + mantissa/512) cells/s, so the largest
// representable rate is 2^31 * (1023/512) = 4,290,772,992 cells/s and the
// granularity below any value is one part in 512.
struct RateCode16 {
  bool nz = false;
  std::uint8_t exponent = 0;   // 0..31
  std::uint16_t mantissa = 0;  // 0..511

  std::uint16_t to_u16() const;
  static RateCode16 from_u16(std::uint16_t bits);

  bool operator==(const RateCode16&) const = default;
};

// Largest value encode_rate16 accepts and decode_rate16 returns.
constexpr double kMaxRate16 = 4'290'772'992.0;

// Encodes the largest representable rate that does not exceed `rate`, so a
// decoded allocation never grants more than was intended. Rates below 1
// cell/s (including 0) map to the canonical zero code. Throws
// std::out_of_range for negative rates or rates above kMaxRate16.
RateCode16 encode_rate16(double rate);

// Exact value of a code in cells/s. Total on all bit patterns; any code with
// nz=0 decodes to 0.
double decode_rate16(const RateCode16& code);

// 24-bit unsigned integer rate used in connection setup signalling (e.g. the
// negotiated PCR). Encoding floors fractional rates. Throws std::out_of_range
// outside [0, 16,777,215].
constexpr double kMaxRate24 = 16'777'215.0;
std::uint32_t encode_rate24(double rate);
double decode_rate24(std::uint32_t value);

}  // namespace abr
