#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "abr/rate_codec.hpp"

namespace abr {

// ATM cell header (UNI format). EFCI is tracked as its own flag: on user data
// cells it lives in the middle PTI bit, while RM cells carry the fixed PTI
// value 6 (binary 110) and have no EFCI of their own.
struct CellHeader {
  std::uint8_t vpi = 0;
  std::uint16_t vci = 0;  // 16 bits; RM cells of a VPC use VCI=6
  std::uint8_t pti = 0;   // 3 bits
  std::uint8_t clp = 0;   // 1 = eligible for discard (out-of-rate)
  std::uint8_t efci = 0;  // congestion-experienced mark on data cells

  bool operator==(const CellHeader&) const = default;
};

constexpr std::uint8_t kPtiRmCell = 6;       // binary 110
constexpr std::uint8_t kProtocolIdAbr = 1;   // ABR rate control
constexpr std::uint8_t kReservedOctetFill = 0x6A;
constexpr std::size_t kCellBytes = 53;

// 53-byte resource management cell.
//
//   octets  0..4    ATM header (GFC/VPI/VCI/PTI/CLP, HEC carried as 0)
//   octet   5       protocol id (1 = ABR)
//   octet   6       message type: DIR BN CI NI RA r r r   (MSB first)
//   octets  7..8    ER   explicit rate          (16-bit rate code)
//   octets  9..10   CCR  current cell rate      (16-bit rate code)
//   octets 11..12   MCR  minimum cell rate      (16-bit rate code)
//   octets 13..16   QL   queue length, always 0 here
//   octets 17..20   SN   sequence number, always 0 here
//   octets 21..50   reserved, filled with 0x6A
//   octet  51       rrrrrr cc   6 reserved bits (0) + CRC-10 bits 9..8
//   octet  52       CRC-10 bits 7..0
//
// The CRC-10 (generator x^10+x^9+x^5+x^4+x+1) is the plain polynomial
// remainder of the 48-byte payload with the CRC field zeroed; a receiver that
// divides the full payload including the received CRC gets remainder 0.
struct RmCell {
  CellHeader header{.pti = kPtiRmCell};
  std::uint8_t protocol_id = kProtocolIdAbr;
  std::uint8_t dir = 0;  // 0 forward, 1 backward
  std::uint8_t bn = 0;   // 1 = switch/destination generated (BECN)
  std::uint8_t ci = 0;   // congestion indication
  std::uint8_t ni = 0;   // no-increase
  std::uint8_t ra = 0;   // carried but not interpreted
  std::uint8_t msg_reserved = 0;  // low 3 bits of the message type octet
  RateCode16 er;
  RateCode16 ccr;
  RateCode16 mcr;
  std::uint32_t ql = 0;
  std::uint32_t sn = 0;
  std::array<std::uint8_t, 30> reserved{};  // octets 21..50, 0x6A when generated
  std::uint8_t reserved_bits = 0;           // 6 bits preceding the CRC

  RmCell() { reserved.fill(kReservedOctetFill); }

  bool is_forward() const { return dir == 0; }
  bool is_backward() const { return dir == 1; }
};

// CRC-10 over an arbitrary byte string (the caller zeroes the CRC field
// first). Table-driven; tests cross-check it against a bit-serial oracle.
std::uint16_t crc10(std::span<const std::uint8_t> bytes);

// Builds the 53-byte wire form, computing the CRC. Throws
// std::invalid_argument when the cell violates structural invariants
// (bn=1 without dir=1 and ci|ni, field values out of range).
std::array<std::uint8_t, kCellBytes> serialize(const RmCell& cell);

enum class CellIssue {
  bad_length,
  bad_crc,
  bad_pti,
  bad_protocol_id,
  reserved_not_filler,       // a generated cell must carry 0x6A filler octets
  reserved_bits_set,
  non_canonical_zero_rate,   // nz=0 with nonzero exponent/mantissa
  becn_without_indication,   // bn=1 but ci=0 and ni=0, or bn=1 on a forward cell
};

std::string to_string(CellIssue issue);

struct ParseOutcome {
  std::optional<RmCell> cell;       // absent only for bad_length
  std::vector<CellIssue> issues;    // empty means fully valid
  bool ok() const { return cell.has_value() && issues.empty(); }
};

// Decodes a wire cell. Always yields field values when the length is right;
// integrity and structure problems are reported as distinct issues so a
// checker can list everything wrong with one cell.
ParseOutcome parse(std::span<const std::uint8_t> bytes);

// Hex-dump form used by the CLI: 106 hex characters, no separators.
std::string to_hex(const std::array<std::uint8_t, kCellBytes>& bytes);
std::optional<std::array<std::uint8_t, kCellBytes>> from_hex(const std::string& hex);

}  // namespace abr
