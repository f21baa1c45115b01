#include "abr/rm_cell.hpp"

#include <cctype>
#include <stdexcept>

namespace abr {
namespace {

// Generator x^10+x^9+x^5+x^4+x+1. The table maps the top 8 register bits to
// their reduction so the payload is consumed one octet at a time.
constexpr std::uint16_t kCrc10Poly = 0x633;  // 11-bit form, bit 10 implicit in the step

struct Crc10Table {
  std::array<std::uint16_t, 256> at{};
  constexpr Crc10Table() {
    for (unsigned i = 0; i < 256; ++i) {
      // Remainder of (i << 10), i.e. byte i followed by ten zero bits.
      std::uint32_t r = i << 10;
      for (int bit = 17; bit >= 10; --bit)
        if (r & (1u << bit)) r ^= static_cast<std::uint32_t>(kCrc10Poly) << (bit - 10);
      at[i] = static_cast<std::uint16_t>(r & 0x3FF);
    }
  }
};

constexpr Crc10Table kCrcTable;

void put_u16(std::uint8_t* p, std::uint16_t v) {
  p[0] = static_cast<std::uint8_t>(v >> 8);
  p[1] = static_cast<std::uint8_t>(v & 0xFF);
}

std::uint16_t get_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] << 8 | p[1]);
}

void put_u32(std::uint8_t* p, std::uint32_t v) {
  p[0] = static_cast<std::uint8_t>(v >> 24);
  p[1] = static_cast<std::uint8_t>(v >> 16);
  p[2] = static_cast<std::uint8_t>(v >> 8);
  p[3] = static_cast<std::uint8_t>(v);
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) << 24 | static_cast<std::uint32_t>(p[1]) << 16 |
         static_cast<std::uint32_t>(p[2]) << 8 | p[3];
}

}  // namespace

std::uint16_t crc10(std::span<const std::uint8_t> bytes) {
  std::uint16_t crc = 0;
  for (std::uint8_t b : bytes)
    crc = static_cast<std::uint16_t>(
        kCrcTable.at[((crc >> 2) & 0xFF)] ^ ((crc & 0x3) << 8) ^ b);
  return static_cast<std::uint16_t>(crc & 0x3FF);
}

std::array<std::uint8_t, kCellBytes> serialize(const RmCell& cell) {
  if (cell.header.pti != kPtiRmCell)
    throw std::invalid_argument("RM cell requires PTI=6");
  if (cell.dir > 1 || cell.bn > 1 || cell.ci > 1 || cell.ni > 1 || cell.ra > 1 ||
      cell.header.clp > 1)
    throw std::invalid_argument("flag fields are single bits");
  if (cell.bn == 1 && (cell.dir != 1 || (cell.ci == 0 && cell.ni == 0)))
    throw std::invalid_argument("BECN cell requires dir=1 and ci or ni set");
  if (cell.msg_reserved > 7 || cell.reserved_bits > 0x3F)
    throw std::invalid_argument("reserved bit fields out of range");

  std::array<std::uint8_t, kCellBytes> out{};
  const CellHeader& h = cell.header;
  out[0] = static_cast<std::uint8_t>(h.vpi >> 4);
  out[1] = static_cast<std::uint8_t>((h.vpi & 0xF) << 4 | (h.vci >> 12));
  out[2] = static_cast<std::uint8_t>((h.vci >> 4) & 0xFF);
  out[3] = static_cast<std::uint8_t>((h.vci & 0xF) << 4 | (h.pti & 0x7) << 1 | h.clp);
  out[4] = 0;  // HEC not modelled at this layer

  out[5] = cell.protocol_id;
  out[6] = static_cast<std::uint8_t>(cell.dir << 7 | cell.bn << 6 | cell.ci << 5 |
                                     cell.ni << 4 | cell.ra << 3 | cell.msg_reserved);
  put_u16(&out[7], cell.er.to_u16());
  put_u16(&out[9], cell.ccr.to_u16());
  put_u16(&out[11], cell.mcr.to_u16());
  put_u32(&out[13], cell.ql);
  put_u32(&out[17], cell.sn);
  for (std::size_t i = 0; i < cell.reserved.size(); ++i) out[21 + i] = cell.reserved[i];
  out[51] = static_cast<std::uint8_t>(cell.reserved_bits << 2);
  out[52] = 0;

  std::uint16_t crc = crc10(std::span<const std::uint8_t>(out).subspan(5, 48));
  out[51] |= static_cast<std::uint8_t>(crc >> 8);
  out[52] = static_cast<std::uint8_t>(crc & 0xFF);
  return out;
}

ParseOutcome parse(std::span<const std::uint8_t> bytes) {
  ParseOutcome res;
  if (bytes.size() != kCellBytes) {
    res.issues.push_back(CellIssue::bad_length);
    return res;
  }

  RmCell c;
  c.header.vpi = static_cast<std::uint8_t>((bytes[0] & 0xF) << 4 | bytes[1] >> 4);
  c.header.vci =
      static_cast<std::uint16_t>((bytes[1] & 0xF) << 12 | bytes[2] << 4 | bytes[3] >> 4);
  c.header.pti = (bytes[3] >> 1) & 0x7;
  c.header.clp = bytes[3] & 1;
  c.protocol_id = bytes[5];
  c.dir = bytes[6] >> 7;
  c.bn = (bytes[6] >> 6) & 1;
  c.ci = (bytes[6] >> 5) & 1;
  c.ni = (bytes[6] >> 4) & 1;
  c.ra = (bytes[6] >> 3) & 1;
  c.msg_reserved = bytes[6] & 0x7;
  std::uint16_t er_bits = get_u16(&bytes[7]);
  std::uint16_t ccr_bits = get_u16(&bytes[9]);
  std::uint16_t mcr_bits = get_u16(&bytes[11]);
  c.er = RateCode16::from_u16(er_bits);
  c.ccr = RateCode16::from_u16(ccr_bits);
  c.mcr = RateCode16::from_u16(mcr_bits);
  c.ql = get_u32(&bytes[13]);
  c.sn = get_u32(&bytes[17]);
  for (std::size_t i = 0; i < c.reserved.size(); ++i) c.reserved[i] = bytes[21 + i];
  c.reserved_bits = bytes[51] >> 2;

  // Dividing the whole payload including the received CRC leaves 0 when intact.
  if (crc10(bytes.subspan(5, 48)) != 0) res.issues.push_back(CellIssue::bad_crc);
  if (c.header.pti != kPtiRmCell) res.issues.push_back(CellIssue::bad_pti);
  if (c.protocol_id != kProtocolIdAbr) res.issues.push_back(CellIssue::bad_protocol_id);
  for (std::uint8_t b : c.reserved)
    if (b != kReservedOctetFill) {
      res.issues.push_back(CellIssue::reserved_not_filler);
      break;
    }
  // Covers the message-byte spare bits, the pre-CRC spare bits and the top
  // (reserved) bit of each rate field.
  if (c.msg_reserved != 0 || c.reserved_bits != 0 ||
      ((er_bits | ccr_bits | mcr_bits) & 0x8000u) != 0)
    res.issues.push_back(CellIssue::reserved_bits_set);
  auto noncanonical_zero = [](std::uint16_t bits) {
    return ((bits >> 14) & 1u) == 0 && (bits & 0x3FFFu) != 0;
  };
  if (noncanonical_zero(er_bits) || noncanonical_zero(ccr_bits) ||
      noncanonical_zero(mcr_bits))
    res.issues.push_back(CellIssue::non_canonical_zero_rate);
  if (c.bn == 1 && (c.dir != 1 || (c.ci == 0 && c.ni == 0)))
    res.issues.push_back(CellIssue::becn_without_indication);

  res.cell = c;
  return res;
}

std::string to_string(CellIssue issue) {
  switch (issue) {
    case CellIssue::bad_length: return "cell is not 53 bytes";
    case CellIssue::bad_crc: return "CRC-10 mismatch";
    case CellIssue::bad_pti: return "PTI is not 6 (RM cell)";
    case CellIssue::bad_protocol_id: return "protocol id is not 1 (ABR)";
    case CellIssue::reserved_not_filler: return "reserved octets are not 0x6A filler";
    case CellIssue::reserved_bits_set: return "reserved bits are not zero";
    case CellIssue::non_canonical_zero_rate:
      return "rate field has nz=0 but nonzero exponent/mantissa";
    case CellIssue::becn_without_indication:
      return "BN=1 cell lacks dir=1 with CI or NI set";
  }
  return "unknown issue";
}

std::string to_hex(const std::array<std::uint8_t, kCellBytes>& bytes) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  s.reserve(kCellBytes * 2);
  for (std::uint8_t b : bytes) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 0xF]);
  }
  return s;
}

std::optional<std::array<std::uint8_t, kCellBytes>> from_hex(const std::string& hex) {
  if (hex.size() != kCellBytes * 2) return std::nullopt;
  std::array<std::uint8_t, kCellBytes> out{};
  for (std::size_t i = 0; i < kCellBytes; ++i) {
    auto nibble = [](char ch) -> int {
      if (ch >= '0' && ch <= '9') return ch - '0';
      if (ch >= 'a' && ch <= 'f') return ch - 'a' + 10;
      if (ch >= 'A' && ch <= 'F') return ch - 'A' + 10;
      return -1;
    };
    int hi = nibble(hex[2 * i]), lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return out;
}

}  // namespace abr
