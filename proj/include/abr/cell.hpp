#pragma once

#include <cstdint>

#include "abr/rm_cell.hpp"

namespace abr {

enum class CellType { data, rm };

// Cell as it moves through the simulator. Data cells only use the header
// (EFCI/CLP); RM cells carry the full payload. `content_seq` tags turned
// around BRM contents so trace audits can prove freshness ordering.
struct Cell {
  CellType type = CellType::data;
  RmCell rm;
  std::int64_t content_seq = 0;

  CellHeader& header() { return rm.header; }
  const CellHeader& header() const { return rm.header; }

  bool is_rm() const { return type == CellType::rm; }
  bool is_frm() const { return is_rm() && rm.dir == 0; }
  bool is_brm() const { return is_rm() && rm.dir == 1; }
};

inline Cell make_data_cell(std::uint8_t vpi, std::uint16_t vci) {
  Cell c;
  c.type = CellType::data;
  c.header() = CellHeader{.vpi = vpi, .vci = vci, .pti = 0, .clp = 0, .efci = 0};
  return c;
}

}  // namespace abr
