#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "abr/params.hpp"
#include "abr/trace.hpp"
#include "abr/types.hpp"

namespace abr {

// One rule breach found in a trace or a wire cell. Rules follow the TM4.0
// end-system behavior numbering: SRC-n for source behaviors, DST-n for
// destination behaviors, CELL-* for structural problems of a single cell.
struct Violation {
  std::string rule;
  SimTime t = 0;
  std::size_t index = 0;  // offending record index within the input trace
  std::string point;
  std::string detail;
  // True when the trace lacks the state snapshots needed to decide the rule
  // with certainty; the finding is advisory.
  bool warning = false;
};

std::string to_string(const Violation& v);

// Replays the source state machine over every source UNI point in the trace
// (points that transmit data or forward RM cells) and reports:
//   SRC-1  in-rate cells spaced closer than the allowed cell rate permits
//   SRC-2  first in-rate cell is not a forward RM cell
//   SRC-3  cell-ordering breaches of the Nrm/Mrm/Trm schedule
//   SRC-4  data cell sent out-of-rate (CLP=1)
//   SRC-5  missed ACR decrease after idling longer than ADTF
//   SRC-6  missed ACR decrease after CRM unanswered forward RM cells
//   SRC-7  CCR field disagrees with the allowed cell rate at emission
//   SRC-8  ACR above the bound the received feedback permits
//   SRC-9  ACR below the minimum cell rate
//   SRC-10 malformed forward RM cell fields (CI/BN/ER/MCR)
//   SRC-11 out-of-rate forward RM cells above TCR
//   SRC-12 data cell transmitted with EFCI set
// SRC-5/6/8/9 need the acr snapshots our traces carry; without them the
// CCR field substitutes and the findings are downgraded to warnings.
// Throws std::invalid_argument when the trace is not time-ordered.
std::vector<Violation> check_source_trace(const std::vector<TraceRecord>& trace,
                                          const AbrParams& params);

// Replays the destination rules over every destination UNI point (points
// that receive forward cells) and reports:
//   DST-1  turnaround CI does not reflect the latched EFCI state
//   DST-2  turnaround CCR/MCR modified, or ER increased
//   DST-3  backward cell with a malformed direction bit
//   DST-4  older turnaround contents sent after newer contents
//   DST-5  BECN above 10 cells/s, BECN without CI/NI, or a BN=0 backward
//          cell with no forward RM cell to turn around
std::vector<Violation> check_dest_trace(const std::vector<TraceRecord>& trace,
                                        const AbrParams& params);

// Structural audit of one 53-byte cell: length, CRC, PTI, protocol id,
// reserved fields, rate-code canonicality, BECN flag consistency.
std::vector<Violation> check_cell(std::span<const std::uint8_t> bytes);

}  // namespace abr
