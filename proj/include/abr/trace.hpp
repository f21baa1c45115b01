#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "abr/types.hpp"

namespace abr {

// One observable protocol event. UNI records (point "NODE:vc") capture every
// cell entering or leaving an end system; port records (point
// "SWITCH->NEIGHBOR") capture drops inside the network. Rates are decoded to
// cells/s. Source transmissions additionally snapshot the allowed cell rate
// and the scheduling counters so a trace audit can verify the rate rules
// exactly instead of bracketing them.
struct TraceRecord {
  SimTime t = 0;
  std::string point;
  std::string event;  // "tx", "rx" or "drop"
  int vc = 0;
  std::string kind;  // "data", "frm" or "brm"
  int dir = 0;
  int clp = 0;
  int efci = 0;
  int ci = 0;
  int ni = 0;
  int bn = 0;
  double er = 0;
  double ccr = 0;
  double mcr = 0;
  std::optional<double> acr;                  // source tx only
  std::optional<std::int64_t> cells_since_frm;
  std::optional<std::int64_t> frms_since_brm;
  std::optional<std::int64_t> seq;  // turnaround content tag, destination tx
};

std::string to_json_line(const TraceRecord& rec);
TraceRecord trace_record_from_json(const std::string& line);

void write_trace(std::ostream& os, const std::vector<TraceRecord>& trace);

// Loads a JSON Lines trace. Throws std::runtime_error with a line number on
// malformed input or when timestamps go backwards.
std::vector<TraceRecord> load_trace(std::istream& is);
std::vector<TraceRecord> load_trace_file(const std::string& path);

}  // namespace abr
