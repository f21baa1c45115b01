#pragma once

#include <cstdint>
#include <optional>

#include "abr/cell.hpp"
#include "abr/params.hpp"
#include "abr/rate_codec.hpp"
#include "abr/source.hpp"
#include "abr/types.hpp"

namespace abr {

// What to do with the previously pending turnaround cell when a newer FRM
// arrives before it could be sent. `keep_in_rate` leaves the slot cell
// scheduled with the overwritten (newer) contents, which is observably the
// same as discarding the old contents; both differ from the default only in
// that nothing extra is emitted.
enum class DisplacedPolicy { send_out_of_rate, discard, keep_in_rate };

// ABR destination end system for one flow direction. Latches EFCI marks from
// arriving data cells, turns forward RM cells around (never raising ER),
// keeps at most one turnaround pending with strict freshness ordering, and
// can inject rate-limited BECN cells when itself congested.
class Destination : public TurnaroundProvider {
 public:
  struct Config {
    DisplacedPolicy displaced = DisplacedPolicy::send_out_of_rate;
    // Largest ER this end system lets through on turnaround (its own
    // capacity limit). Unset leaves ER untouched.
    std::optional<double> er_cap;
    // ER advertised in self-generated BECN cells.
    double becn_er = kMaxRate16;
    double becn_rate = 10.0;  // cells/s per connection
  };

  explicit Destination(Config config) : config_(config), becn_gate_(config.becn_rate) {}

  // Remembers the EFCI state of the most recent data cell.
  void on_data_cell(const CellHeader& header);

  struct TurnaroundResult {
    // Old pending content displaced by this arrival, to be sent out-of-rate
    // immediately (already stamped CLP=1). Empty under the other policies.
    std::optional<RmCell> displaced;
    std::int64_t displaced_seq = 0;
  };

  // Accepts a forward RM cell (in-rate or out-of-rate) and stores its
  // turnaround in the pending slot.
  TurnaroundResult turn_around(const RmCell& frm, SimTime now);

  // TurnaroundProvider: the reverse-direction source drains the slot for
  // in-rate transmission; the engine drains it out-of-rate when there is no
  // reverse capacity. The saved EFCI state transfers to CI here, as close to
  // transmission as possible, and is then cleared.
  bool brm_waiting() const override { return pending_.has_value(); }
  RmCell take_brm(SimTime now, bool in_rate) override;

  // Self-generated backward cell (BN=1, CI=1) when this end system is
  // congested. Rate-limited; returns nothing when the budget is exhausted.
  std::optional<RmCell> generate_becn(std::uint8_t vpi, std::uint16_t vci, SimTime now);

  bool efci_latched() const { return efci_saved_; }
  std::int64_t turnaround_seq() const { return seq_; }
  std::optional<SimTime> pending_arrival_time() const {
    return pending_ ? std::optional<SimTime>(pending_arrival_) : std::nullopt;
  }
  std::int64_t pending_seq() const { return pending_seq_; }

 private:
  RmCell make_turnaround(const RmCell& frm) const;

  Config config_;
  bool efci_saved_ = false;
  std::optional<RmCell> pending_;
  SimTime pending_arrival_ = 0;
  std::int64_t pending_seq_ = 0;
  std::int64_t seq_ = 0;  // monotone tag proving older content never follows newer
  TokenGate becn_gate_;
};

}  // namespace abr
