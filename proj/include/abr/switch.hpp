#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>

#include "abr/cell.hpp"
#include "abr/params.hpp"
#include "abr/types.hpp"

namespace abr {

// Feedback mechanism a switch applies. All models share the same FIFO queue
// and drop policy; they differ only in how congestion is signalled.
enum class SwitchModel { pass_through, efci, relative_rate, explicit_rate };

SwitchModel switch_model_from_string(const std::string& name);
std::string to_string(SwitchModel model);

// One ABR switching element. Output ports are FIFO queues served at the
// attached link rate; congestion state always lives at the forward-direction
// port, and backward RM cells passing through are marked against that state
// (the fastest feedback path). Queue thresholds are in cells.
class Switch {
 public:
  struct Config {
    SwitchModel model = SwitchModel::pass_through;
    std::int64_t efci_threshold = 100;
    std::int64_t rr_lo = 50;    // queue above this: no-increase
    std::int64_t rr_hi = 100;   // queue above this: congestion indication
    std::int64_t panic_threshold = 400;  // queue above this: BECN (4 x rr_hi)
    std::int64_t queue_limit = 1000;
    double target_utilization = 0.95;
    bool becn_enabled = false;
    double becn_rate = 10.0;     // BECN cells/s per VC
    bool mark_forward = false;   // additionally mark/update RM cells on the forward path
    bool trust_ccr = false;      // believe the CCR field instead of observed activity
    bool drop_brm = false;       // fault injection: discard backward RM cells
    std::optional<double> er_override;  // explicit-rate grant instead of fair share
    SimTime activity_window_ns = ms_to_ns(500);
  };

  struct VcInfo {
    double mcr = 0;       // learned from the MCR field of passing RM cells
    double last_ccr = 0;  // learned from FRMs
    SimTime last_seen = 0;
    std::int64_t cells = 0;
    TokenGate becn_gate;
  };

  struct Port {
    std::string name;
    double capacity_cps = 0;      // <= 0 means infinite (no service delay)
    SimTime service_interval = 0;
    std::deque<Cell> queue;
    bool busy = false;  // a cell is being transmitted right now
    std::map<std::uint16_t, VcInfo> vcs;  // keyed by VCI, forward direction
    std::int64_t max_queue = 0;
    std::int64_t drops_clp0 = 0;
    std::int64_t drops_clp1 = 0;
  };

  explicit Switch(Config config) : config_(config) {}

  Port& add_port(const std::string& name, double capacity_cps);
  Port& port(const std::string& name);
  const Config& config() const { return config_; }

  // Bookkeeping for every forward-direction cell: activity, and negotiated
  // rates learned from RM cell fields.
  void note_forward_cell(Port& fwd, const Cell& cell, SimTime now);

  // Congestion marking of data cells (EFCI model).
  void efci_mark(const Port& fwd, Cell& cell) const;

  // Relative-rate marking of an RM cell against the forward queue. Bits only
  // ever go from 0 to 1.
  void rr_mark(const Port& fwd, RmCell& rm) const;

  // Max-min fair allocation for one VC at this port: everyone gets the
  // common water level, floored at their MCR, within target_utilization of
  // capacity. Iterates until the constrained set is stable.
  double fair_share(const Port& fwd, std::uint16_t vci, SimTime now) const;

  // Explicit-rate update: ER can only be reduced, and an encoded allocation
  // never exceeds the granted rate (round-down encoding).
  void er_update(const Port& fwd, RmCell& rm, SimTime now) const;

  // BECN toward the source of `vci` when the forward queue passed the panic
  // threshold; rate-limited per VC.
  std::optional<RmCell> maybe_generate_becn(Port& fwd, std::uint8_t vpi,
                                            std::uint16_t vci, SimTime now);

  enum class EnqueueResult { queued, dropped, pushed_out };
  struct EnqueueOutcome {
    EnqueueResult result = EnqueueResult::queued;
    std::optional<Cell> victim;  // cell pushed out to admit a CLP=0 arrival
  };

  // FIFO with discard-eligible push-out: a CLP=0 arrival at a full queue
  // evicts the oldest CLP=1 cell if one exists, otherwise the arrival is
  // dropped (same for CLP=1 arrivals).
  EnqueueOutcome enqueue(Port& port, Cell cell);

  Cell dequeue(Port& port);

  const std::map<std::string, Port>& ports() const { return ports_; }

 private:
  Config config_;
  std::map<std::string, Port> ports_;
};

}  // namespace abr
