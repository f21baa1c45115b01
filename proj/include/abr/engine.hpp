#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "abr/scenario.hpp"
#include "abr/trace.hpp"
#include "abr/types.hpp"

namespace abr {

// Per-flow accounting. A bidirectional VC runs as two flows, one per data
// direction; counters describe the cells a flow owns (its data and FRMs at
// the origin, its BRMs and BECNs coming back from the far side).
struct FlowMetrics {
  std::uint16_t vci = 0;
  std::string from;
  std::string to;

  std::int64_t data_tx = 0;
  std::int64_t frm_tx = 0;       // in-rate forward RM cells
  std::int64_t oor_frm_tx = 0;   // out-of-rate forward RM cells (TCR path)
  std::int64_t brm_tx = 0;       // turnarounds leaving the far end
  std::int64_t displaced_tx = 0; // overwritten turnarounds sent out-of-rate
  std::int64_t becn_tx = 0;      // network/destination generated BN=1 cells

  std::int64_t data_rx = 0;
  std::int64_t frm_rx = 0;
  std::int64_t brm_rx = 0;  // BN=0 backward RM cells reaching the source
  std::int64_t becn_rx = 0; // BN=1 backward RM cells reaching the source

  // Conservation: injected = delivered + dropped + in_flight at stop time.
  std::int64_t injected = 0;
  std::int64_t delivered = 0;
  std::int64_t dropped = 0;
  std::int64_t in_flight = 0;

  double throughput_cps = 0;  // delivered data cells over the full run
  double mean_acr = 0;
  double final_acr = 0;

  std::int64_t turnaround_count = 0;  // FRM out to BN=0 BRM back, in order
  double turnaround_mean_ms = 0;
  double turnaround_max_ms = 0;

  std::vector<std::pair<SimTime, double>> acr_samples;
};

struct PortMetrics {
  std::string point;  // "SWITCH->NEIGHBOR"
  double capacity_cps = 0;
  std::int64_t max_queue = 0;
  std::int64_t drops_clp0 = 0;
  std::int64_t drops_clp1 = 0;
  // Least-squares growth rate of the sampled queue depth. Meaningful when
  // the queue trends (e.g. a persistent overload); near zero otherwise.
  double queue_slope_cps = 0;
  std::vector<std::pair<SimTime, std::int64_t>> queue_samples;
};

struct Metrics {
  std::string scenario;
  SimTime duration_ns = 0;
  SimTime sample_period_ns = 0;
  std::vector<FlowMetrics> flows;
  std::vector<PortMetrics> ports;
  double jain = 1.0;  // fairness of per-flow data throughput
  bool conservation_ok = true;
};

// (Σx)² / (n·Σx²); 1.0 for an empty or all-zero population.
double jain_index(const std::vector<double>& xs);

std::string metrics_to_json(const Metrics& m);

struct RunResult {
  std::vector<TraceRecord> trace;
  Metrics metrics;
};

// Minimum round-trip latency of the VC's path: propagation plus one cell
// service time per hop, forward and backward legs summed. Queueing excluded.
SimTime frtt_of(const Scenario& scenario, const VcConfig& vc);

// Runs the scenario to run.duration_ns. Identical scenarios (including seed)
// produce identical results, byte for byte once serialized.
RunResult run(const Scenario& scenario);

}  // namespace abr
