#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "abr/cell.hpp"
#include "abr/params.hpp"
#include "abr/rate_codec.hpp"
#include "abr/types.hpp"

namespace abr {

// Supplies turned-around BRM cells awaiting an in-rate slot. Implemented by
// the co-located destination of the reverse flow on bidirectional VCs; a
// null provider means no BRMs ever wait (unidirectional VC).
class TurnaroundProvider {
 public:
  virtual ~TurnaroundProvider() = default;
  virtual bool brm_waiting() const = 0;
  virtual RmCell take_brm(SimTime now, bool in_rate) = 0;
};

enum class NextCell { none, data, forward_rm, backward_rm };

// ABR source end system for one flow direction. Implements the thirteen
// TM4.0 source behaviors: ACR always within [MCR, PCR], start at the
// effective ICR with a leading FRM, the Nrm/Mrm/Trm cell-ordering rule,
// the ADTF idle decay and CRM/CDF missed-feedback decay before each FRM,
// CCR stamping, the CI/NI/ER feedback response, the TCR-limited out-of-rate
// FRM path, and EFCI=0 on emitted data cells.
class Source {
 public:
  struct Config {
    std::uint8_t vpi = 0;
    std::uint16_t vci = 32;
    bool vpc = false;  // virtual path connection: RM cells use VCI=6
    // When feedback raises ACR, pull the next emission forward so the new
    // rate takes effect immediately instead of after the stale interval.
    bool reschedule_on_increase = true;
    // Take the full permitted increase on CI=0/NI=0 feedback. Off means the
    // source holds its rate unless forced down.
    bool apply_rate_increase = true;
    // ER carried in generated FRMs; defaults to PCR.
    std::optional<double> er_init;
    // Use-it-or-lose-it style hook: may return a reduced ACR before each
    // in-rate FRM. No policy is shipped; the default keeps ACR unchanged.
    std::function<double(double acr, SimTime now)> acr_retention_hook;
    // Last-chance adjustment of self-generated FRM fields (e.g. NI=1 when
    // the end system itself is congested).
    std::function<void(RmCell&)> frm_field_hook;
  };

  Source(AbrParams params, Config config, TurnaroundProvider* turnaround,
         SimTime start_time);

  // Cell-ordering decision for an in-rate transmission opportunity at `now`.
  NextCell next_cell_type(SimTime now) const;

  // ADTF and CRM/CDF decays, applied in that order immediately before an
  // in-rate FRM leaves. Exposed for direct state-machine tests.
  void pre_frm_rules(SimTime now);

  // Emits the cell chosen by next_cell_type and advances the pacing clock.
  // Must not be called when the decision is NextCell::none.
  Cell emit_cell(SimTime now);

  // Feedback from a backward RM cell addressed to this source (in-rate or
  // out-of-rate, including BECN).
  void on_backward_rm(const RmCell& brm, SimTime now);

  // Out-of-rate FRM when in-rate sensing is unavailable (ACR zero) or too
  // slow to keep rate information fresh. Rate-capped at TCR; returns nothing
  // when the condition or the budget says no.
  std::optional<Cell> maybe_emit_oor_frm(SimTime now);
  bool oor_frm_needed(SimTime now) const;

  void set_data_waiting(bool waiting) { data_waiting_ = waiting; }
  bool data_waiting() const { return data_waiting_; }

  double acr() const { return acr_; }
  double effective_icr() const { return icr_eff_; }
  const AbrParams& params() const { return params_; }
  SimTime next_emission_time() const { return next_emission_; }
  SimTime time_of_last_frm() const { return time_of_last_frm_; }
  std::int64_t cells_since_frm() const { return cells_since_frm_; }
  std::int64_t frms_since_brm() const { return frms_since_brm_; }
  bool started() const { return first_cell_sent_; }

 private:
  RmCell build_frm(SimTime now) const;
  void apply_feedback(std::uint8_t ci, std::uint8_t ni, double er);
  void after_inrate_emission(SimTime now);

  AbrParams params_;
  Config config_;
  TurnaroundProvider* turnaround_;
  std::int64_t crm_;
  double icr_eff_;
  double er_init_;

  double acr_;
  SimTime next_emission_;
  SimTime time_of_last_frm_ = 0;
  std::int64_t cells_since_frm_ = 0;
  std::int64_t frms_since_brm_ = 0;
  bool brm_sent_since_frm_ = false;
  bool first_cell_sent_ = false;
  bool data_waiting_ = false;
  TokenGate oor_gate_;
};

}  // namespace abr
