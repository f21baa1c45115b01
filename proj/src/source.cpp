#include "abr/source.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace abr {

Source::Source(AbrParams params, Config config, TurnaroundProvider* turnaround,
               SimTime start_time)
    : params_(params),
      config_(std::move(config)),
      turnaround_(turnaround),
      crm_(derive_crm(params.tbe, params.nrm)),
      icr_eff_(abr::effective_icr(params.icr, params.tbe, params.frtt_ns)),
      er_init_(config_.er_init.value_or(params.pcr)),
      acr_(icr_eff_),
      next_emission_(start_time),
      oor_gate_(params.tcr) {}

NextCell Source::next_cell_type(SimTime now) const {
  // No in-rate capacity at all. Rate information then travels via the
  // out-of-rate FRM path until feedback grants a rate again.
  if (acr_ <= 0) return NextCell::none;

  // The very first in-rate cell of the connection is an FRM.
  if (!first_cell_sent_) return NextCell::forward_rm;

  bool frm_due = (cells_since_frm_ >= params_.mrm &&
                  now - time_of_last_frm_ >= params_.trm_ns) ||
                 cells_since_frm_ == params_.nrm - 1;
  if (frm_due) return NextCell::forward_rm;

  if (turnaround_ && turnaround_->brm_waiting() &&
      (!brm_sent_since_frm_ || !data_waiting_))
    return NextCell::backward_rm;

  if (data_waiting_) return NextCell::data;
  return NextCell::none;
}

void Source::pre_frm_rules(SimTime now) {
  // Idle decay: a long gap since the last FRM means the rate information the
  // network granted is stale, so fall back to ICR (never upward).
  if (first_cell_sent_ && acr_ > icr_eff_ &&
      now - time_of_last_frm_ > params_.adtf_ns)
    acr_ = icr_eff_;

  // Missed-feedback decay: too many FRMs since the last BN=0 BRM cuts the
  // rate by CDF for this and every further unanswered FRM.
  if (params_.cdf > 0 && frms_since_brm_ >= crm_)
    acr_ = std::max(params_.mcr, acr_ * (1.0 - params_.cdf));

  if (config_.acr_retention_hook) {
    double suggested = config_.acr_retention_hook(acr_, now);
    if (suggested < acr_) acr_ = std::max(params_.mcr, suggested);
  }
}

RmCell Source::build_frm(SimTime now) const {
  (void)now;
  RmCell frm;
  frm.header.vpi = config_.vpi;
  frm.header.vci = config_.vpc ? 6 : config_.vci;
  frm.header.pti = kPtiRmCell;
  frm.header.clp = 0;
  frm.dir = 0;
  frm.bn = 0;
  frm.ci = 0;
  frm.ni = 0;
  frm.er = encode_rate16(std::min(er_init_, kMaxRate16));
  frm.ccr = encode_rate16(acr_);
  frm.mcr = encode_rate16(params_.mcr);
  if (config_.frm_field_hook) config_.frm_field_hook(frm);
  return frm;
}

void Source::after_inrate_emission(SimTime now) {
  first_cell_sent_ = true;
  // Cells after this one follow the rate in effect now; a rate of zero can
  // never be reached here because emission requires acr > 0.
  assert(acr_ > 0 && "in-rate emission with zero ACR");
  next_emission_ = now + rate_to_interval(acr_);
}

Cell Source::emit_cell(SimTime now) {
  NextCell what = next_cell_type(now);
  assert(what != NextCell::none && "emit_cell called with nothing to send");

  Cell cell;
  switch (what) {
    case NextCell::forward_rm: {
      pre_frm_rules(now);
      cell.type = CellType::rm;
      cell.rm = build_frm(now);
      cells_since_frm_ = 0;
      time_of_last_frm_ = now;
      ++frms_since_brm_;
      brm_sent_since_frm_ = false;
      break;
    }
    case NextCell::backward_rm: {
      cell.type = CellType::rm;
      cell.rm = turnaround_->take_brm(now, /*in_rate=*/true);
      cell.rm.header.clp = 0;
      ++cells_since_frm_;
      brm_sent_since_frm_ = true;
      break;
    }
    case NextCell::data: {
      cell = make_data_cell(config_.vpi, config_.vci);
      cell.header().efci = 0;  // sources always start data cells unmarked
      cell.header().clp = 0;
      ++cells_since_frm_;
      break;
    }
    case NextCell::none:
      throw std::logic_error("emit_cell with no cell due");
  }
  after_inrate_emission(now);
  return cell;
}

void Source::apply_feedback(std::uint8_t ci, std::uint8_t ni, double er) {
  if (ci) {
    acr_ = std::min(er, acr_ - acr_ * params_.rdf);
  } else if (ni) {
    acr_ = std::min(er, acr_);
  } else {
    double increased =
        config_.apply_rate_increase ? acr_ + params_.rif * params_.pcr : acr_;
    acr_ = std::min({er, increased, params_.pcr});
  }
  acr_ = std::max(acr_, params_.mcr);
}

void Source::on_backward_rm(const RmCell& brm, SimTime now) {
  double prev_acr = acr_;
  apply_feedback(brm.ci, brm.ni, decode_rate16(brm.er));

  // BECN cells (BN=1) do not count as answers to our FRMs.
  if (brm.bn == 0) frms_since_brm_ = 0;

  if (config_.reschedule_on_increase && acr_ > prev_acr && acr_ > 0) {
    SimTime pulled = now + rate_to_interval(acr_);
    next_emission_ = std::min(next_emission_, pulled);
  }
}

bool Source::oor_frm_needed(SimTime now) const {
  (void)now;
  if (!first_cell_sent_) return false;
  if (acr_ <= 0) return true;
  // Rate information would expire before the next in-rate cell could carry
  // an FRM: assist out-of-rate.
  return rate_to_interval(acr_) > params_.adtf_ns;
}

std::optional<Cell> Source::maybe_emit_oor_frm(SimTime now) {
  if (!oor_frm_needed(now) || !oor_gate_.try_take(now)) return std::nullopt;
  Cell cell;
  cell.type = CellType::rm;
  cell.rm = build_frm(now);
  cell.rm.header.clp = 1;  // out-of-rate cells are discard-eligible
  return cell;
}

}  // namespace abr
