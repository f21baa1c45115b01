#include "abr/destination.hpp"

#include <algorithm>
#include <stdexcept>

namespace abr {

void Destination::on_data_cell(const CellHeader& header) {
  // Last cell wins: a marked cell sets the latch, an unmarked one does not
  // clear it (the latch only clears when its value is transferred to a BRM).
  if (header.efci) efci_saved_ = true;
}

RmCell Destination::make_turnaround(const RmCell& frm) const {
  RmCell brm = frm;  // CCR, MCR, QL/SN and reserved payload pass through
  brm.dir = 1;
  brm.bn = 0;
  brm.ql = 0;
  brm.sn = 0;
  // ER may only ever be reduced on the way back.
  if (config_.er_cap) {
    double er = decode_rate16(brm.er);
    if (*config_.er_cap < er) brm.er = encode_rate16(std::max(0.0, *config_.er_cap));
  }
  return brm;
}

Destination::TurnaroundResult Destination::turn_around(const RmCell& frm, SimTime now) {
  TurnaroundResult result;
  if (pending_ && config_.displaced == DisplacedPolicy::send_out_of_rate) {
    result.displaced = *pending_;
    result.displaced->header.clp = 1;
    result.displaced_seq = pending_seq_;
    // Displaced content leaves before the newer cell can, preserving order.
    if (efci_saved_) {
      result.displaced->ci = 1;
      efci_saved_ = false;
    }
  }
  ++seq_;
  pending_ = make_turnaround(frm);
  pending_arrival_ = now;
  pending_seq_ = seq_;
  return result;
}

RmCell Destination::take_brm(SimTime now, bool in_rate) {
  (void)now;
  if (!pending_) throw std::logic_error("no turnaround pending");
  RmCell brm = *pending_;
  pending_.reset();
  if (efci_saved_) {
    brm.ci = 1;
    efci_saved_ = false;
  }
  brm.header.clp = in_rate ? 0 : 1;
  return brm;
}

std::optional<RmCell> Destination::generate_becn(std::uint8_t vpi, std::uint16_t vci,
                                                 SimTime now) {
  if (!becn_gate_.try_take(now)) return std::nullopt;
  RmCell becn;
  becn.header.vpi = vpi;
  becn.header.vci = vci;
  becn.header.pti = kPtiRmCell;
  becn.header.clp = 1;
  becn.dir = 1;
  becn.bn = 1;
  becn.ci = 1;  // a BECN without CI or NI would be rejected by serialize()
  becn.er = encode_rate16(std::min(config_.becn_er, kMaxRate16));
  becn.ccr = RateCode16{};
  becn.mcr = RateCode16{};
  return becn;
}

}  // namespace abr
