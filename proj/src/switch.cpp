#include "abr/switch.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "abr/rate_codec.hpp"

namespace abr {

SwitchModel switch_model_from_string(const std::string& name) {
  if (name == "pass-through") return SwitchModel::pass_through;
  if (name == "efci") return SwitchModel::efci;
  if (name == "relative-rate") return SwitchModel::relative_rate;
  if (name == "explicit-rate") return SwitchModel::explicit_rate;
  throw std::invalid_argument("unknown switch model: " + name);
}

std::string to_string(SwitchModel model) {
  switch (model) {
    case SwitchModel::pass_through: return "pass-through";
    case SwitchModel::efci: return "efci";
    case SwitchModel::relative_rate: return "relative-rate";
    case SwitchModel::explicit_rate: return "explicit-rate";
  }
  return "?";
}

Switch::Port& Switch::add_port(const std::string& name, double capacity_cps) {
  Port p;
  p.name = name;
  p.capacity_cps = capacity_cps;
  p.service_interval = capacity_cps > 0 ? rate_to_interval(capacity_cps) : 0;
  auto [it, inserted] = ports_.emplace(name, std::move(p));
  if (!inserted) throw std::invalid_argument("duplicate port " + name);
  return it->second;
}

Switch::Port& Switch::port(const std::string& name) {
  auto it = ports_.find(name);
  if (it == ports_.end()) throw std::out_of_range("no port " + name);
  return it->second;
}

void Switch::note_forward_cell(Port& fwd, const Cell& cell, SimTime now) {
  VcInfo& vc = fwd.vcs[cell.header().vci];
  if (vc.cells == 0) vc.becn_gate = TokenGate(config_.becn_rate);
  vc.last_seen = now;
  ++vc.cells;
  if (cell.is_rm()) {
    vc.mcr = decode_rate16(cell.rm.mcr);
    if (cell.is_frm()) vc.last_ccr = decode_rate16(cell.rm.ccr);
  }
}

void Switch::efci_mark(const Port& fwd, Cell& cell) const {
  if (config_.model != SwitchModel::efci || cell.is_rm()) return;
  if (static_cast<std::int64_t>(fwd.queue.size()) > config_.efci_threshold)
    cell.header().efci = 1;
}

void Switch::rr_mark(const Port& fwd, RmCell& rm) const {
  if (config_.model != SwitchModel::relative_rate) return;
  auto depth = static_cast<std::int64_t>(fwd.queue.size());
  if (depth > config_.rr_hi)
    rm.ci = 1;
  else if (depth > config_.rr_lo)
    rm.ni = 1;
}

double Switch::fair_share(const Port& fwd, std::uint16_t vci, SimTime now) const {
  if (fwd.capacity_cps <= 0) return kMaxRate16;

  struct Claim {
    std::uint16_t vci;
    double mcr;
  };
  std::vector<Claim> active;
  double requester_mcr = 0;
  bool requester_included = false;
  for (const auto& [id, info] : fwd.vcs) {
    bool is_active = config_.trust_ccr ? info.last_ccr > 0
                                       : now - info.last_seen <= config_.activity_window_ns;
    if (id == vci) {
      requester_mcr = info.mcr;
      is_active = true;  // the cell prompting this call proves activity
      requester_included = true;
    }
    if (is_active) active.push_back({id, info.mcr});
  }
  if (!requester_included) active.push_back({vci, 0.0});

  // Water-filling: VCs whose MCR exceeds the common level are frozen at MCR
  // and removed from the pool until the level is stable.
  double budget = config_.target_utilization * fwd.capacity_cps;
  std::vector<bool> frozen(active.size(), false);
  std::size_t pool = active.size();
  double level = budget / static_cast<double>(pool);
  for (;;) {
    bool changed = false;
    for (std::size_t i = 0; i < active.size(); ++i) {
      if (!frozen[i] && active[i].mcr > level) {
        frozen[i] = true;
        budget -= active[i].mcr;
        --pool;
        changed = true;
      }
    }
    if (!changed || pool == 0) break;
    level = std::max(0.0, budget) / static_cast<double>(pool);
  }

  return std::max(requester_mcr, pool == 0 ? 0.0 : level);
}

void Switch::er_update(const Port& fwd, RmCell& rm, SimTime now) const {
  if (config_.model != SwitchModel::explicit_rate) return;
  double grant = config_.er_override ? *config_.er_override
                                     : fair_share(fwd, rm.header.vci, now);
  if (decode_rate16(rm.er) > grant)
    rm.er = encode_rate16(std::clamp(grant, 0.0, kMaxRate16));
}

std::optional<RmCell> Switch::maybe_generate_becn(Port& fwd, std::uint8_t vpi,
                                                  std::uint16_t vci, SimTime now) {
  if (!config_.becn_enabled) return std::nullopt;
  if (static_cast<std::int64_t>(fwd.queue.size()) <= config_.panic_threshold)
    return std::nullopt;
  VcInfo& vc = fwd.vcs[vci];
  if (vc.cells == 0) vc.becn_gate = TokenGate(config_.becn_rate);
  if (!vc.becn_gate.try_take(now)) return std::nullopt;

  RmCell becn;
  becn.header.vpi = vpi;
  becn.header.vci = vci;
  becn.header.pti = kPtiRmCell;
  becn.header.clp = 1;
  becn.dir = 1;
  becn.bn = 1;
  becn.ci = 1;
  double grant = config_.er_override ? *config_.er_override
                                     : fair_share(fwd, vci, now);
  becn.er = encode_rate16(std::clamp(grant, 0.0, kMaxRate16));
  becn.mcr = encode_rate16(std::clamp(vc.mcr, 0.0, kMaxRate16));
  return becn;
}

Switch::EnqueueOutcome Switch::enqueue(Port& port, Cell cell) {
  EnqueueOutcome out;
  if (static_cast<std::int64_t>(port.queue.size()) >= config_.queue_limit) {
    if (cell.header().clp == 0) {
      auto victim = std::find_if(port.queue.begin(), port.queue.end(),
                                 [](const Cell& c) { return c.header().clp == 1; });
      if (victim != port.queue.end()) {
        out.result = EnqueueResult::pushed_out;
        out.victim = *victim;
        port.queue.erase(victim);
        ++port.drops_clp1;
        port.queue.push_back(std::move(cell));
        return out;
      }
      ++port.drops_clp0;
    } else {
      ++port.drops_clp1;
    }
    out.result = EnqueueResult::dropped;
    out.victim = std::move(cell);
    return out;
  }
  port.queue.push_back(std::move(cell));
  port.max_queue = std::max(port.max_queue,
                            static_cast<std::int64_t>(port.queue.size()));
  return out;
}

Cell Switch::dequeue(Port& port) {
  if (port.queue.empty()) throw std::logic_error("dequeue from empty port " + port.name);
  Cell cell = std::move(port.queue.front());
  port.queue.pop_front();
  return cell;
}

}  // namespace abr
