#include "abr/conformance.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "abr/rate_codec.hpp"
#include "abr/rm_cell.hpp"

namespace abr {
namespace {

// Relative slack for rate comparisons: trace rates went through the 16-bit
// code and back, which is exact, so only floating-point noise needs room.
constexpr double kEps = 1e-9;

bool rate_above(double a, double b) { return a > b + b * kEps + kEps; }
bool rate_below(double a, double b) { return a < b - b * kEps - kEps; }

// Same encoding both sides: two decoded rates describe the same 16-bit code
// exactly when they re-encode identically.
bool same_code(double a, double b) {
  return encode_rate16(std::min(a, kMaxRate16)) == encode_rate16(std::min(b, kMaxRate16));
}

struct Group {
  std::string point;
  int vc = 0;
  std::vector<std::size_t> records;  // indices into the full trace
  bool has_source_tx = false;        // transmits data or forward RM cells
  bool has_forward_rx = false;       // receives data or forward RM cells
};

std::vector<Group> group_by_point(const std::vector<TraceRecord>& trace) {
  SimTime prev = 0;
  std::map<std::pair<std::string, int>, Group> groups;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const TraceRecord& r = trace[i];
    if (r.t < prev) throw std::invalid_argument("trace records are not time-ordered");
    prev = r.t;
    if (r.event == "drop") continue;  // network-internal, not end-system behavior
    Group& g = groups[{r.point, r.vc}];
    g.point = r.point;
    g.vc = r.vc;
    g.records.push_back(i);
    if (r.event == "tx" && (r.kind == "data" || (r.kind == "frm" && r.dir == 0)))
      g.has_source_tx = true;
    if (r.event == "rx" && r.dir == 0) g.has_forward_rx = true;
  }
  std::vector<Group> out;
  for (auto& [key, g] : groups) out.push_back(std::move(g));
  return out;
}

class SourceAudit {
 public:
  SourceAudit(const AbrParams& params, const Group& group, std::vector<Violation>& out)
      : p_(params),
        icr_eff_(effective_icr(params.icr, params.tbe, params.frtt_ns)),
        crm_(derive_crm(params.tbe, params.nrm)),
        group_(group),
        out_(out) {
    hi_ = icr_eff_;
    gap_rate_ = icr_eff_;
  }

  void record(std::size_t index, const TraceRecord& r) {
    if (r.event == "rx") {
      on_rx(r);
    } else if (r.event == "tx") {
      if (r.clp == 0)
        on_inrate_tx(index, r);
      else
        on_outofrate_tx(index, r);
    }
  }

 private:
  void flag(const std::string& rule, std::size_t index, const TraceRecord& r,
            std::string detail, bool warning = false) {
    out_.push_back(Violation{rule, r.t, index, group_.point, std::move(detail), warning});
  }

  // How much a backward RM cell lets ACR grow: the four-row feedback table,
  // taking every optional increase. This is the least upper bound a
  // conforming source can reach.
  double feedback_upper(double acr, const TraceRecord& r) const {
    double next;
    if (r.ci) {
      next = std::min(r.er, acr - acr * p_.rdf);
    } else if (r.ni) {
      next = std::min(r.er, acr);
    } else {
      next = std::min({r.er, acr + p_.rif * p_.pcr, p_.pcr});
    }
    return std::max(next, p_.mcr);
  }

  void on_rx(const TraceRecord& r) {
    if (r.dir == 1) {
      hi_ = feedback_upper(hi_, r);
      gap_rate_ = std::max(gap_rate_, hi_);
      if (r.bn == 0) frms_since_brm_ = 0;
    } else if (r.kind == "frm") {
      // Forward RM cell of the opposite direction: its turnaround becomes
      // available for this source's in-rate backward slots.
      turnaround_waiting_ = true;
    }
  }

  void on_inrate_tx(std::size_t index, const TraceRecord& r) {
    if (first_sent_) {
      if (gap_rate_ <= 0) {
        flag("SRC-1", index, r, "in-rate cell sent while the allowed cell rate is zero");
      } else if (r.t - last_inrate_tx_ < rate_to_interval(gap_rate_) - 1) {
        std::ostringstream d;
        d << r.kind << " cell " << (r.t - last_inrate_tx_)
          << " ns after the previous in-rate cell; the allowed cell rate " << gap_rate_
          << " requires " << rate_to_interval(gap_rate_) << " ns";
        flag("SRC-1", index, r, d.str());
      }
    }

    if (!first_sent_ && r.kind != "frm")
      flag("SRC-2", index, r, "first in-rate cell is " + r.kind + ", not a forward RM cell");

    if (r.kind == "frm") {
      on_frm_tx(index, r);
    } else {
      bool frm_due = first_sent_ && ((cells_since_frm_ >= p_.mrm &&
                                      r.t - last_frm_tx_ >= p_.trm_ns) ||
                                     cells_since_frm_ == p_.nrm - 1);
      if (frm_due)
        flag("SRC-3", index, r,
             "a forward RM cell was due but a " + r.kind + " cell was sent");
      if (r.kind == "data") {
        if (r.efci != 0) flag("SRC-12", index, r, "data cell sent with EFCI already set");
        ++cells_since_frm_;
      } else if (r.kind == "brm") {
        if (!turnaround_waiting_)
          flag("SRC-3", index, r, "backward RM cell sent with no turnaround waiting");
        turnaround_waiting_ = false;
        ++cells_since_frm_;
      }
      if (r.acr) {
        if (rate_above(*r.acr, hi_))
          flag("SRC-8", index, r,
               "ACR " + std::to_string(*r.acr) + " above the feedback-permitted bound " +
                   std::to_string(hi_));
        if (rate_below(*r.acr, p_.mcr))
          flag("SRC-9", index, r,
               "ACR " + std::to_string(*r.acr) + " below MCR " + std::to_string(p_.mcr));
      }
    }

    first_sent_ = true;
    last_inrate_tx_ = r.t;
    if (r.acr) hi_ = *r.acr;  // snapshots pin the exact state
    gap_rate_ = hi_;
  }

  void on_frm_tx(std::size_t index, const TraceRecord& r) {
    bool due = !first_sent_ ||
               (cells_since_frm_ >= p_.mrm && r.t - last_frm_tx_ >= p_.trm_ns) ||
               cells_since_frm_ == p_.nrm - 1;
    if (!due)
      flag("SRC-3", index, r,
           "forward RM cell sent early: " + std::to_string(cells_since_frm_) +
               " in-rate cells and " + std::to_string(r.t - last_frm_tx_) +
               " ns since the previous one");

    bool snapshots = r.acr.has_value();
    double acr = r.acr.value_or(r.ccr);

    // Idle decay first, missed-feedback decay second: the same order the
    // source applies them in before an FRM leaves.
    if (first_sent_ && r.t - last_frm_tx_ > p_.adtf_ns) {
      if (rate_above(acr, icr_eff_))
        flag("SRC-5", index, r,
             "ACR " + std::to_string(acr) + " above ICR " + std::to_string(icr_eff_) +
                 " after an idle period longer than ADTF",
             !snapshots);
      hi_ = std::min(hi_, icr_eff_);
    }
    if (p_.cdf > 0 && frms_since_brm_ >= crm_) {
      double bound = std::max(p_.mcr, hi_ * (1.0 - p_.cdf));
      if (rate_above(acr, bound))
        flag("SRC-6", index, r,
             "ACR " + std::to_string(acr) + " above " + std::to_string(bound) + " with " +
                 std::to_string(frms_since_brm_) + " forward RM cells unanswered",
             !snapshots);
      hi_ = std::min(hi_, bound);
    }

    if (snapshots) {
      if (rate_above(*r.acr, hi_))
        flag("SRC-8", index, r,
             "ACR " + std::to_string(*r.acr) + " above the feedback-permitted bound " +
                 std::to_string(hi_));
      if (rate_below(*r.acr, p_.mcr))
        flag("SRC-9", index, r,
             "ACR " + std::to_string(*r.acr) + " below MCR " + std::to_string(p_.mcr));
      if (!same_code(r.ccr, *r.acr))
        flag("SRC-7", index, r,
             "CCR " + std::to_string(r.ccr) + " does not encode the ACR " +
                 std::to_string(*r.acr));
    } else {
      if (rate_above(r.ccr, hi_))
        flag("SRC-8", index, r,
             "CCR " + std::to_string(r.ccr) + " above the feedback-permitted bound " +
                 std::to_string(hi_),
             true);
      if (rate_below(r.ccr, p_.mcr))
        flag("SRC-9", index, r,
             "CCR " + std::to_string(r.ccr) + " below MCR " + std::to_string(p_.mcr), true);
      // CCR rounds down to the nearest code, so the true rate sits within
      // one mantissa step above it.
      hi_ = std::min(hi_, r.ccr * (1.0 + 1.0 / 512));
    }

    check_frm_fields(index, r);

    cells_since_frm_ = 0;
    last_frm_tx_ = r.t;
    ++frms_since_brm_;
  }

  void check_frm_fields(std::size_t index, const TraceRecord& r) {
    if (r.ci != 0)
      flag("SRC-10", index, r, "forward RM cell with CI=1");
    if (r.bn != 0)
      flag("SRC-10", index, r, "forward RM cell with BN=1");
    if (rate_above(r.er, p_.pcr))
      flag("SRC-10", index, r,
           "ER " + std::to_string(r.er) + " above PCR " + std::to_string(p_.pcr));
    if (!same_code(r.mcr, p_.mcr))
      flag("SRC-10", index, r,
           "MCR field " + std::to_string(r.mcr) + " does not carry the connection MCR " +
               std::to_string(p_.mcr));
  }

  void on_outofrate_tx(std::size_t index, const TraceRecord& r) {
    if (r.kind == "data") {
      flag("SRC-4", index, r, "data cell sent out-of-rate (CLP=1)");
      return;
    }
    if (r.kind != "frm") return;  // displaced turnarounds belong to the destination
    if (have_oor_ && r.t - last_oor_tx_ < rate_to_interval(p_.tcr) - 1) {
      std::ostringstream d;
      d << "out-of-rate forward RM cell " << (r.t - last_oor_tx_)
        << " ns after the previous one; TCR " << p_.tcr << " requires "
        << rate_to_interval(p_.tcr) << " ns";
      flag("SRC-11", index, r, d.str());
    }
    check_frm_fields(index, r);
    have_oor_ = true;
    last_oor_tx_ = r.t;
  }

  const AbrParams& p_;
  double icr_eff_;
  std::int64_t crm_;
  const Group& group_;
  std::vector<Violation>& out_;

  bool first_sent_ = false;
  SimTime last_inrate_tx_ = 0;
  SimTime last_frm_tx_ = 0;
  std::int64_t cells_since_frm_ = 0;
  std::int64_t frms_since_brm_ = 0;
  bool turnaround_waiting_ = false;
  double hi_ = 0;        // least upper bound of ACR given the feedback so far
  double gap_rate_ = 0;  // highest rate any moment of the current gap allowed
  bool have_oor_ = false;
  SimTime last_oor_tx_ = 0;
};

class DestAudit {
 public:
  DestAudit(const Group& group, std::vector<Violation>& out) : group_(group), out_(out) {}

  void record(std::size_t index, const TraceRecord& r) {
    if (r.event == "rx" && r.dir == 0) {
      if (r.kind == "data") {
        if (r.efci) latched_ = true;
      } else if (r.kind == "frm") {
        pool_.push_back(PoolEntry{r.t, r.er, r.ccr, r.mcr});
      }
      return;
    }
    if (r.event == "tx" && r.kind == "brm") on_brm_tx(index, r);
  }

 private:
  struct PoolEntry {
    SimTime rx_t;
    double er;
    double ccr;
    double mcr;
  };

  void flag(const std::string& rule, std::size_t index, const TraceRecord& r,
            std::string detail) {
    out_.push_back(Violation{rule, r.t, index, group_.point, std::move(detail), false});
  }

  void on_brm_tx(std::size_t index, const TraceRecord& r) {
    if (r.dir != 1) {
      flag("DST-3", index, r, "backward RM cell with DIR=0");
      return;
    }
    if (r.bn == 1) {
      if (r.ci == 0 && r.ni == 0)
        flag("DST-5", index, r, "BECN carries neither CI nor NI");
      if (have_becn_ && r.t - last_becn_tx_ < rate_to_interval(10.0) - 1)
        flag("DST-5", index, r,
             "BECN " + std::to_string(r.t - last_becn_tx_) +
                 " ns after the previous one; the 10 cells/s budget requires " +
                 std::to_string(rate_to_interval(10.0)) + " ns");
      have_becn_ = true;
      last_becn_tx_ = r.t;
      return;
    }

    // Turnaround: contents must come from a forward RM cell received
    // earlier, with ER at most what that cell carried.
    if (pool_.empty()) {
      flag("DST-5", index, r, "BN=0 backward RM cell with no forward RM cell to turn around");
      return;
    }
    std::ptrdiff_t match = -1;
    bool content_seen = false;
    for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(pool_.size()) - 1; i >= 0; --i) {
      const PoolEntry& e = pool_[static_cast<std::size_t>(i)];
      if (e.rx_t > r.t) continue;
      if (!same_code(e.ccr, r.ccr) || !same_code(e.mcr, r.mcr)) continue;
      content_seen = true;
      if (rate_above(r.er, e.er)) continue;  // would mean ER grew on the way back
      match = i;
      break;  // latest acceptable entry wins
    }
    if (match < 0) {
      if (content_seen)
        flag("DST-2", index, r, "turnaround ER exceeds the ER of every matching forward cell");
      else
        flag("DST-2", index, r, "turnaround CCR/MCR match no received forward RM cell");
      return;
    }
    const PoolEntry matched = pool_[static_cast<std::size_t>(match)];
    pool_.erase(pool_.begin() + match);

    if (r.seq) {
      if (have_seq_ && *r.seq <= last_seq_)
        flag("DST-4", index, r,
             "turnaround content tag " + std::to_string(*r.seq) +
                 " not newer than the previously sent " + std::to_string(last_seq_));
      have_seq_ = true;
      last_seq_ = std::max(last_seq_, *r.seq);
    } else if (matched.rx_t < newest_sent_rx_) {
      flag("DST-4", index, r, "older turnaround contents sent after newer contents");
    }
    newest_sent_rx_ = std::max(newest_sent_rx_, matched.rx_t);

    if (latched_ && r.ci == 0)
      flag("DST-1", index, r, "EFCI was latched but the turnaround carries CI=0");
    latched_ = false;  // transferred (or should have been) at this transmission
  }

  const Group& group_;
  std::vector<Violation>& out_;

  bool latched_ = false;
  std::vector<PoolEntry> pool_;
  bool have_becn_ = false;
  SimTime last_becn_tx_ = 0;
  bool have_seq_ = false;
  std::int64_t last_seq_ = 0;
  SimTime newest_sent_rx_ = -1;
};

void sort_by_trace_order(std::vector<Violation>& v) {
  std::stable_sort(v.begin(), v.end(), [](const Violation& a, const Violation& b) {
    return a.index < b.index;
  });
}

}  // namespace

std::string to_string(const Violation& v) {
  std::ostringstream os;
  os << v.rule << (v.warning ? " (warning)" : "") << " at t=" << v.t << "ns record #"
     << v.index << " point " << v.point << ": " << v.detail;
  return os.str();
}

std::vector<Violation> check_source_trace(const std::vector<TraceRecord>& trace,
                                          const AbrParams& params) {
  AbrParams p = resolve(params);
  std::vector<Violation> out;
  for (const Group& g : group_by_point(trace)) {
    if (!g.has_source_tx) continue;
    SourceAudit audit(p, g, out);
    for (std::size_t index : g.records) audit.record(index, trace[index]);
  }
  sort_by_trace_order(out);
  return out;
}

std::vector<Violation> check_dest_trace(const std::vector<TraceRecord>& trace,
                                        const AbrParams& params) {
  resolve(params);  // reject inconsistent parameter files up front
  std::vector<Violation> out;
  for (const Group& g : group_by_point(trace)) {
    if (!g.has_forward_rx) continue;
    DestAudit audit(g, out);
    for (std::size_t index : g.records) audit.record(index, trace[index]);
  }
  sort_by_trace_order(out);
  return out;
}

std::vector<Violation> check_cell(std::span<const std::uint8_t> bytes) {
  ParseOutcome outcome = parse(bytes);
  std::vector<Violation> out;
  for (CellIssue issue : outcome.issues) {
    std::string rule;
    switch (issue) {
      case CellIssue::bad_length: rule = "CELL-LEN"; break;
      case CellIssue::bad_crc: rule = "CELL-CRC"; break;
      case CellIssue::bad_pti: rule = "CELL-PTI"; break;
      case CellIssue::bad_protocol_id: rule = "CELL-PROTO"; break;
      case CellIssue::reserved_not_filler: rule = "CELL-RESERVED"; break;
      case CellIssue::reserved_bits_set: rule = "CELL-RESERVED"; break;
      case CellIssue::non_canonical_zero_rate: rule = "CELL-RATE"; break;
      case CellIssue::becn_without_indication: rule = "CELL-BECN"; break;
    }
    out.push_back(Violation{rule, 0, 0, "cell", to_string(issue), false});
  }
  return out;
}

}  // namespace abr
