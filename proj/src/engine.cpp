#include "abr/engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "abr/destination.hpp"
#include "abr/rate_codec.hpp"
#include "abr/source.hpp"
#include "abr/switch.hpp"

namespace abr {

double jain_index(const std::vector<double>& xs) {
  if (xs.empty()) return 1.0;
  double sum = 0, sum_sq = 0;
  for (double x : xs) {
    sum += x;
    sum_sq += x * x;
  }
  if (sum_sq == 0) return 1.0;
  return sum * sum / (static_cast<double>(xs.size()) * sum_sq);
}

SimTime frtt_of(const Scenario& scenario, const VcConfig& vc) {
  // Links are symmetric here, so the backward leg mirrors the forward one:
  // each hop contributes its propagation delay plus one cell service time,
  // in both directions.
  SimTime total = 0;
  for (std::size_t i = 0; i + 1 < vc.path.size(); ++i) {
    const LinkConfig* link = scenario.link_between(vc.path[i], vc.path[i + 1]);
    if (!link)
      throw ConfigError("vc " + std::to_string(vc.vci) + ": no link between \"" +
                        vc.path[i] + "\" and \"" + vc.path[i + 1] + "\"");
    SimTime service = link->capacity_cps > 0 ? rate_to_interval(link->capacity_cps) : 0;
    total += 2 * (link->delay_ns + service);
  }
  return total;
}

namespace {

double queue_slope(const std::vector<std::pair<SimTime, std::int64_t>>& samples) {
  if (samples.size() < 2) return 0;
  double n = static_cast<double>(samples.size());
  double mean_t = 0, mean_q = 0;
  for (const auto& [t, q] : samples) {
    mean_t += ns_to_sec(t);
    mean_q += static_cast<double>(q);
  }
  mean_t /= n;
  mean_q /= n;
  double cov = 0, var = 0;
  for (const auto& [t, q] : samples) {
    double dt = ns_to_sec(t) - mean_t;
    cov += dt * (static_cast<double>(q) - mean_q);
    var += dt * dt;
  }
  return var > 0 ? cov / var : 0;
}

class Engine {
 public:
  explicit Engine(const Scenario& scenario) : scn_(scenario) { build(); }

  RunResult run_to_end() {
    const SimTime stop = scn_.run.duration_ns;
    while (!heap_.empty()) {
      std::pop_heap(heap_.begin(), heap_.end());
      Event ev = std::move(heap_.back());
      heap_.pop_back();
      if (ev.t >= stop) break;  // run covers [0, duration)
      now_ = ev.t;
      ev.fn();
    }
    now_ = stop;
    RunResult result;
    result.trace = std::move(trace_);
    result.metrics = finalize_metrics();
    return result;
  }

 private:
  struct Flow {
    const VcConfig* cfg = nullptr;
    AbrParams params;               // resolved, frtt filled in
    std::vector<std::string> path;  // origin .. terminus of this direction
    bool is_mirror = false;
    std::unique_ptr<Destination> dest;  // terminus side
    std::unique_ptr<Source> source;     // origin side
    Flow* reverse = nullptr;            // opposite direction, bidirectional VCs
    std::map<std::string, std::size_t> switch_pos;
    std::uint64_t emission_gen = 0;
    std::mt19937_64 rng;
    FlowMetrics m;
    std::deque<SimTime> outstanding_frms;  // tx times awaiting a BN=0 reply
    double turnaround_total_ms = 0;
    std::int64_t wire_cells = 0;  // propagating on links right now
  };

  // Which flow owns a cell sitting in this egress queue, by direction bit.
  struct PortRoute {
    Flow* fwd = nullptr;
    Flow* bwd = nullptr;
  };

  struct Event {
    SimTime t = 0;
    std::uint64_t seq = 0;
    std::function<void()> fn;
    // std::push_heap keeps the largest element on top; invert so the loop
    // always pops the earliest (time, seq) pair. seq makes ties of
    // simultaneous events deterministic: insertion order wins.
    bool operator<(const Event& other) const {
      if (t != other.t) return t > other.t;
      return seq > other.seq;
    }
  };

  void at(SimTime t, std::function<void()> fn) {
    heap_.push_back(Event{t, next_seq_++, std::move(fn)});
    std::push_heap(heap_.begin(), heap_.end());
  }

  // ---- construction ----

  void build() {
    for (const SwitchNodeConfig& sc : scn_.switches)
      switches_.emplace(sc.name, std::make_unique<Switch>(sc.config));

    for (const VcConfig& vc : scn_.vcs) {
      AbrParams params = vc.params;
      if (!vc.frtt_explicit) params.frtt_ns = frtt_of(scn_, vc);
      try {
        params = resolve(params);
      } catch (const std::invalid_argument& e) {
        throw ConfigError("vc " + std::to_string(vc.vci) + ": " + e.what());
      }
      Flow* forward = make_flow(vc, params, vc.path, false);
      if (vc.bidirectional) {
        std::vector<std::string> reversed(vc.path.rbegin(), vc.path.rend());
        Flow* backward = make_flow(vc, params, reversed, true);
        forward->reverse = backward;
        backward->reverse = forward;
      }
    }

    // Sources last: a source drains turned-around cells from the reverse
    // flow's destination, which must exist first.
    for (auto& fp : flows_) {
      Flow& f = *fp;
      Source::Config sc;
      sc.vpi = f.cfg->vpi;
      sc.vci = f.cfg->vci;
      TurnaroundProvider* provider = f.reverse ? f.reverse->dest.get() : nullptr;
      f.source = std::make_unique<Source>(f.params, sc, provider, 0);
    }

    for (auto& fp : flows_) wire_flow_through_switches(*fp);

    for (auto& fp : flows_) {
      Flow* f = fp.get();
      at(f->cfg->traffic.start_ns, [this, f] { traffic_on(f); });
      SimTime oor_period = rate_to_interval(f->params.tcr);
      at(0, [this, f, oor_period] { oor_event(f, oor_period); });
      if (f->cfg->dest.becn_enabled)
        at(0, [this, f] { dest_becn_event(f); });
    }
    at(0, [this] { sample_event(); });
  }

  Flow* make_flow(const VcConfig& vc, const AbrParams& params,
                  std::vector<std::string> path, bool is_mirror) {
    auto flow = std::make_unique<Flow>();
    flow->cfg = &vc;
    flow->params = params;
    flow->path = std::move(path);
    flow->is_mirror = is_mirror;
    flow->dest = std::make_unique<Destination>(vc.dest.config);
    flow->rng.seed(scn_.run.seed * 0x9E3779B97F4A7C15ULL + vc.vci * 2 + (is_mirror ? 1 : 0));
    flow->m.vci = vc.vci;
    flow->m.from = flow->path.front();
    flow->m.to = flow->path.back();
    flows_.push_back(std::move(flow));
    return flows_.back().get();
  }

  void wire_flow_through_switches(Flow& f) {
    for (std::size_t i = 1; i + 1 < f.path.size(); ++i) {
      const std::string& name = f.path[i];
      Switch& sw = *switches_.at(name);
      f.switch_pos[name] = i;
      ensure_port(sw, name, f.path[i + 1]);
      ensure_port(sw, name, f.path[i - 1]);
      routes_[name][f.path[i + 1]][f.cfg->vci].fwd = &f;
      routes_[name][f.path[i - 1]][f.cfg->vci].bwd = &f;
    }
  }

  void ensure_port(Switch& sw, const std::string& sw_name, const std::string& neighbor) {
    if (sw.ports().count(neighbor)) return;
    const LinkConfig* link = scn_.link_between(sw_name, neighbor);
    sw.add_port(neighbor, link->capacity_cps);
  }

  // ---- trace plumbing ----

  static std::string uni_point(const Flow& f, bool origin_side) {
    const std::string& host = origin_side ? f.path.front() : f.path.back();
    return host + ":" + std::to_string(f.cfg->vci);
  }

  static std::string port_point(const std::string& sw, const std::string& neighbor) {
    return sw + "->" + neighbor;
  }

  TraceRecord cell_record(std::string point, const char* event, const Flow& f,
                          const Cell& cell) const {
    TraceRecord r;
    r.t = now_;
    r.point = std::move(point);
    r.event = event;
    r.vc = f.cfg->vci;
    r.clp = cell.header().clp;
    r.efci = cell.header().efci;
    if (cell.is_rm()) {
      r.kind = cell.rm.dir ? "brm" : "frm";
      r.dir = cell.rm.dir;
      r.ci = cell.rm.ci;
      r.ni = cell.rm.ni;
      r.bn = cell.rm.bn;
      r.er = decode_rate16(cell.rm.er);
      r.ccr = decode_rate16(cell.rm.ccr);
      r.mcr = decode_rate16(cell.rm.mcr);
    } else {
      r.kind = "data";
    }
    return r;
  }

  void snapshot_source(TraceRecord& r, const Source& src) const {
    r.acr = src.acr();
    r.cells_since_frm = src.cells_since_frm();
    r.frms_since_brm = src.frms_since_brm();
  }

  void record_drop(const std::string& sw, const std::string& neighbor, const Flow& owner,
                   const Cell& cell) {
    trace_.push_back(cell_record(port_point(sw, neighbor), "drop", owner, cell));
  }

  // ---- source emission ----

  void arm_emission(Flow* f, SimTime when) {
    when = std::max(when, now_);
    std::uint64_t gen = ++f->emission_gen;
    at(when, [this, f, gen] { emission_event(f, gen); });
  }

  void emission_event(Flow* f, std::uint64_t gen) {
    if (gen != f->emission_gen) return;  // superseded by a wake or reschedule
    Source& src = *f->source;
    NextCell what = src.next_cell_type(now_);
    if (what == NextCell::none) {
      // Idle. The only wake-up that is purely time-based is the Trm branch
      // of the cell-ordering rule; data arrivals and turnaround arrivals
      // re-arm explicitly.
      if (src.started() && src.acr() > 0 && src.cells_since_frm() >= src.params().mrm) {
        SimTime due = src.time_of_last_frm() + src.params().trm_ns;
        if (due > now_) arm_emission(f, due);
      }
      return;
    }

    std::int64_t brm_seq = 0;
    if (what == NextCell::backward_rm) brm_seq = f->reverse->dest->pending_seq();

    Cell cell = src.emit_cell(now_);
    TraceRecord rec = cell_record(uni_point(*f, true), "tx", *f, cell);
    snapshot_source(rec, src);

    switch (what) {
      case NextCell::data:
        ++f->m.data_tx;
        ++f->m.injected;
        break;
      case NextCell::forward_rm:
        ++f->m.frm_tx;
        ++f->m.injected;
        f->outstanding_frms.push_back(now_);
        break;
      case NextCell::backward_rm:
        // The turned-around cell belongs to the reverse flow; it rides this
        // source's in-rate stream back to the far side.
        ++f->reverse->m.brm_tx;
        ++f->reverse->m.injected;
        rec.seq = brm_seq;
        break;
      case NextCell::none:
        break;
    }
    trace_.push_back(std::move(rec));

    if (what == NextCell::backward_rm)
      send(f->reverse, true, f->reverse->path.size() - 1, std::move(cell), true);
    else
      send(f, false, 0, std::move(cell), true);

    arm_emission(f, src.next_emission_time());
  }

  void oor_event(Flow* f, SimTime period) {
    if (std::optional<Cell> cell = f->source->maybe_emit_oor_frm(now_)) {
      TraceRecord rec = cell_record(uni_point(*f, true), "tx", *f, *cell);
      snapshot_source(rec, *f->source);
      trace_.push_back(std::move(rec));
      ++f->m.oor_frm_tx;
      ++f->m.injected;
      f->outstanding_frms.push_back(now_);
      send(f, false, 0, std::move(*cell), true);
    }
    at(now_ + period, [this, f, period] { oor_event(f, period); });
  }

  void dest_becn_event(Flow* f) {
    // Only notify while the destination actually knows of congestion, i.e.
    // the network has EFCI-marked data since the last turnaround.
    std::optional<RmCell> rm;
    if (f->dest->efci_latched()) rm = f->dest->generate_becn(f->cfg->vpi, f->cfg->vci, now_);
    if (rm) {
      Cell cell;
      cell.type = CellType::rm;
      cell.rm = *rm;
      trace_.push_back(cell_record(uni_point(*f, false), "tx", *f, cell));
      ++f->m.becn_tx;
      ++f->m.injected;
      send(f, true, f->path.size() - 1, std::move(cell), true);
    }
    at(now_ + ms_to_ns(10), [this, f] { dest_becn_event(f); });
  }

  // ---- traffic processes ----

  void traffic_on(Flow* f) {
    const TrafficConfig& tc = f->cfg->traffic;
    if (tc.stop_ns >= 0 && now_ >= tc.stop_ns) return;
    f->source->set_data_waiting(true);
    arm_emission(f, f->source->next_emission_time());
    if (tc.kind == TrafficConfig::Kind::on_off) {
      at(now_ + span(f, tc.on_ns), [this, f] { traffic_off(f); });
    } else if (tc.stop_ns >= 0) {
      at(tc.stop_ns, [this, f] { traffic_off(f); });
    }
  }

  void traffic_off(Flow* f) {
    f->source->set_data_waiting(false);
    const TrafficConfig& tc = f->cfg->traffic;
    if (tc.kind == TrafficConfig::Kind::on_off) {
      SimTime resume = now_ + span(f, tc.off_ns);
      if (tc.stop_ns < 0 || resume < tc.stop_ns)
        at(resume, [this, f] { traffic_on(f); });
    }
  }

  SimTime span(Flow* f, SimTime mean) {
    if (!f->cfg->traffic.random) return mean;
    std::exponential_distribution<double> dist(1.0);
    return std::max<SimTime>(1, static_cast<SimTime>(dist(f->rng) * static_cast<double>(mean)));
  }

  // ---- cell transport ----

  // Puts a cell on the wire leaving path[idx] toward the neighbor in the
  // given direction. include_service covers host egress, where nothing else
  // models the cell transmission time; switch egress already spent it in
  // the port service.
  void send(Flow* f, bool backward, std::size_t idx, Cell cell, bool include_service) {
    std::size_t next = backward ? idx - 1 : idx + 1;
    const LinkConfig* link = scn_.link_between(f->path[idx], f->path[next]);
    SimTime service =
        include_service && link->capacity_cps > 0 ? rate_to_interval(link->capacity_cps) : 0;
    ++f->wire_cells;
    at(now_ + service + link->delay_ns,
       [this, f, backward, next, cell = std::move(cell)]() mutable {
         arrive(f, backward, next, std::move(cell));
       });
  }

  void arrive(Flow* f, bool backward, std::size_t idx, Cell cell) {
    --f->wire_cells;
    if (!backward && idx + 1 == f->path.size()) {
      deliver_forward(f, std::move(cell));
    } else if (backward && idx == 0) {
      deliver_backward(f, std::move(cell));
    } else {
      switch_transit(f, backward, idx, std::move(cell));
    }
  }

  void deliver_forward(Flow* f, Cell cell) {
    trace_.push_back(cell_record(uni_point(*f, false), "rx", *f, cell));
    ++f->m.delivered;
    if (!cell.is_rm()) {
      ++f->m.data_rx;
      f->dest->on_data_cell(cell.header());
      return;
    }
    ++f->m.frm_rx;
    Destination::TurnaroundResult result = f->dest->turn_around(cell.rm, now_);
    if (result.displaced) {
      Cell out;
      out.type = CellType::rm;
      out.rm = *result.displaced;
      TraceRecord rec = cell_record(uni_point(*f, false), "tx", *f, out);
      rec.seq = result.displaced_seq;
      trace_.push_back(std::move(rec));
      ++f->m.displaced_tx;
      ++f->m.injected;
      send(f, true, f->path.size() - 1, std::move(out), true);
    }
    Flow* rev = f->reverse;
    if (rev && (rev->source->started() || rev->source->data_waiting())) {
      // The reverse source gives the turnaround an in-rate slot.
      arm_emission(rev, rev->source->next_emission_time());
      return;
    }
    drain_turnaround_oor(f);
  }

  // Without a reverse in-rate stream the turnaround goes back out-of-rate
  // immediately (CLP=1), keeping the control loop alive on one-way VCs.
  void drain_turnaround_oor(Flow* f) {
    if (!f->dest->brm_waiting()) return;
    std::int64_t seq = f->dest->pending_seq();
    Cell out;
    out.type = CellType::rm;
    out.rm = f->dest->take_brm(now_, /*in_rate=*/false);
    TraceRecord rec = cell_record(uni_point(*f, false), "tx", *f, out);
    rec.seq = seq;
    trace_.push_back(std::move(rec));
    ++f->m.brm_tx;
    ++f->m.injected;
    send(f, true, f->path.size() - 1, std::move(out), true);
  }

  void deliver_backward(Flow* f, Cell cell) {
    trace_.push_back(cell_record(uni_point(*f, true), "rx", *f, cell));
    ++f->m.delivered;
    const RmCell& rm = cell.rm;
    if (rm.bn == 0) {
      ++f->m.brm_rx;
      if (!f->outstanding_frms.empty()) {
        double latency_ms = static_cast<double>(now_ - f->outstanding_frms.front()) / 1e6;
        f->outstanding_frms.pop_front();
        f->turnaround_total_ms += latency_ms;
        f->m.turnaround_max_ms = std::max(f->m.turnaround_max_ms, latency_ms);
        ++f->m.turnaround_count;
      }
    } else {
      ++f->m.becn_rx;
    }
    f->source->on_backward_rm(rm, now_);
    if (f->source->started() || f->source->data_waiting())
      arm_emission(f, f->source->next_emission_time());
  }

  void switch_transit(Flow* f, bool backward, std::size_t idx, Cell cell) {
    const std::string& name = f->path[idx];
    Switch& sw = *switches_.at(name);
    Switch::Port& fwd = sw.port(f->path[idx + 1]);

    if (backward) {
      if (cell.is_rm() && sw.config().drop_brm) {
        record_drop(name, f->path[idx - 1], *f, cell);
        ++f->m.dropped;
        return;
      }
      if (cell.is_rm()) {
        // Feedback rides the returning cell: congestion state of the
        // forward-direction port, the fastest path back to the source.
        sw.rr_mark(fwd, cell.rm);
        sw.er_update(fwd, cell.rm, now_);
      }
      enqueue_cell(name, sw, sw.port(f->path[idx - 1]), f, std::move(cell));
      return;
    }

    sw.note_forward_cell(fwd, cell, now_);
    sw.efci_mark(fwd, cell);
    if (cell.is_rm() && sw.config().mark_forward) {
      sw.rr_mark(fwd, cell.rm);
      sw.er_update(fwd, cell.rm, now_);
    }
    if (std::optional<RmCell> becn = sw.maybe_generate_becn(fwd, f->cfg->vpi, f->cfg->vci, now_)) {
      Cell out;
      out.type = CellType::rm;
      out.rm = *becn;
      TraceRecord rec = cell_record(port_point(name, f->path[idx - 1]), "tx", *f, out);
      trace_.push_back(std::move(rec));
      ++f->m.becn_tx;
      ++f->m.injected;
      enqueue_cell(name, sw, sw.port(f->path[idx - 1]), f, std::move(out));
    }
    enqueue_cell(name, sw, fwd, f, std::move(cell));
  }

  void enqueue_cell(const std::string& sw_name, Switch& sw, Switch::Port& port, Flow* owner,
                    Cell cell) {
    Switch::EnqueueOutcome out = sw.enqueue(port, std::move(cell));
    if (out.result == Switch::EnqueueResult::dropped) {
      record_drop(sw_name, port.name, *owner, *out.victim);
      ++owner->m.dropped;
      return;
    }
    if (out.result == Switch::EnqueueResult::pushed_out) {
      Flow* victim_owner = route_owner(sw_name, port.name, *out.victim);
      record_drop(sw_name, port.name, *victim_owner, *out.victim);
      ++victim_owner->m.dropped;
    }
    if (!port.busy) start_service(sw_name, sw, port);
  }

  Flow* route_owner(const std::string& sw_name, const std::string& port_name, const Cell& cell) {
    const PortRoute& route = routes_.at(sw_name).at(port_name).at(cell.header().vci);
    return cell.is_brm() ? route.bwd : route.fwd;
  }

  void start_service(const std::string& sw_name, Switch& sw, Switch::Port& port) {
    port.busy = true;
    at(now_ + port.service_interval,
       [this, sw_name, &sw, &port] { complete_service(sw_name, sw, port); });
  }

  void complete_service(const std::string& sw_name, Switch& sw, Switch::Port& port) {
    Cell cell = sw.dequeue(port);
    Flow* owner = route_owner(sw_name, port.name, cell);
    bool backward = cell.is_brm();
    std::size_t idx = owner->switch_pos.at(sw_name);
    send(owner, backward, idx, std::move(cell), /*include_service=*/false);
    if (!port.queue.empty()) {
      at(now_ + port.service_interval,
         [this, sw_name, &sw, &port] { complete_service(sw_name, sw, port); });
    } else {
      port.busy = false;
    }
  }

  // ---- measurement ----

  void sample_event() {
    for (auto& fp : flows_)
      fp->m.acr_samples.emplace_back(now_, fp->source->acr());
    for (auto& [name, sw] : switches_)
      for (auto& [pname, port] : sw->ports())
        queue_samples_[name][pname].emplace_back(now_,
                                                 static_cast<std::int64_t>(port.queue.size()));
    at(now_ + scn_.run.sample_period_ns, [this] { sample_event(); });
  }

  Metrics finalize_metrics() {
    Metrics m;
    m.scenario = scn_.name;
    m.duration_ns = scn_.run.duration_ns;
    m.sample_period_ns = scn_.run.sample_period_ns;

    std::map<const Flow*, std::int64_t> queued;
    for (auto& [name, sw] : switches_) {
      for (auto& [pname, port] : sw->ports()) {
        for (const Cell& cell : port.queue) ++queued[route_owner(name, pname, cell)];
        PortMetrics pm;
        pm.point = port_point(name, pname);
        pm.capacity_cps = port.capacity_cps;
        pm.max_queue = port.max_queue;
        pm.drops_clp0 = port.drops_clp0;
        pm.drops_clp1 = port.drops_clp1;
        pm.queue_samples = queue_samples_[name][pname];
        pm.queue_slope_cps = queue_slope(pm.queue_samples);
        m.ports.push_back(std::move(pm));
      }
    }

    std::vector<double> throughputs;
    double duration_sec = ns_to_sec(scn_.run.duration_ns);
    for (auto& fp : flows_) {
      Flow& f = *fp;
      f.m.in_flight = f.wire_cells + queued[&f];
      if (f.m.injected != f.m.delivered + f.m.dropped + f.m.in_flight)
        m.conservation_ok = false;
      f.m.throughput_cps = static_cast<double>(f.m.data_rx) / duration_sec;
      f.m.final_acr = f.source->acr();
      if (!f.m.acr_samples.empty()) {
        double total = 0;
        for (const auto& [t, a] : f.m.acr_samples) total += a;
        f.m.mean_acr = total / static_cast<double>(f.m.acr_samples.size());
      }
      if (f.m.turnaround_count > 0)
        f.m.turnaround_mean_ms = f.turnaround_total_ms / static_cast<double>(f.m.turnaround_count);
      throughputs.push_back(f.m.throughput_cps);
      m.flows.push_back(f.m);
    }
    m.jain = jain_index(throughputs);
    return m;
  }

  const Scenario& scn_;
  std::vector<std::unique_ptr<Flow>> flows_;
  std::map<std::string, std::unique_ptr<Switch>> switches_;
  std::map<std::string, std::map<std::string, std::map<std::uint16_t, PortRoute>>> routes_;
  std::map<std::string, std::map<std::string, std::vector<std::pair<SimTime, std::int64_t>>>>
      queue_samples_;
  std::vector<Event> heap_;
  std::uint64_t next_seq_ = 0;
  SimTime now_ = 0;
  std::vector<TraceRecord> trace_;
};

}  // namespace

std::string metrics_to_json(const Metrics& m) {
  using json = nlohmann::ordered_json;
  json j;
  j["scenario"] = m.scenario;
  j["duration_ms"] = static_cast<double>(m.duration_ns) / 1e6;
  j["sample_period_ms"] = static_cast<double>(m.sample_period_ns) / 1e6;
  j["jain_fairness"] = m.jain;
  j["conservation_ok"] = m.conservation_ok;
  j["flows"] = json::array();
  for (const FlowMetrics& f : m.flows) {
    json jf;
    jf["vci"] = f.vci;
    jf["from"] = f.from;
    jf["to"] = f.to;
    jf["tx"] = {{"data", f.data_tx},           {"frm", f.frm_tx},
                {"oor_frm", f.oor_frm_tx},     {"brm", f.brm_tx},
                {"displaced", f.displaced_tx}, {"becn", f.becn_tx}};
    jf["rx"] = {{"data", f.data_rx}, {"frm", f.frm_rx}, {"brm", f.brm_rx}, {"becn", f.becn_rx}};
    jf["injected"] = f.injected;
    jf["delivered"] = f.delivered;
    jf["dropped"] = f.dropped;
    jf["in_flight"] = f.in_flight;
    jf["throughput_cps"] = f.throughput_cps;
    jf["mean_acr_cps"] = f.mean_acr;
    jf["final_acr_cps"] = f.final_acr;
    jf["turnaround"] = {{"count", f.turnaround_count},
                        {"mean_ms", f.turnaround_mean_ms},
                        {"max_ms", f.turnaround_max_ms}};
    json samples = json::array();
    for (const auto& [t, acr] : f.acr_samples)
      samples.push_back({static_cast<double>(t) / 1e6, acr});
    jf["acr_samples"] = std::move(samples);
    j["flows"].push_back(std::move(jf));
  }
  j["ports"] = json::array();
  for (const PortMetrics& p : m.ports) {
    json jp;
    jp["point"] = p.point;
    jp["capacity_cps"] = p.capacity_cps;
    jp["max_queue"] = p.max_queue;
    jp["drops_clp0"] = p.drops_clp0;
    jp["drops_clp1"] = p.drops_clp1;
    jp["queue_slope_cps"] = p.queue_slope_cps;
    json samples = json::array();
    for (const auto& [t, depth] : p.queue_samples)
      samples.push_back({static_cast<double>(t) / 1e6, depth});
    jp["queue_samples"] = std::move(samples);
    j["ports"].push_back(std::move(jp));
  }
  return j.dump(2) + "\n";
}

RunResult run(const Scenario& scenario) {
  Engine engine(scenario);
  return engine.run_to_end();
}

}  // namespace abr
