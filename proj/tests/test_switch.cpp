#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "abr/switch.hpp"
#include "abr/rate_codec.hpp"

using namespace abr;

namespace {

Cell data_cell(std::uint16_t vci, std::uint8_t clp = 0) {
  Cell c = make_data_cell(0, vci);
  c.header().clp = clp;
  return c;
}

Cell frm_cell(std::uint16_t vci, double er, double ccr, double mcr = 0) {
  Cell c;
  c.type = CellType::rm;
  c.rm.header.vci = vci;
  c.rm.dir = 0;
  c.rm.er = encode_rate16(er);
  c.rm.ccr = encode_rate16(ccr);
  c.rm.mcr = encode_rate16(mcr);
  return c;
}

Cell brm_cell(std::uint16_t vci, double er) {
  Cell c = frm_cell(vci, er, 0);
  c.rm.dir = 1;
  return c;
}

void fill_queue(Switch& sw, Switch::Port& port, int n, std::uint8_t clp = 0) {
  for (int i = 0; i < n; ++i) sw.enqueue(port, data_cell(32, clp));
}

}  // namespace

TEST_CASE("model names map both ways") {
  CHECK(switch_model_from_string("pass-through") == SwitchModel::pass_through);
  CHECK(switch_model_from_string("efci") == SwitchModel::efci);
  CHECK(switch_model_from_string("relative-rate") == SwitchModel::relative_rate);
  CHECK(switch_model_from_string("explicit-rate") == SwitchModel::explicit_rate);
  CHECK(to_string(SwitchModel::relative_rate) == "relative-rate");
  CHECK_THROWS_AS(switch_model_from_string("red"), std::invalid_argument);
}

TEST_CASE("ports are unique and looked up by name") {
  Switch sw{Switch::Config{}};
  sw.add_port("east", 1000);
  CHECK_THROWS_AS(sw.add_port("east", 500), std::invalid_argument);
  CHECK(sw.port("east").capacity_cps == 1000);
  CHECK_THROWS_AS(sw.port("west"), std::out_of_range);
}

TEST_CASE("EFCI marking trips strictly above the threshold, data cells only") {
  Switch::Config cfg;
  cfg.model = SwitchModel::efci;
  cfg.efci_threshold = 3;
  Switch sw{cfg};
  Switch::Port& p = sw.add_port("out", 1000);

  fill_queue(sw, p, 3);
  Cell at_threshold = data_cell(32);
  sw.efci_mark(p, at_threshold);
  CHECK(at_threshold.header().efci == 0);

  fill_queue(sw, p, 1);
  Cell above = data_cell(32);
  sw.efci_mark(p, above);
  CHECK(above.header().efci == 1);

  Cell rm = frm_cell(32, 500, 400);
  sw.efci_mark(p, rm);
  CHECK(rm.rm.header.efci == 0);  // RM cells are never EFCI-marked
}

TEST_CASE("other models leave EFCI alone") {
  Switch::Config cfg;
  cfg.model = SwitchModel::relative_rate;
  cfg.efci_threshold = 0;
  Switch sw{cfg};
  Switch::Port& p = sw.add_port("out", 1000);
  fill_queue(sw, p, 5);
  Cell c = data_cell(32);
  sw.efci_mark(p, c);
  CHECK(c.header().efci == 0);
}

TEST_CASE("relative-rate marking: NI above the low floor, CI above the high") {
  Switch::Config cfg;
  cfg.model = SwitchModel::relative_rate;
  cfg.rr_lo = 2;
  cfg.rr_hi = 4;
  Switch sw{cfg};
  Switch::Port& p = sw.add_port("out", 1000);

  RmCell rm = brm_cell(32, 500).rm;
  sw.rr_mark(p, rm);
  CHECK((rm.ci == 0 && rm.ni == 0));

  fill_queue(sw, p, 3);  // lo < 3 <= hi
  rm = brm_cell(32, 500).rm;
  sw.rr_mark(p, rm);
  CHECK((rm.ci == 0 && rm.ni == 1));

  fill_queue(sw, p, 2);  // 5 > hi
  rm = brm_cell(32, 500).rm;
  sw.rr_mark(p, rm);
  CHECK(rm.ci == 1);

  // Bits only ever go from 0 to 1, and only under this model.
  Switch::Config pass;
  pass.rr_lo = 0;
  pass.rr_hi = 0;
  Switch sw2{pass};
  Switch::Port& p2 = sw2.add_port("out", 1000);
  fill_queue(sw2, p2, 5);
  rm = brm_cell(32, 500).rm;
  sw2.rr_mark(p2, rm);
  CHECK((rm.ci == 0 && rm.ni == 0));
}

TEST_CASE("fair share splits capacity evenly among active VCs") {
  Switch::Config cfg;
  cfg.model = SwitchModel::explicit_rate;
  cfg.target_utilization = 1.0;
  Switch sw{cfg};
  Switch::Port& p = sw.add_port("out", 1000);

  sw.note_forward_cell(p, frm_cell(33, 1000, 800), 0);
  sw.note_forward_cell(p, frm_cell(34, 1000, 100), 0);
  CHECK(sw.fair_share(p, 33, 0) == 500.0);
  CHECK(sw.fair_share(p, 34, 0) == 500.0);
}

TEST_CASE("fair share honors MCR floors by water-filling") {
  Switch::Config cfg;
  cfg.model = SwitchModel::explicit_rate;
  cfg.target_utilization = 1.0;
  Switch sw{cfg};
  Switch::Port& p = sw.add_port("out", 1000);

  sw.note_forward_cell(p, frm_cell(33, 1000, 900, /*mcr=*/800), 0);
  sw.note_forward_cell(p, frm_cell(34, 1000, 100, /*mcr=*/0), 0);
  CHECK(sw.fair_share(p, 33, 0) == 800.0);  // frozen at its floor
  CHECK(sw.fair_share(p, 34, 0) == 200.0);  // gets what remains
}

TEST_CASE("idle VCs leave the pool after the activity window") {
  Switch::Config cfg;
  cfg.model = SwitchModel::explicit_rate;
  cfg.target_utilization = 1.0;
  cfg.activity_window_ns = ms_to_ns(500);
  Switch sw{cfg};
  Switch::Port& p = sw.add_port("out", 1000);

  sw.note_forward_cell(p, frm_cell(33, 1000, 500), 0);
  sw.note_forward_cell(p, frm_cell(34, 1000, 500), 0);
  CHECK(sw.fair_share(p, 33, ms_to_ns(100)) == 500.0);
  // VC 34 has been silent past the window; VC 33 gets everything. The
  // requester itself always counts as active, however stale its entry.
  CHECK(sw.fair_share(p, 33, ms_to_ns(1000)) == 1000.0);

  // A VC never seen before still gets a share when it asks.
  Switch sw2{cfg};
  Switch::Port& empty = sw2.add_port("out", 1000);
  CHECK(sw2.fair_share(empty, 55, 0) == 1000.0);
}

TEST_CASE("trust_ccr uses claimed rates instead of observed activity") {
  Switch::Config cfg;
  cfg.model = SwitchModel::explicit_rate;
  cfg.target_utilization = 1.0;
  cfg.trust_ccr = true;
  Switch sw{cfg};
  Switch::Port& p = sw.add_port("out", 1000);

  sw.note_forward_cell(p, frm_cell(33, 1000, 500), 0);
  sw.note_forward_cell(p, frm_cell(34, 1000, 0), 0);  // claims zero rate
  CHECK(sw.fair_share(p, 33, ms_to_ns(10000)) == 1000.0);
}

TEST_CASE("target utilization scales the budget") {
  Switch::Config cfg;
  cfg.model = SwitchModel::explicit_rate;
  cfg.target_utilization = 0.95;
  Switch sw{cfg};
  Switch::Port& p = sw.add_port("out", 1000);
  sw.note_forward_cell(p, frm_cell(33, 1000, 500), 0);
  CHECK(sw.fair_share(p, 33, 0) == 950.0);

  Switch::Port& inf = sw.add_port("uplink", 0);
  CHECK(sw.fair_share(inf, 33, 0) == kMaxRate16);
}

TEST_CASE("explicit-rate update only ever reduces ER") {
  Switch::Config cfg;
  cfg.model = SwitchModel::explicit_rate;
  cfg.target_utilization = 1.0;
  Switch sw{cfg};
  Switch::Port& p = sw.add_port("out", 1000);
  sw.note_forward_cell(p, frm_cell(33, 2000, 800), 0);
  sw.note_forward_cell(p, frm_cell(34, 2000, 800), 0);

  RmCell rm = brm_cell(33, 2000).rm;
  sw.er_update(p, rm, 0);
  CHECK(decode_rate16(rm.er) <= 500.0);  // round-down encode of the grant
  CHECK(decode_rate16(rm.er) > 500.0 * (1.0 - 1.0 / 512));

  RmCell low = brm_cell(33, 100).rm;
  sw.er_update(p, low, 0);
  CHECK(low.er == encode_rate16(100));  // already below the grant: untouched

  Switch::Config pass;
  Switch sw2{pass};
  Switch::Port& p2 = sw2.add_port("out", 1000);
  RmCell other = brm_cell(33, 2000).rm;
  sw2.er_update(p2, other, 0);
  CHECK(other.er == encode_rate16(2000));  // only the explicit-rate model acts
}

TEST_CASE("er_override pins the grant") {
  Switch::Config cfg;
  cfg.model = SwitchModel::explicit_rate;
  cfg.er_override = 0.0;
  Switch sw{cfg};
  Switch::Port& p = sw.add_port("out", 1000);
  RmCell rm = brm_cell(33, 2000).rm;
  sw.er_update(p, rm, 0);
  CHECK(decode_rate16(rm.er) == 0.0);
}

TEST_CASE("BECNs fire above the panic threshold, 10 per second per VC") {
  Switch::Config cfg;
  cfg.becn_enabled = true;
  cfg.panic_threshold = 2;
  Switch sw{cfg};
  Switch::Port& p = sw.add_port("out", 1000);
  sw.note_forward_cell(p, frm_cell(32, 1000, 500, /*mcr=*/40), 0);

  CHECK(!sw.maybe_generate_becn(p, 0, 32, 0).has_value());  // queue empty

  fill_queue(sw, p, 3);
  auto becn = sw.maybe_generate_becn(p, 0, 32, 0);
  REQUIRE(becn.has_value());
  CHECK(becn->bn == 1);
  CHECK(becn->ci == 1);
  CHECK(becn->dir == 1);
  CHECK(becn->header.clp == 1);
  CHECK(becn->mcr == encode_rate16(40));

  // Within the same 100 ms budget slot nothing more for this VC...
  CHECK(!sw.maybe_generate_becn(p, 0, 32, ms_to_ns(50)).has_value());
  // ...but another VC has its own gate.
  CHECK(sw.maybe_generate_becn(p, 0, 33, ms_to_ns(50)).has_value());
  CHECK(sw.maybe_generate_becn(p, 0, 32, ms_to_ns(100)).has_value());

  Switch::Config off;
  off.becn_enabled = false;
  off.panic_threshold = 0;
  Switch sw2{off};
  Switch::Port& p2 = sw2.add_port("out", 1000);
  fill_queue(sw2, p2, 5);
  CHECK(!sw2.maybe_generate_becn(p2, 0, 32, 0).has_value());
}

TEST_CASE("FIFO service order") {
  Switch sw{Switch::Config{}};
  Switch::Port& p = sw.add_port("out", 1000);
  sw.enqueue(p, frm_cell(32, 500, 400));
  sw.enqueue(p, data_cell(32));
  CHECK(sw.dequeue(p).is_frm());
  CHECK(sw.dequeue(p).type == CellType::data);
  CHECK_THROWS_AS(sw.dequeue(p), std::logic_error);
}

TEST_CASE("a full queue drops arrivals, counted by priority") {
  Switch::Config cfg;
  cfg.queue_limit = 3;
  Switch sw{cfg};
  Switch::Port& p = sw.add_port("out", 1000);
  fill_queue(sw, p, 3);

  auto out = sw.enqueue(p, data_cell(32, /*clp=*/1));
  CHECK(out.result == Switch::EnqueueResult::dropped);
  REQUIRE(out.victim.has_value());
  CHECK(out.victim->header().clp == 1);
  CHECK(p.drops_clp1 == 1);

  auto out2 = sw.enqueue(p, data_cell(32, /*clp=*/0));
  CHECK(out2.result == Switch::EnqueueResult::dropped);  // no CLP=1 to evict
  CHECK(p.drops_clp0 == 1);
  CHECK(p.queue.size() == 3);
}

TEST_CASE("a CLP=0 arrival pushes out the oldest discard-eligible cell") {
  Switch::Config cfg;
  cfg.queue_limit = 3;
  Switch sw{cfg};
  Switch::Port& p = sw.add_port("out", 1000);
  sw.enqueue(p, data_cell(40, 0));
  sw.enqueue(p, data_cell(41, 1));  // oldest CLP=1, the designated victim
  sw.enqueue(p, data_cell(42, 1));

  auto out = sw.enqueue(p, data_cell(43, 0));
  CHECK(out.result == Switch::EnqueueResult::pushed_out);
  REQUIRE(out.victim.has_value());
  CHECK(out.victim->header().vci == 41);
  CHECK(p.drops_clp1 == 1);
  REQUIRE(p.queue.size() == 3);
  CHECK(p.queue.front().header().vci == 40);
  CHECK(p.queue.back().header().vci == 43);
}

TEST_CASE("max queue depth is tracked") {
  Switch sw{Switch::Config{}};
  Switch::Port& p = sw.add_port("out", 1000);
  fill_queue(sw, p, 7);
  sw.dequeue(p);
  sw.dequeue(p);
  CHECK(p.max_queue == 7);
}

TEST_CASE("the switch learns per-VC rates from passing forward RM cells") {
  Switch sw{Switch::Config{}};
  Switch::Port& p = sw.add_port("out", 1000);
  sw.note_forward_cell(p, frm_cell(32, 1000, 640, 80), ms_to_ns(5));
  const Switch::VcInfo& vc = p.vcs.at(32);
  CHECK(vc.mcr == 80.0);
  CHECK(vc.last_ccr == 640.0);
  CHECK(vc.last_seen == ms_to_ns(5));
  CHECK(vc.cells == 1);

  // Data cells refresh activity but carry no rate fields.
  sw.note_forward_cell(p, data_cell(32), ms_to_ns(9));
  CHECK(p.vcs.at(32).last_seen == ms_to_ns(9));
  CHECK(p.vcs.at(32).last_ccr == 640.0);
}
