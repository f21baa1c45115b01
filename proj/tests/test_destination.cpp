#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "abr/destination.hpp"

using namespace abr;

namespace {

RmCell arriving_frm(double er, double ccr, double mcr = 0) {
  RmCell frm;
  frm.dir = 0;
  frm.er = encode_rate16(er);
  frm.ccr = encode_rate16(ccr);
  frm.mcr = encode_rate16(mcr);
  return frm;
}

CellHeader data_header(std::uint8_t efci) {
  CellHeader h;
  h.vci = 32;
  h.efci = efci;
  return h;
}

}  // namespace

TEST_CASE("EFCI latch: set by a marked cell, not cleared by a clean one") {
  Destination dest{Destination::Config{}};
  CHECK(!dest.efci_latched());
  dest.on_data_cell(data_header(1));
  CHECK(dest.efci_latched());
  dest.on_data_cell(data_header(0));
  CHECK(dest.efci_latched());  // only a BRM transmission clears it
}

TEST_CASE("turnaround flips direction and otherwise preserves the payload") {
  Destination dest{Destination::Config{}};
  RmCell frm = arriving_frm(750, 500, 25);
  frm.ql = 7;
  frm.sn = 9;
  dest.turn_around(frm, 0);
  REQUIRE(dest.brm_waiting());
  RmCell brm = dest.take_brm(0, /*in_rate=*/true);
  CHECK(brm.dir == 1);
  CHECK(brm.bn == 0);
  CHECK(brm.er == frm.er);
  CHECK(brm.ccr == frm.ccr);
  CHECK(brm.mcr == frm.mcr);
  CHECK(brm.ql == 0);  // cleared on the way back
  CHECK(brm.sn == 0);
  CHECK(brm.header.clp == 0);
  CHECK(!dest.brm_waiting());
}

TEST_CASE("the latched EFCI state transfers to CI at transmission and clears") {
  Destination dest{Destination::Config{}};
  dest.on_data_cell(data_header(1));
  dest.turn_around(arriving_frm(500, 400), 0);
  RmCell brm = dest.take_brm(0, true);
  CHECK(brm.ci == 1);
  CHECK(!dest.efci_latched());

  // The next turnaround goes out clean.
  dest.turn_around(arriving_frm(500, 400), 1);
  CHECK(dest.take_brm(1, true).ci == 0);
}

TEST_CASE("ER is only ever reduced on turnaround") {
  Destination::Config cfg;
  cfg.er_cap = 300.0;
  Destination dest{cfg};

  dest.turn_around(arriving_frm(750, 500), 0);
  CHECK(decode_rate16(dest.take_brm(0, true).er) == 300.0);

  // Below the cap the advertised ER passes through exactly.
  dest.turn_around(arriving_frm(200, 100), 1);
  CHECK(dest.take_brm(1, true).er == encode_rate16(200));
}

TEST_CASE("a newer FRM displaces the pending turnaround out-of-rate") {
  Destination dest{Destination::Config{}};
  dest.turn_around(arriving_frm(500, 400), 0);
  auto result = dest.turn_around(arriving_frm(500, 450), 1);
  REQUIRE(result.displaced.has_value());
  CHECK(result.displaced->header.clp == 1);  // leaves as discard-eligible
  CHECK(result.displaced->ccr == encode_rate16(400));
  CHECK(result.displaced->dir == 1);
  CHECK(result.displaced_seq == 1);

  // The slot now holds the newer content, and its tag is newer too.
  REQUIRE(dest.brm_waiting());
  CHECK(dest.pending_seq() == 2);
  CHECK(dest.take_brm(1, true).ccr == encode_rate16(450));
}

TEST_CASE("displacement transfers the EFCI latch to the leaving cell") {
  Destination dest{Destination::Config{}};
  dest.turn_around(arriving_frm(500, 400), 0);
  dest.on_data_cell(data_header(1));
  auto result = dest.turn_around(arriving_frm(500, 450), 1);
  REQUIRE(result.displaced.has_value());
  CHECK(result.displaced->ci == 1);
  CHECK(!dest.efci_latched());
  CHECK(dest.take_brm(1, true).ci == 0);
}

TEST_CASE("discard and keep_in_rate policies emit nothing extra") {
  for (DisplacedPolicy policy :
       {DisplacedPolicy::discard, DisplacedPolicy::keep_in_rate}) {
    Destination::Config cfg;
    cfg.displaced = policy;
    Destination dest{cfg};
    dest.turn_around(arriving_frm(500, 400), 0);
    auto result = dest.turn_around(arriving_frm(500, 450), 1);
    CHECK(!result.displaced.has_value());
    CHECK(dest.take_brm(1, true).ccr == encode_rate16(450));  // newest wins
  }
}

TEST_CASE("draining an empty slot is a logic error") {
  Destination dest{Destination::Config{}};
  CHECK(!dest.brm_waiting());
  CHECK_THROWS_AS(dest.take_brm(0, true), std::logic_error);
}

TEST_CASE("out-of-rate drain stamps CLP=1") {
  Destination dest{Destination::Config{}};
  dest.turn_around(arriving_frm(500, 400), 0);
  CHECK(dest.take_brm(0, /*in_rate=*/false).header.clp == 1);
}

TEST_CASE("turnaround sequence tags increase monotonically") {
  Destination dest{Destination::Config{}};
  for (int i = 1; i <= 5; ++i) {
    dest.turn_around(arriving_frm(500, 400), i);
    CHECK(dest.pending_seq() == i);
    CHECK(dest.turnaround_seq() == i);
    dest.take_brm(i, true);
  }
}

TEST_CASE("self-generated BECNs are rate-limited to 10 per second") {
  Destination dest{Destination::Config{}};
  int sent = 0;
  for (SimTime t = 0; t < ms_to_ns(1000); t += ms_to_ns(1)) {
    if (auto becn = dest.generate_becn(0, 32, t)) {
      ++sent;
      CHECK(becn->bn == 1);
      CHECK(becn->ci == 1);
      CHECK(becn->dir == 1);
      CHECK(becn->header.clp == 1);
      CHECK(becn->header.vci == 32);
    }
  }
  CHECK(sent == 10);
}

TEST_CASE("BECN advertises the configured ER") {
  Destination::Config cfg;
  cfg.becn_er = 125.0;
  Destination dest{cfg};
  auto becn = dest.generate_becn(0, 32, 0);
  REQUIRE(becn.has_value());
  CHECK(decode_rate16(becn->er) == 125.0);
}
