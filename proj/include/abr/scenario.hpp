#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "abr/destination.hpp"
#include "abr/params.hpp"
#include "abr/switch.hpp"
#include "abr/types.hpp"

namespace abr {

// Anything wrong with a scenario or params file before the simulation can
// start: unreadable file, malformed JSON, unknown keys, bad values, mis-wired
// topology. The CLI maps this to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A bidirectional wire between two nodes; both directions share the same
// capacity and propagation delay. capacity <= 0 means no serialization delay
// (infinite-speed link).
struct LinkConfig {
  std::string a;
  std::string b;
  double capacity_cps = 365566.0;  // 155 Mbit/s payload in cells/s
  SimTime delay_ns = 0;
};

struct SwitchNodeConfig {
  std::string name;
  Switch::Config config;
};

// Data arrival process feeding a source. `saturating` always has a cell
// ready; `on_off` alternates availability, optionally with exponentially
// distributed period lengths drawn from the run seed.
struct TrafficConfig {
  enum class Kind { saturating, on_off };
  Kind kind = Kind::saturating;
  SimTime on_ns = 0;
  SimTime off_ns = 0;
  SimTime start_ns = 0;
  SimTime stop_ns = -1;  // -1: data never ceases
  bool random = false;
};

struct DestNodeConfig {
  Destination::Config config;
  // When set, the destination plays a congested end system: it keeps trying
  // to emit BECN cells, so actual output shows the per-VC budget cap.
  bool becn_enabled = false;
};

struct VcConfig {
  std::uint8_t vpi = 0;
  std::uint16_t vci = 32;
  std::vector<std::string> path;  // src host, switches in order, dst host
  // Mirror the whole arrangement in the other direction: the reverse flow
  // gets its own source/destination pair and its BRMs ride in-rate.
  bool bidirectional = false;
  AbrParams params;
  bool frtt_explicit = false;  // params.frtt_ns came from the file
  TrafficConfig traffic;
  DestNodeConfig dest;
};

struct RunConfig {
  SimTime duration_ns = 0;
  std::uint64_t seed = 0;
  SimTime sample_period_ns = ms_to_ns(10);
};

struct Scenario {
  int version = 1;
  std::string name;
  std::string description;
  std::vector<LinkConfig> links;
  std::vector<SwitchNodeConfig> switches;
  std::vector<VcConfig> vcs;
  RunConfig run;

  const LinkConfig* link_between(const std::string& a, const std::string& b) const;
  const SwitchNodeConfig* switch_named(const std::string& name) const;
  bool is_switch(const std::string& name) const { return switch_named(name) != nullptr; }
};

// Per-VC parameter block shared between scenario files and the standalone
// params file of `check`. Rates are cells/s, times carry an _ms suffix.
AbrParams abr_params_from_json_text(const std::string& text);

Scenario scenario_from_json_text(const std::string& text);
Scenario load_scenario_file(const std::string& path);

// Structural checks run before t=0: known node names, every hop wired,
// endpoints are hosts, switches only in the middle, unique VCIs, parameter
// ranges. Throws ConfigError listing every problem found.
void validate_scenario(const Scenario& scenario);

}  // namespace abr
