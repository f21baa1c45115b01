#include "abr/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace abr {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& context, const std::string& message) {
  throw ConfigError(context + ": " + message);
}

// Scenario files are hand-written, so typos must not silently become
// defaults: every object is checked against its full key list.
void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& context) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.count(it.key())) fail(context, "unknown key \"" + it.key() + "\"");
}

const json& member(const json& obj, const char* key, const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(context, std::string("missing required key \"") + key + "\"");
  return *it;
}

double get_number(const json& obj, const char* key, double fallback,
                  const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) fail(context, std::string("\"") + key + "\" must be a number");
  return it->get<double>();
}

std::int64_t get_integer(const json& obj, const char* key, std::int64_t fallback,
                         const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer()) fail(context, std::string("\"") + key + "\" must be an integer");
  return it->get<std::int64_t>();
}

bool get_bool(const json& obj, const char* key, bool fallback, const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) fail(context, std::string("\"") + key + "\" must be true or false");
  return it->get<bool>();
}

std::string get_string(const json& obj, const char* key, const std::string& fallback,
                       const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_string()) fail(context, std::string("\"") + key + "\" must be a string");
  return it->get<std::string>();
}

SimTime get_ms(const json& obj, const char* key, SimTime fallback, const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) fail(context, std::string("\"") + key + "\" must be a number (ms)");
  double ms = it->get<double>();
  if (ms < 0) fail(context, std::string("\"") + key + "\" must not be negative");
  return ms_to_ns(ms);
}

AbrParams params_from_json(const json& obj, const std::string& context) {
  if (!obj.is_object()) fail(context, "must be an object");
  reject_unknown_keys(obj,
                      {"pcr", "mcr", "icr", "tcr", "nrm", "mrm", "trm_ms", "adtf_ms",
                       "rif", "rdf", "cdf", "tbe", "frtt_ms"},
                      context);
  AbrParams p;
  p.pcr = get_number(obj, "pcr", p.pcr, context);
  p.mcr = get_number(obj, "mcr", p.mcr, context);
  p.icr = get_number(obj, "icr", p.icr, context);
  p.tcr = get_number(obj, "tcr", p.tcr, context);
  p.nrm = get_integer(obj, "nrm", p.nrm, context);
  p.mrm = get_integer(obj, "mrm", p.mrm, context);
  p.trm_ns = get_ms(obj, "trm_ms", p.trm_ns, context);
  p.adtf_ns = get_ms(obj, "adtf_ms", p.adtf_ns, context);
  p.rif = get_number(obj, "rif", p.rif, context);
  p.rdf = get_number(obj, "rdf", p.rdf, context);
  p.cdf = get_number(obj, "cdf", p.cdf, context);
  p.tbe = get_integer(obj, "tbe", p.tbe, context);
  p.frtt_ns = get_ms(obj, "frtt_ms", p.frtt_ns, context);
  return p;
}

LinkConfig link_from_json(const json& obj, const std::string& context) {
  if (!obj.is_object()) fail(context, "must be an object");
  reject_unknown_keys(obj, {"between", "capacity_cps", "delay_ms"}, context);
  const json& between = member(obj, "between", context);
  if (!between.is_array() || between.size() != 2 || !between[0].is_string() ||
      !between[1].is_string())
    fail(context, "\"between\" must name two nodes");
  LinkConfig link;
  link.a = between[0].get<std::string>();
  link.b = between[1].get<std::string>();
  link.capacity_cps = get_number(obj, "capacity_cps", link.capacity_cps, context);
  link.delay_ns = get_ms(obj, "delay_ms", link.delay_ns, context);
  return link;
}

SwitchNodeConfig switch_from_json(const json& obj, const std::string& context) {
  if (!obj.is_object()) fail(context, "must be an object");
  reject_unknown_keys(obj,
                      {"name", "model", "efci_threshold", "rr_lo", "rr_hi",
                       "panic_threshold", "queue_limit", "target_utilization",
                       "becn_enabled", "becn_rate_cps", "mark_forward", "trust_ccr",
                       "drop_brm", "er_override_cps", "activity_window_ms"},
                      context);
  SwitchNodeConfig sw;
  sw.name = get_string(obj, "name", "", context);
  if (sw.name.empty()) fail(context, "missing required key \"name\"");
  Switch::Config& c = sw.config;
  std::string model = get_string(obj, "model", to_string(c.model), context);
  try {
    c.model = switch_model_from_string(model);
  } catch (const std::invalid_argument& e) {
    fail(context, e.what());
  }
  c.efci_threshold = get_integer(obj, "efci_threshold", c.efci_threshold, context);
  c.rr_lo = get_integer(obj, "rr_lo", c.rr_lo, context);
  c.rr_hi = get_integer(obj, "rr_hi", c.rr_hi, context);
  c.panic_threshold = get_integer(obj, "panic_threshold", c.panic_threshold, context);
  c.queue_limit = get_integer(obj, "queue_limit", c.queue_limit, context);
  c.target_utilization = get_number(obj, "target_utilization", c.target_utilization, context);
  c.becn_enabled = get_bool(obj, "becn_enabled", c.becn_enabled, context);
  c.becn_rate = get_number(obj, "becn_rate_cps", c.becn_rate, context);
  c.mark_forward = get_bool(obj, "mark_forward", c.mark_forward, context);
  c.trust_ccr = get_bool(obj, "trust_ccr", c.trust_ccr, context);
  c.drop_brm = get_bool(obj, "drop_brm", c.drop_brm, context);
  if (obj.contains("er_override_cps"))
    c.er_override = get_number(obj, "er_override_cps", 0, context);
  c.activity_window_ns = get_ms(obj, "activity_window_ms", c.activity_window_ns, context);
  return sw;
}

TrafficConfig traffic_from_json(const json& obj, const std::string& context) {
  if (!obj.is_object()) fail(context, "must be an object");
  reject_unknown_keys(obj, {"kind", "on_ms", "off_ms", "start_ms", "stop_ms", "random"},
                      context);
  TrafficConfig t;
  std::string kind = get_string(obj, "kind", "saturating", context);
  if (kind == "saturating") {
    t.kind = TrafficConfig::Kind::saturating;
  } else if (kind == "on_off") {
    t.kind = TrafficConfig::Kind::on_off;
  } else {
    fail(context, "\"kind\" must be \"saturating\" or \"on_off\"");
  }
  t.on_ns = get_ms(obj, "on_ms", t.on_ns, context);
  t.off_ns = get_ms(obj, "off_ms", t.off_ns, context);
  t.start_ns = get_ms(obj, "start_ms", t.start_ns, context);
  if (obj.contains("stop_ms")) t.stop_ns = get_ms(obj, "stop_ms", 0, context);
  t.random = get_bool(obj, "random", t.random, context);
  if (t.kind == TrafficConfig::Kind::on_off && (t.on_ns <= 0 || t.off_ns < 0))
    fail(context, "on_off traffic needs on_ms > 0 and off_ms >= 0");
  return t;
}

DestNodeConfig dest_from_json(const json& obj, const std::string& context) {
  if (!obj.is_object()) fail(context, "must be an object");
  reject_unknown_keys(obj,
                      {"displaced", "er_cap_cps", "becn_enabled", "becn_er_cps",
                       "becn_rate_cps"},
                      context);
  DestNodeConfig d;
  std::string displaced = get_string(obj, "displaced", "send_out_of_rate", context);
  if (displaced == "send_out_of_rate") {
    d.config.displaced = DisplacedPolicy::send_out_of_rate;
  } else if (displaced == "discard") {
    d.config.displaced = DisplacedPolicy::discard;
  } else if (displaced == "keep_in_rate") {
    d.config.displaced = DisplacedPolicy::keep_in_rate;
  } else {
    fail(context, "\"displaced\" must be send_out_of_rate, discard or keep_in_rate");
  }
  if (obj.contains("er_cap_cps")) d.config.er_cap = get_number(obj, "er_cap_cps", 0, context);
  d.becn_enabled = get_bool(obj, "becn_enabled", d.becn_enabled, context);
  d.config.becn_er = get_number(obj, "becn_er_cps", d.config.becn_er, context);
  d.config.becn_rate = get_number(obj, "becn_rate_cps", d.config.becn_rate, context);
  return d;
}

VcConfig vc_from_json(const json& obj, const std::string& context) {
  if (!obj.is_object()) fail(context, "must be an object");
  reject_unknown_keys(obj, {"vci", "vpi", "path", "bidirectional", "params", "traffic", "dest"},
                      context);
  VcConfig vc;
  std::int64_t vci = get_integer(obj, "vci", -1, context);
  if (vci < 1 || vci > 0xFFFF) fail(context, "\"vci\" must be in 1..65535");
  vc.vci = static_cast<std::uint16_t>(vci);
  std::int64_t vpi = get_integer(obj, "vpi", 0, context);
  if (vpi < 0 || vpi > 0xFF) fail(context, "\"vpi\" must be in 0..255");
  vc.vpi = static_cast<std::uint8_t>(vpi);
  const json& path = member(obj, "path", context);
  if (!path.is_array() || path.size() < 2) fail(context, "\"path\" must list at least two nodes");
  for (const json& hop : path) {
    if (!hop.is_string()) fail(context, "\"path\" entries must be node names");
    vc.path.push_back(hop.get<std::string>());
  }
  vc.bidirectional = get_bool(obj, "bidirectional", vc.bidirectional, context);
  const json& params = member(obj, "params", context);
  vc.params = params_from_json(params, context + ".params");
  vc.frtt_explicit = params.contains("frtt_ms");
  if (obj.contains("traffic")) vc.traffic = traffic_from_json(obj["traffic"], context + ".traffic");
  if (obj.contains("dest")) vc.dest = dest_from_json(obj["dest"], context + ".dest");
  return vc;
}

RunConfig run_from_json(const json& obj, const std::string& context) {
  if (!obj.is_object()) fail(context, "must be an object");
  reject_unknown_keys(obj, {"duration_ms", "seed", "sample_period_ms"}, context);
  RunConfig run;
  run.duration_ns = get_ms(obj, "duration_ms", 0, context);
  if (run.duration_ns <= 0) fail(context, "\"duration_ms\" must be positive");
  std::int64_t seed = get_integer(obj, "seed", 0, context);
  if (seed < 0) fail(context, "\"seed\" must not be negative");
  run.seed = static_cast<std::uint64_t>(seed);
  run.sample_period_ns = get_ms(obj, "sample_period_ms", run.sample_period_ns, context);
  if (run.sample_period_ns <= 0) fail(context, "\"sample_period_ms\" must be positive");
  return run;
}

json parse_text(const std::string& text, const std::string& context) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) fail(context, "not valid JSON");
  return j;
}

}  // namespace

const LinkConfig* Scenario::link_between(const std::string& a, const std::string& b) const {
  for (const LinkConfig& link : links)
    if ((link.a == a && link.b == b) || (link.a == b && link.b == a)) return &link;
  return nullptr;
}

const SwitchNodeConfig* Scenario::switch_named(const std::string& name) const {
  for (const SwitchNodeConfig& sw : switches)
    if (sw.name == name) return &sw;
  return nullptr;
}

AbrParams abr_params_from_json_text(const std::string& text) {
  json j = parse_text(text, "params");
  // Allow the params either at top level or under a "params" wrapper, so a
  // scenario's VC block can be pasted as-is.
  if (j.is_object() && j.contains("params")) j = j["params"];
  return params_from_json(j, "params");
}

Scenario scenario_from_json_text(const std::string& text) {
  json j = parse_text(text, "scenario");
  if (!j.is_object()) fail("scenario", "top level must be an object");
  reject_unknown_keys(j, {"version", "name", "description", "links", "switches", "vcs", "run"},
                      "scenario");
  Scenario s;
  s.version = static_cast<int>(get_integer(j, "version", 1, "scenario"));
  if (s.version != 1) fail("scenario", "unsupported version " + std::to_string(s.version));
  s.name = get_string(j, "name", "", "scenario");
  s.description = get_string(j, "description", "", "scenario");
  const json& links = member(j, "links", "scenario");
  if (!links.is_array()) fail("scenario", "\"links\" must be an array");
  for (std::size_t i = 0; i < links.size(); ++i)
    s.links.push_back(link_from_json(links[i], "links[" + std::to_string(i) + "]"));
  if (j.contains("switches")) {
    const json& switches = j["switches"];
    if (!switches.is_array()) fail("scenario", "\"switches\" must be an array");
    for (std::size_t i = 0; i < switches.size(); ++i)
      s.switches.push_back(switch_from_json(switches[i], "switches[" + std::to_string(i) + "]"));
  }
  const json& vcs = member(j, "vcs", "scenario");
  if (!vcs.is_array() || vcs.empty()) fail("scenario", "\"vcs\" must be a non-empty array");
  for (std::size_t i = 0; i < vcs.size(); ++i)
    s.vcs.push_back(vc_from_json(vcs[i], "vcs[" + std::to_string(i) + "]"));
  s.run = run_from_json(member(j, "run", "scenario"), "run");
  validate_scenario(s);
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json_text(buf.str());
}

void validate_scenario(const Scenario& s) {
  std::vector<std::string> problems;
  auto complain = [&problems](const std::string& p) { problems.push_back(p); };

  std::set<std::string> switch_names;
  for (const SwitchNodeConfig& sw : s.switches)
    if (!switch_names.insert(sw.name).second) complain("duplicate switch \"" + sw.name + "\"");

  for (const LinkConfig& link : s.links) {
    if (link.a == link.b) complain("link from \"" + link.a + "\" to itself");
    if (link.capacity_cps == 0) complain("link " + link.a + "-" + link.b + " has zero capacity");
  }

  std::set<std::uint16_t> vcis;
  for (const VcConfig& vc : s.vcs) {
    const std::string where = "vc " + std::to_string(vc.vci);
    if (!vcis.insert(vc.vci).second) complain("duplicate vci " + std::to_string(vc.vci));
    if (vc.path.size() >= 2) {
      if (s.is_switch(vc.path.front()))
        complain(where + ": path must start at a host, not switch \"" + vc.path.front() + "\"");
      if (s.is_switch(vc.path.back()))
        complain(where + ": path must end at a host, not switch \"" + vc.path.back() + "\"");
      for (std::size_t i = 1; i + 1 < vc.path.size(); ++i)
        if (!s.is_switch(vc.path[i]))
          complain(where + ": intermediate node \"" + vc.path[i] + "\" is not a declared switch");
      for (std::size_t i = 0; i + 1 < vc.path.size(); ++i)
        if (!s.link_between(vc.path[i], vc.path[i + 1]))
          complain(where + ": no link between \"" + vc.path[i] + "\" and \"" + vc.path[i + 1] + "\"");
      std::set<std::string> seen(vc.path.begin(), vc.path.end());
      if (seen.size() != vc.path.size()) complain(where + ": path visits a node twice");
    }
    AbrParams p = vc.params;
    if (p.icr == 0) p.icr = p.pcr;
    for (const ParamIssue& issue : validate(p))
      complain(where + " params." + issue.field + ": " + issue.message);
  }

  if (!problems.empty()) {
    std::string all = "invalid scenario";
    for (const std::string& p : problems) all += "\n  - " + p;
    throw ConfigError(all);
  }
}

}  // namespace abr
