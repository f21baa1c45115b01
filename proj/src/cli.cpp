#include "abr/cli.hpp"

#include <cstdio>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "abr/conformance.hpp"
#include "abr/engine.hpp"
#include "abr/params.hpp"
#include "abr/rm_cell.hpp"
#include "abr/scenario.hpp"
#include "abr/trace.hpp"
#include "abr/types.hpp"

namespace abr::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

std::string fixed(double v, int places) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", places, v);
  return buf;
}

// Share of the flow's in-rate stream that is forward RM cells.  The
// denominator counts everything the source put in-rate at this endpoint:
// its own data and FRM cells plus turnaround BRMs for the reverse flow,
// which ride the same stream on a bidirectional connection.
double frm_fraction(const Metrics& m, const FlowMetrics& f) {
  std::int64_t inrate = f.data_tx + f.frm_tx;
  for (const FlowMetrics& other : m.flows) {
    if (other.vci == f.vci && other.from == f.to && other.to == f.from) {
      inrate += other.brm_tx;
      break;
    }
  }
  if (inrate == 0) return 0.0;
  return static_cast<double>(f.frm_tx) / static_cast<double>(inrate);
}

void print_summary(const Scenario& sc, const Metrics& m, std::ostream& out) {
  out << "scenario " << m.scenario << ": "
      << fixed(static_cast<double>(m.duration_ns) / 1e6, 0) << " ms, seed "
      << sc.run.seed << "\n";
  out << "  vc  flow                mean ACR    throughput  FRM frac   rtt(ms)\n";
  for (const FlowMetrics& f : m.flows) {
    std::ostringstream flow;
    flow << f.from << "->" << f.to;
    out << "  " << std::left << std::setw(4) << f.vci << std::setw(20)
        << flow.str() << std::right << std::setw(10) << fixed(f.mean_acr, 1)
        << std::setw(14) << fixed(f.throughput_cps, 1) << std::setw(10)
        << fixed(frm_fraction(m, f), 5) << std::setw(10)
        << fixed(f.turnaround_mean_ms, 2) << "\n";
  }
  if (!m.ports.empty()) {
    out << "  port                 max queue  growth(c/s)  drops(clp0/clp1)\n";
    for (const PortMetrics& p : m.ports) {
      out << "  " << std::left << std::setw(20) << p.point << std::right
          << std::setw(10) << p.max_queue << std::setw(13)
          << fixed(p.queue_slope_cps, 1) << std::setw(10) << p.drops_clp0
          << "/" << p.drops_clp1 << "\n";
    }
  }
  out << "  fairness " << fixed(m.jain, 4) << ", conservation "
      << (m.conservation_ok ? "ok" : "BROKEN") << "\n";
}

void print_cell(const RmCell& cell, std::ostream& out) {
  auto rate = [](RateCode16 r) {
    std::ostringstream s;
    s << decode_rate16(r) << " cells/s (nz=" << int(r.nz)
      << " e=" << int(r.exponent) << " m=" << r.mantissa << ")";
    return s.str();
  };
  out << "  vpi          " << int(cell.header.vpi) << "\n";
  out << "  vci          " << cell.header.vci << "\n";
  out << "  pti          " << int(cell.header.pti) << "\n";
  out << "  clp          " << int(cell.header.clp) << "\n";
  out << "  dir          " << int(cell.dir) << " ("
      << (cell.dir ? "backward" : "forward") << ")\n";
  out << "  bn           " << int(cell.bn) << "\n";
  out << "  ci           " << int(cell.ci) << "\n";
  out << "  ni           " << int(cell.ni) << "\n";
  out << "  ra           " << int(cell.ra) << "\n";
  out << "  er           " << rate(cell.er) << "\n";
  out << "  ccr          " << rate(cell.ccr) << "\n";
  out << "  mcr          " << rate(cell.mcr) << "\n";
  out << "  ql           " << cell.ql << "\n";
  out << "  sn           " << cell.sn << "\n";
}

}  // namespace

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err) {
  Scenario sc;
  try {
    sc = load_scenario_file(options.scenario_path);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  if (options.stop_ms) {
    if (*options.stop_ms <= 0) {
      err << "error: --stop-time must be positive\n";
      return kInputError;
    }
    sc.run.duration_ns = ms_to_ns(*options.stop_ms);
  }
  if (options.seed) sc.run.seed = *options.seed;

  RunResult result;
  try {
    result = run(sc);
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    return kRuntimeError;
  }

  std::string trace_path = options.trace_path.empty()
                               ? sc.name + ".trace.jsonl"
                               : options.trace_path;
  std::string metrics_path = options.metrics_path.empty()
                                 ? sc.name + ".metrics.json"
                                 : options.metrics_path;
  try {
    std::ostringstream trace_text;
    write_trace(trace_text, result.trace);
    write_file(trace_path, trace_text.str());
    write_file(metrics_path, metrics_to_json(result.metrics));
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    return kRuntimeError;
  }

  print_summary(sc, result.metrics, out);
  out << "  trace   " << trace_path << " (" << result.trace.size()
      << " records)\n";
  out << "  metrics " << metrics_path << "\n";
  return kOk;
}

int cmd_check(const std::string& trace_path, const std::string& params_path,
              const std::string& role, std::ostream& out, std::ostream& err) {
  if (role != "source" && role != "destination") {
    err << "error: --role must be source or destination\n";
    return kInputError;
  }
  std::vector<TraceRecord> trace;
  AbrParams params;
  try {
    trace = load_trace_file(trace_path);
    params = abr_params_from_json_text(read_file(params_path));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  std::vector<Violation> violations;
  try {
    violations = role == "source" ? check_source_trace(trace, params)
                                  : check_dest_trace(trace, params);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  std::map<std::string, int> by_rule;
  int hard = 0;
  for (const Violation& v : violations) {
    out << to_string(v) << "\n";
    ++by_rule[v.rule];
    if (!v.warning) ++hard;
  }
  int warnings = static_cast<int>(violations.size()) - hard;
  if (!by_rule.empty()) {
    out << "rule counts:";
    for (const auto& [rule, count] : by_rule) out << " " << rule << "=" << count;
    out << "\n";
  }
  out << trace.size() << " records, " << hard << " violations, " << warnings
      << " warnings\n";
  return hard > 0 ? kViolations : kOk;
}

int cmd_decode(const std::string& hex, std::ostream& out, std::ostream& err) {
  auto bytes = from_hex(hex);
  if (!bytes) {
    err << "error: expected " << 2 * kCellBytes
        << " hex characters (53 octets), got " << hex.size() << "\n";
    return kInputError;
  }
  ParseOutcome outcome = parse(*bytes);
  if (outcome.cell) print_cell(*outcome.cell, out);
  for (CellIssue issue : outcome.issues) out << "  issue: " << to_string(issue) << "\n";
  if (!outcome.ok()) {
    out << "cell is NOT a valid resource management cell\n";
    return kViolations;
  }
  out << "cell is a valid resource management cell\n";
  return kOk;
}

}  // namespace abr::cli
