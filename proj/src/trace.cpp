#include "abr/trace.hpp"

#include <fstream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace abr {

using nlohmann::json;

std::string to_json_line(const TraceRecord& r) {
  json j;
  j["t"] = r.t;
  j["pt"] = r.point;
  j["ev"] = r.event;
  j["vc"] = r.vc;
  j["k"] = r.kind;
  if (r.kind != "data") {
    j["dir"] = r.dir;
    j["ci"] = r.ci;
    j["ni"] = r.ni;
    j["bn"] = r.bn;
    j["er"] = r.er;
    j["ccr"] = r.ccr;
    j["mcr"] = r.mcr;
  }
  j["clp"] = r.clp;
  if (r.kind == "data") j["efci"] = r.efci;
  if (r.acr) j["acr"] = *r.acr;
  if (r.cells_since_frm) j["csf"] = *r.cells_since_frm;
  if (r.frms_since_brm) j["fsb"] = *r.frms_since_brm;
  if (r.seq) j["seq"] = *r.seq;
  return j.dump();
}

TraceRecord trace_record_from_json(const std::string& line) {
  json j = json::parse(line);
  TraceRecord r;
  r.t = j.at("t").get<SimTime>();
  r.point = j.at("pt").get<std::string>();
  r.event = j.at("ev").get<std::string>();
  r.vc = j.at("vc").get<int>();
  r.kind = j.at("k").get<std::string>();
  r.clp = j.value("clp", 0);
  r.efci = j.value("efci", 0);
  if (r.kind != "data") {
    r.dir = j.value("dir", r.kind == "brm" ? 1 : 0);
    r.ci = j.value("ci", 0);
    r.ni = j.value("ni", 0);
    r.bn = j.value("bn", 0);
    r.er = j.value("er", 0.0);
    r.ccr = j.value("ccr", 0.0);
    r.mcr = j.value("mcr", 0.0);
  }
  if (j.contains("acr")) r.acr = j["acr"].get<double>();
  if (j.contains("csf")) r.cells_since_frm = j["csf"].get<std::int64_t>();
  if (j.contains("fsb")) r.frms_since_brm = j["fsb"].get<std::int64_t>();
  if (j.contains("seq")) r.seq = j["seq"].get<std::int64_t>();
  return r;
}

void write_trace(std::ostream& os, const std::vector<TraceRecord>& trace) {
  for (const auto& rec : trace) os << to_json_line(rec) << '\n';
}

std::vector<TraceRecord> load_trace(std::istream& is) {
  std::vector<TraceRecord> out;
  std::string line;
  std::size_t lineno = 0;
  SimTime last_t = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    TraceRecord rec;
    try {
      rec = trace_record_from_json(line);
    } catch (const json::exception& e) {
      throw std::runtime_error("trace line " + std::to_string(lineno) + ": " + e.what());
    }
    if (rec.t < last_t)
      throw std::runtime_error("trace line " + std::to_string(lineno) +
                               ": timestamps go backwards");
    last_t = rec.t;
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<TraceRecord> load_trace_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open trace file " + path);
  return load_trace(f);
}

}  // namespace abr
