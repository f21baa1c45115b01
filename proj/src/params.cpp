#include "abr/params.hpp"

#include <stdexcept>

#include "abr/rate_codec.hpp"

namespace abr {

std::int64_t derive_crm(std::int64_t tbe, std::int64_t nrm) {
  if (nrm < 2) throw std::invalid_argument("nrm must be at least 2");
  if (tbe < 0) throw std::invalid_argument("tbe must be non-negative");
  return (tbe + nrm - 1) / nrm;
}

double effective_icr(double icr, std::int64_t tbe, SimTime frtt_ns) {
  if (frtt_ns <= 0) return icr;
  double cap = static_cast<double>(tbe) / ns_to_sec(frtt_ns);
  return icr < cap ? icr : cap;
}

std::vector<ParamIssue> validate(const AbrParams& p) {
  std::vector<ParamIssue> issues;
  auto bad = [&](const char* field, const std::string& msg) {
    issues.push_back({field, msg});
  };

  if (!(p.pcr > 0)) bad("pcr", "must be positive");
  if (p.pcr > kMaxRate16) bad("pcr", "exceeds the 16-bit rate format maximum");
  if (p.mcr < 0) bad("mcr", "must be non-negative");
  if (p.icr < p.mcr) bad("icr", "must be at least mcr");
  if (p.icr > p.pcr) bad("icr", "must not exceed pcr");
  if (p.mcr > p.pcr) bad("mcr", "must not exceed pcr");
  if (p.tcr < 0) bad("tcr", "must be non-negative");
  if (p.nrm < 2) bad("nrm", "must be at least 2");
  if (p.mrm < 1) bad("mrm", "must be at least 1");
  if (p.nrm >= 2 && p.mrm > p.nrm - 1) bad("mrm", "must leave room for an FRM per nrm block");
  if (p.trm_ns <= 0) bad("trm", "must be positive");
  if (p.adtf_ns < 0) bad("adtf", "must be non-negative");
  if (!(p.rif > 0) || p.rif > 1) bad("rif", "must be in (0, 1]");
  if (!(p.rdf > 0) || p.rdf > 1) bad("rdf", "must be in (0, 1]");
  if (p.cdf < 0 || p.cdf > 1) bad("cdf", "must be in [0, 1]");
  if (p.tbe < 0) bad("tbe", "must be non-negative");
  if (p.frtt_ns < 0) bad("frtt", "must be non-negative");
  return issues;
}

AbrParams resolve(AbrParams p) {
  if (p.icr == 0) p.icr = p.pcr;  // 0 means "not negotiated"
  auto issues = validate(p);
  if (!issues.empty()) {
    std::string msg = "invalid ABR parameters:";
    for (const auto& i : issues) msg += " " + i.field + " " + i.message + ";";
    throw std::invalid_argument(msg);
  }
  return p;
}

}  // namespace abr
