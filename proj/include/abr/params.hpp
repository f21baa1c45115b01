#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "abr/types.hpp"

namespace abr {

// Negotiated ABR parameter set for one connection. Defaults are the TM4.0
// signalling defaults; rates are cells/s and times are nanoseconds. RIF, RDF
// and CDF are powers of two in practice (1/16 here), which doubles represent
// exactly, so rate arithmetic is reproducible across IEEE-754 platforms.
struct AbrParams {
  double pcr = 0;    // peak cell rate, required
  double mcr = 0;    // minimum cell rate
  double icr = 0;    // initial cell rate; resolve() defaults it to pcr
  double tcr = 10;   // out-of-rate FRM rate cap, cells/s

  std::int64_t nrm = 32;  // in-rate cells per FRM
  std::int64_t mrm = 2;   // minimum in-rate cells between FRMs
  SimTime trm_ns = ms_to_ns(100);
  SimTime adtf_ns = ms_to_ns(500);  // ACR decrease time factor

  double rif = 1.0 / 16;  // rate increase factor
  double rdf = 1.0 / 16;  // rate decrease factor
  double cdf = 1.0 / 16;  // cutoff decrease factor; 0 disables the CRM rule

  std::int64_t tbe = 16'777'215;  // transient buffer exposure, cells
  SimTime frtt_ns = 0;            // fixed round-trip time; 0 = unconstrained
};

// Missed-feedback threshold: in-rate FRMs sent without a BN=0 BRM reply
// before each further FRM cuts ACR by CDF. Ceiling division; requires nrm >= 2.
std::int64_t derive_crm(std::int64_t tbe, std::int64_t nrm);

// ICR actually used at start-up: the negotiated ICR capped so that TBE cells
// fit into one round trip. frtt_ns == 0 means the cap does not apply.
double effective_icr(double icr, std::int64_t tbe, SimTime frtt_ns);

struct ParamIssue {
  std::string field;
  std::string message;
};

// Range and consistency checks (0 <= mcr <= icr <= pcr, factor ranges,
// counter ranges). Returns every problem found.
std::vector<ParamIssue> validate(const AbrParams& p);

// Applies defaults that depend on other fields (icr := pcr when unset) and
// throws std::invalid_argument listing all problems if validation fails.
AbrParams resolve(AbrParams p);

// Convenience for tests and direct engine use.
inline AbrParams default_params(double pcr) {
  AbrParams p;
  p.pcr = pcr;
  p.icr = pcr;
  return p;
}

}  // namespace abr
