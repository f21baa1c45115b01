#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace abr {

// Simulation clock: integer nanoseconds. All protocol timers (Trm, ADTF,
// propagation delays, service times) are held in this unit so that runs are
// reproducible bit-for-bit.
using SimTime = std::int64_t;

constexpr SimTime kNanosPerSec = 1'000'000'000;

constexpr SimTime ms_to_ns(double ms) {
  return static_cast<SimTime>(ms * 1e6 + 0.5);
}

constexpr double ns_to_sec(SimTime ns) {
  return static_cast<double>(ns) / 1e9;
}

// Inter-cell gap for a rate in cells/s. Rounds up so that emitting one cell
// per interval can never exceed the rate. A non-positive rate has no finite
// interval; callers must test for that before scheduling.
inline SimTime rate_to_interval(double cells_per_sec) {
  return static_cast<SimTime>(std::ceil(1e9 / cells_per_sec));
}

// Minimum-gap rate limiter: allows one event per 1/rate seconds, which bounds
// the emission rate in every window. Used for the out-of-rate FRM budget
// (TCR) and the BECN budgets at destinations and switches.
class TokenGate {
 public:
  TokenGate() = default;
  explicit TokenGate(double events_per_sec)
      : period_(events_per_sec > 0 ? rate_to_interval(events_per_sec)
                                   : std::numeric_limits<SimTime>::max()) {}

  bool ready(SimTime now) const { return now >= next_allowed_; }

  // Consumes the token if available.
  bool try_take(SimTime now) {
    if (!ready(now)) return false;
    next_allowed_ = now + period_;
    return true;
  }

  SimTime next_allowed() const { return next_allowed_; }
  SimTime period() const { return period_; }

 private:
  SimTime period_ = std::numeric_limits<SimTime>::max();
  SimTime next_allowed_ = 0;
};

}  // namespace abr
