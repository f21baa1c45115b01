#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace abr::cli {

// Exit statuses shared by all commands.
constexpr int kOk = 0;
constexpr int kViolations = 1;  // rule violations found / cell invalid
constexpr int kInputError = 2;  // unreadable/malformed inputs, bad flags
constexpr int kRuntimeError = 3;

struct RunOptions {
  std::string scenario_path;
  std::string trace_path;    // empty: <scenario name>.trace.jsonl
  std::string metrics_path;  // empty: <scenario name>.metrics.json
  std::optional<double> stop_ms;
  std::optional<std::uint64_t> seed;
};

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);

int cmd_check(const std::string& trace_path, const std::string& params_path,
              const std::string& role, std::ostream& out, std::ostream& err);

int cmd_decode(const std::string& hex, std::ostream& out, std::ostream& err);

}  // namespace abr::cli
