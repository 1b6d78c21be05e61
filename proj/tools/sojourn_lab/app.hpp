#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "config.hpp"

namespace lab {

enum ExitCode { kOk = 0, kAssertionFailed = 1, kConfigError = 2, kNumericalFailure = 3 };

struct RunResult {
  int exit_code = kOk;
  json report;
  std::string report_path;  // empty when nothing was written
  std::string table_path;
};

/// Runs one scenario and writes its report (and table, for sweeps) into out_dir.
/// Library exceptions propagate; execute() maps them to exit codes.
RunResult run(const ScenarioConfig& cfg, const std::string& out_dir);

/// Writes the kappa-sweep table of a report as CSV. Header only when the report has no sweep rows.
void emit_tables(const json& report, const std::string& path);

inline constexpr const char* kSweepColumns[] = {"kappa",      "lambda2",       "gamma_fgr", "delta_e",
                                                "sojourn_lb", "sojourn_trunc", "ratio"};

/// Full command: load, run, map errors to exit codes, print a one-line summary.
int execute(const std::string& scenario, const std::optional<std::string>& config_path,
            const std::string& out_dir, std::optional<std::uint64_t> seed, std::ostream& out,
            std::ostream& err);

/// Finite numbers as JSON numbers, the rest as "inf", "-inf" or "nan".
json num(double x);
/// Inverse of num(); throws on anything else.
double from_num(const json& v);

}  // namespace lab
