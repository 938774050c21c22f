#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stocsens/cli/config.hpp"

namespace stocsens::cli {

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitConfig = 2, kExitSolver = 3 };

/// One CSV row of `sens`.
struct ReportRow {
  std::string label;
  double adjoint_value = 0.0;
  double fd_value = 0.0;
  double abs_gap = 0.0;
  double rel_gap = 0.0;
  std::optional<double> mc_stderr;
  double runtime_ms = 0.0;
};

inline constexpr const char* kCsvHeader =
    "label,adjoint_value,fd_value,abs_gap,rel_gap,mc_stderr,runtime_ms";

nlohmann::json run_solve_lq(const RunConfig& cfg);
nlohmann::json run_solve_mv(const RunConfig& cfg);
std::vector<ReportRow> run_sens(const RunConfig& cfg);

struct CheckOutcome {
  std::string name;
  std::string status;  ///< pass | fail | skipped
  nlohmann::json detail;
};

std::vector<CheckOutcome> run_check(const RunConfig& cfg);

/// Header plus one line per row, numbers with 17 significant digits, empty
/// mc_stderr for deterministic quadrature.
std::string format_csv(const std::vector<ReportRow>& rows);
nlohmann::json rows_json(const std::vector<ReportRow>& rows);
nlohmann::json checks_json(const std::vector<CheckOutcome>& checks);

/// Writes through a temporary file in the target directory and renames it
/// into place.
void write_atomic(const std::string& path, const std::string& content);

/// Command-line entry point; returns the process exit code.
int run(int argc, char** argv);

}  // namespace stocsens::cli
