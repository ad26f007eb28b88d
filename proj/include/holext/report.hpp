#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "holext/config.hpp"

namespace holext {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigError = 2;

/// verify-sequences, weight-table, lemma-scan, phi-check, extend-eval,
/// cauchy-recover, roundtrip, report.
const std::vector<std::string>& commands();

/// Runs one command and writes <out>/<command>.json plus its CSV tables.
/// Returns kExitPass when every check passes, kExitCheckFailed when a
/// mathematical check fails and kExitConfigError for unknown commands or
/// configuration problems found while building the run. Progress and errors
/// go to `log`.
int run(const std::string& command, const RunConfig& config, std::ostream& log);

/// 17 significant digits, as used for every CSV cell.
std::string format_number(double v);

}  // namespace holext
